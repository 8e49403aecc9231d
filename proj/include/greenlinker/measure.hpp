#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "greenlinker/loop.hpp"
#include "greenlinker/rational.hpp"
#include "greenlinker/skew.hpp"

namespace greenlinker {

/// Endpoints of uniformly random backward branches.
struct EmpiricalMeasure {
  std::vector<Cx> points;
  std::uint64_t seed = 0;
  int depth = 0;
  int count = 0;
  /// Branch steps redone after a root-finder failure.
  int failures = 0;
};

/// Samples of the maximal-entropy measure of g: depth preimage steps from
/// basepoint, each through a uniformly chosen root. Sample i draws from its
/// own stream derived from (seed, i), so output is independent of threads.
EmpiricalMeasure brolin_sample(const Poly1& g, Cx basepoint, int depth, int count, std::uint64_t seed,
                               int threads = 1);

/// Samples of the harmonic measure of K_{z0}: basepoint lives in the fiber
/// over z_depth and is pulled back through q_{z_{depth-1}}, ..., q_{z_0}.
EmpiricalMeasure brolin_sample_fiber(const SkewProduct& f, Cx z0, Cx basepoint, int depth, int count,
                                     std::uint64_t seed, int threads = 1);

struct MassEstimate {
  double estimate = 0.0;
  double stderr_ = 0.0;
  int used = 0;
  int discarded = 0;
};

/// Fraction of samples about which the loop has odd winding number, with
/// binomial standard error. Samples within discard_tol of the loop are dropped.
MassEstimate estimate_enclosed_mass(const EmpiricalMeasure& m, const OrientedLoop& loop, double discard_tol = 1e-9,
                                    int threads = 1);

/// First level n <= n_max whose nearest k / d^n is within 3 stderr while the
/// second-nearest candidate at that level is more than 6 stderr away.
std::optional<Mod1Rational> snap_to_dyadic(double estimate, double stderr_, int d, int n_max);

/// Seed of the per-sample generator.
std::uint64_t sample_stream_seed(std::uint64_t seed, std::uint64_t index) noexcept;

}  // namespace greenlinker
