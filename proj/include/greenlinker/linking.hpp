#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "greenlinker/loop.hpp"
#include "greenlinker/rational.hpp"
#include "greenlinker/skew.hpp"

namespace greenlinker {

struct LinkingOptions {
  int initial_samples = 512;
  int max_samples = 1 << 23;
  /// Escape search depth; the certificate depth is the last escape step
  /// plus extra_depth.
  int max_depth = 200;
  int extra_depth = 2;
  /// Extra depth increments tried when W_{n+1} != d W_n.
  int stabilization_retries = 3;
};

/// Record of an exact winding computation: W is the winding number about 0
/// of the depth-n orbit image of the loop. The result is W / d^n.
struct WindingCertificate {
  int depth = 0;
  std::int64_t winding = 0;
  std::int64_t winding_next = 0;
  bool stabilization_checked = false;
  /// Smallest log|w_n| over the final sample set.
  double min_image_log_modulus = 0.0;
  int samples = 0;
  int initial_samples = 0;
  int max_escape_step = -1;
  /// Non-empty for results not backed by escaping images.
  std::string reason;
};

struct LinkResult {
  Mod1Rational lk;
  /// W / d^n before reduction mod 1: the enclosed mass for a simple
  /// positively oriented loop.
  Rational pairing;
  WindingCertificate cert;
};

/// Linking number of a loop in the fiber over ctx.z0 with the Green current.
LinkResult linking_fiber(const SkewProduct& f, const FiberContext& ctx, const OrientedLoop& loop,
                         const LinkingOptions& opts = {});

/// Linking number of a plane loop with the maximal-entropy measure of g.
LinkResult linking_poly_1d(const Poly1& g, const OrientedLoop& loop, const LinkingOptions& opts = {});

/// Linking with T for a loop in the line at infinity, given in the chart of
/// restriction_at_infinity. Throws UnsupportedError for rational restrictions.
LinkResult linking_at_infinity(const PolyEndo2& endo, const OrientedLoop& loop, const LinkingOptions& opts = {});

struct PushForwardOptions {
  int initial_points = 1024;
  int max_points = 1 << 20;
  /// Refine until |q(mid) - chord midpoint| <= geometric_tol * scale.
  double geometric_tol = 1e-7;
};

/// Image polyline of a fiber loop under q_{z0}, in the fiber over p(z0).
OrientedLoop push_forward_loop(const SkewProduct& f, const OrientedLoop& loop, const PushForwardOptions& opts = {});
/// Image polyline of a plane loop under g.
OrientedLoop push_forward_loop(const Poly1& g, const OrientedLoop& loop, const PushForwardOptions& opts = {});

struct LiftOptions {
  /// Minimum distance between the loop and any critical value.
  double margin = 1e-7;
  /// Vertex spacing of the flattened source loop, relative to its length.
  double relative_step = 1.0 / 4096.0;
  double newton_tol = 1e-13;
};

struct LiftedLoop {
  OrientedLoop loop;
  int covering_degree = 1;
};

struct LiftBundle {
  std::vector<LiftedLoop> loops;
  Cx source_fiber;  ///< z0
  Cx target_fiber;  ///< z1, p(z1) = z0
  double max_residual = 0.0;
  int continuation_steps = 0;
};

/// Preimage of a loop in fiber p(z1) under q_{z1}, assembled from root
/// continuation and the monodromy permutation.
LiftBundle lift_loop(const SkewProduct& f, Cx z1, const OrientedLoop& loop, const LiftOptions& opts = {});
/// One-variable version: preimage of a plane loop under g.
LiftBundle lift_loop(const Poly1& g, const OrientedLoop& loop, const LiftOptions& opts = {});

/// Critical values of q_{z_next} enclosed by the loop (nonzero winding),
/// with multiplicity. Throws PerturbationRequiredError within margin.
int count_enclosed_critical_values(const SkewProduct& f, Cx z_next, const OrientedLoop& loop, double margin = 1e-7);

using BackwardChooser = std::function<Cx(Cx)>;

/// Root of p(z) - target of largest modulus, ties broken by the smallest
/// argument in [0, 2 pi).
BackwardChooser default_backward_chooser(const Poly1& p);

struct SequenceOptions {
  LinkingOptions linking;
  LiftOptions lift;
  int max_jitter = 8;
  double jitter_step = 1e-6;
};

struct SequenceStep {
  int index = 0;
  Cx base_point;
  OrientedLoop loop;
  LinkResult link;
  /// Covering degree of q_{z_n} on this loop (1 for the seed).
  int covering_degree = 1;
  /// Critical values of the next fiber map enclosed by this loop.
  int enclosed_next_critical_values = 0;
  int jitter_retries = 0;
  /// pairing == k / d * previous pairing, checked exactly.
  bool pairing_identity = true;
};

struct LinkingSequence {
  std::vector<SequenceStep> steps;
  bool truncated = false;
  std::string diagnostic;
  /// pairing_n <= ((d-1)/d)^n * pairing_0 for every step.
  bool contraction_holds = true;
};

LinkingSequence generate_linking_sequence(const SkewProduct& f, Cx z0, const OrientedLoop& seed, int steps,
                                          const BackwardChooser& chooser = {}, const SequenceOptions& opts = {});

}  // namespace greenlinker
