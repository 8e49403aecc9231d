#pragma once

#include <span>
#include <vector>

#include "greenlinker/numerics.hpp"

// Escape-time inner loops. Each kernel has a scalar reference and an AVX2
// variant; both perform the same IEEE operations in the same order, so their
// labels agree exactly.
namespace greenlinker::kernels {

enum class Isa { scalar, avx2 };

const char* to_string(Isa isa) noexcept;
bool avx2_available() noexcept;
/// AVX2 when the CPU has it, unless GREENLINKER_ISA=scalar.
Isa active_isa() noexcept;

/// Monic fiber maps along a base orbit: step k applies
/// w -> w^d + sum_j lower[k * degree + j] w^j.
struct FiberStepTable {
  int degree = 2;
  int steps = 0;
  std::vector<Cx> lower;
  double radius = 2.0;
};

/// out[i] = smallest k in [0, steps] with |w_k| > radius, or -1 if none.
void fiber_escape_steps(const FiberStepTable& table, std::span<const Cx> w0, std::span<int> out,
                        Isa isa = active_isa());

/// Critical orbits of w^2 + a from w_0 = 0. escape[i] is the first k in
/// [1, max_iter] with |w_k| > 2, or -1. For bounded lanes tails holds
/// w_{max_iter - tail_len + 1} .. w_{max_iter} at [i * tail_len, (i + 1) * tail_len).
void quadratic_orbits(std::span<const Cx> a, int max_iter, int tail_len, std::span<int> escape,
                      std::span<Cx> tails, Isa isa = active_isa());

namespace detail {
void fiber_escape_steps_scalar(const FiberStepTable&, std::span<const Cx>, std::span<int>);
void fiber_escape_steps_avx2(const FiberStepTable&, std::span<const Cx>, std::span<int>);
void quadratic_orbits_scalar(std::span<const Cx>, int, int, std::span<int>, std::span<Cx>);
void quadratic_orbits_avx2(std::span<const Cx>, int, int, std::span<int>, std::span<Cx>);
}  // namespace detail

}  // namespace greenlinker::kernels
