#include <cstdlib>
#include <string_view>

#include "greenlinker/kernels.hpp"

namespace greenlinker::kernels {

const char* to_string(Isa isa) noexcept { return isa == Isa::avx2 ? "avx2" : "scalar"; }

bool avx2_available() noexcept {
  static const bool has = __builtin_cpu_supports("avx2");
  return has;
}

Isa active_isa() noexcept {
  static const Isa isa = [] {
    const char* env = std::getenv("GREENLINKER_ISA");
    if (env && std::string_view(env) == "scalar") return Isa::scalar;
    return avx2_available() ? Isa::avx2 : Isa::scalar;
  }();
  return isa;
}

void fiber_escape_steps(const FiberStepTable& table, std::span<const Cx> w0, std::span<int> out, Isa isa) {
  if (out.size() < w0.size()) throw ValidationError("fiber_escape_steps: output span too small");
  if (table.degree < 1 || table.lower.size() < static_cast<std::size_t>(table.steps) * table.degree)
    throw ValidationError("fiber_escape_steps: coefficient table too small");
  if (isa == Isa::avx2 && avx2_available())
    detail::fiber_escape_steps_avx2(table, w0, out);
  else
    detail::fiber_escape_steps_scalar(table, w0, out);
}

void quadratic_orbits(std::span<const Cx> a, int max_iter, int tail_len, std::span<int> escape,
                      std::span<Cx> tails, Isa isa) {
  if (max_iter < 1 || tail_len < 1 || tail_len > max_iter)
    throw ValidationError("quadratic_orbits: need 1 <= tail_len <= max_iter");
  if (escape.size() < a.size() || tails.size() < a.size() * static_cast<std::size_t>(tail_len))
    throw ValidationError("quadratic_orbits: output span too small");
  if (isa == Isa::avx2 && avx2_available())
    detail::quadratic_orbits_avx2(a, max_iter, tail_len, escape, tails);
  else
    detail::quadratic_orbits_scalar(a, max_iter, tail_len, escape, tails);
}

}  // namespace greenlinker::kernels
