#include "greenlinker/kernels.hpp"

namespace greenlinker::kernels::detail {

void fiber_escape_steps_scalar(const FiberStepTable& t, std::span<const Cx> w0, std::span<int> out) {
  const double r2 = t.radius * t.radius;
  const int d = t.degree;
  for (std::size_t i = 0; i < w0.size(); ++i) {
    double wr = w0[i].real(), wi = w0[i].imag();
    int res = -1;
    for (int k = 0; k <= t.steps; ++k) {
      if (wr * wr + wi * wi > r2) {
        res = k;
        break;
      }
      if (k == t.steps) break;
      const Cx* c = t.lower.data() + static_cast<std::size_t>(k) * d;
      double ar = 1.0, ai = 0.0;
      for (int j = d - 1; j >= 0; --j) {
        const double pr = ar * wr - ai * wi;
        const double pi = ar * wi + ai * wr;
        ar = pr + c[j].real();
        ai = pi + c[j].imag();
      }
      wr = ar;
      wi = ai;
    }
    out[i] = res;
  }
}

void quadratic_orbits_scalar(std::span<const Cx> a, int max_iter, int tail_len, std::span<int> escape,
                             std::span<Cx> tails) {
  const int tail_start = max_iter - tail_len + 1;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double cr = a[i].real(), ci = a[i].imag();
    double wr = 0.0, wi = 0.0;
    int res = -1;
    Cx* tail = tails.data() + i * static_cast<std::size_t>(tail_len);
    for (int k = 1; k <= max_iter; ++k) {
      const double pr = wr * wr - wi * wi;
      const double pi = wr * wi + wi * wr;
      wr = pr + cr;
      wi = pi + ci;
      if (wr * wr + wi * wi > 4.0) {
        res = k;
        break;
      }
      if (k >= tail_start) tail[k - tail_start] = Cx(wr, wi);
    }
    escape[i] = res;
  }
}

}  // namespace greenlinker::kernels::detail
