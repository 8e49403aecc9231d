#include <immintrin.h>

#include <array>

#include "greenlinker/kernels.hpp"

namespace greenlinker::kernels::detail {

namespace {

constexpr std::size_t kLanes = 4;

}  // namespace

__attribute__((target("avx2"))) void fiber_escape_steps_avx2(const FiberStepTable& t, std::span<const Cx> w0,
                                                             std::span<int> out) {
  const __m256d r2 = _mm256_set1_pd(t.radius * t.radius);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d zero = _mm256_setzero_pd();
  const int d = t.degree;
  for (std::size_t base = 0; base < w0.size(); base += kLanes) {
    const std::size_t n = std::min(kLanes, w0.size() - base);
    alignas(32) std::array<double, kLanes> re{}, im{};
    for (std::size_t l = 0; l < n; ++l) {
      re[l] = w0[base + l].real();
      im[l] = w0[base + l].imag();
    }
    __m256d wr = _mm256_load_pd(re.data());
    __m256d wi = _mm256_load_pd(im.data());
    std::array<int, kLanes> res{-1, -1, -1, -1};
    int live = (1 << n) - 1;
    for (int k = 0; k <= t.steps && live; ++k) {
      const __m256d m2 = _mm256_add_pd(_mm256_mul_pd(wr, wr), _mm256_mul_pd(wi, wi));
      const int esc = _mm256_movemask_pd(_mm256_cmp_pd(m2, r2, _CMP_GT_OQ)) & live;
      if (esc) {
        for (std::size_t l = 0; l < kLanes; ++l)
          if (esc & (1 << l)) res[l] = k;
        live &= ~esc;
      }
      if (k == t.steps || !live) break;
      const Cx* c = t.lower.data() + static_cast<std::size_t>(k) * d;
      __m256d ar = one, ai = zero;
      for (int j = d - 1; j >= 0; --j) {
        const __m256d pr = _mm256_sub_pd(_mm256_mul_pd(ar, wr), _mm256_mul_pd(ai, wi));
        const __m256d pi = _mm256_add_pd(_mm256_mul_pd(ar, wi), _mm256_mul_pd(ai, wr));
        ar = _mm256_add_pd(pr, _mm256_set1_pd(c[j].real()));
        ai = _mm256_add_pd(pi, _mm256_set1_pd(c[j].imag()));
      }
      // Freeze lanes that already left so they cannot overflow into NaN.
      const __m256d keep = _mm256_castsi256_pd(_mm256_set_epi64x(
          (live & 8) ? -1 : 0, (live & 4) ? -1 : 0, (live & 2) ? -1 : 0, (live & 1) ? -1 : 0));
      wr = _mm256_blendv_pd(wr, ar, keep);
      wi = _mm256_blendv_pd(wi, ai, keep);
    }
    for (std::size_t l = 0; l < n; ++l) out[base + l] = res[l];
  }
}

__attribute__((target("avx2"))) void quadratic_orbits_avx2(std::span<const Cx> a, int max_iter, int tail_len,
                                                           std::span<int> escape, std::span<Cx> tails) {
  const __m256d four = _mm256_set1_pd(4.0);
  const int tail_start = max_iter - tail_len + 1;
  for (std::size_t base = 0; base < a.size(); base += kLanes) {
    const std::size_t n = std::min(kLanes, a.size() - base);
    alignas(32) std::array<double, kLanes> re{}, im{};
    for (std::size_t l = 0; l < n; ++l) {
      re[l] = a[base + l].real();
      im[l] = a[base + l].imag();
    }
    const __m256d cr = _mm256_load_pd(re.data());
    const __m256d ci = _mm256_load_pd(im.data());
    __m256d wr = _mm256_setzero_pd(), wi = _mm256_setzero_pd();
    std::array<int, kLanes> res{-1, -1, -1, -1};
    int live = (1 << n) - 1;
    for (int k = 1; k <= max_iter && live; ++k) {
      const __m256d pr = _mm256_sub_pd(_mm256_mul_pd(wr, wr), _mm256_mul_pd(wi, wi));
      const __m256d pi = _mm256_add_pd(_mm256_mul_pd(wr, wi), _mm256_mul_pd(wi, wr));
      const __m256d nr = _mm256_add_pd(pr, cr);
      const __m256d ni = _mm256_add_pd(pi, ci);
      const __m256d keep = _mm256_castsi256_pd(_mm256_set_epi64x(
          (live & 8) ? -1 : 0, (live & 4) ? -1 : 0, (live & 2) ? -1 : 0, (live & 1) ? -1 : 0));
      wr = _mm256_blendv_pd(wr, nr, keep);
      wi = _mm256_blendv_pd(wi, ni, keep);
      const __m256d m2 = _mm256_add_pd(_mm256_mul_pd(wr, wr), _mm256_mul_pd(wi, wi));
      const int esc = _mm256_movemask_pd(_mm256_cmp_pd(m2, four, _CMP_GT_OQ)) & live;
      if (esc) {
        for (std::size_t l = 0; l < kLanes; ++l)
          if (esc & (1 << l)) res[l] = k;
        live &= ~esc;
      }
      if (k >= tail_start) {
        _mm256_store_pd(re.data(), wr);
        _mm256_store_pd(im.data(), wi);
        for (std::size_t l = 0; l < n; ++l)
          if (live & (1 << l)) tails[(base + l) * static_cast<std::size_t>(tail_len) + (k - tail_start)] = Cx(re[l], im[l]);
      }
    }
    for (std::size_t l = 0; l < n; ++l) escape[base + l] = res[l];
  }
}

}  // namespace greenlinker::kernels::detail
