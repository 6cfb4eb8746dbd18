// AVX2 variants. Compiled with -mavx2 only; dispatch in kernels.cpp guards
// execution on CPUs without AVX2. No FMA and no reassociation: every element
// sees the same IEEE operation sequence as the scalar reference, so outputs
// are bit-identical.

#if defined(__x86_64__)

#include <immintrin.h>

#include <cstdint>
#include <limits>

#include "arbsim/kernels.hpp"

namespace arbsim::kernels::avx2 {

void clamp_ranges(std::span<double> v, double lo, double hi) {
  const std::size_t n = v.size();
  double* p = v.data();
  const __m256d vlo = _mm256_set1_pd(lo);
  const __m256d vhi = _mm256_set1_pd(hi);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d x = _mm256_loadu_pd(p + i);
    const __m256d gt = _mm256_cmp_pd(x, vhi, _CMP_GT_OQ);
    x = _mm256_blendv_pd(x, vhi, gt);
    const __m256d lt = _mm256_cmp_pd(_mm256_loadu_pd(p + i), vlo, _CMP_LT_OQ);
    x = _mm256_blendv_pd(x, vlo, lt);
    _mm256_storeu_pd(p + i, x);
  }
  for (; i < n; ++i) p[i] = p[i] < lo ? lo : (p[i] > hi ? hi : p[i]);
}

void box_smooth(std::span<const double> in, std::span<double> out, int halfwin) {
  const int n = static_cast<int>(in.size());
  const int w = 2 * halfwin + 1;
  // truncated windows at the edges stay scalar
  auto edge = [&](int i) {
    const int a = i - halfwin < 0 ? 0 : i - halfwin;
    const int b = i + halfwin >= n ? n - 1 : i + halfwin;
    double s = 0.0;
    for (int j = a; j <= b; ++j) s += in[j];
    out[i] = s / static_cast<double>(b - a + 1);
  };
  const int lo = halfwin;
  const int hi = n - 1 - halfwin;  // inclusive interior bound
  for (int i = 0; i < n && i < lo; ++i) edge(i);
  int i = lo;
  const __m256d div = _mm256_set1_pd(static_cast<double>(w));
  for (; i + 4 <= hi + 1; i += 4) {
    __m256d acc = _mm256_setzero_pd();
    for (int j = -halfwin; j <= halfwin; ++j)
      acc = _mm256_add_pd(acc, _mm256_loadu_pd(in.data() + i + j));
    _mm256_storeu_pd(out.data() + i, _mm256_div_pd(acc, div));
  }
  for (; i <= hi; ++i) edge(i);
  for (int k = hi + 1 > lo ? hi + 1 : lo; k < n; ++k) edge(k);
}

std::size_t min_index(std::span<const double> v) {
  const std::size_t n = v.size();
  const double* p = v.data();
  std::size_t i = 0;
  double best_val = p[0];
  std::size_t best_idx = 0;
  if (n >= 8) {
    __m256d bv = _mm256_loadu_pd(p);
    __m256i bi = _mm256_set_epi64x(3, 2, 1, 0);
    __m256i idx = bi;
    const __m256i four = _mm256_set1_epi64x(4);
    for (i = 4; i + 4 <= n; i += 4) {
      idx = _mm256_add_epi64(idx, four);
      const __m256d x = _mm256_loadu_pd(p + i);
      const __m256d lt = _mm256_cmp_pd(x, bv, _CMP_LT_OQ);
      bv = _mm256_blendv_pd(bv, x, lt);
      bi = _mm256_castpd_si256(_mm256_blendv_pd(_mm256_castsi256_pd(bi),
                                                _mm256_castsi256_pd(idx), lt));
    }
    alignas(32) double vals[4];
    alignas(32) int64_t idxs[4];
    _mm256_store_pd(vals, bv);
    _mm256_store_si256(reinterpret_cast<__m256i*>(idxs), bi);
    best_val = vals[0];
    for (int l = 1; l < 4; ++l)
      if (vals[l] < best_val) best_val = vals[l];
    std::size_t cand = std::numeric_limits<std::size_t>::max();
    for (int l = 0; l < 4; ++l)
      if (vals[l] == best_val && static_cast<std::size_t>(idxs[l]) < cand)
        cand = static_cast<std::size_t>(idxs[l]);
    best_idx = cand;
  } else {
    i = 1;
    for (; i < n; ++i)
      if (p[i] < best_val) {
        best_val = p[i];
        best_idx = i;
      }
    return best_idx;
  }
  for (; i < n; ++i)
    if (p[i] < best_val) {
      best_val = p[i];
      best_idx = i;
    }
  return best_idx;
}

double min_value(std::span<const double> v) {
  const std::size_t n = v.size();
  const double* p = v.data();
  __m256d bv = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) bv = _mm256_min_pd(bv, _mm256_loadu_pd(p + i));
  alignas(32) double vals[4];
  _mm256_store_pd(vals, bv);
  double best = vals[0];
  for (int l = 1; l < 4; ++l)
    if (vals[l] < best) best = vals[l];
  for (; i < n; ++i)
    if (p[i] < best) best = p[i];
  return best;
}

double min_pairwise_dist2(std::span<const double> ax, std::span<const double> ay,
                          std::span<const double> bx, std::span<const double> by) {
  const std::size_t na = ax.size(), nb = bx.size();
  __m256d best4 = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  double best_tail = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < na; ++i) {
    const __m256d axi = _mm256_set1_pd(ax[i]);
    const __m256d ayi = _mm256_set1_pd(ay[i]);
    std::size_t j = 0;
    for (; j + 4 <= nb; j += 4) {
      const __m256d dx = _mm256_sub_pd(axi, _mm256_loadu_pd(bx.data() + j));
      const __m256d dy = _mm256_sub_pd(ayi, _mm256_loadu_pd(by.data() + j));
      const __m256d d2 = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
      best4 = _mm256_min_pd(best4, d2);
    }
    for (; j < nb; ++j) {
      const double dx = ax[i] - bx[j];
      const double dy = ay[i] - by[j];
      const double d2 = dx * dx + dy * dy;
      if (d2 < best_tail) best_tail = d2;
    }
  }
  alignas(32) double vals[4];
  _mm256_store_pd(vals, best4);
  double best = best_tail;
  for (int l = 0; l < 4; ++l)
    if (vals[l] < best) best = vals[l];
  return best;
}

}  // namespace arbsim::kernels::avx2

#endif  // __x86_64__
