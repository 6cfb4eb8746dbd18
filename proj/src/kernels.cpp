#include "arbsim/kernels.hpp"

#include <cstdlib>
#include <cstring>
#include <limits>

namespace arbsim::kernels {

namespace scalar {

void clamp_ranges(std::span<double> v, double lo, double hi) {
  for (double& x : v) x = x < lo ? lo : (x > hi ? hi : x);
}

void box_smooth(std::span<const double> in, std::span<double> out, int halfwin) {
  const int n = static_cast<int>(in.size());
  for (int i = 0; i < n; ++i) {
    const int a = i - halfwin < 0 ? 0 : i - halfwin;
    const int b = i + halfwin >= n ? n - 1 : i + halfwin;
    double s = 0.0;
    for (int j = a; j <= b; ++j) s += in[j];
    out[i] = s / static_cast<double>(b - a + 1);
  }
}

std::size_t min_index(std::span<const double> v) {
  std::size_t best = 0;
  double bv = v[0];
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] < bv) {
      bv = v[i];
      best = i;
    }
  }
  return best;
}

double min_value(std::span<const double> v) {
  double bv = std::numeric_limits<double>::infinity();
  for (double x : v)
    if (x < bv) bv = x;
  return bv;
}

double min_pairwise_dist2(std::span<const double> ax, std::span<const double> ay,
                          std::span<const double> bx, std::span<const double> by) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ax.size(); ++i) {
    for (std::size_t j = 0; j < bx.size(); ++j) {
      const double dx = ax[i] - bx[j];
      const double dy = ay[i] - by[j];
      const double d2 = dx * dx + dy * dy;
      if (d2 < best) best = d2;
    }
  }
  return best;
}

}  // namespace scalar

namespace {

Isa detect() {
#if defined(__x86_64__)
  if (const char* env = std::getenv("ARBSIM_ISA"); env && std::strcmp(env, "scalar") == 0)
    return Isa::scalar;
  if (__builtin_cpu_supports("avx2")) return Isa::avx2;
#endif
  return Isa::scalar;
}

Isa g_isa = detect();

}  // namespace

Isa active_isa() { return g_isa; }

void force_isa(Isa isa) {
#if defined(__x86_64__)
  g_isa = (isa == Isa::avx2 && __builtin_cpu_supports("avx2")) ? Isa::avx2 : Isa::scalar;
#else
  g_isa = Isa::scalar;
#endif
}

bool avx2_supported() {
#if defined(__x86_64__)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

void clamp_ranges(std::span<double> v, double lo, double hi) {
#if defined(__x86_64__)
  if (g_isa == Isa::avx2) return avx2::clamp_ranges(v, lo, hi);
#endif
  scalar::clamp_ranges(v, lo, hi);
}

void box_smooth(std::span<const double> in, std::span<double> out, int halfwin) {
#if defined(__x86_64__)
  if (g_isa == Isa::avx2) return avx2::box_smooth(in, out, halfwin);
#endif
  scalar::box_smooth(in, out, halfwin);
}

std::size_t min_index(std::span<const double> v) {
#if defined(__x86_64__)
  if (g_isa == Isa::avx2) return avx2::min_index(v);
#endif
  return scalar::min_index(v);
}

double min_value(std::span<const double> v) {
#if defined(__x86_64__)
  if (g_isa == Isa::avx2) return avx2::min_value(v);
#endif
  return scalar::min_value(v);
}

double min_pairwise_dist2(std::span<const double> ax, std::span<const double> ay,
                          std::span<const double> bx, std::span<const double> by) {
#if defined(__x86_64__)
  if (g_isa == Isa::avx2) return avx2::min_pairwise_dist2(ax, ay, bx, by);
#endif
  return scalar::min_pairwise_dist2(ax, ay, bx, by);
}

}  // namespace arbsim::kernels
