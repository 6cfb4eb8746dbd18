#pragma once

#include <cstddef>
#include <span>

#include "arbsim/geometry.hpp"

namespace arbsim::kernels {

// Hot per-beam / pairwise loops. Each kernel has a scalar reference
// implementation and an AVX2 variant selected at runtime; the variants are
// bit-identical (no FMA, same association order per element), so dispatch
// never affects simulation determinism. Equivalence is asserted in tests.

enum class Isa { scalar, avx2 };

Isa active_isa();
void force_isa(Isa isa);  // tests and the ARBSIM_ISA=scalar env override
bool avx2_supported();

// clamp every element to [lo, hi]
void clamp_ranges(std::span<double> v, double lo, double hi);

// centered box mean over a window of half-width `halfwin`; windows are
// truncated at the array edges (mean of the available samples)
void box_smooth(std::span<const double> in, std::span<double> out, int halfwin);

// index of the first minimum element; n must be > 0
std::size_t min_index(std::span<const double> v);

// minimum over [first, last] inclusive of a value array (no index)
double min_value(std::span<const double> v);

// minimum squared distance over all pairs (a_i, b_j); +inf if either empty.
// Point sets are given split by coordinate (SoA) to keep the lanes simple.
double min_pairwise_dist2(std::span<const double> ax, std::span<const double> ay,
                          std::span<const double> bx, std::span<const double> by);

// --- scalar reference implementations, exposed for equivalence tests ---
namespace scalar {
void clamp_ranges(std::span<double> v, double lo, double hi);
void box_smooth(std::span<const double> in, std::span<double> out, int halfwin);
std::size_t min_index(std::span<const double> v);
double min_value(std::span<const double> v);
double min_pairwise_dist2(std::span<const double> ax, std::span<const double> ay,
                          std::span<const double> bx, std::span<const double> by);
}  // namespace scalar

#if defined(__x86_64__)
namespace avx2 {
void clamp_ranges(std::span<double> v, double lo, double hi);
void box_smooth(std::span<const double> in, std::span<double> out, int halfwin);
std::size_t min_index(std::span<const double> v);
double min_value(std::span<const double> v);
double min_pairwise_dist2(std::span<const double> ax, std::span<const double> ay,
                          std::span<const double> bx, std::span<const double> by);
}  // namespace avx2
#endif

}  // namespace arbsim::kernels
