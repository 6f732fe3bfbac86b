#pragma once

#include <cstddef>

namespace vortexlab::kernel::detail {

/// Unscaled running sum of w (t - x)^perp / (|t - x|^2 + delta^2); the 1/2pi
/// factor is applied once per target.
struct Accum {
  double sx = 0.0;
  double sy = 0.0;
};

inline constexpr int kTargetBlock = 8;

// Shared by the direct sum and the treecode leaves: every target accumulates
// its sources in index order with the same operations, so a leaf holding the
// whole cloud reproduces velocity_direct bit for bit. Returns true if some
// term had |t - x|^2 + delta^2 == 0.
inline bool accumulate(const double* x, const double* y, const double* w, std::size_t n, double tx,
                       double ty, double delta2, Accum& acc) {
  constexpr std::size_t kChunk = 64;
  alignas(64) double px[kChunk], py[kChunk];
  int coincident = 0;
  double sx = acc.sx, sy = acc.sy;
  for (std::size_t i0 = 0; i0 < n; i0 += kChunk) {
    const std::size_t len = n - i0 < kChunk ? n - i0 : kChunk;
    // Terms are independent and vectorize; the sums below stay sequential.
#pragma omp simd reduction(| : coincident)
    for (std::size_t k = 0; k < len; ++k) {
      const double dx = tx - x[i0 + k];
      const double dy = ty - y[i0 + k];
      const double r2 = dx * dx + dy * dy + delta2;
      coincident |= (r2 == 0.0);
      const double s = w[i0 + k] / r2;
      px[k] = dy * s;
      py[k] = dx * s;
    }
    for (std::size_t k = 0; k < len; ++k) {
      sx -= px[k];
      sy += py[k];
    }
  }
  acc.sx = sx;
  acc.sy = sy;
  return coincident != 0;
}

// kTargetBlock targets at once, vectorized across targets. Per target the
// arithmetic sequence is identical to accumulate().
inline bool accumulate_block(const double* x, const double* y, const double* w, std::size_t n,
                             const double* tx, const double* ty, double delta2, double* sx,
                             double* sy) {
  int coincident = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = x[i], yi = y[i], wi = w[i];
#pragma omp simd reduction(| : coincident)
    for (int b = 0; b < kTargetBlock; ++b) {
      const double dx = tx[b] - xi;
      const double dy = ty[b] - yi;
      const double r2 = dx * dx + dy * dy + delta2;
      coincident |= (r2 == 0.0);
      const double s = wi / r2;
      sx[b] -= dy * s;
      sy[b] += dx * s;
    }
  }
  return coincident != 0;
}

}  // namespace vortexlab::kernel::detail
