#pragma once

#include <numbers>
#include <span>
#include <vector>

#include "vortexlab/exec.hpp"
#include "vortexlab/plane_vector.hpp"

namespace vortexlab::kernel {

inline constexpr double kInv2Pi = 0.5 * std::numbers::inv_pi;

enum class KernelMode { Singular, Blob };

/// Kernel selection. Blob is the algebraic (Krasny) regularization
/// K_delta(z) = z^perp / (2 pi (|z|^2 + delta^2)).
struct BlobSpec {
  double delta = 0.0;
  KernelMode mode = KernelMode::Singular;

  static BlobSpec singular() { return {0.0, KernelMode::Singular}; }
  static BlobSpec blob(double delta);

  void validate() const;
  double delta2() const { return mode == KernelMode::Blob ? delta * delta : 0.0; }
};

/// Barnes-Hut parameters. A cluster of radius r is expanded for a target at
/// distance R from its center when r < opening_angle * R.
struct TreecodeParams {
  double opening_angle = 0.5;
  int max_leaf_size = 64;
  int expansion_order = 6;

  void validate() const;
};

/// Non-owning structure-of-arrays view of weighted source points.
struct SourceView {
  std::span<const double> x;
  std::span<const double> y;
  std::span<const double> w;

  std::size_t size() const { return w.size(); }
};

/// Owning counterpart of SourceView.
struct SourceSet {
  std::vector<double> x, y, w;

  void push_back(const PlaneVector& p, double weight) {
    x.push_back(p.x);
    y.push_back(p.y);
    w.push_back(weight);
  }
  std::size_t size() const { return w.size(); }
  SourceView view() const { return {x, y, w}; }
};

/// Biot-Savart kernel K(z). Throws std::domain_error for z = 0 in Singular
/// mode or a non-finite z. Blob mode returns zero at z = 0.
PlaneVector biot_savart(const PlaneVector& z, const BlobSpec& spec);

/// Direct O(N M) summation u_j = sum_i w_i K(t_j - x_i), sources in index
/// order for every target so Serial and Parallel agree bitwise.
std::vector<PlaneVector> velocity_direct(const SourceView& sources,
                                         std::span<const PlaneVector> targets,
                                         const BlobSpec& spec, Exec exec = Exec::Serial);

/// Barnes-Hut approximation of velocity_direct. Blob mode only.
std::vector<PlaneVector> velocity_tree(const SourceView& sources,
                                       std::span<const PlaneVector> targets,
                                       const BlobSpec& spec, const TreecodeParams& params,
                                       Exec exec = Exec::Serial);

/// Explicit bound on sup|K * f| from the L^1 / L^q interpolation argument:
/// split the Biot-Savart integral at R* = (|f|_1 / |f|_q)^{q'/2}, Hoelder
/// inside (using the polar integral of |x-y|^{-q'} over B_R), L^1 outside.
double velocity_bound(double l1_norm, double lq_norm, double q);

/// |grad u(x)| <= (4 / 2pi) |omega|_1 / delta^2 for x at distance >= delta
/// from a vorticity patch supported in B_{delta/4}. The constant follows
/// from |x - y| >= delta/2 and the operator norm |grad K(z)| = 1/(2 pi |z|^2);
/// the blob kernel satisfies the same gradient estimate.
double lipschitz_farfield_bound(double l1_norm, double delta_sep);

/// Relative discrepancy max_j |a_j - b_j| / max_j |b_j| (0 when b is all zero).
double max_relative_error(std::span<const PlaneVector> approx, std::span<const PlaneVector> exact);

}  // namespace vortexlab::kernel
