#include "vortexlab/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "kernel_detail.hpp"

namespace vortexlab::kernel {

BlobSpec BlobSpec::blob(double delta) {
  BlobSpec s{delta, KernelMode::Blob};
  s.validate();
  return s;
}

void BlobSpec::validate() const {
  if (mode == KernelMode::Blob && !(delta > 0.0 && std::isfinite(delta)))
    throw std::domain_error("BlobSpec: blob width must be positive and finite");
}

void TreecodeParams::validate() const {
  if (!(opening_angle > 0.0 && opening_angle <= 1.0))
    throw std::domain_error("TreecodeParams: opening_angle must lie in (0, 1]");
  if (max_leaf_size < 1) throw std::domain_error("TreecodeParams: max_leaf_size must be positive");
  if (expansion_order < 1 || expansion_order > 20)
    throw std::domain_error("TreecodeParams: expansion_order must lie in [1, 20]");
}

PlaneVector biot_savart(const PlaneVector& z, const BlobSpec& spec) {
  spec.validate();
  require_finite(z, "biot_savart");
  const double r2 = z.norm2() + spec.delta2();
  if (r2 == 0.0) {
    if (spec.mode == KernelMode::Singular)
      throw std::domain_error("biot_savart: singular kernel evaluated at z = 0");
    return {};
  }
  return z.perp() * (kInv2Pi / r2);
}

namespace {

void check_sources(const SourceView& s) {
  if (s.x.size() != s.w.size() || s.y.size() != s.w.size())
    throw std::invalid_argument("SourceView: coordinate and weight spans differ in length");
}

}  // namespace

std::vector<PlaneVector> velocity_direct(const SourceView& sources,
                                         std::span<const PlaneVector> targets,
                                         const BlobSpec& spec, Exec exec) {
  spec.validate();
  check_sources(sources);
  const double delta2 = spec.delta2();
  const auto n = sources.size();
  const auto m = static_cast<long>(targets.size());
  std::vector<PlaneVector> out(targets.size());
  bool coincident = false;
  constexpr int B = detail::kTargetBlock;
  const long blocks = (m + B - 1) / B;

#pragma omp parallel for schedule(static) reduction(|| : coincident) if (exec == Exec::Parallel)
  for (long blk = 0; blk < blocks; ++blk) {
    const long j0 = blk * B;
    const int nb = static_cast<int>(std::min<long>(B, m - j0));
    alignas(64) double tx[B], ty[B], sx[B] = {}, sy[B] = {};
    for (int b = 0; b < B; ++b) {
      // Padding lanes repeat the last target; their sums are discarded.
      const auto& t = targets[j0 + std::min(b, nb - 1)];
      tx[b] = t.x;
      ty[b] = t.y;
    }
    coincident = detail::accumulate_block(sources.x.data(), sources.y.data(), sources.w.data(), n,
                                          tx, ty, delta2, sx, sy) ||
                 coincident;
    for (int b = 0; b < nb; ++b) out[j0 + b] = {kInv2Pi * sx[b], kInv2Pi * sy[b]};
  }

  if (coincident)
    throw std::domain_error("velocity_direct: target coincides with a source in singular mode");
  for (const auto& u : out)
    if (!u.finite()) throw std::domain_error("velocity_direct: non-finite velocity");
  return out;
}

double velocity_bound(double l1_norm, double lq_norm, double q) {
  if (!(q > 2.0) || !std::isfinite(q)) throw std::domain_error("velocity_bound: requires q > 2");
  if (!(l1_norm >= 0.0) || !(lq_norm >= 0.0) || !std::isfinite(l1_norm) || !std::isfinite(lq_norm))
    throw std::domain_error("velocity_bound: norms must be finite and nonnegative");
  if (l1_norm == 0.0) return 0.0;
  if (lq_norm == 0.0) throw std::domain_error("velocity_bound: zero L^q norm with nonzero L^1 norm");

  const double qc = q / (q - 1.0);  // conjugate exponent, in (1, 2)
  const double radius = std::pow(l1_norm / lq_norm, 0.5 * qc);
  const double inner = std::pow(2.0 * std::numbers::pi / (2.0 - qc), 1.0 / qc) *
                       std::pow(radius, (2.0 - qc) / qc) * lq_norm;
  const double outer = l1_norm / radius;
  return kInv2Pi * (inner + outer);
}

double lipschitz_farfield_bound(double l1_norm, double delta_sep) {
  if (!(delta_sep > 0.0) || !std::isfinite(delta_sep))
    throw std::domain_error("lipschitz_farfield_bound: separation must be positive");
  if (!(l1_norm >= 0.0)) throw std::domain_error("lipschitz_farfield_bound: negative L^1 norm");
  return 4.0 * kInv2Pi * l1_norm / (delta_sep * delta_sep);
}

double max_relative_error(std::span<const PlaneVector> approx, std::span<const PlaneVector> exact) {
  if (approx.size() != exact.size())
    throw std::invalid_argument("max_relative_error: length mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < exact.size(); ++i) {
    num = std::max(num, (approx[i] - exact[i]).norm());
    den = std::max(den, exact[i].norm());
  }
  return den > 0.0 ? num / den : num;
}

}  // namespace vortexlab::kernel
