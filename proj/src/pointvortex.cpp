#include "vortexlab/pointvortex.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace vortexlab::pointvortex {

void VortexConfiguration::validate() const {
  if (positions.size() != gammas.size())
    throw std::domain_error("VortexConfiguration: positions and gammas differ in length");
  for (double g : gammas)
    if (g == 0.0 || !std::isfinite(g))
      throw std::domain_error("VortexConfiguration: circulations must be finite and nonzero");
  for (const auto& p : positions) require_finite(p, "VortexConfiguration");
  for (std::size_t m = 0; m < positions.size(); ++m)
    for (std::size_t l = m + 1; l < positions.size(); ++l)
      if (positions[m] == positions[l])
        throw std::domain_error("VortexConfiguration: coincident vortices");
}

double VortexConfiguration::min_separation() const {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < positions.size(); ++m)
    for (std::size_t l = m + 1; l < positions.size(); ++l)
      d = std::min(d, distance(positions[m], positions[l]));
  return d;
}

void IntegratorSpec::validate() const {
  if (!(dt > 0.0)) throw std::domain_error("IntegratorSpec: dt must be positive");
  if (!(t_end >= 0.0)) throw std::domain_error("IntegratorSpec: t_end must be nonnegative");
  if (!(min_separation > 0.0))
    throw std::domain_error("IntegratorSpec: min_separation must be positive");
}

std::vector<PlaneVector> helmholtz_rhs(const VortexConfiguration& config,
                                       const kernel::BlobSpec& spec) {
  const auto n = config.size();
  if (config.gammas.size() != n)
    throw std::domain_error("helmholtz_rhs: positions and gammas differ in length");
  std::vector<PlaneVector> out(n);
  for (std::size_t m = 0; m < n; ++m) {
    PlaneVector u;
    for (std::size_t l = 0; l < n; ++l) {
      if (l == m) continue;
      if (config.positions[m] == config.positions[l])
        throw std::domain_error("helmholtz_rhs: coincident vortices");
      u += config.gammas[l] * kernel::biot_savart(config.positions[m] - config.positions[l], spec);
    }
    out[m] = u;
  }
  return out;
}

namespace {

VortexConfiguration shifted(const VortexConfiguration& c, const std::vector<PlaneVector>& k,
                            double h) {
  VortexConfiguration out = c;
  for (std::size_t m = 0; m < c.size(); ++m) out.positions[m] += h * k[m];
  return out;
}

}  // namespace

VortexConfiguration rk4_step(const VortexConfiguration& config, double dt,
                             const kernel::BlobSpec& spec) {
  const auto k1 = helmholtz_rhs(config, spec);
  const auto k2 = helmholtz_rhs(shifted(config, k1, 0.5 * dt), spec);
  const auto k3 = helmholtz_rhs(shifted(config, k2, 0.5 * dt), spec);
  const auto k4 = helmholtz_rhs(shifted(config, k3, dt), spec);
  VortexConfiguration out = config;
  for (std::size_t m = 0; m < config.size(); ++m)
    out.positions[m] += (dt / 6.0) * (k1[m] + 2.0 * k2[m] + 2.0 * k3[m] + k4[m]);
  return out;
}

Trajectory integrate(const VortexConfiguration& config, const IntegratorSpec& spec,
                     const kernel::BlobSpec& kernel_spec) {
  config.validate();
  spec.validate();
  Trajectory traj;
  traj.points.push_back({0.0, config.positions});
  if (config.size() > 1 && config.min_separation() < spec.min_separation) {
    traj.collapse_stop = true;
    traj.collapse_distance = config.min_separation();
    return traj;
  }

  VortexConfiguration state = config;
  double t = 0.0;
  for (long k = 1; t < spec.t_end; ++k) {
    const double t_next = std::min(spec.t_end, static_cast<double>(k) * spec.dt);
    state = rk4_step(state, t_next - t, kernel_spec);
    t = t_next;
    for (const auto& p : state.positions)
      if (!p.finite())
        throw std::runtime_error("pointvortex::integrate: non-finite position at t = " +
                                 std::to_string(t));
    traj.points.push_back({t, state.positions});
    if (state.size() > 1) {
      const double d = state.min_separation();
      if (d < spec.min_separation) {
        traj.collapse_stop = true;
        traj.collapse_distance = d;
        break;
      }
    }
  }
  return traj;
}

ConservedQuantities conserved_quantities(const VortexConfiguration& config) {
  config.validate();
  ConservedQuantities q;
  const auto n = config.size();
  double pair_sum = 0.0;
  for (std::size_t m = 0; m < n; ++m)
    for (std::size_t l = m + 1; l < n; ++l)
      pair_sum += config.gammas[m] * config.gammas[l] *
                  std::log(distance(config.positions[m], config.positions[l]));
  // Sum over ordered pairs m != l is twice the unordered sum.
  q.hamiltonian = -pair_sum / (2.0 * std::numbers::pi);

  PlaneVector impulse;
  for (std::size_t m = 0; m < n; ++m) {
    q.total_circulation += config.gammas[m];
    impulse += config.gammas[m] * config.positions[m];
    q.angular_impulse += config.gammas[m] * config.positions[m].norm2();
  }
  if (q.total_circulation != 0.0) {
    q.center = impulse * (1.0 / q.total_circulation);
  } else {
    q.center = impulse;
    q.center_is_impulse = true;
  }
  return q;
}

}  // namespace vortexlab::pointvortex
