#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vortexlab/kernel.hpp"
#include "vortexlab/plane_vector.hpp"

namespace vortexlab::pointvortex {

/// M point vortices: positions p_m and nonzero circulations gamma_m.
struct VortexConfiguration {
  std::vector<PlaneVector> positions;
  std::vector<double> gammas;

  std::size_t size() const { return positions.size(); }
  /// Throws std::domain_error on length mismatch, zero or non-finite gamma,
  /// non-finite or coincident positions.
  void validate() const;
  double min_separation() const;
};

struct IntegratorSpec {
  double dt = 1e-3;
  double t_end = 1.0;
  double min_separation = 1e-6;

  void validate() const;
};

struct TrajectoryPoint {
  double t = 0.0;
  std::vector<PlaneVector> positions;
};

struct Trajectory {
  std::vector<TrajectoryPoint> points;
  bool collapse_stop = false;  // pairwise distance fell below min_separation
  double collapse_distance = 0.0;
};

/// dp_m/dt = sum_{l != m} gamma_l K(p_m - p_l). The kernel defaults to the
/// singular Biot-Savart kernel; a blob spec gives the regularized system.
std::vector<PlaneVector> helmholtz_rhs(const VortexConfiguration& config,
                                       const kernel::BlobSpec& spec = kernel::BlobSpec::singular());

/// One classical RK4 step of size dt (dt may be negative).
VortexConfiguration rk4_step(const VortexConfiguration& config, double dt,
                             const kernel::BlobSpec& spec = kernel::BlobSpec::singular());

/// Fixed-step RK4 from t = 0 to t_end. Includes t = 0 and every accepted step;
/// the last step is shortened to land on t_end. Stops early with
/// collapse_stop set when two vortices come closer than min_separation.
/// Throws std::runtime_error if the state becomes non-finite.
Trajectory integrate(const VortexConfiguration& config, const IntegratorSpec& spec,
                     const kernel::BlobSpec& kernel_spec = kernel::BlobSpec::singular());

struct ConservedQuantities {
  double hamiltonian = 0.0;
  /// Center of vorticity, or the linear impulse sum gamma_m p_m when the
  /// total circulation vanishes (see center_is_impulse).
  PlaneVector center;
  bool center_is_impulse = false;
  double angular_impulse = 0.0;
  double total_circulation = 0.0;
};

ConservedQuantities conserved_quantities(const VortexConfiguration& config);

}  // namespace vortexlab::pointvortex
