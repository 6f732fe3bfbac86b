#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vortexlab/diagnostics.hpp"
#include "vortexlab/exec.hpp"
#include "vortexlab/kernel.hpp"
#include "vortexlab/particles.hpp"
#include "vortexlab/pointvortex.hpp"

namespace vortexlab::sim {

enum class VelocityMethod { Auto, Direct, Tree };

/// Auto picks Direct up to this many particles, Tree above.
inline constexpr std::size_t kDirectTreeCrossover = 20'000;

struct SimSpec {
  double dt = 1e-3;
  double t_end = 1.0;
  VelocityMethod velocity_method = VelocityMethod::Auto;
  kernel::TreecodeParams tree;
  int record_every = 10;
  Exec exec = Exec::Serial;

  void validate() const;
  VelocityMethod resolve(std::size_t n) const;
};

/// dt = 1e-3 min(1, d^2 / Gamma_max) for minimal separation d and largest
/// |gamma|; d = inf (single vortex) gives 1e-3.
double default_dt(double min_separation, double max_abs_gamma);

using LabelFilter = std::function<bool(const Label&)>;

namespace filters {
LabelFilter all();
LabelFilter none();
LabelFilter only(int m);
/// Vortex labels other than m (perturbation excluded).
LabelFilter other_vortices(int m);
LabelFilter perturbation();
}  // namespace filters

/// Blob-kernel velocity (width cloud.blob_delta) induced by all particles,
/// evaluated at every particle. The blob kernel vanishes at z = 0, so the
/// self term needs no special case.
std::vector<PlaneVector> total_velocity(const ParticleCloud& cloud, const SimSpec& spec);

/// Velocity induced only by the particles accepted by filter, at every
/// particle (or at explicit targets).
std::vector<PlaneVector> labeled_velocity(const ParticleCloud& cloud, const LabelFilter& filter,
                                          const SimSpec& spec);
std::vector<PlaneVector> labeled_velocity(const ParticleCloud& cloud, const LabelFilter& filter,
                                          const SimSpec& spec,
                                          std::span<const PlaneVector> targets);

/// One RK4 step: the full velocity is re-evaluated at each stage. Only
/// positions and time change. Throws std::runtime_error on a non-finite
/// position.
ParticleCloud step(const ParticleCloud& cloud, const SimSpec& spec);
void step_in_place(ParticleCloud& cloud, const SimSpec& spec, double dt);

struct RunObserver {
  std::function<void(const diag::DiagnosticsRecord&)> on_record;
  std::function<void(const ParticleCloud&)> on_snapshot;
  /// Snapshot cadence in records; 0 keeps only the initial and final clouds.
  int snapshot_every = 0;
};

struct RunRecord {
  std::vector<diag::DiagnosticsRecord> records;
  std::vector<double> snapshot_times;
  ParticleCloud final_cloud;
  bool aborted = false;
  std::string abort_reason;
};

/// Steps cloud to spec.t_end, emitting a record at t = 0, every record_every
/// steps and at the final time. When ode is given, the point-vortex system is
/// integrated in lockstep with the same RK4 step and fed to the tracker as
/// the reference positions. Errors during stepping end the run with
/// aborted = true; every record emitted before is kept.
RunRecord run(ParticleCloud cloud, const SimSpec& spec, diag::DiagnosticsTracker& tracker,
              std::optional<pointvortex::VortexConfiguration> ode = std::nullopt,
              const RunObserver& observer = {});

}  // namespace vortexlab::sim
