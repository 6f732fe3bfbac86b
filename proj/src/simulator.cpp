#include "vortexlab/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vortexlab::sim {

void SimSpec::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::domain_error("SimSpec: dt must be positive");
  if (!(t_end >= 0.0)) throw std::domain_error("SimSpec: t_end must be nonnegative");
  if (record_every < 1) throw std::domain_error("SimSpec: record_every must be positive");
  tree.validate();
}

VelocityMethod SimSpec::resolve(std::size_t n) const {
  if (velocity_method != VelocityMethod::Auto) return velocity_method;
  return n <= kDirectTreeCrossover ? VelocityMethod::Direct : VelocityMethod::Tree;
}

double default_dt(double min_separation, double max_abs_gamma) {
  if (!std::isfinite(min_separation) || max_abs_gamma <= 0.0) return 1e-3;
  return 1e-3 * std::min(1.0, min_separation * min_separation / max_abs_gamma);
}

namespace filters {
LabelFilter all() {
  return [](const Label&) { return true; };
}
LabelFilter none() {
  return [](const Label&) { return false; };
}
LabelFilter only(int m) {
  return [m](const Label& l) { return l.index == m; };
}
LabelFilter other_vortices(int m) {
  return [m](const Label& l) { return !l.is_perturbation() && l.index != m; };
}
LabelFilter perturbation() {
  return [](const Label& l) { return l.is_perturbation(); };
}
}  // namespace filters

namespace {

std::vector<PlaneVector> evaluate(const kernel::SourceView& src,
                                  std::span<const PlaneVector> targets, double delta,
                                  const SimSpec& spec) {
  const auto blob = kernel::BlobSpec::blob(delta);
  if (spec.resolve(src.size()) == VelocityMethod::Tree)
    return kernel::velocity_tree(src, targets, blob, spec.tree, spec.exec);
  return kernel::velocity_direct(src, targets, blob, spec.exec);
}

}  // namespace

std::vector<PlaneVector> total_velocity(const ParticleCloud& cloud, const SimSpec& spec) {
  cloud.validate();
  const auto src = cloud.sources();
  const auto targets = cloud.positions();
  return evaluate(src.view(), targets, cloud.blob_delta, spec);
}

std::vector<PlaneVector> labeled_velocity(const ParticleCloud& cloud, const LabelFilter& filter,
                                          const SimSpec& spec) {
  const auto targets = cloud.positions();
  return labeled_velocity(cloud, filter, spec, targets);
}

std::vector<PlaneVector> labeled_velocity(const ParticleCloud& cloud, const LabelFilter& filter,
                                          const SimSpec& spec,
                                          std::span<const PlaneVector> targets) {
  cloud.validate();
  kernel::SourceSet src;
  for (const auto& p : cloud.particles)
    if (filter(p.label)) src.push_back(p.position, p.weight);
  return evaluate(src.view(), targets, cloud.blob_delta, spec);
}

void step_in_place(ParticleCloud& cloud, const SimSpec& spec, double dt) {
  const auto n = cloud.size();
  kernel::SourceSet src = cloud.sources();
  std::vector<PlaneVector> x0 = cloud.positions();
  std::vector<PlaneVector> stage(x0);
  std::vector<PlaneVector> sum(n);

  auto velocity_at = [&](const std::vector<PlaneVector>& pos) {
    for (std::size_t i = 0; i < n; ++i) {
      src.x[i] = pos[i].x;
      src.y[i] = pos[i].y;
    }
    return evaluate(src.view(), pos, cloud.blob_delta, spec);
  };

  const double half = 0.5 * dt;
  const auto k1 = velocity_at(x0);
  for (std::size_t i = 0; i < n; ++i) {
    sum[i] = k1[i];
    stage[i] = x0[i] + half * k1[i];
  }
  const auto k2 = velocity_at(stage);
  for (std::size_t i = 0; i < n; ++i) {
    sum[i] += 2.0 * k2[i];
    stage[i] = x0[i] + half * k2[i];
  }
  const auto k3 = velocity_at(stage);
  for (std::size_t i = 0; i < n; ++i) {
    sum[i] += 2.0 * k3[i];
    stage[i] = x0[i] + dt * k3[i];
  }
  const auto k4 = velocity_at(stage);
  for (std::size_t i = 0; i < n; ++i) {
    sum[i] += k4[i];
    const PlaneVector next = x0[i] + (dt / 6.0) * sum[i];
    if (!next.finite())
      throw std::runtime_error("simulator: non-finite position for particle " + std::to_string(i) +
                               " at t = " + std::to_string(cloud.time + dt));
    cloud.particles[i].position = next;
  }
  cloud.time += dt;
}

ParticleCloud step(const ParticleCloud& cloud, const SimSpec& spec) {
  spec.validate();
  cloud.validate();
  ParticleCloud out = cloud;
  step_in_place(out, spec, spec.dt);
  return out;
}

RunRecord run(ParticleCloud cloud, const SimSpec& spec, diag::DiagnosticsTracker& tracker,
              std::optional<pointvortex::VortexConfiguration> ode, const RunObserver& observer) {
  spec.validate();
  cloud.validate();
  if (ode) ode->validate();

  RunRecord rr;
  const std::size_t n0 = cloud.size();
  int records_since_snapshot = 0;
  auto snapshot = [&]() {
    rr.snapshot_times.push_back(cloud.time);
    if (observer.on_snapshot) observer.on_snapshot(cloud);
  };
  auto record = [&]() {
    const std::span<const PlaneVector> ref =
        ode ? std::span<const PlaneVector>(ode->positions) : std::span<const PlaneVector>();
    rr.records.push_back(tracker.observe(cloud, ref));
    if (observer.on_record) observer.on_record(rr.records.back());
  };

  const double t0 = cloud.time;
  const double t_end = t0 + spec.t_end;
  try {
    record();
    snapshot();
    double t = t0;
    for (long k = 1; t < t_end; ++k) {
      const double t_next = std::min(t_end, t0 + static_cast<double>(k) * spec.dt);
      const double h = t_next - t;
      step_in_place(cloud, spec, h);
      cloud.time = t_next;
      if (ode) *ode = pointvortex::rk4_step(*ode, h);
      t = t_next;
      if (cloud.size() != n0) throw std::runtime_error("simulator: particle count changed");
      const bool last = !(t < t_end);
      if (k % spec.record_every == 0 || last) {
        record();
        ++records_since_snapshot;
        if (last || (observer.snapshot_every > 0 && records_since_snapshot >= observer.snapshot_every)) {
          snapshot();
          records_since_snapshot = 0;
        }
      }
    }
  } catch (const std::exception& e) {
    rr.aborted = true;
    rr.abort_reason = e.what();
  }
  rr.final_cloud = std::move(cloud);
  return rr;
}

}  // namespace vortexlab::sim
