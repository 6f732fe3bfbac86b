#pragma once

#include <vector>

#include "vortexlab/kernel.hpp"
#include "vortexlab/plane_vector.hpp"

namespace vortexlab {

/// Provenance of a particle: the vortex it was sampled from, or the
/// perturbation field.
struct Label {
  static constexpr int kPerturbation = -1;
  int index = kPerturbation;

  static constexpr Label vortex(int m) { return Label{m}; }
  static constexpr Label perturbation() { return Label{kPerturbation}; }
  constexpr bool is_perturbation() const { return index == kPerturbation; }
  friend constexpr bool operator==(Label, Label) = default;
};

struct VortexParticle {
  PlaneVector position;
  double weight = 0.0;  // circulation carried by the particle
  Label label;
  double omega0 = 0.0;  // vorticity at the particle's quadrature node at t = 0
};

/// Particle discretization of the vorticity. Particle identity is its index;
/// advection only ever rewrites positions and time.
struct ParticleCloud {
  std::vector<VortexParticle> particles;
  double grid_h = 0.0;
  double blob_delta = 0.0;
  double time = 0.0;

  std::size_t size() const { return particles.size(); }
  int vortex_count() const;  // 1 + largest vortex label, 0 if none
  kernel::SourceSet sources() const;
  std::vector<PlaneVector> positions() const;
  void validate() const;
};

}  // namespace vortexlab
