#include "vortexlab/particles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vortexlab {

int ParticleCloud::vortex_count() const {
  int m = -1;
  for (const auto& p : particles) m = std::max(m, p.label.index);
  return m + 1;
}

kernel::SourceSet ParticleCloud::sources() const {
  kernel::SourceSet s;
  s.x.reserve(size());
  s.y.reserve(size());
  s.w.reserve(size());
  for (const auto& p : particles) s.push_back(p.position, p.weight);
  return s;
}

std::vector<PlaneVector> ParticleCloud::positions() const {
  std::vector<PlaneVector> out;
  out.reserve(size());
  for (const auto& p : particles) out.push_back(p.position);
  return out;
}

void ParticleCloud::validate() const {
  if (!(blob_delta > 0.0)) throw std::domain_error("ParticleCloud: blob_delta must be positive");
  for (const auto& p : particles) {
    require_finite(p.position, "ParticleCloud");
    if (!std::isfinite(p.weight)) throw std::domain_error("ParticleCloud: non-finite weight");
  }
}

}  // namespace vortexlab
