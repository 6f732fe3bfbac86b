#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "vortexlab/diagnostics.hpp"
#include "vortexlab/profiles.hpp"
#include "vortexlab/simulator.hpp"

namespace vortexlab::harness {

/// Raised for malformed or out-of-range scenario configs. what() names the
/// offending JSON location.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct VortexEntry {
  PlaneVector center;
  double gamma = 1.0;
  std::string profile = "cauchy";
  double sigma = 2.0;
};

struct PerturbationBlobEntry {
  VortexEntry shape;
  double epsilon = 0.1;
};

enum class TEndMode { Fixed, C0LogA };

struct ScenarioConfig {
  std::string name;
  std::vector<VortexEntry> vortices;
  std::vector<double> epsilons;

  std::optional<double> split_beta;
  std::vector<PerturbationBlobEntry> perturbation_blobs;

  double h_over_eps = 0.125;
  double mass_capture = 0.999;
  std::size_t max_particles = 100'000;

  std::optional<double> dt;  // default_dt() when absent
  double t_end = 1.0;
  TEndMode t_end_mode = TEndMode::Fixed;
  sim::VelocityMethod velocity = sim::VelocityMethod::Auto;
  kernel::TreecodeParams tree{0.5, 64, 6};
  int record_every = 10;
  int snapshot_every = 0;

  diag::DiagnosticsSpec diagnostics;

  /// Throws ConfigError.
  void validate() const;
  double min_separation() const;
  profiles::InitialData initial_data(double epsilon) const;
  pointvortex::VortexConfiguration point_vortices() const;
};

/// Desk-scale particle budget; larger configs need an explicit override.
inline constexpr std::size_t kParticleBudget = 100'000;

ScenarioConfig scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const ScenarioConfig& c);
/// Parses JSON text; syntax errors report line and column.
ScenarioConfig parse_scenario(const std::string& text);
ScenarioConfig load_scenario(const std::string& path);

std::vector<ScenarioConfig> builtin_scenarios();
/// Throws ConfigError for an unknown name.
ScenarioConfig builtin_scenario(const std::string& name);

/// Stable 64-bit FNV-1a hash of the canonical JSON dump, as 16 hex digits.
std::string config_hash(const ScenarioConfig& c);

}  // namespace vortexlab::harness
