#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vortexlab/diagnostics.hpp"
#include "vortexlab/scenario.hpp"
#include "vortexlab/simulator.hpp"

namespace vortexlab::harness {

inline constexpr const char* kSoftwareVersion = "0.1.0";

struct RunOptions {
  Exec exec = Exec::Parallel;
  std::optional<sim::VelocityMethod> velocity;  // overrides the config
  bool allow_large = false;                     // lift the particle budget
  std::ostream* log = nullptr;                  // one progress line per epsilon
};

/// Everything needed to simulate one epsilon of a scenario.
struct PreparedRun {
  double epsilon = 0.0;
  ParticleCloud cloud;
  sim::SimSpec spec;
  diag::TheoryBounds bounds;
  pointvortex::VortexConfiguration ode;
};

/// Samples the initial data and derives dt, t_end and the perturbation
/// norms. Throws ConfigError when the particle budget is exceeded.
PreparedRun prepare_run(const ScenarioConfig& config, double epsilon, const RunOptions& options);

struct EpsilonRun {
  double epsilon = 0.0;
  std::string dir;  // relative to the scenario output directory
  std::size_t particles = 0;
  double dt = 0.0;
  double t_end = 0.0;
  double A_eps = 0.0;
  double F2_sup = 0.0;
  diag::ConfinementReport confinement;
  bool aborted = false;
  std::string abort_reason;
  std::vector<std::string> files;  // relative to dir
  std::vector<diag::DiagnosticsRecord> records;
  ParticleCloud final_cloud;
};

struct RunManifest {
  std::string scenario;
  std::string config_hash;
  std::string started;
  std::string finished;
  std::string software_version = kSoftwareVersion;
  std::string mode;  // "serial" or "parallel"
  std::vector<std::string> files;  // relative to outdir, every run included
  std::vector<EpsilonRun> runs;

  bool ok() const;
  nlohmann::json to_json() const;
};

/// Runs every epsilon of the scenario into outdir/<name>_eps<eps>/ with
/// diagnostics.csv, diagnostics.schema.json, snapshots/ and manifest.json,
/// plus a top-level outdir/manifest.json. Records are flushed as they are
/// produced, so an aborted run keeps its partial CSV.
RunManifest run_scenario(const ScenarioConfig& config, const std::filesystem::path& outdir,
                         const RunOptions& options = {});

std::string run_dir_name(const std::string& scenario, double epsilon);

/// Least-squares fit of log y = intercept + slope log x.
struct PowerLawFit {
  double slope = 0.0;
  double intercept = 0.0;
  double max_rel_residual = 0.0;  // max |y / fit(x) - 1|
  std::size_t points = 0;
};
/// Requires >= 2 points with positive coordinates.
PowerLawFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y);

/// Raised by sweep_report for unusable input.
class ReportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reads per-epsilon run directories (each with manifest.json and
/// diagnostics.csv) and fits the final-time outer-mass and support-radius
/// columns against epsilon. Needs >= 3 distinct epsilon values. The result
/// does not depend on the order of run_dirs.
nlohmann::json sweep_report(const std::vector<std::filesystem::path>& run_dirs);

/// Reads a diagnostics CSV into header names and numeric rows.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string& name) const;  // throws if absent
};
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace vortexlab::harness
