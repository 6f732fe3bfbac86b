#include "vortexlab/harness.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace vortexlab::harness {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

const char* method_name(sim::VelocityMethod m) {
  switch (m) {
    case sim::VelocityMethod::Direct: return "direct";
    case sim::VelocityMethod::Tree: return "tree";
    default: return "auto";
  }
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

void write_snapshot(const fs::path& path, const ParticleCloud& cloud) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "index,label,x,y,weight,omega0\n";
  for (std::size_t i = 0; i < cloud.particles.size(); ++i) {
    const auto& p = cloud.particles[i];
    out << i << ',' << p.label.index << ',' << diag::format_number(p.position.x) << ','
        << diag::format_number(p.position.y) << ',' << diag::format_number(p.weight) << ','
        << diag::format_number(p.omega0) << '\n';
  }
}

json schema_json(const diag::DiagnosticsTracker& tracker) {
  json cols = json::array();
  for (const auto& [name, desc] : tracker.columns())
    cols.push_back({{"name", name}, {"type", "number"}, {"description", desc}});
  json snap = json::array({
      {{"name", "index"}, {"type", "integer"}, {"description", "particle index, stable over a run"}},
      {{"name", "label"},
       {"type", "integer"},
       {"description", "vortex index m >= 0, or -1 for perturbation particles"}},
      {{"name", "x"}, {"type", "number"}, {"description", "particle position x"}},
      {{"name", "y"}, {"type", "number"}, {"description", "particle position y"}},
      {{"name", "weight"}, {"type", "number"}, {"description", "circulation carried by the particle"}},
      {{"name", "omega0"}, {"type", "number"}, {"description", "initial vorticity at the particle"}},
  });
  json index = json::array({
      {{"name", "file"}, {"type", "string"}, {"description", "snapshot file name"}},
      {{"name", "t"}, {"type", "number"}, {"description", "simulation time of the snapshot"}},
  });
  return {{"diagnostics.csv", {{"delimiter", ","}, {"header", true}, {"columns", cols}}},
          {"snapshots/snap_NNNN.csv", {{"delimiter", ","}, {"header", true}, {"columns", snap}}},
          {"snapshots/index.csv", {{"delimiter", ","}, {"header", true}, {"columns", index}}},
          {"number_format", "shortest round-trip decimal; nan and inf spelled out"}};
}

json confinement_json(const diag::ConfinementReport& c) {
  return {{"tau_measured", c.tau_measured},
          {"threshold_radius", c.threshold_radius},
          {"required_time", c.required_time},
          {"satisfied", c.satisfied}};
}

}  // namespace

std::string run_dir_name(const std::string& scenario, double epsilon) {
  return scenario + "_eps" + diag::format_number(epsilon);
}

PreparedRun prepare_run(const ScenarioConfig& config, double epsilon, const RunOptions& options) {
  config.validate();
  PreparedRun p;
  p.epsilon = epsilon;
  const auto data = config.initial_data(epsilon);
  const std::size_t cap = options.allow_large ? std::max(config.max_particles, kParticleBudget)
                                              : std::min(config.max_particles, kParticleBudget);
  if (config.max_particles > kParticleBudget && !options.allow_large)
    throw ConfigError("/grid/max_particles: " + std::to_string(config.max_particles) +
                      " exceeds the desk-scale budget of " + std::to_string(kParticleBudget) +
                      " particles; pass the large-run override to allow it");
  try {
    p.cloud = profiles::sample_particles(data, config.h_over_eps * epsilon, config.mass_capture, cap);
  } catch (const std::length_error& e) {
    throw ConfigError(std::string("particle budget exceeded at epsilon ") +
                      diag::format_number(epsilon) + ": " + e.what());
  }

  const auto norms = diag::perturbation_norms(p.cloud, config.diagnostics.q);
  const double q = config.diagnostics.q;
  double interp = 0.0;
  if (norms.l1 > 0.0)
    interp = std::pow(norms.lq, q / (2.0 * q - 2.0)) * std::pow(norms.l1, (q - 2.0) / (2.0 * q - 2.0));
  p.bounds.A_eps = std::max(interp, epsilon);
  p.bounds.F2_sup = norms.F2_sup;

  double gmax = 0.0;
  for (const auto& v : config.vortices) gmax = std::max(gmax, std::abs(v.gamma));
  p.spec.dt = config.dt ? *config.dt : sim::default_dt(config.min_separation(), gmax);
  p.spec.t_end = config.t_end_mode == TEndMode::Fixed
                     ? config.t_end
                     : config.diagnostics.c0 * std::abs(std::log(p.bounds.A_eps));
  p.spec.velocity_method = options.velocity ? *options.velocity : config.velocity;
  p.spec.tree = config.tree;
  p.spec.record_every = config.record_every;
  p.spec.exec = options.exec;
  p.spec.validate();
  p.ode = config.point_vortices();
  return p;
}

bool RunManifest::ok() const {
  for (const auto& r : runs)
    if (r.aborted) return false;
  return true;
}

json RunManifest::to_json() const {
  json runs_j = json::array();
  for (const auto& r : runs)
    runs_j.push_back({{"epsilon", r.epsilon},
                      {"dir", r.dir},
                      {"particles", r.particles},
                      {"status", r.aborted ? "aborted" : "ok"},
                      {"abort_reason", r.abort_reason},
                      {"confinement", confinement_json(r.confinement)}});
  return {{"scenario", scenario},   {"config_hash", config_hash},
          {"started", started},     {"finished", finished},
          {"software_version", software_version},
          {"mode", mode},           {"files", files},
          {"runs", runs_j},         {"status", ok() ? "ok" : "aborted"}};
}

RunManifest run_scenario(const ScenarioConfig& config, const fs::path& outdir,
                         const RunOptions& options) {
  config.validate();
  // Fail on budget/sampling problems before anything is written.
  std::vector<PreparedRun> prepared;
  for (double eps : config.epsilons) prepared.push_back(prepare_run(config, eps, options));

  RunManifest manifest;
  manifest.scenario = config.name;
  manifest.config_hash = harness::config_hash(config);
  manifest.started = utc_now();
  manifest.mode = options.exec == Exec::Serial ? "serial" : "parallel";
  fs::create_directories(outdir);

  for (auto& p : prepared) {
    EpsilonRun er;
    er.epsilon = p.epsilon;
    er.dir = run_dir_name(config.name, p.epsilon);
    er.particles = p.cloud.size();
    er.dt = p.spec.dt;
    er.t_end = p.spec.t_end;
    er.A_eps = p.bounds.A_eps;
    er.F2_sup = p.bounds.F2_sup;
    const fs::path dir = outdir / er.dir;
    fs::create_directories(dir / "snapshots");
    const std::string started = utc_now();
    const auto t0 = std::chrono::steady_clock::now();

    diag::DiagnosticsTracker tracker(config.diagnostics, static_cast<int>(config.vortices.size()),
                                     p.epsilon, p.bounds);
    write_json(dir / "diagnostics.schema.json", schema_json(tracker));

    std::ofstream csv(dir / "diagnostics.csv");
    if (!csv) throw std::runtime_error("cannot write " + (dir / "diagnostics.csv").string());
    csv << tracker.csv_header() << '\n' << std::flush;
    std::ofstream snap_index(dir / "snapshots" / "index.csv");
    snap_index << "file,t\n";

    std::vector<std::string> snapshot_files;
    sim::RunObserver obs;
    obs.snapshot_every = config.snapshot_every;
    obs.on_record = [&](const diag::DiagnosticsRecord& r) {
      csv << tracker.csv_row(r) << '\n' << std::flush;
    };
    obs.on_snapshot = [&](const ParticleCloud& c) {
      char name[32];
      std::snprintf(name, sizeof name, "snap_%04zu.csv", snapshot_files.size());
      write_snapshot(dir / "snapshots" / name, c);
      snap_index << name << ',' << diag::format_number(c.time) << '\n' << std::flush;
      snapshot_files.push_back(std::string("snapshots/") + name);
    };

    auto result = sim::run(std::move(p.cloud), p.spec, tracker, p.ode, obs);
    csv.close();
    snap_index.close();
    er.aborted = result.aborted;
    er.abort_reason = result.abort_reason;
    const double f = config.diagnostics.fractions.front();
    if (!result.records.empty())
      er.confinement = diag::confinement_check(result.records, config.diagnostics, er.A_eps,
                                               config.diagnostics.a, f, config.diagnostics.c0);
    er.records = std::move(result.records);
    er.final_cloud = std::move(result.final_cloud);

    er.files = {"diagnostics.csv", "diagnostics.schema.json", "snapshots/index.csv"};
    er.files.insert(er.files.end(), snapshot_files.begin(), snapshot_files.end());
    er.files.push_back("manifest.json");
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    json snapshot_times = json::array();
    for (double t : result.snapshot_times) snapshot_times.push_back(t);
    json m = {{"scenario", config.name},
              {"epsilon", p.epsilon},
              {"config_hash", manifest.config_hash},
              {"config", scenario_to_json(config)},
              {"started", started},
              {"finished", utc_now()},
              {"wall_seconds", wall},
              {"software_version", kSoftwareVersion},
              {"mode", manifest.mode},
              {"velocity_method", method_name(p.spec.resolve(er.particles))},
              {"particles", er.particles},
              {"grid_h", er.final_cloud.grid_h},
              {"blob_delta", er.final_cloud.blob_delta},
              {"dt", er.dt},
              {"t_end", er.t_end},
              {"A_eps", er.A_eps},
              {"F2_sup", er.F2_sup},
              {"confinement_fraction", f},
              {"confinement", confinement_json(er.confinement)},
              {"records", er.records.size()},
              {"snapshot_times", snapshot_times},
              {"status", er.aborted ? "aborted" : "ok"},
              {"abort_reason", er.abort_reason},
              {"files", er.files}};
    write_json(dir / "manifest.json", m);

    for (const auto& file : er.files) manifest.files.push_back(er.dir + "/" + file);
    if (options.log)
      *options.log << config.name << " eps=" << diag::format_number(p.epsilon) << " N="
                   << er.particles << " steps=" << std::llround(er.t_end / er.dt) << " "
                   << std::fixed << std::setprecision(1) << wall << "s"
                   << (er.aborted ? " ABORTED: " + er.abort_reason : std::string()) << '\n'
                   << std::defaultfloat;
    manifest.runs.push_back(std::move(er));
  }

  manifest.finished = utc_now();
  manifest.files.push_back("manifest.json");
  write_json(outdir / "manifest.json", manifest.to_json());
  return manifest;
}

}  // namespace vortexlab::harness
