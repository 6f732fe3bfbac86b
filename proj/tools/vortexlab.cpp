// vortexlab command line: scenario runs, sweep reports, acceptance checks.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "vortexlab/acceptance.hpp"
#include "vortexlab/harness.hpp"

namespace fs = std::filesystem;
namespace vh = vortexlab::harness;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitAbort = 2;

vh::ScenarioConfig resolve_config(const std::string& arg) {
  const std::string prefix = "builtin:";
  if (arg.rfind(prefix, 0) == 0) return vh::builtin_scenario(arg.substr(prefix.size()));
  return vh::load_scenario(arg);
}

void apply_thread_env() {
  if (const char* env = std::getenv("VORTEXLAB_THREADS")) {
    const int n = std::atoi(env);
    if (n < 1) throw vh::ConfigError("VORTEXLAB_THREADS must be a positive integer");
    vortexlab::set_threads(n);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vortex blob simulations of concentrated 2D Euler vorticity"};
  app.require_subcommand(1);

  std::string config_arg, out, velocity = "config";
  bool serial = false, allow_large = false, quiet = false;
  auto* run = app.add_subcommand("run", "Run a scenario config (path or builtin:<name>)");
  run->add_option("config", config_arg, "JSON config file or builtin:<name>")->required();
  run->add_option("--out", out, "Output directory")->required();
  run->add_flag("--serial", serial, "Single-threaded, byte-reproducible execution");
  run->add_option("--velocity", velocity, "Velocity evaluation override")
      ->check(CLI::IsMember({"config", "auto", "direct", "tree"}));
  run->add_flag("--allow-large", allow_large, "Permit more than 1e5 particles");
  run->add_flag("-q,--quiet", quiet, "No progress lines");

  std::vector<std::string> report_dirs;
  std::string report_out;
  auto* report = app.add_subcommand("report", "Fit power laws across a sweep of run directories");
  report->add_option("dirs", report_dirs, "Per-epsilon run directories")->required();
  report->add_option("--out", report_out, "Summary JSON file")->required();

  auto* scenarios = app.add_subcommand("scenarios", "Builtin scenarios");
  scenarios->require_subcommand(1);
  auto* list = scenarios->add_subcommand("list", "List builtin scenario names");
  std::string show_name;
  auto* show = scenarios->add_subcommand("show", "Print a builtin scenario as JSON config");
  show->add_option("name", show_name)->required();

  std::string suite, workdir;
  auto* accept = app.add_subcommand("accept", "Run an acceptance criterion, or all");
  accept->add_option("suite", suite, "Criterion name or \"all\"")->required();
  accept->add_option("--workdir", workdir, "Scratch directory for run outputs");
  auto* accept_list = app.add_subcommand("criteria", "List acceptance criterion names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitInvalid;
  }

  try {
    apply_thread_env();

    if (*run) {
      auto cfg = resolve_config(config_arg);
      vh::RunOptions opts;
      opts.exec = serial ? vortexlab::Exec::Serial : vortexlab::Exec::Parallel;
      if (velocity == "auto") opts.velocity = vortexlab::sim::VelocityMethod::Auto;
      if (velocity == "direct") opts.velocity = vortexlab::sim::VelocityMethod::Direct;
      if (velocity == "tree") opts.velocity = vortexlab::sim::VelocityMethod::Tree;
      opts.allow_large = allow_large;
      if (!quiet) opts.log = &std::cerr;
      auto manifest = vh::run_scenario(cfg, out, opts);
      for (const auto& r : manifest.runs)
        std::cout << (fs::path(out) / r.dir).string() << '\n';
      return manifest.ok() ? kExitOk : kExitAbort;
    }

    if (*report) {
      std::vector<fs::path> dirs(report_dirs.begin(), report_dirs.end());
      const auto summary = vh::sweep_report(dirs);
      std::ofstream f(report_out);
      if (!f) throw vh::ReportError("cannot write " + report_out);
      f << summary.dump(2) << '\n';
      return kExitOk;
    }

    if (*list) {
      for (const auto& c : vh::builtin_scenarios()) std::cout << c.name << '\n';
      return kExitOk;
    }
    if (*show) {
      std::cout << vh::scenario_to_json(vh::builtin_scenario(show_name)).dump(2) << '\n';
      return kExitOk;
    }

    if (*accept_list) {
      for (const auto& n : vh::acceptance_names()) std::cout << n << '\n';
      return kExitOk;
    }
    if (*accept) {
      std::vector<std::string> names =
          suite == "all" ? vh::acceptance_names() : std::vector<std::string>{suite};
      vh::AcceptanceOptions opts;
      opts.workdir = workdir;
      bool all_passed = true;
      for (const auto& n : names) {
        const auto r = vh::run_criterion(n, opts);
        std::cout << vh::format_result(r) << std::endl;
        all_passed = all_passed && r.passed;
      }
      return all_passed ? kExitOk : kExitInvalid;
    }
  } catch (const vh::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const vh::ReportError& e) {
    std::cerr << "report error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "aborted: " << e.what() << '\n';
    return kExitAbort;
  }
  return kExitOk;
}
