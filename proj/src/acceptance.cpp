#include "vortexlab/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iterator>
#include <numbers>
#include <random>
#include <sstream>

#include "vortexlab/harness.hpp"
#include "vortexlab/kernel.hpp"
#include "vortexlab/pointvortex.hpp"
#include "vortexlab/profiles.hpp"

namespace vortexlab::harness {

namespace fs = std::filesystem;
namespace kn = vortexlab::kernel;
namespace pv = vortexlab::pointvortex;

namespace {

// Tolerances, one per criterion.
constexpr double kKernelIdentityTol = 1e-14;
constexpr double kTreeRelTol = 1e-4;
constexpr double kTrajectoryTol = 1e-6;
constexpr double kHamiltonianDriftTol = 1e-8;
constexpr double kLinearDriftTol = 1e-12;
constexpr double kTailMassTol = 1e-6;
constexpr double kSlopeRelTol = 0.10;
constexpr double kCenterDriftTol = 1e-3;
constexpr double kMomentDriftTol = 0.01;
constexpr double kConfinementPower = 0.45;
constexpr double kConcentrationSlopeMin = 0.9;
constexpr double kConcentrationResidualMax = 0.10;
constexpr double kParallelRelTol = 1e-12;

std::string num(double v) { return diag::format_number(v); }

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

struct Outcome {
  bool passed;
  std::string detail;
};

fs::path scratch(const AcceptanceOptions& o, const std::string& name) {
  fs::path base = o.workdir.empty() ? fs::temp_directory_path() / "vortexlab-accept" : o.workdir;
  fs::path p = base / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

RunOptions run_options(const AcceptanceOptions& o) {
  RunOptions r;
  r.exec = Exec::Parallel;
  r.log = o.log;
  return r;
}

// ---------------------------------------------------------------- kernel

Outcome kernel_identities(const AcceptanceOptions&) {
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> unit(-1.0, 1.0), logscale(-3.0, 3.0);
  double worst_anti = 0.0, worst_orth = 0.0;
  for (int i = 0; i < 100'000; ++i) {
    const double s = std::pow(10.0, logscale(rng));
    PlaneVector z{s * unit(rng), s * unit(rng)};
    if (z.norm2() == 0.0) continue;
    for (auto spec : {kn::BlobSpec::singular(), kn::BlobSpec::blob(0.1 * s)}) {
      const PlaneVector k = kn::biot_savart(z, spec), km = kn::biot_savart(-z, spec);
      worst_anti = std::max(worst_anti, (k + km).norm() / k.norm());
      worst_orth = std::max(worst_orth, std::abs(z.dot(k)) / (z.norm() * k.norm()));
    }
  }

  std::uniform_real_distribution<double> pos(0.0, 1.0), weight(0.0, 1.0);
  const auto spec = kn::BlobSpec::blob(0.01);
  const kn::TreecodeParams tree{0.5, 64, 6};
  double worst_tree = 0.0;
  for (int c = 0; c < 100; ++c) {
    kn::SourceSet src;
    std::vector<PlaneVector> targets;
    for (int i = 0; i < 10'000; ++i) {
      PlaneVector p{pos(rng), pos(rng)};
      src.push_back(p, 1.0 - weight(rng));  // (0, 1]
      targets.push_back(p);
    }
    auto exact = kn::velocity_direct(src.view(), targets, spec, Exec::Parallel);
    auto approx = kn::velocity_tree(src.view(), targets, spec, tree, Exec::Parallel);
    worst_tree = std::max(worst_tree, kn::max_relative_error(approx, exact));
  }
  const bool ok = worst_anti <= kKernelIdentityTol && worst_orth <= kKernelIdentityTol &&
                  worst_tree < kTreeRelTol;
  return {ok, "antisymmetry " + sci(worst_anti) + ", orthogonality " + sci(worst_orth) +
                  " (tol " + sci(kKernelIdentityTol) + "); treecode max rel error " +
                  sci(worst_tree) + " over 100 clouds of N=1e4 (tol " + sci(kTreeRelTol) + ")"};
}

// ----------------------------------------------------------- pointvortex

struct DriftStats {
  double hamiltonian = 0.0;
  double linear = 0.0;
};

// Relative drift of H against max(|H0|, natural scale sum |g_m g_l|/2pi),
// since H0 vanishes for the unit-distance pairs.
DriftStats drift_over(pv::VortexConfiguration c, int steps, double dt) {
  const auto q0 = pv::conserved_quantities(c);
  double scale = 0.0;
  for (std::size_t m = 0; m < c.gammas.size(); ++m)
    for (std::size_t l = 0; l < m; ++l) scale += std::abs(c.gammas[m] * c.gammas[l]);
  scale *= kn::kInv2Pi;
  const double hscale = std::max(std::abs(q0.hamiltonian), scale);
  const double lscale = std::max(1.0, q0.center.norm());
  DriftStats d;
  for (int k = 0; k < steps; ++k) {
    c = pv::rk4_step(c, dt);
    const auto q = pv::conserved_quantities(c);
    d.hamiltonian = std::max(d.hamiltonian, std::abs(q.hamiltonian - q0.hamiltonian) / hscale);
    d.linear = std::max(d.linear, (q.center - q0.center).norm() / lscale);
  }
  return d;
}

Outcome pointvortex_analytics(const AcceptanceOptions&) {
  const double g = 2.0 * std::numbers::pi;
  pv::VortexConfiguration pair{{{-0.5, 0.0}, {0.5, 0.0}}, {g, -g}};
  pv::IntegratorSpec spec;
  spec.dt = 1e-3;
  spec.t_end = 10.0;
  auto traj = pv::integrate(pair, spec);
  double translate_err = 0.0;
  for (const auto& pt : traj.points)
    for (std::size_t m = 0; m < 2; ++m) {
      PlaneVector exact = pair.positions[m] + PlaneVector{0.0, pt.t};
      translate_err = std::max(translate_err, distance(pt.positions[m], exact));
    }

  pv::VortexConfiguration corot{{{-0.5, 0.0}, {0.5, 0.0}}, {g, g}};
  spec.t_end = std::numbers::pi;
  auto orbit = pv::integrate(corot, spec);
  double return_err = 0.0;
  for (std::size_t m = 0; m < 2; ++m)
    return_err = std::max(return_err,
                          distance(orbit.points.back().positions[m], corot.positions[m]));

  pv::VortexConfiguration three{{{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.5}}, {1.0, 1.0, -0.5}};
  DriftStats worst;
  for (const auto& c : {pair, corot, three}) {
    auto d = drift_over(c, 10'000, 1e-3);
    worst.hamiltonian = std::max(worst.hamiltonian, d.hamiltonian);
    worst.linear = std::max(worst.linear, d.linear);
  }
  const bool ok = translate_err < kTrajectoryTol && return_err < kTrajectoryTol &&
                  worst.hamiltonian < kHamiltonianDriftTol && worst.linear < kLinearDriftTol;
  return {ok, "translation error " + sci(translate_err) + ", period return error " +
                  sci(return_err) + " (tol " + sci(kTrajectoryTol) + "); H drift " +
                  sci(worst.hamiltonian) + " (tol " + sci(kHamiltonianDriftTol) +
                  "), center/impulse drift " + sci(worst.linear) + " (tol " +
                  sci(kLinearDriftTol) + ") over 1e4 steps"};
}

// -------------------------------------------------------- velocity bound

Outcome velocity_bound_lemma(const AcceptanceOptions&) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> cells(8, 40), bumps(1, 3);
  double worst = 0.0;
  for (int c = 0; c < 100; ++c) {
    const int n = cells(rng);
    const double h = 1.0 / n;
    struct Bump {
      PlaneVector at;
      double amp, width;
    };
    std::vector<Bump> bs;
    for (int b = bumps(rng); b > 0; --b)
      bs.push_back({{u(rng), u(rng)}, std::pow(10.0, 3.0 * u(rng)), 0.02 + 0.3 * u(rng)});
    const double noise = u(rng), sparsity = 0.5 * u(rng);

    kn::SourceSet src;
    double l1 = 0.0, l4 = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        PlaneVector x{(i + 0.5) * h, (j + 0.5) * h};
        double w = u(rng) < sparsity ? 0.0 : noise * u(rng);
        for (const auto& b : bs) w += b.amp * std::exp(-(x - b.at).norm2() / (b.width * b.width));
        src.push_back(x, w * h * h);
        l1 += w * h * h;
        l4 += std::pow(w, 4) * h * h;
      }
    const double bound = kn::velocity_bound(l1, std::pow(l4, 0.25), 4.0);

    std::vector<PlaneVector> targets;
    for (std::size_t k = 0; k < src.x.size(); ++k) targets.push_back({src.x[k], src.y[k]});
    for (int k = 0; k < 200; ++k) targets.push_back({3.0 * u(rng) - 1.0, 3.0 * u(rng) - 1.0});
    const auto vel = kn::velocity_direct(src.view(), targets, kn::BlobSpec::blob(2.0 * h));
    for (const auto& v : vel) worst = std::max(worst, v.norm() / bound);
  }
  return {worst <= 1.0, "max |u| / velocity_bound(l1, l4, 4) = " + sci(worst) +
                            " over 100 nonnegative clouds (pass <= 1)"};
}

// --------------------------------------------------------- decomposition

Outcome decomposition(const AcceptanceOptions&) {
  const auto cauchy = profiles::RadialProfile::cauchy();
  const auto r = profiles::decompose(cauchy, 0.01, 0.5);
  const double tail_err = std::abs(r.tail_mass - 1.0 / 101.0);

  const std::vector<double> eps{0.1, 0.05, 0.025, 0.0125};
  std::vector<double> A, tails;
  for (double e : eps) {
    const auto d = profiles::decompose(cauchy, e, 0.5);
    A.push_back(d.A_eps);
    tails.push_back(d.tail_mass);
  }
  const auto fit = fit_power_law(eps, A);
  const auto tail_fit = fit_power_law(eps, tails);
  const double expected = profiles::concentration_exponent(2.0);
  const double rel = std::abs(fit.slope - expected) / expected;
  const bool ok = tail_err <= kTailMassTol && rel <= kSlopeRelTol;
  return {ok, "tail mass at eps=0.01 off 1/101 by " + sci(tail_err) + " (tol " +
                  sci(kTailMassTol) + "); A-quantity slope " + num(std::round(fit.slope * 1e4) / 1e4) +
                  " vs " + num(expected) + " (rel diff " + sci(rel) + ", tol " +
                  sci(kSlopeRelTol) + "); tail-mass slope " +
                  num(std::round(tail_fit.slope * 1e4) / 1e4) + " (informational)"};
}

// -------------------------------------------------------- scenario based

Outcome steadiness(const AcceptanceOptions& o) {
  auto cfg = builtin_scenario("single-cauchy");
  auto man = run_scenario(cfg, scratch(o, "steadiness"), run_options(o));
  const auto& run = man.runs.front();
  if (run.aborted) return {false, "run aborted: " + run.abort_reason};
  const PlaneVector p0 = cfg.vortices.front().center;
  const double I0 = run.records.front().labels.front().moment;
  double center = 0.0, moment = 0.0;
  for (const auto& rec : run.records) {
    const auto& l = rec.labels.front();
    center = std::max(center, distance(l.center, p0));
    moment = std::max(moment, std::abs(l.moment / I0 - 1.0));
  }
  return {center <= kCenterDriftTol && moment <= kMomentDriftTol,
          "N=" + std::to_string(run.particles) + ", max |p(t)-p0| " + sci(center) + " (tol " +
              sci(kCenterDriftTol) + "), max |I(t)/I(0)-1| " + sci(moment) + " (tol " +
              sci(kMomentDriftTol) + ") over " + std::to_string(run.records.size()) + " records"};
}

Outcome moment_center_bounds(const AcceptanceOptions& o) {
  auto cfg = builtin_scenario("corotate");
  cfg.epsilons = {0.05};
  auto man = run_scenario(cfg, scratch(o, "bounds"), run_options(o));
  const auto& run = man.runs.front();
  if (run.aborted) return {false, "run aborted: " + run.abort_reason};
  double max_I = 0.0, max_gap = 0.0;
  bool finite = true;
  for (const auto& rec : run.records)
    for (const auto& l : rec.labels) {
      finite = finite && std::isfinite(l.moment_ratio) && std::isfinite(l.gap_ratio);
      max_I = std::max(max_I, l.moment_ratio);
      max_gap = std::max(max_gap, l.gap_ratio);
    }
  return {finite && max_I <= 1.0 && max_gap <= 1.0,
          "corotate eps=0.05: max I/moment_bound " + sci(max_I) + ", max gap/center_bound " +
              sci(max_gap) + " over " + std::to_string(run.records.size()) +
              " records (pass <= 1)"};
}

std::vector<fs::path> run_dirs(const fs::path& out, const RunManifest& man) {
  std::vector<fs::path> dirs;
  for (const auto& r : man.runs) dirs.push_back(out / r.dir);
  return dirs;
}

Outcome confinement(const AcceptanceOptions& o) {
  auto cfg = builtin_scenario("corotate");
  const fs::path out = scratch(o, "confinement");
  auto man = run_scenario(cfg, out, run_options(o));
  if (!man.ok()) return {false, "a sweep member aborted"};
  const auto report = sweep_report(run_dirs(out, man));
  // Runs come back sorted by increasing epsilon.
  std::vector<double> eps, r99;
  for (const auto& r : report.at("runs")) {
    eps.push_back(r.at("epsilon").get<double>());
    double worst = 0.0;
    for (int m = 0; m < static_cast<int>(cfg.vortices.size()); ++m)
      worst = std::max(worst, r.at("final").at("v" + std::to_string(m) + "_R0.99").get<double>());
    r99.push_back(worst);
  }
  bool ok = true;
  std::ostringstream d;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    const double limit = std::pow(eps[i], kConfinementPower);
    ok = ok && r99[i] <= limit;
    if (i > 0) ok = ok && r99[i - 1] < r99[i];
    d << "eps=" << num(eps[i]) << ": R99 " << sci(r99[i]) << " <= " << sci(limit) << "; ";
  }
  d << "strictly decreasing as eps decreases: "
    << (std::is_sorted(r99.begin(), r99.end(), std::less_equal<>()) ? "yes" : "no");
  return {ok, d.str()};
}

Outcome concentration(const AcceptanceOptions& o) {
  auto cfg = builtin_scenario("sweep-concentration");
  const fs::path out = scratch(o, "concentration");
  auto man = run_scenario(cfg, out, run_options(o));
  if (!man.ok()) return {false, "a sweep member aborted"};
  const auto report = sweep_report(run_dirs(out, man));
  const auto& fit = report.at("fits").at("outer_mass_p0.2");
  if (fit.at("slope").is_null()) return {false, "fit failed: " + fit.value("error", std::string())};
  const double slope = fit.at("slope").get<double>();
  const double resid = fit.at("max_rel_residual").get<double>();
  std::ostringstream vals;
  for (const auto& v : fit.at("values")) vals << sci(v.get<double>()) << ' ';
  return {slope >= kConcentrationSlopeMin && resid <= kConcentrationResidualMax,
          "outer mass beyond eps^0.2 at T=1: [ " + vals.str() + "], slope " + sci(slope) +
              " (pass >= " + sci(kConcentrationSlopeMin) + "), max rel residual " + sci(resid) +
              " (pass <= " + sci(kConcentrationResidualMax) + ")"};
}

Outcome long_time(const AcceptanceOptions& o) {
  auto cfg = builtin_scenario("long-time");
  auto man = run_scenario(cfg, scratch(o, "long-time"), run_options(o));
  const auto& run = man.runs.front();
  if (run.aborted) return {false, "run aborted: " + run.abort_reason};
  const auto& c = run.confinement;
  const double expected = cfg.diagnostics.c0 * std::abs(std::log(run.A_eps));
  const bool ok = c.satisfied && std::abs(run.t_end - expected) <= 1e-12 * expected &&
                  c.tau_measured == run.records.back().t;
  return {ok, "t_end " + num(run.t_end) + " = c0 |log A_eps| with A_eps " + num(run.A_eps) +
                  "; tau_measured " + num(c.tau_measured) + ", radius A_eps^a " +
                  sci(c.threshold_radius) + ", satisfied " + (c.satisfied ? "yes" : "no")};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

double position_difference(const ParticleCloud& a, const ParticleCloud& b) {
  double diff = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < a.particles.size(); ++i) {
    diff = std::max(diff, distance(a.particles[i].position, b.particles[i].position));
    scale = std::max(scale, a.particles[i].position.norm());
  }
  return diff / scale;
}

Outcome determinism(const AcceptanceOptions& o) {
  auto cfg = builtin_scenario("corotate");
  cfg.epsilons = {0.1};
  cfg.t_end = 0.1;
  const fs::path base = scratch(o, "determinism");
  std::ostringstream d;
  bool ok = true;
  const int saved_threads = max_threads();
  for (auto method : {sim::VelocityMethod::Direct, sim::VelocityMethod::Tree}) {
    const std::string tag = method == sim::VelocityMethod::Direct ? "direct" : "tree";
    RunOptions serial;
    serial.exec = Exec::Serial;
    serial.velocity = method;
    auto a = run_scenario(cfg, base / (tag + "-a"), serial);
    auto b = run_scenario(cfg, base / (tag + "-b"), serial);
    const std::string dir = run_dir_name(cfg.name, 0.1);
    const bool same = !a.runs.front().aborted &&
                      slurp(base / (tag + "-a") / dir / "diagnostics.csv") ==
                          slurp(base / (tag + "-b") / dir / "diagnostics.csv");
    RunOptions par = serial;
    par.exec = Exec::Parallel;
    set_threads(std::max(4, saved_threads));
    auto c = run_scenario(cfg, base / (tag + "-par"), par);
    set_threads(saved_threads);
    const double rel = position_difference(a.runs.front().final_cloud, c.runs.front().final_cloud);
    ok = ok && same && rel <= kParallelRelTol;
    d << tag << ": serial CSV byte-identical " << (same ? "yes" : "no")
      << ", parallel vs serial final positions rel " << sci(rel) << "; ";
  }
  d << "tol " << sci(kParallelRelTol);
  return {ok, d.str()};
}

struct Entry {
  const char* name;
  Outcome (*fn)(const AcceptanceOptions&);
};

const Entry kCriteria[] = {
    {"kernel", kernel_identities},
    {"pointvortex", pointvortex_analytics},
    {"velocity-bound", velocity_bound_lemma},
    {"decomposition", decomposition},
    {"steadiness", steadiness},
    {"moment-center-bounds", moment_center_bounds},
    {"confinement", confinement},
    {"concentration", concentration},
    {"long-time", long_time},
    {"determinism", determinism},
};

}  // namespace

std::vector<std::string> acceptance_names() {
  std::vector<std::string> out;
  for (const auto& e : kCriteria) out.emplace_back(e.name);
  return out;
}

CriterionResult run_criterion(const std::string& name, const AcceptanceOptions& options) {
  for (const auto& e : kCriteria) {
    if (name != e.name) continue;
    CriterionResult r;
    r.name = name;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      auto out = e.fn(options);
      r.passed = out.passed;
      r.detail = out.detail;
    } catch (const std::exception& ex) {
      r.passed = false;
      r.detail = std::string("error: ") + ex.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
  }
  throw std::invalid_argument("unknown acceptance criterion \"" + name + "\"");
}

std::string format_result(const CriterionResult& r) {
  char t[32];
  std::snprintf(t, sizeof t, " [%.1fs]", r.seconds);
  return std::string(r.passed ? "PASS " : "FAIL ") + r.name + ": " + r.detail + t;
}

}  // namespace vortexlab::harness
