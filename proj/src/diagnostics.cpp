#include "vortexlab/diagnostics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "vortexlab/kernel.hpp"

namespace vortexlab::diag {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double safe_ratio(double num, double den) {
  if (std::isnan(num) || std::isnan(den)) return kNaN;
  if (den > 0.0) return num / den;
  return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

// (Lt + expm1(-Lt)) / L^2 without cancellation for small Lt.
double double_exp_integral(double t, double L) {
  const double x = L * t;
  if (std::abs(x) < 1e-3) {
    const double x2 = x * x;
    return t * t * (0.5 - x / 6.0 + x2 / 24.0 - x * x2 / 120.0);
  }
  return (x + std::expm1(-x)) / (L * L);
}

void require_label_nonempty(double abs_total) {
  if (abs_total == 0.0) throw std::domain_error("diagnostics: label carries no circulation");
}

}  // namespace

double cutoff_profile(double s) {
  if (s <= 1.0) return 1.0;
  if (s >= 2.0) return 0.0;
  return 0.5 * (1.0 + std::cos(std::numbers::pi * (s - 1.0)));
}

CenterMoment center_and_moment(const ParticleCloud& cloud, Label m) {
  CenterMoment cm;
  PlaneVector first;
  for (const auto& p : cloud.particles) {
    if (p.label != m) continue;
    cm.circulation += p.weight;
    first += p.weight * p.position;
  }
  if (cm.circulation == 0.0)
    throw std::domain_error("center_and_moment: label has zero total circulation");
  cm.center = first * (1.0 / cm.circulation);
  double second = 0.0;
  for (const auto& p : cloud.particles)
    if (p.label == m) second += p.weight * (p.position - cm.center).norm2();
  cm.moment = second / (2.0 * cm.circulation);
  return cm;
}

double cutoff_mass(const ParticleCloud& cloud, Label m, double R) {
  return cutoff_mass(cloud, m, R, center_and_moment(cloud, m).center);
}

double cutoff_mass(const ParticleCloud& cloud, Label m, double R, const PlaneVector& center) {
  if (!(R > 0.0)) throw std::domain_error("cutoff_mass: R must be positive");
  double omega = 0.0, outer = 0.0;
  for (const auto& p : cloud.particles) {
    if (p.label != m) continue;
    omega += p.weight;
    outer += p.weight * (1.0 - cutoff_profile((p.position - center).norm() / R));
  }
  if (omega == 0.0) throw std::domain_error("cutoff_mass: label has zero total circulation");
  return outer / omega;
}

double ring_mass(const ParticleCloud& cloud, Label m, double r) {
  return ring_mass(cloud, m, r, center_and_moment(cloud, m).center);
}

double ring_mass(const ParticleCloud& cloud, Label m, double r, const PlaneVector& center) {
  double s = 0.0;
  for (const auto& p : cloud.particles)
    if (p.label == m && (p.position - center).norm() >= r) s += std::abs(p.weight);
  return s;
}

double support_radius(const ParticleCloud& cloud, Label m, double f) {
  return support_radius(cloud, m, f, center_and_moment(cloud, m).center);
}

namespace {

struct DistWeight {
  double d, aw;
};

std::vector<DistWeight> sorted_distances(const ParticleCloud& cloud, Label m,
                                         const PlaneVector& center) {
  std::vector<DistWeight> v;
  for (const auto& p : cloud.particles)
    if (p.label == m) v.push_back({(p.position - center).norm(), std::abs(p.weight)});
  std::sort(v.begin(), v.end(), [](const DistWeight& a, const DistWeight& b) { return a.d < b.d; });
  return v;
}

double radius_at_fraction(const std::vector<DistWeight>& v, double f) {
  if (v.empty()) throw std::domain_error("support_radius: label has no particles");
  if (f >= 1.0) return v.back().d;
  double total = 0.0;
  for (const auto& e : v) total += e.aw;
  const double goal = f * total;
  double cum = 0.0;
  for (const auto& e : v) {
    cum += e.aw;
    if (cum >= goal) return e.d;
  }
  return v.back().d;
}

}  // namespace

double support_radius(const ParticleCloud& cloud, Label m, double f, const PlaneVector& center) {
  if (!(f > 0.0 && f <= 1.0)) throw std::domain_error("support_radius: fraction must lie in (0, 1]");
  return radius_at_fraction(sorted_distances(cloud, m, center), f);
}

double theory_moment_bound(double t, double I0, double L, double F2sup) {
  if (!(L > 0.0)) throw std::domain_error("theory_moment_bound: L must be positive");
  if (!(I0 >= 0.0) || !(F2sup >= 0.0))
    throw std::domain_error("theory_moment_bound: I0 and F2sup must be nonnegative");
  const double single = -std::expm1(-L * t) / L;
  return 2.0 * std::exp(2.0 * L * t) * (I0 + 0.5 * F2sup * F2sup * single * single);
}

double theory_center_bound(double t, double gap0, double I0, double L, double F2sup) {
  if (!(L > 0.0)) throw std::domain_error("theory_center_bound: L must be positive");
  if (!(I0 >= 0.0) || !(F2sup >= 0.0) || !(gap0 >= 0.0))
    throw std::domain_error("theory_center_bound: inputs must be nonnegative");
  const double single = -std::expm1(-L * t) / L;
  const double twice = double_exp_integral(t, L);
  return std::exp(L * t) * (gap0 + 2.0 * L * (std::sqrt(I0) + F2sup / (std::numbers::sqrt2 * L)) * twice +
                            F2sup * single);
}

double gronwall_gap(const ParticleCloud& cloud, std::span<const PlaneVector> ode_positions) {
  const int M = cloud.vortex_count();
  if (static_cast<std::size_t>(M) != ode_positions.size())
    throw std::invalid_argument("gronwall_gap: " + std::to_string(ode_positions.size()) +
                                " ODE positions for " + std::to_string(M) + " vortex labels");
  double g = 0.0;
  for (int m = 0; m < M; ++m)
    g += (center_and_moment(cloud, Label::vortex(m)).center - ode_positions[m]).norm();
  return g;
}

void DiagnosticsSpec::validate() const {
  for (double f : fractions)
    if (!(f > 0.0 && f <= 1.0)) throw std::domain_error("diagnostics: fractions must lie in (0, 1]");
  for (double R : cutoff_radii)
    if (!(R > 0.0)) throw std::domain_error("diagnostics: cutoff radii must be positive");
  for (double r : ring_radii)
    if (!(r > 0.0)) throw std::domain_error("diagnostics: ring radii must be positive");
  if (!(q > 2.0)) throw std::domain_error("diagnostics: q must exceed 2");
  if (!(a > 0.0)) throw std::domain_error("diagnostics: a must be positive");
  if (!(c0 >= 0.0)) throw std::domain_error("diagnostics: c0 must be nonnegative");
}

double TheoryBounds::confinement_radius(double a) const { return std::pow(A_eps, a); }

PerturbationNorms perturbation_norms(const ParticleCloud& cloud, double q) {
  PerturbationNorms n;
  double sum_q = 0.0;
  const double cell = cloud.grid_h * cloud.grid_h;
  for (const auto& p : cloud.particles) {
    if (!p.label.is_perturbation()) continue;
    n.l1 += std::abs(p.weight);
    sum_q += std::pow(std::abs(p.omega0), q) * cell;
  }
  n.lq = std::pow(sum_q, 1.0 / q);
  n.F2_sup = n.l1 > 0.0 ? kernel::velocity_bound(n.l1, n.lq, q) : 0.0;
  return n;
}

DiagnosticsTracker::DiagnosticsTracker(DiagnosticsSpec spec, int vortex_count, double epsilon,
                                       TheoryBounds bounds)
    : spec_(std::move(spec)), vortex_count_(vortex_count), epsilon_(epsilon), bounds_(bounds) {
  spec_.validate();
  if (vortex_count_ < 1) throw std::domain_error("DiagnosticsTracker: need at least one vortex");
}

DiagnosticsRecord DiagnosticsTracker::observe(const ParticleCloud& cloud,
                                              std::span<const PlaneVector> ode_positions) {
  const int M = vortex_count_;
  const bool with_ode = !ode_positions.empty();
  if (with_ode && ode_positions.size() != static_cast<std::size_t>(M))
    throw std::invalid_argument("DiagnosticsTracker: ODE position count does not match labels");

  DiagnosticsRecord rec;
  rec.t = cloud.time;
  rec.F2_sup = bounds_.F2_sup;
  rec.A_eps = bounds_.A_eps;
  rec.labels.resize(M);

  for (int m = 0; m < M; ++m) {
    auto& lr = rec.labels[m];
    const Label label = Label::vortex(m);
    const auto cm = center_and_moment(cloud, label);
    lr.circulation = cm.circulation;
    lr.center = cm.center;
    lr.moment = cm.moment;
    const auto dist = sorted_distances(cloud, label, cm.center);
    for (const auto& e : dist) lr.abs_circulation += e.aw;
    require_label_nonempty(lr.abs_circulation);
    lr.support_radius_100 = radius_at_fraction(dist, 1.0);
    for (double f : spec_.fractions) lr.support_radius_frac.push_back(radius_at_fraction(dist, f));
    for (double R : spec_.cutoff_radii) lr.cutoff_mass.push_back(cutoff_mass(cloud, label, R, cm.center));
    for (double r : spec_.ring_radii) lr.ring_mass.push_back(ring_mass(cloud, label, r, cm.center));
    if (with_ode) {
      lr.ode = ode_positions[m];
      lr.gap = (lr.center - lr.ode).norm();
      rec.G += lr.gap;
    }
  }

  double total_abs = 0.0;
  for (const auto& p : cloud.particles) {
    rec.total_circulation += p.weight;
    rec.linear_impulse += p.weight * p.position;
    rec.angular_impulse += p.weight * p.position.norm2();
    if (p.label.is_perturbation()) rec.perturbation_circulation += p.weight;
    total_abs += std::abs(p.weight);
  }

  for (double pw : spec_.outer_powers) {
    const double radius = std::pow(epsilon_, pw);
    double outside = 0.0;
    for (const auto& p : cloud.particles) {
      bool inside = false;
      for (const auto& lr : rec.labels)
        if ((p.position - lr.center).norm() < radius) {
          inside = true;
          break;
        }
      if (!inside) outside += std::abs(p.weight);
    }
    rec.outer_mass.push_back(total_abs > 0.0 ? outside / total_abs : 0.0);
  }

  double sep = std::numeric_limits<double>::infinity();
  for (int m = 0; m < M; ++m)
    for (int l = m + 1; l < M; ++l)
      sep = std::min(sep, (rec.labels[m].center - rec.labels[l].center).norm());
  rec.min_center_separation = M > 1 ? sep : kNaN;
  min_sep_ = anchored_ ? std::min(min_sep_, sep) : sep;

  if (!anchored_) {
    I0_.resize(M);
    gap0_.resize(M);
    for (int m = 0; m < M; ++m) {
      I0_[m] = rec.labels[m].moment;
      gap0_[m] = rec.labels[m].gap;
    }
    anchored_ = true;
  }

  for (int m = 0; m < M; ++m) {
    auto& lr = rec.labels[m];
    if (M < 2) {
      lr.L = lr.moment_bound = lr.center_bound = lr.moment_ratio = lr.gap_ratio = kNaN;
      continue;
    }
    double others = 0.0;
    for (int l = 0; l < M; ++l)
      if (l != m) others += rec.labels[l].abs_circulation;
    lr.L = kernel::lipschitz_farfield_bound(others, min_sep_);
    lr.moment_bound = bounds_.moment_bound(rec.t, I0_[m], lr.L);
    lr.moment_ratio = safe_ratio(lr.moment, lr.moment_bound);
    if (with_ode) {
      lr.center_bound = bounds_.center_gap_bound(rec.t, gap0_[m], I0_[m], lr.L);
      lr.gap_ratio = safe_ratio(lr.gap, lr.center_bound);
    } else {
      lr.center_bound = lr.gap_ratio = kNaN;
    }
  }
  return rec;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::vector<std::pair<std::string, std::string>> DiagnosticsTracker::columns() const {
  std::vector<std::pair<std::string, std::string>> c = {
      {"t", "time"},
      {"total_circulation", "sum of all particle weights"},
      {"linear_impulse_x", "sum w x"},
      {"linear_impulse_y", "sum w y"},
      {"angular_impulse", "sum w |x|^2"},
      {"perturbation_circulation", "sum of weights labeled perturbation"},
      {"G", "sum over vortices of |measured center - ODE position|"},
      {"min_center_separation", "smallest distance between vortex label centers"},
      {"A_eps", "max(interpolation norm of the perturbation, eps)"},
      {"F2_sup", "velocity bound of the perturbation field"},
  };
  for (double p : spec_.outer_powers)
    c.push_back({"outer_mass_p" + format_number(p),
                 "fraction of |w| outside the union of balls of radius eps^" + format_number(p) +
                     " about the label centers"});
  for (int m = 0; m < vortex_count_; ++m) {
    const std::string v = "v" + std::to_string(m) + "_";
    c.push_back({v + "circulation", "label circulation Omega"});
    c.push_back({v + "cx", "label center x"});
    c.push_back({v + "cy", "label center y"});
    c.push_back({v + "I", "second moment (1/2 Omega) sum w |x - p|^2"});
    c.push_back({v + "R1", "support radius, all of the label's |w|"});
    for (double f : spec_.fractions)
      c.push_back({v + "R" + format_number(f), "support radius holding this fraction of |w|"});
    for (double R : spec_.cutoff_radii)
      c.push_back({v + "mu_" + format_number(R), "smooth-cutoff outer mass mu(R)"});
    for (double r : spec_.ring_radii)
      c.push_back({v + "ring_" + format_number(r), "absolute circulation outside radius r"});
    c.push_back({v + "ode_x", "point-vortex ODE position x"});
    c.push_back({v + "ode_y", "point-vortex ODE position y"});
    c.push_back({v + "gap", "|center - ODE position|"});
    c.push_back({v + "L", "Lipschitz estimate used by the bounds"});
    c.push_back({v + "I_bound", "second-moment bound"});
    c.push_back({v + "I_ratio", "I / I_bound"});
    c.push_back({v + "gap_bound", "center-gap bound"});
    c.push_back({v + "gap_ratio", "gap / gap_bound"});
  }
  return c;
}

std::string DiagnosticsTracker::csv_header() const {
  std::string s;
  for (const auto& [name, desc] : columns()) {
    if (!s.empty()) s += ',';
    s += name;
  }
  return s;
}

std::string DiagnosticsTracker::csv_row(const DiagnosticsRecord& r) const {
  std::vector<double> v = {r.t,
                           r.total_circulation,
                           r.linear_impulse.x,
                           r.linear_impulse.y,
                           r.angular_impulse,
                           r.perturbation_circulation,
                           r.G,
                           r.min_center_separation,
                           r.A_eps,
                           r.F2_sup};
  v.insert(v.end(), r.outer_mass.begin(), r.outer_mass.end());
  for (const auto& lr : r.labels) {
    v.insert(v.end(), {lr.circulation, lr.center.x, lr.center.y, lr.moment, lr.support_radius_100});
    v.insert(v.end(), lr.support_radius_frac.begin(), lr.support_radius_frac.end());
    v.insert(v.end(), lr.cutoff_mass.begin(), lr.cutoff_mass.end());
    v.insert(v.end(), lr.ring_mass.begin(), lr.ring_mass.end());
    v.insert(v.end(), {lr.ode.x, lr.ode.y, lr.gap, lr.L, lr.moment_bound, lr.moment_ratio,
                       lr.center_bound, lr.gap_ratio});
  }
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += format_number(v[i]);
  }
  return s;
}

ConfinementReport confinement_check(std::span<const DiagnosticsRecord> records,
                                    const DiagnosticsSpec& spec, double A_eps, double a, double f,
                                    double c0) {
  if (records.empty()) throw std::invalid_argument("confinement_check: empty record series");
  if (!(A_eps > 0.0)) throw std::domain_error("confinement_check: A_eps must be positive");
  std::optional<std::size_t> column;
  if (f < 1.0) {
    for (std::size_t i = 0; i < spec.fractions.size(); ++i)
      if (spec.fractions[i] == f) column = i;
    if (!column) throw std::invalid_argument("confinement_check: fraction was not recorded");
  }
  for (std::size_t k = 1; k < records.size(); ++k)
    if (records[k].t < records[k - 1].t)
      throw std::invalid_argument("confinement_check: record times are not monotone");

  ConfinementReport rep;
  rep.threshold_radius = std::pow(A_eps, a);
  rep.required_time = c0 * std::abs(std::log(A_eps));
  rep.tau_measured = records.back().t;
  for (std::size_t k = 0; k < records.size(); ++k) {
    bool exceeded = false;
    for (const auto& lr : records[k].labels) {
      const double radius = column ? lr.support_radius_frac[*column] : lr.support_radius_100;
      if (radius > rep.threshold_radius) exceeded = true;
    }
    if (exceeded) {
      rep.tau_measured = k == 0 ? 0.0 : records[k - 1].t;
      break;
    }
  }
  // Relative slack so a run whose t_end is c0 |log A_eps| itself counts.
  rep.satisfied = rep.tau_measured >= rep.required_time * (1.0 - 1e-12);
  return rep;
}

}  // namespace vortexlab::diag
