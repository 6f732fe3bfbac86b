#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "vortexlab/diagnostics.hpp"
#include "vortexlab/profiles.hpp"

using namespace vortexlab;
using namespace vortexlab::diag;

namespace {

ParticleCloud cloud_of(std::vector<std::pair<PlaneVector, double>> pts, Label l = Label::vortex(0)) {
  ParticleCloud c;
  for (auto& [x, w] : pts) c.particles.push_back({x, w, l, w});
  c.grid_h = 0.1;
  c.blob_delta = 0.2;
  return c;
}

ParticleCloud random_cloud(std::mt19937_64& rng, int n, double sign = 1.0) {
  std::normal_distribution<double> g(0, 0.3);
  std::uniform_real_distribution<double> w(0.1, 1.0);
  ParticleCloud c;
  for (int i = 0; i < n; ++i)
    c.particles.push_back({{g(rng) + 1.0, g(rng) - 0.5}, sign * w(rng), Label::vortex(0), 1.0});
  c.grid_h = 0.1;
  c.blob_delta = 0.2;
  return c;
}

}  // namespace

TEST_CASE("cutoff profile") {
  CHECK(cutoff_profile(0.0) == 1.0);
  CHECK(cutoff_profile(1.0) == 1.0);
  CHECK(cutoff_profile(1.5) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(cutoff_profile(2.0) == 0.0);
  CHECK(cutoff_profile(7.0) == 0.0);
  for (double s = 0; s < 2.5; s += 0.01) CHECK(cutoff_profile(s + 0.01) <= cutoff_profile(s));
}

TEST_CASE("center and moment") {
  const double h = 0.3, g = 2.0;
  auto c = cloud_of({{{h, 0}, g / 4}, {{-h, 0}, g / 4}, {{0, h}, g / 4}, {{0, -h}, g / 4}});
  auto cm = center_and_moment(c, Label::vortex(0));
  CHECK(cm.center.norm() <= 1e-16);
  CHECK(cm.moment == doctest::Approx(h * h / 2).epsilon(1e-15));
  CHECK(cm.circulation == g);

  auto one = cloud_of({{{0.4, -2}, 1.5}});
  cm = center_and_moment(one, Label::vortex(0));
  CHECK(cm.center == PlaneVector{0.4, -2});
  CHECK(cm.moment == 0.0);

  std::mt19937_64 rng(5);
  auto r = random_cloud(rng, 200);
  auto base = center_and_moment(r, Label::vortex(0));
  const PlaneVector v{3.5, -1.25};
  for (auto& p : r.particles) p.position += v;
  auto moved = center_and_moment(r, Label::vortex(0));
  CHECK(distance(moved.center, base.center + v) <= 1e-14 * (1 + moved.center.norm()));
  CHECK(moved.moment == doctest::Approx(base.moment).epsilon(1e-12));

  auto neg = random_cloud(rng, 50, -1.0);
  CHECK(center_and_moment(neg, Label::vortex(0)).moment >= 0.0);

  auto zero = cloud_of({{{0, 0}, 1.0}, {{1, 0}, -1.0}});
  CHECK_THROWS_AS(center_and_moment(zero, Label::vortex(0)), std::domain_error);
}

TEST_CASE("cutoff and ring masses") {
  const double R = 0.5;
  auto inside = cloud_of({{{0, 0}, 1}, {{0.1, 0}, 1}, {{-0.1, 0}, 1}});
  CHECK(cutoff_mass(inside, Label::vortex(0), R) == 0.0);

  auto far = cloud_of({{{3 * R, 0}, 1.0}});
  CHECK(cutoff_mass(far, Label::vortex(0), R, {0, 0}) == 1.0);
  auto mid = cloud_of({{{1.5 * R, 0}, 1.0}});
  CHECK(cutoff_mass(mid, Label::vortex(0), R, {0, 0}) == doctest::Approx(0.5).epsilon(1e-15));

  std::mt19937_64 rng(6);
  for (int k = 0; k < 50; ++k) {
    auto c = random_cloud(rng, 300, k % 2 ? 1.0 : -1.0);
    const auto cm = center_and_moment(c, Label::vortex(0));
    double maxd = 0;
    for (const auto& p : c.particles) maxd = std::max(maxd, distance(p.position, cm.center));
    CHECK(ring_mass(c, Label::vortex(0), maxd * 1.01) == 0.0);
    double abs_total = 0;
    for (const auto& p : c.particles) abs_total += std::abs(p.weight);
    CHECK(ring_mass(c, Label::vortex(0), 1e-12) == doctest::Approx(abs_total).epsilon(1e-12));
    double prev_mu = 2, prev_m = INFINITY;
    for (double Rk = 0.05; Rk < 1.5; Rk *= 1.2) {
      const double mu = cutoff_mass(c, Label::vortex(0), Rk);
      const double m = ring_mass(c, Label::vortex(0), Rk) / std::abs(cm.circulation);
      CHECK(mu <= m + 1e-14);
      CHECK(m <= cutoff_mass(c, Label::vortex(0), Rk / 2) + 1e-14);
      CHECK(mu <= prev_mu + 1e-15);
      CHECK(m <= prev_m);
      prev_mu = mu;
      prev_m = m;
    }
  }
}

TEST_CASE("support radius") {
  auto one = cloud_of({{{0.4, -2}, 1.5}});
  CHECK(support_radius(one, Label::vortex(0), 0.5) == 0.0);
  CHECK(support_radius(one, Label::vortex(0), 1.0) == 0.0);

  std::vector<std::pair<PlaneVector, double>> ring;
  for (int k = 0; k < 12; ++k) {
    const double th = 2 * std::numbers::pi * k / 12;
    ring.push_back({{0.7 * std::cos(th), 0.7 * std::sin(th)}, 1.0});
  }
  auto rc = cloud_of(ring);
  for (double f : {0.1, 0.5, 0.99, 1.0})
    CHECK(support_radius(rc, Label::vortex(0), f) == doctest::Approx(0.7).epsilon(1e-14));

  auto two = cloud_of({{{1, 0}, 1.0}, {{2, 0}, 1.0}});
  CHECK(support_radius(two, Label::vortex(0), 0.5, {0, 0}) == 1.0);
  CHECK(support_radius(two, Label::vortex(0), 1.0, {0, 0}) == 2.0);

  std::mt19937_64 rng(7);
  auto r = random_cloud(rng, 500);
  double prev = 0;
  for (double f = 0.05; f <= 1.0; f += 0.05) {
    const double s = support_radius(r, Label::vortex(0), f);
    CHECK(s >= prev);
    prev = s;
  }
  CHECK(support_radius(r, Label::vortex(0), 0.99) <= support_radius(r, Label::vortex(0), 1.0));
}

TEST_CASE("theory moment bound") {
  CHECK(theory_moment_bound(0.0, 0.3, 1.2, 0.5) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(theory_moment_bound(0.7, 0.3, 1.2, 0.0) ==
        doctest::Approx(0.6 * std::exp(2 * 1.2 * 0.7)).epsilon(1e-14));
  const double t = 0.4, I0 = 0.01, L = 2.0, F = 0.3;
  const double integral = (1 - std::exp(-L * t)) / L;
  CHECK(theory_moment_bound(t, I0, L, F) ==
        doctest::Approx(2 * std::exp(2 * L * t) * (I0 + F * F / 2 * integral * integral)).epsilon(1e-14));
  CHECK_THROWS_AS(theory_moment_bound(1, 1, 0, 0), std::domain_error);

  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0, 2);
  for (int k = 0; k < 1000; ++k) {
    const double tt = u(rng), i = u(rng), l = u(rng) + 0.01, f = u(rng), d = 0.1 * u(rng);
    const double b = theory_moment_bound(tt, i, l, f);
    CHECK(theory_moment_bound(tt + d, i, l, f) >= b);
    CHECK(theory_moment_bound(tt, i + d, l, f) >= b);
    CHECK(theory_moment_bound(tt, i, l, f + d) >= b);
  }
}

TEST_CASE("theory center bound") {
  CHECK(theory_center_bound(0.0, 0.25, 0.3, 1.2, 0.5) == doctest::Approx(0.25).epsilon(1e-15));
  for (double t : {0.0, 0.5, 3.0}) CHECK(theory_center_bound(t, 0, 0, 1.3, 0) == 0.0);
  CHECK_THROWS_AS(theory_center_bound(1, 0, 0, -1, 0), std::domain_error);

  // Iterated integral by direct quadrature.
  const double t = 0.8, g0 = 0.01, I0 = 0.04, L = 1.7, F = 0.2;
  const int n = 4000;
  double dbl = 0;
  for (int i = 0; i < n; ++i) {
    const double r = (i + 0.5) * t / n;
    dbl += (1 - std::exp(-L * r)) / L * (t / n);
  }
  const double expected = std::exp(L * t) * (g0 + 2 * L * (std::sqrt(I0) + F / (std::sqrt(2.0) * L)) * dbl +
                                             F * (1 - std::exp(-L * t)) / L);
  CHECK(theory_center_bound(t, g0, I0, L, F) == doctest::Approx(expected).epsilon(1e-6));

  // Tiny Lt uses the series branch; it must join the closed form smoothly.
  const double a = theory_center_bound(1e-9, 0, 1, 1.0, 0), b = theory_center_bound(1e-9, 0, 1, 1.0 + 1e-9, 0);
  CHECK(a == doctest::Approx(2 * 0.5e-18).epsilon(1e-6));
  CHECK(b == doctest::Approx(a).epsilon(1e-6));

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0, 2);
  for (int k = 0; k < 1000; ++k) {
    const double tt = u(rng), g = u(rng), i = u(rng), l = u(rng) + 0.01, f = u(rng);
    const double b2 = theory_center_bound(2 * tt, g, i, l, f);
    const double poly = g + 2 * l * (std::sqrt(i) + f / (std::sqrt(2.0) * l)) * 2 * tt * tt + f * 2 * tt;
    CHECK(b2 <= std::exp(2 * l * tt) * poly * (1 + 1e-12));
  }
}

TEST_CASE("gronwall gap") {
  ParticleCloud c;
  c.particles = {{{0, 0}, 1, Label::vortex(0), 1}, {{1, 1}, 1, Label::vortex(1), 1}};
  c.grid_h = 0.1;
  c.blob_delta = 0.2;
  std::vector<PlaneVector> same{{0, 0}, {1, 1}};
  CHECK(gronwall_gap(c, same) == 0.0);
  std::vector<PlaneVector> moved{{-3, -4}, {1, 1}};
  CHECK(gronwall_gap(c, moved) == doctest::Approx(5.0).epsilon(1e-15));
  std::vector<PlaneVector> short_list{{0, 0}};
  CHECK_THROWS(gronwall_gap(c, short_list));

  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int k = 0; k < 100; ++k) {
    const PlaneVector a{u(rng), u(rng)}, b{u(rng), u(rng)};
    std::vector<PlaneVector> pa{PlaneVector{0, 0} + a, {1, 1}}, pb{PlaneVector{0, 0} + b, {1, 1}},
        pab{PlaneVector{0, 0} + a + b, {1, 1}};
    CHECK(gronwall_gap(c, pab) <= gronwall_gap(c, pa) + gronwall_gap(c, pb) + 1e-15);
  }
}

TEST_CASE("confinement check") {
  DiagnosticsSpec spec;
  spec.fractions = {0.99};
  auto rec = [](double t, double r) {
    DiagnosticsRecord d;
    d.t = t;
    LabelRecord l;
    l.support_radius_frac = {r};
    l.support_radius_100 = 2 * r;
    d.labels = {l};
    return d;
  };
  const double A = 0.05, a = 0.45;
  const double thr = std::pow(A, a);
  std::vector<DiagnosticsRecord> ok{rec(0, 0.1 * thr), rec(0.5, 0.2 * thr), rec(1.0, 0.3 * thr)};
  auto r = confinement_check(ok, spec, A, a, 0.99, 0.1);
  CHECK(r.tau_measured == 1.0);
  CHECK(r.satisfied);
  CHECK(r.required_time == doctest::Approx(0.1 * std::abs(std::log(A))));

  std::vector<DiagnosticsRecord> early{rec(0, 2 * thr), rec(0.5, 0.2 * thr)};
  r = confinement_check(early, spec, A, a, 0.99, 0.1);
  CHECK(r.tau_measured == 0.0);
  CHECK(!r.satisfied);

  std::vector<DiagnosticsRecord> mid{rec(0, 0.1 * thr), rec(0.2, 0.2 * thr), rec(0.4, 1.1 * thr)};
  r = confinement_check(mid, spec, A, a, 0.99, 0.1);
  CHECK(r.tau_measured == 0.2);
  CHECK(!r.satisfied);
  // f = 1 uses the max radius column
  r = confinement_check(ok, spec, A, a, 1.0, 0.1);
  CHECK(r.tau_measured == 1.0);

  std::vector<DiagnosticsRecord> backwards{rec(1, 0), rec(0, 0)};
  CHECK_THROWS(confinement_check(backwards, spec, A, a, 0.99, 0.1));
  CHECK_THROWS(confinement_check(ok, spec, A, a, 0.5, 0.1));
}

TEST_CASE("tracker records satisfy the structural invariants") {
  profiles::InitialData d;
  d.vortices = {{{-0.5, 0}, 1.0, profiles::RadialProfile::cauchy(), 0.1},
                {{0.5, 0}, 0.5, profiles::RadialProfile::cauchy(), 0.1}};
  d.perturbation.split_beta = 0.5;
  auto c = profiles::sample_particles(d, 0.025, 0.99);
  DiagnosticsSpec spec;
  spec.fractions = {0.5, 0.9, 0.99};
  spec.cutoff_radii = {0.05, 0.1, 0.2, 0.4};
  spec.ring_radii = {0.05, 0.1, 0.2, 0.4};
  spec.outer_powers = {0.2, 0.5};
  const auto norms = perturbation_norms(c, 4.0);
  CHECK(norms.l1 > 0);
  CHECK(norms.F2_sup == doctest::Approx(kernel::velocity_bound(norms.l1, norms.lq, 4.0)));
  DiagnosticsTracker tr(spec, 2, 0.1, {0.1, norms.F2_sup});
  std::vector<PlaneVector> ode{{-0.5, 0}, {0.5, 0}};
  auto rec = tr.observe(c, ode);

  double label_sum = rec.perturbation_circulation;
  for (const auto& l : rec.labels) label_sum += l.circulation;
  double total = 0;
  for (const auto& p : c.particles) total += p.weight;
  CHECK(rec.total_circulation == total);
  CHECK(label_sum == doctest::Approx(total).epsilon(1e-14));

  for (const auto& l : rec.labels) {
    CHECK(l.moment >= 0);
    for (std::size_t k = 1; k < l.support_radius_frac.size(); ++k)
      CHECK(l.support_radius_frac[k] >= l.support_radius_frac[k - 1]);
    CHECK(l.support_radius_frac.back() <= l.support_radius_100);
    for (std::size_t k = 1; k < l.cutoff_mass.size(); ++k) {
      CHECK(l.cutoff_mass[k] <= l.cutoff_mass[k - 1]);
      CHECK(l.ring_mass[k] <= l.ring_mass[k - 1]);
    }
    CHECK(l.moment_bound == doctest::Approx(2 * l.moment));
    CHECK(l.L == doctest::Approx(kernel::lipschitz_farfield_bound(rec.labels[0].abs_circulation +
                                                                   rec.labels[1].abs_circulation -
                                                                   l.abs_circulation,
                                                                   1.0)));
  }
  CHECK(rec.min_center_separation == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rec.outer_mass[1] >= rec.outer_mass[0]);

  const auto header = tr.csv_header();
  const auto row = tr.csv_row(rec);
  CHECK(std::count(header.begin(), header.end(), ',') == std::count(row.begin(), row.end(), ','));
  CHECK(tr.columns().size() == static_cast<std::size_t>(std::count(header.begin(), header.end(), ',') + 1));
  CHECK(header.rfind("t,total_circulation", 0) == 0);
}

TEST_CASE("single vortex leaves L undefined") {
  profiles::InitialData d;
  d.vortices = {{{0, 0}, 1.0, profiles::RadialProfile::gaussian(), 0.1}};
  auto c = profiles::sample_particles(d, 0.05, 0.99);
  DiagnosticsTracker tr({}, 1, 0.1, {0.1, 0.0});
  std::vector<PlaneVector> ode{{0, 0}};
  auto rec = tr.observe(c, ode);
  CHECK(std::isnan(rec.labels[0].L));
  CHECK(tr.csv_row(rec).find("nan") != std::string::npos);
}

TEST_CASE("format_number round trips") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 0.0}) CHECK(std::stod(format_number(v)) == v);
  CHECK(format_number(NAN) == "nan");
  CHECK(format_number(INFINITY) == "inf");
  CHECK(format_number(-INFINITY) == "-inf");
}
