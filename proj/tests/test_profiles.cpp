#include <doctest.h>

#include <cmath>
#include <numbers>

#include "vortexlab/profiles.hpp"

using namespace vortexlab;
using namespace vortexlab::profiles;

namespace {

constexpr double kPi = std::numbers::pi;

// Composite Simpson for 2 pi int_a^b r f(r) dr; independent of the library's
// Gauss-Kronrod quadrature.
template <class F>
double simpson_radial(F f, double a, double b, int n = 20000) {
  const double h = (b - a) / n;
  double s = 0;
  for (int i = 0; i <= n; ++i) {
    const double r = a + i * h;
    const double c = (i == 0 || i == n) ? 1 : (i % 2 ? 4 : 2);
    s += c * r * f(r);
  }
  return 2 * kPi * s * h / 3;
}

// Mass of eta over the whole plane: [0, 1] directly, [1, inf) via r = 1/t
// with the midpoint rule so t = 0 is never evaluated.
double total_mass(const RadialProfile& p) {
  const double inner = simpson_radial([&](double r) { return p(r); }, 0.0, 1.0);
  const int n = 200000;
  double outer = 0;
  for (int i = 0; i < n; ++i) {
    const double t = (i + 0.5) / n;
    outer += p(1.0 / t) / (t * t * t);
  }
  return inner + 2 * std::numbers::pi * outer / n;
}

std::vector<RadialProfile> all_profiles() {
  return {RadialProfile::cauchy(), RadialProfile::algebraic_tail(1.0),
          RadialProfile::algebraic_tail(3.0), RadialProfile::gaussian(),
          RadialProfile::compact_bump()};
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= x.size();
  my /= y.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
    sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
  }
  return sxy / sxx;
}

}  // namespace

TEST_CASE("profile point values") {
  CHECK(eval_profile(RadialProfile::cauchy(), {0, 0}) == doctest::Approx(1 / kPi).epsilon(1e-15));
  CHECK(eval_profile(RadialProfile::gaussian(), {0, 0}) == doctest::Approx(1 / kPi).epsilon(1e-15));
  CHECK(eval_profile(RadialProfile::cauchy(), {1, 0}) == doctest::Approx(0.25 / kPi));
  CHECK(eval_profile(RadialProfile::compact_bump(), {1, 0}) == 0.0);
  CHECK(eval_profile(RadialProfile::compact_bump(), {0, 2}) == 0.0);
  CHECK(RadialProfile::compact_bump().normalization() == doctest::Approx(2.14357).epsilon(1e-5));
}

TEST_CASE("profiles are unit mass, nonnegative, radial and tail bounded") {
  for (const auto& p : all_profiles()) {
    CAPTURE(p.name());
    CHECK(total_mass(p) == doctest::Approx(1.0).epsilon(1e-6));
    const double s = p.tail_check_sigma();
    for (double r = 1e-3; r < 1e4; r *= 1.1) {
      CHECK(p(r) >= 0.0);
      CHECK(eval_profile(p, {r * 0.6, r * 0.8}) == doctest::Approx(p(r)).epsilon(1e-14));
      CHECK(p(r) * (1 + std::pow(r, 2 + s)) <= p.tail_constant() * (1 + 1e-12) + 1e-300);
    }
  }
}

TEST_CASE("mass within a radius") {
  const auto c = RadialProfile::cauchy();
  for (double rho : {0.1, 1.0, 3.0, 25.0}) {
    CHECK(c.mass_within(rho) == doctest::Approx(rho * rho / (1 + rho * rho)).epsilon(1e-14));
    const double quad = simpson_radial([&](double r) { return c(r); }, 0.0, rho);
    CHECK(c.mass_within(rho) == doctest::Approx(quad).epsilon(1e-9));
  }
  for (const auto& p : all_profiles()) {
    CAPTURE(p.name());
    for (double rho : {0.3, 0.9, 2.0}) {
      const double quad = simpson_radial([&](double r) { return p(r); }, 0.0, rho);
      CHECK(p.mass_within(rho) == doctest::Approx(quad).epsilon(1e-8));
      CHECK(p.mass_within(rho) + p.tail_mass(rho) == doctest::Approx(1.0).epsilon(1e-10));
    }
    for (double f : {0.5, 0.9, 0.999}) CHECK(p.mass_within(p.radius_for_mass(f)) == doctest::Approx(f).epsilon(1e-9));
  }
}

TEST_CASE("from_name") {
  CHECK(RadialProfile::from_name("cauchy").kind() == ProfileKind::Cauchy);
  CHECK(RadialProfile::from_name("algebraic", 3.0).sigma() == 3.0);
  CHECK(RadialProfile::from_name("gaussian").kind() == ProfileKind::Gaussian);
  CHECK(RadialProfile::from_name("bump").kind() == ProfileKind::CompactBump);
  CHECK_THROWS(RadialProfile::from_name("lorentzian"));
  CHECK_THROWS(RadialProfile::algebraic_tail(0.0));
}

TEST_CASE("initial vorticity") {
  InitialData one;
  one.vortices = {{{0, 0}, 1.0, RadialProfile::cauchy(), 0.1}};
  CHECK(eval_initial_vorticity(one, {0, 0}) == doctest::Approx(100 / kPi).epsilon(1e-14));
  CHECK(eval_initial_vorticity(one, {10, 0}) <= 1e-4);
  CHECK(eval_initial_vorticity(one, {6, 8}) <= 1e-4);

  InitialData two;
  two.vortices = {{{-1, 0}, 1.0, RadialProfile::cauchy(), 0.1},
                  {{1, 0}, 1.0, RadialProfile::cauchy(), 0.1}};
  CHECK(eval_initial_vorticity(two, {0, 0.3}) ==
        doctest::Approx(2 * eval_initial_vorticity(one, {1, 0.3})).epsilon(1e-14));

  InitialData bad = two;
  bad.vortices[1].center = bad.vortices[0].center;
  CHECK_THROWS(bad.validate());
  bad = two;
  bad.vortices[0].gamma = 0;
  CHECK_THROWS(bad.validate());
  bad = two;
  bad.vortices[0].epsilon = 0;
  CHECK_THROWS(bad.validate());
}

TEST_CASE("exponents") {
  CHECK(beta_opt(2.0) == 0.5);
  CHECK(beta_opt(4.0) == doctest::Approx(1.0 / 3.0));
  CHECK(beta_opt(4.0) < beta_opt(2.0));
  for (double s : {0.5, 1.0, 2.0, 7.0}) {
    CHECK(beta_opt(s) > 1 / (s + 1));
    CHECK(beta_opt(s) < 1);
  }
  CHECK_THROWS_AS(beta_opt(0.0), std::domain_error);
  CHECK(concentration_exponent(2.0) == 1.0);

  CHECK(a0_exponent(1.5, 2.0) == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(a0_exponent(2.0 - 1e-9, 2.0) > 0.0);
  CHECK(a0_exponent(2.0 - 1e-9, 2.0) < 1e-9);
  CHECK(a0_exponent(2.0 / 3.0 + 1e-9, 2.0) > 0.0);
  CHECK(a0_exponent(2.0 / 3.0 + 1e-9, 2.0) < 1e-8);
  CHECK_THROWS_AS(a0_exponent(2.0, 2.0), std::domain_error);
  CHECK_THROWS_AS(a0_exponent(0.5, 2.0), std::domain_error);
}

TEST_CASE("decompose: closed-form oracle for the Cauchy tail") {
  const auto c = RadialProfile::cauchy();
  const auto r = decompose(c, 0.01, 0.5);
  CHECK(r.tail_mass == doctest::Approx(1.0 / 101.0).epsilon(1e-12));
  CHECK(std::abs(r.tail_mass - 1.0 / 101.0) <= 1e-6);
  CHECK(r.core_mass + r.tail_mass == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.cutoff_radius == std::pow(0.01, 0.5));
  CHECK(r.lp_norms.count(1.0) == 1);
  CHECK(r.lp_norms.count(4.0) == 1);

  // Tail of (1/eps^2) eta(x/eps) beyond eps^(1-beta), rho = eps^-beta:
  //   |tail|_1 = 1/(1+rho^2)
  //   |tail|_4^4 = eps^-6 int_{r>rho} pi^-4 (1+r^2)^-8 2 pi r dr
  //              = eps^-6 (1+rho^2)^-7 / (7 pi^3)
  for (double eps : {0.1, 0.05, 0.025, 0.0125, 1e-4}) {
    const auto d = decompose(c, eps, 0.5);
    const double rho2 = 1.0 / eps;
    const double l1 = 1.0 / (1.0 + rho2);
    const double l4 = std::pow(std::pow(eps, -6.0) * std::pow(1.0 + rho2, -7.0) / (7 * kPi * kPi * kPi), 0.25);
    CHECK(d.lp_norms.at(1.0) == doctest::Approx(l1).epsilon(1e-10));
    CHECK(d.lp_norms.at(4.0) == doctest::Approx(l4).epsilon(1e-8));
    CHECK(d.interpolation == doctest::Approx(std::pow(l4, 2.0 / 3.0) * std::pow(l1, 1.0 / 3.0)).epsilon(1e-8));
    CHECK(d.A_eps == std::max(d.interpolation, eps));
  }
}

TEST_CASE("decompose: scaling exponents") {
  const auto c = RadialProfile::cauchy();
  // The tail mass 1 - gamma_eps decays like eps^(beta sigma) = eps^1.
  std::vector<double> eps{1e-3, 5e-4, 2.5e-4, 1.25e-4}, tail, A;
  for (double e : eps) {
    const auto d = decompose(c, e, beta_opt(2.0));
    tail.push_back(d.tail_mass);
    A.push_back(d.A_eps);
  }
  CHECK(slope(eps, tail) == doctest::Approx(concentration_exponent(2.0)).epsilon(1e-3));
  // The interpolation quantity decays like eps^(sigma/(sigma+2)) = eps^(1/2),
  // as the closed form above shows; see the decomposition acceptance check.
  CHECK(slope(eps, A) == doctest::Approx(0.5).epsilon(1e-3));

  for (const auto& p : all_profiles()) {
    CAPTURE(p.name());
    const auto a = decompose(p, 0.1, 0.5), b = decompose(p, 0.05, 0.5);
    CHECK(b.tail_mass <= a.tail_mass);
    CHECK(a.core_mass + a.tail_mass == doctest::Approx(1.0).epsilon(1e-6));
  }
  CHECK_THROWS_AS(decompose(c, 0.1, 0.0), std::domain_error);
  CHECK_THROWS_AS(decompose(c, 1.0, 0.5), std::domain_error);
}

TEST_CASE("sample_particles: circulation, symmetry, convergence") {
  InitialData d;
  d.vortices = {{{0.3, -0.2}, 1.0, RadialProfile::cauchy(), 0.05}};
  auto cloud = sample_particles(d, 0.05 / 8, 0.999);
  double total = 0;
  PlaneVector moment{0, 0};
  for (const auto& p : cloud.particles) {
    total += p.weight;
    moment += p.position * p.weight;
    CHECK(p.label == Label::vortex(0));
  }
  CHECK(std::abs(total - 1.0) <= 2e-3);
  CHECK(distance(moment * (1.0 / total), d.vortices[0].center) <= 1e-12);
  CHECK(cloud.blob_delta == 2 * cloud.grid_h);
  CHECK(cloud.grid_h == 0.05 / 8);

  // Second-order midpoint rule: error against the closed-form mass inside
  // the truncation radius shrinks by about 4 per halving of h.
  d.vortices[0].profile = RadialProfile::gaussian();
  double prev_err = 0;
  std::size_t prev_n = 0;
  for (double h : {0.05 / 2, 0.05 / 4, 0.05 / 8}) {
    auto c = sample_particles(d, h, 0.999);
    double s = 0;
    for (const auto& p : c.particles) s += p.weight;
    // Exact mass of the Gaussian over the sampled cells (erf per axis), so
    // the staircase truncation does not enter the error.
    double exact = 0;
    for (const auto& p : c.particles) {
      const PlaneVector off = p.position - d.vortices[0].center;
      const double e = d.vortices[0].epsilon;
      const double a = (off.x - h / 2) / e, b = (off.x + h / 2) / e;
      const double cc = (off.y - h / 2) / e, dd = (off.y + h / 2) / e;
      exact += 0.25 * (std::erf(b) - std::erf(a)) * (std::erf(dd) - std::erf(cc));
    }
    const double err = std::abs(s - exact);
    if (prev_n) {
      CHECK(static_cast<double>(c.size()) / prev_n == doctest::Approx(4.0).epsilon(0.1));
      CHECK(prev_err / err == doctest::Approx(4.0).epsilon(0.15));
    }
    prev_err = err;
    prev_n = c.size();
  }
}

TEST_CASE("sample_particles: labels, determinism, limits") {
  InitialData d;
  d.vortices = {{{-0.5, 0}, 1.0, RadialProfile::cauchy(), 0.05},
                {{0.5, 0}, -2.0, RadialProfile::cauchy(), 0.05}};
  d.perturbation.split_beta = 0.5;
  d.perturbation.blobs = {{{0, 1}, 0.1, RadialProfile::gaussian(), 0.1}};
  auto a = sample_particles(d, 0.05 / 4, 0.99);
  auto b = sample_particles(d, 0.05 / 4, 0.99);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.particles[i].position == b.particles[i].position);
    CHECK(a.particles[i].weight == b.particles[i].weight);
    CHECK(a.particles[i].label == b.particles[i].label);
  }
  const double cut = std::pow(0.05, 0.5);
  bool seen_blob = false;
  int last_label = 0;
  for (const auto& p : a.particles) {
    if (p.label.is_perturbation()) {
      const double d0 = distance(p.position, {-0.5, 0}), d1 = distance(p.position, {0.5, 0});
      seen_blob = seen_blob || (d0 > 0.6 && d1 > 0.6);
    } else {
      const PlaneVector c = p.label.index == 0 ? PlaneVector{-0.5, 0} : PlaneVector{0.5, 0};
      CHECK(distance(p.position, c) <= cut);
      CHECK(p.label.index >= last_label);
      last_label = p.label.index;
    }
  }
  CHECK(seen_blob);
  CHECK(a.particles.back().label.is_perturbation());
  CHECK(a.vortex_count() == 2);

  CHECK_THROWS_AS(sample_particles(d, 0.05 / 4, 0.99, 100), std::length_error);
  CHECK_THROWS(sample_particles(d, 0.0, 0.99));
  CHECK_THROWS(sample_particles(d, 0.01, 1.0));
}
