#include <doctest.h>

#include <cmath>
#include <numbers>

#include "vortexlab/pointvortex.hpp"

using namespace vortexlab;
using namespace vortexlab::pointvortex;

namespace {

constexpr double kPi = std::numbers::pi;

VortexConfiguration opposite_pair() { return {{{0, 0.5}, {0, -0.5}}, {2 * kPi, -2 * kPi}}; }
VortexConfiguration same_pair() { return {{{0.5, 0}, {-0.5, 0}}, {2 * kPi, 2 * kPi}}; }

}  // namespace

TEST_CASE("helmholtz_rhs hand values") {
  VortexConfiguration single{{{3, -1}}, {1.7}};
  auto v = helmholtz_rhs(single);
  CHECK(v[0] == PlaneVector{0, 0});

  v = helmholtz_rhs(opposite_pair());
  for (const auto& vm : v) {
    CHECK(vm.x == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(vm.y) < 1e-15);
  }

  v = helmholtz_rhs(same_pair());
  CHECK(std::abs(v[0].x) < 1e-15);
  CHECK(v[0].y == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(v[1].y == doctest::Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("configuration validation") {
  VortexConfiguration coincident{{{1, 1}, {1, 1}}, {1, 1}};
  CHECK_THROWS_AS(helmholtz_rhs(coincident), std::domain_error);
  CHECK_THROWS_AS(conserved_quantities(coincident), std::domain_error);
  VortexConfiguration zero_gamma{{{0, 0}, {1, 1}}, {1, 0}};
  CHECK_THROWS(zero_gamma.validate());
  VortexConfiguration mismatch{{{0, 0}, {1, 1}}, {1}};
  CHECK_THROWS(mismatch.validate());
  IntegratorSpec bad;
  bad.dt = 0;
  CHECK_THROWS(bad.validate());
  bad = {};
  bad.min_separation = 0;
  CHECK_THROWS(bad.validate());
}

TEST_CASE("integrate: analytic trajectories") {
  IntegratorSpec spec;
  spec.dt = 1e-3;

  spec.t_end = 2.5;
  VortexConfiguration single{{{3, -1}}, {1.7}};
  auto st = integrate(single, spec);
  for (const auto& p : st.points) CHECK(p.positions[0] == PlaneVector{3, -1});

  spec.t_end = 1.0;
  auto pair = opposite_pair();
  auto tr = integrate(pair, spec);
  CHECK(tr.points.front().t == 0.0);
  CHECK(tr.points.back().t == 1.0);
  CHECK(tr.points.size() == 1001);
  CHECK(!tr.collapse_stop);
  for (std::size_t m = 0; m < 2; ++m)
    CHECK(distance(tr.points.back().positions[m], pair.positions[m] + PlaneVector{1, 0}) < 1e-6);

  spec.t_end = kPi;
  auto corot = same_pair();
  auto orbit = integrate(corot, spec);
  CHECK(orbit.points.back().t == kPi);
  for (std::size_t m = 0; m < 2; ++m)
    CHECK(distance(orbit.points.back().positions[m], corot.positions[m]) < 1e-6);
}

TEST_CASE("collapse guard flags instead of throwing") {
  // Two vortices already closer than the guard distance.
  VortexConfiguration close{{{0, 0}, {1e-3, 0}, {5, 5}}, {1, -1, 1}};
  IntegratorSpec spec;
  spec.dt = 1e-3;
  spec.t_end = 1;
  spec.min_separation = 2e-3;
  auto tr = integrate(close, spec);
  CHECK(tr.collapse_stop);
  CHECK(tr.points.size() <= 2);
}

TEST_CASE("conserved quantities hand values") {
  VortexConfiguration single{{{3, -1}}, {1.7}};
  auto q = conserved_quantities(single);
  CHECK(q.hamiltonian == 0.0);
  CHECK(q.center == PlaneVector{3, -1});
  CHECK(!q.center_is_impulse);

  q = conserved_quantities(opposite_pair());
  CHECK(q.center_is_impulse);
  CHECK(q.center.x == 0.0);
  CHECK(q.center.y == doctest::Approx(2 * kPi).epsilon(1e-15));
  CHECK(q.total_circulation == 0.0);

  q = conserved_quantities(same_pair());
  CHECK(q.hamiltonian == 0.0);
  CHECK(q.angular_impulse == doctest::Approx(2 * kPi * 0.5).epsilon(1e-15));

  VortexConfiguration tri{{{0, 0}, {2, 0}, {0, 3}}, {1, 2, -0.5}};
  q = conserved_quantities(tri);
  const double h = -(1 * 2 * std::log(2.0) + 1 * -0.5 * std::log(3.0) +
                     2 * -0.5 * std::log(std::sqrt(13.0))) / (2 * kPi);
  CHECK(q.hamiltonian == doctest::Approx(h).epsilon(1e-14));
  CHECK(q.center.x == doctest::Approx(4.0 / 2.5));
  CHECK(q.center.y == doctest::Approx(-1.5 / 2.5));
}

TEST_CASE("invariants over 1e4 RK4 steps") {
  for (auto c : {opposite_pair(), same_pair(),
                 VortexConfiguration{{{0, 0}, {1, 0}, {0, 1.5}}, {1, 1, -0.5}}}) {
    const auto q0 = conserved_quantities(c);
    const double hscale = std::max(std::abs(q0.hamiltonian), 2 * kPi);
    const double iscale = std::max(std::abs(q0.angular_impulse), 1.0);
    for (int k = 0; k < 10000; ++k) c = rk4_step(c, 1e-3);
    const auto q = conserved_quantities(c);
    CHECK(q.total_circulation == q0.total_circulation);
    CHECK((q.center - q0.center).norm() <= 1e-12 * std::max(1.0, q0.center.norm()));
    CHECK(std::abs(q.hamiltonian - q0.hamiltonian) <= 1e-8 * hscale);
    CHECK(std::abs(q.angular_impulse - q0.angular_impulse) <= 1e-8 * iscale);
  }
}

TEST_CASE("time reversal") {
  for (auto c0 : {opposite_pair(), same_pair()}) {
    auto c = c0;
    for (int k = 0; k < 2000; ++k) c = rk4_step(c, 1e-3);
    for (int k = 0; k < 2000; ++k) c = rk4_step(c, -1e-3);
    for (std::size_t m = 0; m < 2; ++m) CHECK(distance(c.positions[m], c0.positions[m]) < 1e-8);
  }
}

TEST_CASE("equivariance and scaling of the right-hand side") {
  VortexConfiguration c{{{0.1, 0.2}, {1.3, -0.4}, {-0.7, 0.9}}, {1.0, -2.0, 0.5}};
  const auto v = helmholtz_rhs(c);

  auto shifted = c;
  for (auto& p : shifted.positions) p += PlaneVector{0.37, -1.25};
  const auto vs = helmholtz_rhs(shifted);

  const double th = 0.83, cs = std::cos(th), sn = std::sin(th);
  auto rot = [&](PlaneVector p) { return PlaneVector{cs * p.x - sn * p.y, sn * p.x + cs * p.y}; };
  auto rotated = c;
  for (auto& p : rotated.positions) p = rot(p);
  const auto vr = helmholtz_rhs(rotated);

  const double lambda = 3.5;
  auto scaled = c;
  for (auto& p : scaled.positions) p *= lambda;
  const auto vl = helmholtz_rhs(scaled);

  for (std::size_t m = 0; m < 3; ++m) {
    CHECK((vs[m] - v[m]).norm() <= 1e-14 * v[m].norm() + 1e-14);
    CHECK((vr[m] - rot(v[m])).norm() <= 1e-14 * v[m].norm() + 1e-14);
    CHECK((vl[m] * lambda - v[m]).norm() <= 1e-14 * v[m].norm());
  }
}

TEST_CASE("blob kernel variant of the ODE") {
  auto c = same_pair();
  const auto v = helmholtz_rhs(c, kernel::BlobSpec::blob(1.0));
  // |z|^2 + delta^2 = 2 halves the singular speed
  CHECK(v[0].y == doctest::Approx(0.5).epsilon(1e-15));
}
