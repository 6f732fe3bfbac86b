#include "vortexlab/profiles.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/expint.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace vortexlab::profiles {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kQuadTol = 1e-12;
// sup_s exp(-s)(1 + s^3), attained at the largest root of s^3 - 3 s^2 + 1.
constexpr double kGaussianTailSup = 1.3971;

template <class F>
double radial_integral(F&& f, double a, double b) {
  if (!(b > a)) return 0.0;
  auto integrand = [&](double r) { return 2.0 * kPi * r * f(r); };
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, a, b, 20,
                                                                        kQuadTol);
}

}  // namespace

RadialProfile::RadialProfile(ProfileKind k, double sigma) : kind_(k), sigma_(sigma), norm_(0.0) {
  switch (kind_) {
    case ProfileKind::Cauchy:
    case ProfileKind::Gaussian:
      norm_ = 1.0 / kPi;
      break;
    case ProfileKind::AlgebraicTail: {
      const double s = 2.0 + sigma_;
      norm_ = s * std::sin(2.0 * kPi / s) / (2.0 * kPi * kPi);
      break;
    }
    case ProfileKind::CompactBump: {
      const double j = std::exp(-1.0) - boost::math::expint(1, 1.0);
      norm_ = 1.0 / (kPi * j);
      break;
    }
  }
}

RadialProfile RadialProfile::algebraic_tail(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw std::domain_error("RadialProfile: tail exponent sigma must be positive and finite");
  return RadialProfile(ProfileKind::AlgebraicTail, sigma);
}

RadialProfile RadialProfile::gaussian() { return RadialProfile(ProfileKind::Gaussian, kInf); }

RadialProfile RadialProfile::compact_bump() {
  return RadialProfile(ProfileKind::CompactBump, kInf);
}

RadialProfile RadialProfile::from_name(const std::string& kind, double sigma) {
  if (kind == "cauchy") return cauchy();
  if (kind == "algebraic") return algebraic_tail(sigma);
  if (kind == "gaussian") return gaussian();
  if (kind == "bump") return compact_bump();
  throw std::invalid_argument("unknown profile kind '" + kind +
                              "' (expected cauchy, algebraic, gaussian or bump)");
}

std::string RadialProfile::name() const {
  switch (kind_) {
    case ProfileKind::Cauchy: return "cauchy";
    case ProfileKind::AlgebraicTail: return "algebraic";
    case ProfileKind::Gaussian: return "gaussian";
    case ProfileKind::CompactBump: return "bump";
  }
  return "unknown";
}

double RadialProfile::operator()(double r) const {
  switch (kind_) {
    case ProfileKind::Cauchy: {
      const double d = 1.0 + r * r;
      return norm_ / (d * d);
    }
    case ProfileKind::AlgebraicTail:
      return norm_ / (1.0 + std::pow(r, 2.0 + sigma_));
    case ProfileKind::Gaussian:
      return norm_ * std::exp(-r * r);
    case ProfileKind::CompactBump:
      return r < 1.0 ? norm_ * std::exp(-1.0 / (1.0 - r * r)) : 0.0;
  }
  return 0.0;
}

double RadialProfile::tail_mass(double rho) const {
  if (!(rho >= 0.0)) throw std::domain_error("tail_mass: negative radius");
  switch (kind_) {
    case ProfileKind::Cauchy: return 1.0 / (1.0 + rho * rho);
    case ProfileKind::Gaussian: return std::exp(-rho * rho);
    case ProfileKind::AlgebraicTail:
      return radial_integral(*this, rho, kInf);
    case ProfileKind::CompactBump:
      return rho >= 1.0 ? 0.0 : radial_integral(*this, rho, 1.0);
  }
  return 0.0;
}

double RadialProfile::mass_within(double rho) const {
  if (!(rho >= 0.0)) throw std::domain_error("mass_within: negative radius");
  switch (kind_) {
    case ProfileKind::Cauchy: return rho * rho / (1.0 + rho * rho);
    case ProfileKind::Gaussian: return -std::expm1(-rho * rho);
    case ProfileKind::AlgebraicTail: return radial_integral(*this, 0.0, rho);
    case ProfileKind::CompactBump: return radial_integral(*this, 0.0, std::min(rho, 1.0));
  }
  return 0.0;
}

double RadialProfile::tail_power_integral(double rho, double q) const {
  if (!(rho >= 0.0)) throw std::domain_error("tail_power_integral: negative radius");
  if (!(q >= 1.0)) throw std::domain_error("tail_power_integral: exponent must be >= 1");
  const double upper = kind_ == ProfileKind::CompactBump ? 1.0 : kInf;
  if (rho >= upper) return 0.0;
  return radial_integral([&](double r) { return std::pow((*this)(r), q); }, rho, upper);
}

double RadialProfile::radius_for_mass(double fraction) const {
  if (!(fraction > 0.0 && fraction < 1.0))
    throw std::domain_error("radius_for_mass: fraction must lie in (0, 1)");
  switch (kind_) {
    case ProfileKind::Cauchy: return std::sqrt(fraction / (1.0 - fraction));
    case ProfileKind::Gaussian: return std::sqrt(-std::log1p(-fraction));
    default: break;
  }
  const double target = 1.0 - fraction;
  double hi = 1.0;
  if (kind_ == ProfileKind::AlgebraicTail)
    while (tail_mass(hi) > target) hi *= 2.0;
  auto f = [&](double r) { return tail_mass(r) - target; };
  std::uintmax_t iters = 200;
  const auto [lo_r, hi_r] = boost::math::tools::toms748_solve(
      f, 0.0, hi, f(0.0), f(hi), boost::math::tools::eps_tolerance<double>(50), iters);
  return hi_r;
}

double RadialProfile::tail_check_sigma() const { return std::isfinite(sigma_) ? sigma_ : 4.0; }

double RadialProfile::tail_constant() const {
  switch (kind_) {
    // (1 + r^4) <= (1 + r^2)^2
    case ProfileKind::Cauchy: return norm_;
    case ProfileKind::AlgebraicTail: return norm_;
    case ProfileKind::Gaussian: return norm_ * kGaussianTailSup;
    // exp(-1/(1-s))(1 + s^3) is decreasing on [0, 1)
    case ProfileKind::CompactBump: return norm_ * std::exp(-1.0);
  }
  return 0.0;
}

void InitialData::validate() const {
  auto check = [](const VortexSpec& v, const char* what) {
    require_finite(v.center, what);
    if (v.gamma == 0.0 || !std::isfinite(v.gamma))
      throw std::domain_error(std::string(what) + ": gamma must be finite and nonzero");
    if (!(v.epsilon > 0.0) || !std::isfinite(v.epsilon))
      throw std::domain_error(std::string(what) + ": epsilon must be positive");
  };
  if (vortices.empty()) throw std::domain_error("InitialData: no vortices");
  for (const auto& v : vortices) check(v, "InitialData vortex");
  for (const auto& v : perturbation.blobs) check(v, "InitialData perturbation blob");
  for (std::size_t m = 0; m < vortices.size(); ++m)
    for (std::size_t l = m + 1; l < vortices.size(); ++l)
      if (vortices[m].center == vortices[l].center)
        throw std::domain_error("InitialData: coincident vortex centers");
  if (perturbation.split_beta) {
    const double b = *perturbation.split_beta;
    if (!(b > 0.0 && b < 1.0)) throw std::domain_error("InitialData: split beta must lie in (0, 1)");
  }
}

double eval_profile(const RadialProfile& profile, const PlaneVector& y) { return profile(y); }

namespace {

double patch_value(const VortexSpec& v, const PlaneVector& x) {
  const double inv = 1.0 / v.epsilon;
  return v.gamma * inv * inv * v.profile((x - v.center).norm() * inv);
}

}  // namespace

double eval_initial_vorticity(const InitialData& data, const PlaneVector& x) {
  double s = 0.0;
  for (const auto& v : data.vortices) s += patch_value(v, x);
  for (const auto& v : data.perturbation.blobs) s += patch_value(v, x);
  return s;
}

double beta_opt(double sigma) {
  if (!(sigma > 0.0)) throw std::domain_error("beta_opt: sigma must be positive");
  return 2.0 / (sigma + 2.0);
}

double a0_exponent(double gamma1, double sigma) {
  if (!(sigma > 0.0)) throw std::domain_error("a0_exponent: sigma must be positive");
  if (!(gamma1 > sigma / (sigma + 1.0) && gamma1 < sigma))
    throw std::domain_error("a0_exponent: gamma1 must lie in (sigma/(sigma+1), sigma)");
  return 0.5 * std::min(1.0 - gamma1 / sigma, gamma1 + gamma1 / sigma - 1.0);
}

double concentration_exponent(double sigma) {
  if (!(sigma > 0.0)) throw std::domain_error("concentration_exponent: sigma must be positive");
  if (!std::isfinite(sigma)) return kInf;
  return sigma * sigma / (sigma + 2.0);
}

DecompositionResult decompose(const RadialProfile& profile, double epsilon, double beta,
                              double q) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::domain_error("decompose: eps must lie in (0, 1)");
  if (!(beta > 0.0 && beta < 1.0)) throw std::domain_error("decompose: beta must lie in (0, 1)");
  if (!(q > 2.0)) throw std::domain_error("decompose: q must exceed 2");

  DecompositionResult r;
  r.beta = beta;
  r.q = q;
  r.cutoff_radius = std::pow(epsilon, 1.0 - beta);
  const double rho = std::pow(epsilon, -beta);  // cutoff in self-similar units
  r.tail_mass = profile.tail_mass(rho);
  r.core_mass = profile.mass_within(rho);

  // |eta_eps 1_{|x|>R}|_p = eps^(-2 + 2/p) (int_{|y|>rho} eta^p)^(1/p)
  auto tail_norm = [&](double p) {
    if (p == 1.0) return r.tail_mass;
    return std::pow(epsilon, -2.0 + 2.0 / p) * std::pow(profile.tail_power_integral(rho, p), 1.0 / p);
  };
  r.lp_norms[1.0] = r.tail_mass;
  r.lp_norms[q] = tail_norm(q);
  if (q != 4.0) r.lp_norms[4.0] = tail_norm(4.0);

  const double l1 = r.lp_norms[1.0];
  const double lq = r.lp_norms[q];
  r.interpolation = std::pow(lq, q / (2.0 * q - 2.0)) * std::pow(l1, (q - 2.0) / (2.0 * q - 2.0));
  r.A_eps = std::max(r.interpolation, epsilon);
  return r;
}

namespace {

void sample_patch(const VortexSpec& v, Label label, std::optional<double> split_radius, double h,
                  double mass_capture, std::size_t max_particles, ParticleCloud& cloud) {
  const double rc = v.epsilon * v.profile.radius_for_mass(mass_capture);
  const auto n = static_cast<long>(std::floor(rc / h));
  const double rc_cells2 = (rc / h) * (rc / h);
  const double floor_w = kWeightFloor * std::abs(v.gamma);
  const double cell = h * h;
  for (long j = -n; j <= n; ++j) {
    for (long i = -n; i <= n; ++i) {
      if (static_cast<double>(i * i + j * j) > rc_cells2) continue;
      const PlaneVector off{static_cast<double>(i) * h, static_cast<double>(j) * h};
      const double omega = patch_value(v, v.center + off);
      const double w = omega * cell;
      if (std::abs(w) < floor_w) continue;
      if (cloud.particles.size() >= max_particles)
        throw std::length_error("sample_particles: particle count exceeds the configured maximum (" +
                                std::to_string(max_particles) + ")");
      Label l = label;
      if (split_radius && off.norm() > *split_radius) l = Label::perturbation();
      cloud.particles.push_back({v.center + off, w, l, omega});
    }
  }
}

}  // namespace

ParticleCloud sample_particles(const InitialData& data, double grid_h, double mass_capture,
                               std::size_t max_particles) {
  data.validate();
  if (!(grid_h > 0.0)) throw std::domain_error("sample_particles: grid spacing must be positive");
  if (!(mass_capture > 0.0 && mass_capture < 1.0))
    throw std::domain_error("sample_particles: mass_capture must lie in (0, 1)");

  ParticleCloud cloud;
  cloud.grid_h = grid_h;
  cloud.blob_delta = 2.0 * grid_h;
  for (std::size_t m = 0; m < data.vortices.size(); ++m) {
    const auto& v = data.vortices[m];
    std::optional<double> split;
    if (data.perturbation.split_beta)
      split = std::pow(v.epsilon, 1.0 - *data.perturbation.split_beta);
    sample_patch(v, Label::vortex(static_cast<int>(m)), split, grid_h, mass_capture, max_particles,
                 cloud);
  }
  for (const auto& b : data.perturbation.blobs)
    sample_patch(b, Label::perturbation(), std::nullopt, grid_h, mass_capture, max_particles, cloud);
  return cloud;
}

}  // namespace vortexlab::profiles
