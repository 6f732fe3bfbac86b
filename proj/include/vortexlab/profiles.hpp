#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vortexlab/particles.hpp"
#include "vortexlab/plane_vector.hpp"

namespace vortexlab::profiles {

enum class ProfileKind { Cauchy, AlgebraicTail, Gaussian, CompactBump };

/// Unit-mass radial shape eta(y) = eta(|y|).
///
///   Cauchy         (1/pi) (1 + r^2)^-2                       sigma = 2
///   AlgebraicTail  c_s / (1 + r^(2+s)),
///                  c_s = (2+s) sin(2pi/(2+s)) / (2 pi^2)     sigma = s
///   Gaussian       (1/pi) exp(-r^2)                          sigma = inf
///   CompactBump    c_b exp(-1/(1-r^2)) on r < 1, c_b = 1/(pi J),
///                  J = int_0^1 exp(-1/u) du = e^-1 - E1(1)   sigma = inf
///
/// Tail bound eta(r)(1 + r^(2+s)) <= tail_constant() holds with s =
/// tail_check_sigma(): the profile's sigma when finite, 4 otherwise.
class RadialProfile {
 public:
  static RadialProfile cauchy() { return RadialProfile(ProfileKind::Cauchy, 2.0); }
  static RadialProfile algebraic_tail(double sigma);
  static RadialProfile gaussian();
  static RadialProfile compact_bump();
  static RadialProfile from_name(const std::string& kind, double sigma = 2.0);

  ProfileKind kind() const { return kind_; }
  std::string name() const;
  double sigma() const { return sigma_; }
  double normalization() const { return norm_; }

  double operator()(double r) const;
  double operator()(const PlaneVector& y) const { return (*this)(y.norm()); }

  /// Mass inside |y| <= rho (closed form for Cauchy and Gaussian).
  double mass_within(double rho) const;
  /// Mass outside |y| > rho, computed without cancellation.
  double tail_mass(double rho) const;
  /// int_{|y| > rho} eta^q dy, by adaptive Gauss-Kronrod quadrature.
  double tail_power_integral(double rho, double q) const;
  /// Smallest rho with mass_within(rho) >= fraction.
  double radius_for_mass(double fraction) const;

  double tail_check_sigma() const;
  double tail_constant() const;

 private:
  RadialProfile(ProfileKind k, double sigma);
  ProfileKind kind_;
  double sigma_;
  double norm_;
};

/// One self-similar vortex gamma/eps^2 eta((x - center)/eps).
struct VortexSpec {
  PlaneVector center;
  double gamma = 1.0;
  RadialProfile profile = RadialProfile::cauchy();
  double epsilon = 0.1;
};

/// Perturbation part of the initial data. Either (or both):
///  - split_beta: the tail of every vortex beyond radius eps^(1-beta) is
///    relabeled as perturbation (the core/tail decomposition);
///  - blobs: extra self-similar patches labeled as perturbation.
struct PerturbationSpec {
  std::optional<double> split_beta;
  std::vector<VortexSpec> blobs;
};

struct InitialData {
  std::vector<VortexSpec> vortices;
  PerturbationSpec perturbation;

  void validate() const;
};

double eval_profile(const RadialProfile& profile, const PlaneVector& y);

/// omega_0(x) = sum_m gamma_m/eps^2 eta((x - p_m)/eps) + perturbation blobs.
double eval_initial_vorticity(const InitialData& data, const PlaneVector& x);

/// Decomposition exponent 2/(sigma+2).
double beta_opt(double sigma);

/// a0(gamma1, sigma) = min{1 - gamma1/sigma, gamma1 + gamma1/sigma - 1} / 2 on
/// sigma/(sigma+1) < gamma1 < sigma.
double a0_exponent(double gamma1, double sigma);

/// sigma^2/(sigma+2), the predicted decay exponent of the mass outside the
/// concentration balls.
double concentration_exponent(double sigma);

struct DecompositionResult {
  double core_mass = 0.0;
  double tail_mass = 0.0;
  double beta = 0.0;
  double cutoff_radius = 0.0;      // eps^(1-beta), physical units
  double interpolation = 0.0;      // |tail|_q^(q/(2q-2)) |tail|_1^((q-2)/(2q-2))
  double A_eps = 0.0;              // max(interpolation, eps)
  double q = 4.0;
  std::map<double, double> lp_norms;  // exponent -> norm of the tail part
};

/// Sharp cutoff of a unit-mass vortex (gamma = 1) at |x| = eps^(1-beta).
DecompositionResult decompose(const RadialProfile& profile, double epsilon, double beta,
                              double q = 4.0);

/// Upper limit on sample_particles output.
inline constexpr std::size_t kDefaultMaxParticles = 2'000'000;

/// Cells with |weight| below kWeightFloor |gamma| are dropped.
inline constexpr double kWeightFloor = 1e-15;

/// Midpoint-rule sampling on per-vortex uniform grids of spacing h centered
/// at each vortex center, truncated at eps * radius_for_mass(mass_capture).
/// Row-major cell order, vortices first, then perturbation blobs. Blob width
/// is 2h. Throws std::length_error above max_particles.
ParticleCloud sample_particles(const InitialData& data, double grid_h, double mass_capture,
                               std::size_t max_particles = kDefaultMaxParticles);

}  // namespace vortexlab::profiles
