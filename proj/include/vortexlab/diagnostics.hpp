#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vortexlab/particles.hpp"
#include "vortexlab/plane_vector.hpp"

namespace vortexlab::diag {

/// Radial cutoff profile psi(s): 1 on s <= 1, (1 + cos(pi (s - 1)))/2 on
/// 1 < s < 2, 0 on s >= 2. chi_R(x) = psi(|x|/R) is radially decreasing with
/// |grad chi_R| <= (pi/2)/R and |D^2 chi_R| <= (pi^2/2)/R^2.
double cutoff_profile(double s);

struct CenterMoment {
  PlaneVector center;
  double moment = 0.0;       // I = (1/2 Omega) sum w |x - p|^2
  double circulation = 0.0;  // Omega = sum w
};

/// Weighted center and second moment of the particles carrying label m.
/// Throws std::domain_error when the label's circulation is zero.
CenterMoment center_and_moment(const ParticleCloud& cloud, Label m);

/// mu(R) = (1/Omega) sum w (1 - chi_R(x - center)) over label m, about the
/// label center or an explicit one.
double cutoff_mass(const ParticleCloud& cloud, Label m, double R);
double cutoff_mass(const ParticleCloud& cloud, Label m, double R, const PlaneVector& center);

/// m(r) = sum |w| over label-m particles with |x - center| >= r.
double ring_mass(const ParticleCloud& cloud, Label m, double r);
double ring_mass(const ParticleCloud& cloud, Label m, double r, const PlaneVector& center);

/// Smallest radius about the label center holding fraction f of the label's
/// absolute circulation; f = 1 gives the largest particle distance.
double support_radius(const ParticleCloud& cloud, Label m, double f);
double support_radius(const ParticleCloud& cloud, Label m, double f, const PlaneVector& center);

/// Right-hand side of the second-moment estimate
///   2 e^{2Lt} [I0 + F^2/2 ((1 - e^{-Lt})/L)^2].
double theory_moment_bound(double t, double I0, double L, double F2sup);

/// Right-hand side of the center-of-vorticity estimate
///   e^{Lt} [gap0 + 2L (sqrt(I0) + F/(sqrt2 L)) g(t) + F (1 - e^{-Lt})/L],
/// g(t) = int_0^t int_0^r e^{-Ls} ds dr = (t - (1 - e^{-Lt})/L)/L.
double theory_center_bound(double t, double gap0, double I0, double L, double F2sup);

/// G = sum_m |p_m(measured) - p_m(ODE)|.
double gronwall_gap(const ParticleCloud& cloud, std::span<const PlaneVector> ode_positions);

struct DiagnosticsSpec {
  std::vector<double> fractions{0.99};
  std::vector<double> cutoff_radii;  // mu(R) columns
  std::vector<double> ring_radii;    // m(r) columns
  std::vector<double> outer_powers;  // global outer mass beyond eps^p
  double a = 0.45;
  double q = 4.0;
  double c0 = 0.1;

  void validate() const;
};

struct LabelRecord {
  double circulation = 0.0;
  double abs_circulation = 0.0;
  PlaneVector center;
  double moment = 0.0;
  double support_radius_100 = 0.0;
  std::vector<double> support_radius_frac;  // per DiagnosticsSpec::fractions
  std::vector<double> cutoff_mass;          // per cutoff_radii
  std::vector<double> ring_mass;            // per ring_radii
  // Filled when an ODE reference is tracked.
  PlaneVector ode;
  double gap = 0.0;
  // Theorem 2.5 style estimates with measured constants; NaN when L is
  // undefined (single vortex).
  double L = 0.0;
  double moment_bound = 0.0;
  double center_bound = 0.0;
  double moment_ratio = 0.0;
  double gap_ratio = 0.0;
};

struct DiagnosticsRecord {
  double t = 0.0;
  std::vector<LabelRecord> labels;
  double total_circulation = 0.0;
  PlaneVector linear_impulse;
  double angular_impulse = 0.0;
  double perturbation_circulation = 0.0;
  double G = 0.0;
  std::vector<double> outer_mass;  // per outer_powers, fraction of total |w|
  double min_center_separation = 0.0;
  double F2_sup = 0.0;
  double A_eps = 0.0;
};

/// Theoretical comparison quantities for one run.
struct TheoryBounds {
  double A_eps = 0.0;
  double F2_sup = 0.0;

  /// confinement radius A_eps^a
  double confinement_radius(double a) const;
  double moment_bound(double t, double I0, double L) const {
    return theory_moment_bound(t, I0, L, F2_sup);
  }
  double center_gap_bound(double t, double gap0, double I0, double L) const {
    return theory_center_bound(t, gap0, I0, L, F2_sup);
  }
};

/// Perturbation norms (quadrature: |w| sums and omega0 values on cells of
/// area h^2) and the resulting velocity bound F2_sup.
struct PerturbationNorms {
  double l1 = 0.0;
  double lq = 0.0;
  double F2_sup = 0.0;
};
PerturbationNorms perturbation_norms(const ParticleCloud& cloud, double q);

/// Builds DiagnosticsRecords along a run. The first observation fixes the
/// t = 0 quantities (I0, gap0) the bounds are anchored to.
class DiagnosticsTracker {
 public:
  DiagnosticsTracker(DiagnosticsSpec spec, int vortex_count, double epsilon, TheoryBounds bounds);

  DiagnosticsRecord observe(const ParticleCloud& cloud,
                            std::span<const PlaneVector> ode_positions = {});

  const DiagnosticsSpec& spec() const { return spec_; }
  int vortex_count() const { return vortex_count_; }
  double epsilon() const { return epsilon_; }
  const TheoryBounds& bounds() const { return bounds_; }

  /// CSV header line (no newline) matching csv_row.
  std::string csv_header() const;
  std::string csv_row(const DiagnosticsRecord& r) const;
  /// Column names with a short description each.
  std::vector<std::pair<std::string, std::string>> columns() const;

 private:
  DiagnosticsSpec spec_;
  int vortex_count_;
  double epsilon_;
  TheoryBounds bounds_;
  bool anchored_ = false;
  std::vector<double> I0_, gap0_;
  double min_sep_ = 0.0;
};

struct ConfinementReport {
  double tau_measured = 0.0;
  double threshold_radius = 0.0;
  double required_time = 0.0;  // c0 |log A_eps|
  bool satisfied = false;
};

/// Last record time before any vortex label's support radius at fraction f
/// exceeds A_eps^a. f must be 1 or one of the recorded fractions.
ConfinementReport confinement_check(std::span<const DiagnosticsRecord> records,
                                    const DiagnosticsSpec& spec, double A_eps, double a, double f,
                                    double c0);

/// Shortest round-trip decimal representation ("nan", "inf" for specials).
std::string format_number(double v);

}  // namespace vortexlab::diag
