#pragma once
// The Lorentz cone z > sqrt(x^2 + y^2) as an exponential family: characteristic
// function, density, Fisher metric and its hyperbolic-product form.

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "igh/check.hpp"
#include "igh/tensor.hpp"

namespace igh::cone {

struct ConePoint {
  double x = 0.0, y = 0.0, z = 1.0;
};

struct DualConePoint {
  double xi = 0.0, eta = 0.0, zeta = 1.0;
};

/// Throws DomainError unless z > 0 and z^2 > x^2 + y^2.
ConePoint make_point(double x, double y, double z);
DualConePoint make_dual_point(double xi, double eta, double zeta);

double q_form(const ConePoint& p);

/// Dual-cone quadrature in coordinates xi = zeta s cos(phi), eta = zeta s sin(phi).
/// zeta runs over [0, decay_lengths / (z - |(x, y)|)].
struct QuadratureSettings {
  double decay_lengths = 40.0;
  int zeta_panels = 64;
  int zeta_nodes = 8;
  int radial_panels = 4;
  int radial_nodes = 8;
  int angle_points = 64;
};

struct QuadratureResult {
  double value = 0.0;
  double doubled = 0.0;        // same quadrature with the truncation doubled
  double relative_change = 0.0;
  bool converged = false;      // relative_change <= 1e-4
};

inline constexpr double kTruncationTolerance = 1e-4;

QuadratureResult char_numeric(const ConePoint& p, const QuadratureSettings& s = {});
/// chi(0, 0, 1), computed once per process.
double chi0();
const QuadratureResult& chi0_certificate();
/// q^{-3/2} chi0.
double char_closed(const ConePoint& p);

double log_density(const ConePoint& p, const DualConePoint& d);
double cone_density(const ConePoint& p, const DualConePoint& d);
/// Integral of the density over the dual cone.
QuadratureResult density_mass(const ConePoint& p, const QuadratureSettings& s = {});

/// -(3/2) Hessian of log q through expression jets.
Eigen::Matrix3d cone_fisher(const ConePoint& p);
/// Closed-form component matrix.
Eigen::Matrix3d cone_fisher_explicit(const ConePoint& p);
/// Covariance of (xi, eta, zeta) under the density, by quadrature.
Eigen::Matrix3d cone_fisher_from_family(const ConePoint& p, const QuadratureSettings& s = {});

/// The cone metric as a field on a chart with coordinates (x, y, z).
tensor::MetricField cone_metric_field(tensor::ChartSpec chart);
tensor::MetricField cone_metric_field();

ConePoint cylindrical_map(double t, double r, double alpha);

struct IsometryReport {
  double max_residual = 0.0;     // pullback vs 3 diag(1, 1, sinh^2 r)
  double translation_residual = 0.0;  // pullback at t vs at t + 0.7
  int points = 0;
  std::vector<std::array<double, 4>> grid;  // (t, r, alpha, residual) per grid point
};
/// Compares the pulled-back metric on an n^3 grid over t in [t0, t1],
/// r in [r0, r1], alpha in [0, 2 pi).
IsometryReport verify_isometry(int n = 5, double t0 = -1.0, double t1 = 1.0, double r0 = 0.1, double r1 = 2.0);

struct KoszulReport {
  Eigen::Vector3d beta;
  double route_gap = 0.0;  // log-det route vs trace route
  double parallel = 0.0;   // max |(D beta)_ij|
  double norm = 0.0;
};
KoszulReport cone_koszul(const ConePoint& p);

struct VerifyReport {
  QuadratureResult chi0;
  double closed_vs_numeric = 0.0;  // worst relative gap on the probe points
  double homogeneity = 0.0;        // chi(2p) vs chi(p) / 8, numeric, relative
  double metric_routes = 0.0;      // Hessian vs explicit matrix
  double family_route = 0.0;       // quadrature expectation vs Hessian, relative
  double normalization = 0.0;      // |mass - 1|
  double density_form = 0.0;       // log density vs expanded form
  IsometryReport isometry;
  double koszul_routes = 0.0;
  double koszul_parallel = 0.0;
  double koszul_norm_spread = 0.0;  // standard deviation of |beta| over samples
  double koszul_norm = 0.0;
  tensor::HessianCriteriaReport hessian;
  bool truncation_converged = false;

  CheckTable table() const;
};
VerifyReport verify(const QuadratureSettings& s = {});

}  // namespace igh::cone
