#include <cmath>
#include <numbers>

#include "igh/cone.hpp"

namespace igh::cone {

CheckTable VerifyReport::table() const {
  CheckTable t{
      {"chi0-truncation", chi0.relative_change, kTruncationTolerance},
      {"closed-vs-numeric", closed_vs_numeric, 1e-3},
      {"homogeneity", homogeneity, 1e-3},
      {"metric-routes", metric_routes, 1e-10},
      {"family-route", family_route, 1e-3},
      {"normalization", normalization, 1e-3},
      {"density-form", density_form, 1e-10},
      {"isometry", isometry.max_residual, 1e-6},
      {"isometry-translation", isometry.translation_residual, 1e-6},
      {"koszul-routes", koszul_routes, 1e-8},
      {"koszul-parallel", koszul_parallel, 1e-5},
      {"koszul-norm-spread", koszul_norm_spread, 1e-6},
  };
  for (auto c : hessian.table()) {
    c.name = "hessian-" + c.name;
    t.push_back(c);
  }
  return t;
}

VerifyReport verify(const QuadratureSettings& s) {
  VerifyReport r;
  r.chi0 = s.decay_lengths == QuadratureSettings{}.decay_lengths ? chi0_certificate() : char_numeric({0, 0, 1}, s);
  r.truncation_converged = r.chi0.converged;

  const std::vector<ConePoint> probes{{0, 0, 1}, {0, 0, 2}, {0.3, 0.4, 1}, {-0.2, 0.1, 1.5}};
  for (const auto& p : probes) {
    const auto num = char_numeric(p, s);
    r.truncation_converged = r.truncation_converged && num.converged;
    const double closed = std::pow(q_form(p), -1.5) * r.chi0.value;
    r.closed_vs_numeric = std::max(r.closed_vs_numeric, std::abs(num.value - closed) / closed);
  }
  r.homogeneity = std::abs(char_numeric({0.6, 0.8, 2.0}, s).value * 8.0 / char_numeric({0.3, 0.4, 1.0}, s).value - 1.0);

  const tensor::ChartSpec wide{{"t", "r", "a"}, {{{-1.0, 1.0}}, {{0.0, 2.0}}, {{0.0, 2.0 * std::numbers::pi}}}, {}};
  for (const auto& c : tensor::sample_points(wide, 100, 7)) {
    const auto p = cylindrical_map(c[0], c[1], c[2]);
    const Eigen::Matrix3d e = cone_fisher_explicit(p);
    r.metric_routes = std::max(r.metric_routes, (cone_fisher(p) - e).cwiseAbs().maxCoeff() / std::max(1.0, e.cwiseAbs().maxCoeff()));
  }

  for (const ConePoint& p : {ConePoint{0, 0, 1}, ConePoint{0.3, 0.4, 1}, ConePoint{-0.2, 0.1, 1.5}}) {
    const Eigen::Matrix3d g = cone_fisher(p);
    r.family_route = std::max(r.family_route, (cone_fisher_from_family(p, s) - g).cwiseAbs().maxCoeff() / g.cwiseAbs().maxCoeff());
    const auto mass = density_mass(p, s);
    r.truncation_converged = r.truncation_converged && mass.converged;
    r.normalization = std::max(r.normalization, std::abs(mass.value - 1.0));
  }

  const double log_chi0 = std::log(r.chi0.value);
  for (const auto& [p, d] : {std::pair{ConePoint{0, 0, 1}, DualConePoint{0, 0, 1}},
                              std::pair{ConePoint{0.3, 0.4, 1}, DualConePoint{0.5, -0.2, 2}},
                              std::pair{ConePoint{-0.2, 0.1, 1.5}, DualConePoint{0.1, 0.1, 0.3}}}) {
    const double expanded = -(p.x * d.xi + p.y * d.eta + p.z * d.zeta) + 1.5 * std::log(q_form(p)) - log_chi0;
    r.density_form = std::max(r.density_form, std::abs(log_density(p, d) - expanded));
  }

  r.isometry = verify_isometry();

  const auto field = cone_metric_field();
  std::vector<double> norms;
  for (const auto& c : tensor::sample_points(field.chart(), 20, 2)) {
    const auto k = cone_koszul({c[0], c[1], c[2]});
    r.koszul_routes = std::max(r.koszul_routes, k.route_gap);
    r.koszul_parallel = std::max(r.koszul_parallel, k.parallel);
    norms.push_back(k.norm);
  }
  double mean = 0.0, var = 0.0;
  for (double v : norms) mean += v / norms.size();
  for (double v : norms) var += (v - mean) * (v - mean) / norms.size();
  r.koszul_norm = mean;
  r.koszul_norm_spread = std::sqrt(var);

  r.hessian = tensor::hessian_criteria(field, tensor::ConnectionField::flat(field.chart()),
                                       tensor::default_samples(field.chart()));
  return r;
}

}  // namespace igh::cone
