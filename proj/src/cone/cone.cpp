#include <cmath>
#include <numbers>

#include "igh/cone.hpp"
#include "igh/errors.hpp"
#include "igh/expfam.hpp"
#include "igh/simd.hpp"

namespace igh::cone {

using expr::parse_expr;

ConePoint make_point(double x, double y, double z) {
  if (!(z > 0.0) || !(z * z > x * x + y * y)) throw DomainError("point is outside the cone");
  return {x, y, z};
}

DualConePoint make_dual_point(double xi, double eta, double zeta) {
  if (!(zeta > 0.0) || !(zeta * zeta > xi * xi + eta * eta)) throw DomainError("point is outside the dual cone");
  return {xi, eta, zeta};
}

double q_form(const ConePoint& p) { return p.z * p.z - p.x * p.x - p.y * p.y; }

namespace {

struct Moments {
  double m0 = 0.0;
  Eigen::Vector3d m1 = Eigen::Vector3d::Zero();
  Eigen::Matrix3d m2 = Eigen::Matrix3d::Zero();
};

struct Rule {
  std::vector<double> x, w;
};

Rule composite(double lo, double hi, int panels, int nodes) {
  const auto [gx, gw] = expfam::gauss_legendre_rule(nodes);
  Rule r;
  const double width = (hi - lo) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = lo + (p + 0.5) * width;
    for (int i = 0; i < nodes; ++i) {
      r.x.push_back(mid + 0.5 * width * gx[i]);
      r.w.push_back(0.5 * width * gw[i]);
    }
  }
  return r;
}

// Integrals of exp(-<p, d>) d^k over the dual cone for |k| <= order.
Moments integrate(const ConePoint& p, const QuadratureSettings& s, double decay_lengths, int order) {
  const double kappa = p.z - std::hypot(p.x, p.y);
  if (!(kappa > 0.0)) throw DomainError("point is outside the cone");
  const Rule zr = composite(0.0, decay_lengths / kappa, s.zeta_panels, s.zeta_nodes);
  const Rule sr = composite(0.0, 1.0, s.radial_panels, s.radial_nodes);

  const int na = s.angle_points;
  std::vector<double> c(na), cs(na), sn(na), cc(na), ss(na), csn(na), e(na);
  for (int k = 0; k < na; ++k) {
    const double phi = 2.0 * std::numbers::pi * k / na;
    cs[k] = std::cos(phi);
    sn[k] = std::sin(phi);
    c[k] = p.x * cs[k] + p.y * sn[k];
    cc[k] = cs[k] * cs[k];
    ss[k] = sn[k] * sn[k];
    csn[k] = cs[k] * sn[k];
  }
  const double wphi = 2.0 * std::numbers::pi / na;

  Moments m;
  for (std::size_t a = 0; a < zr.x.size(); ++a) {
    const double zeta = zr.x[a];
    for (std::size_t b = 0; b < sr.x.size(); ++b) {
      const double rad = sr.x[b];
      simd::exp_affine(c, -zeta * p.z, -zeta * rad, e);
      const double base = zr.w[a] * sr.w[b] * wphi * zeta * zeta * rad;
      const double s0 = simd::sum(e);
      m.m0 += base * s0;
      if (order < 1) continue;
      const double sc = simd::dot(e, cs), sv = simd::dot(e, sn);
      m.m1 += base * zeta * Eigen::Vector3d(rad * sc, rad * sv, s0);
      if (order < 2) continue;
      const double z2 = base * zeta * zeta;
      m.m2(0, 0) += z2 * rad * rad * simd::dot(e, cc);
      m.m2(1, 1) += z2 * rad * rad * simd::dot(e, ss);
      m.m2(0, 1) += z2 * rad * rad * simd::dot(e, csn);
      m.m2(0, 2) += z2 * rad * sc;
      m.m2(1, 2) += z2 * rad * sv;
      m.m2(2, 2) += z2 * s0;
    }
  }
  m.m2(1, 0) = m.m2(0, 1);
  m.m2(2, 0) = m.m2(0, 2);
  m.m2(2, 1) = m.m2(1, 2);
  return m;
}

QuadratureResult certify(double value, double doubled) {
  QuadratureResult r;
  r.value = value;
  r.doubled = doubled;
  r.relative_change = std::abs(doubled - value) / std::abs(doubled);
  r.converged = r.relative_change <= kTruncationTolerance;
  return r;
}

const expr::Expression& potential() {
  static const expr::Expression f = parse_expr("-1.5*log(z^2 - x^2 - y^2)");
  return f;
}

const std::vector<std::string> kXyz{"x", "y", "z"};

}  // namespace

QuadratureResult char_numeric(const ConePoint& p, const QuadratureSettings& s) {
  return certify(integrate(p, s, s.decay_lengths, 0).m0, integrate(p, s, 2.0 * s.decay_lengths, 0).m0);
}

const QuadratureResult& chi0_certificate() {
  static const QuadratureResult r = char_numeric({0.0, 0.0, 1.0});
  return r;
}

double chi0() {
  const auto& r = chi0_certificate();
  if (!r.converged) throw NumericError("characteristic function quadrature did not converge");
  return r.value;
}

double char_closed(const ConePoint& p) { return std::pow(q_form(p), -1.5) * chi0(); }

double log_density(const ConePoint& p, const DualConePoint& d) {
  return -(p.x * d.xi + p.y * d.eta + p.z * d.zeta) - std::log(char_closed(p));
}

double cone_density(const ConePoint& p, const DualConePoint& d) { return std::exp(log_density(p, d)); }

QuadratureResult density_mass(const ConePoint& p, const QuadratureSettings& s) {
  const double chi = char_closed(p);
  return certify(integrate(p, s, s.decay_lengths, 0).m0 / chi, integrate(p, s, 2.0 * s.decay_lengths, 0).m0 / chi);
}

Eigen::Matrix3d cone_fisher(const ConePoint& p) {
  make_point(p.x, p.y, p.z);
  const double v[3] = {p.x, p.y, p.z};
  const auto jet = expr::eval_jet(potential(), {kXyz, v}, 2);
  Eigen::Matrix3d g;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) g(i, j) = jet.d(i, j);
  return g;
}

Eigen::Matrix3d cone_fisher_explicit(const ConePoint& p) {
  const double q = q_form(make_point(p.x, p.y, p.z));
  const double x = p.x, y = p.y, z = p.z, s = 3.0 / (q * q);
  Eigen::Matrix3d g;
  g << s * (z * z + x * x - y * y), s * 2 * x * y, -s * 2 * z * x,
       s * 2 * x * y, s * (z * z - x * x + y * y), -s * 2 * z * y,
       -s * 2 * z * x, -s * 2 * z * y, s * (z * z + x * x + y * y);
  return g;
}

Eigen::Matrix3d cone_fisher_from_family(const ConePoint& p, const QuadratureSettings& s) {
  const auto m = integrate(p, s, s.decay_lengths, 2);
  const Eigen::Vector3d mean = m.m1 / m.m0;
  return m.m2 / m.m0 - mean * mean.transpose();
}

tensor::MetricField cone_metric_field(tensor::ChartSpec chart) {
  return tensor::MetricField::hessian_of(std::move(chart), potential());
}

tensor::MetricField cone_metric_field() {
  return cone_metric_field({kXyz, {{{-0.5, 0.5}}, {{-0.5, 0.5}}, {{1.0, 2.0}}}, {}});
}

ConePoint cylindrical_map(double t, double r, double alpha) {
  if (r < 0.0) throw DomainError("radial coordinate must be non-negative");
  const double s = std::exp(t);
  return {s * std::sinh(r) * std::cos(alpha), s * std::sinh(r) * std::sin(alpha), s * std::cosh(r)};
}

IsometryReport verify_isometry(int n, double t0, double t1, double r0, double r1) {
  if (n < 2) throw SpecError("isometry grid needs at least two points per axis");
  const tensor::ChartSpec cyl{{"t", "r", "a"}, {{{t0, t1 + 0.7}}, {{r0, r1}}, {{0.0, 2.0 * std::numbers::pi}}}, {}};
  const std::vector<expr::Expression> map{parse_expr("exp(t)*sinh(r)*cos(a)"), parse_expr("exp(t)*sinh(r)*sin(a)"),
                                          parse_expr("exp(t)*cosh(r)")};
  const auto pulled = tensor::pullback_metric(map, cone_metric_field(), cyl);

  IsometryReport rep;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const double t = t0 + (t1 - t0) * i / (n - 1);
        const double r = r0 + (r1 - r0) * j / (n - 1);
        const double a = 2.0 * std::numbers::pi * k / n;
        const Eigen::MatrixXd g = pulled.value({t, r, a});
        const Eigen::MatrixXd shifted = pulled.value({t + 0.7, r, a});
        Eigen::Matrix3d want = Eigen::Matrix3d::Zero();
        want(0, 0) = want(1, 1) = 3.0;
        want(2, 2) = 3.0 * std::sinh(r) * std::sinh(r);
        const int keep = std::sinh(r) < 1e-6 ? 2 : 3;
        const Eigen::MatrixXd diff = (g - want).topLeftCorner(keep, keep);
        const Eigen::MatrixXd tdiff = (g - shifted).topLeftCorner(keep, keep);
        rep.grid.push_back({t, r, a, diff.cwiseAbs().maxCoeff()});
        rep.max_residual = std::max(rep.max_residual, rep.grid.back()[3]);
        rep.translation_residual = std::max(rep.translation_residual, tdiff.cwiseAbs().maxCoeff());
        ++rep.points;
      }
  return rep;
}

KoszulReport cone_koszul(const ConePoint& p) {
  make_point(p.x, p.y, p.z);
  static const auto field = cone_metric_field();
  static const auto flat = tensor::ConnectionField::flat(field.chart());
  const auto k = tensor::koszul_form(field, flat, {p.x, p.y, p.z});
  KoszulReport r;
  r.beta = k.log_det_route;
  r.route_gap = (k.log_det_route - k.trace_route).cwiseAbs().maxCoeff();
  r.parallel = k.parallel.cwiseAbs().maxCoeff();
  r.norm = k.norm;
  return r;
}

}  // namespace igh::cone
