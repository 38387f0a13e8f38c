#include <map>

#include "igh/errors.hpp"
#include "igh/tensor.hpp"

namespace igh::tensor {

using expr::Expression;

CheckTable HessianCriteriaReport::table() const {
  CheckTable t{{"flatness", curvature, tolerance},
               {"torsion", torsion, tolerance},
               {"codazzi", codazzi, tolerance}};
  if (affine_chart) t.push_back({"coordinate-symmetry", coordinate, tolerance});
  t.push_back({"gamma-self-adjoint", gamma_self_adjoint, tolerance});
  t.push_back({"gamma-symmetric", gamma_symmetric, tolerance});
  return t;
}

// Criterion residuals are divided by max(1, max |d g|) at each point so that
// steep metrics near a chart boundary are judged relative to their own scale.
HessianCriteriaReport hessian_criteria(const MetricField& g, const ConnectionField& c,
                                       const std::vector<Point>& samples, double tol) {
  HessianCriteriaReport r;
  r.tolerance = tol;
  r.affine_chart = true;
  const int n = g.dim();
  double max_gamma = 0.0;
  for (const auto& p : samples) {
    const auto s = g.eval(p, 1);
    const auto cs = c.eval(p, 1);
    r.curvature = std::max(r.curvature, curvature(cs).max_abs());
    const auto l = lower(s, cs);
    const double scale = std::max(1.0, s.dg.max_abs());
    max_gamma = std::max(max_gamma, cs.gamma.max_abs());

    Tensor3 cubic(n), diff(n);  // diff(i,j,k) = LC_{ij,k} - Gamma_{ij,k}, the lowered gamma_{d_i} d_j
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          r.torsion = std::max(r.torsion, std::abs(cs.gamma(k, i, j) - cs.gamma(k, j, i)));
          cubic(i, j, k) = s.dg(i, j, k) - l.low(i, j, k) - l.low(i, k, j);
          diff(i, j, k) = 0.5 * (s.dg(i, j, k) + s.dg(j, i, k) - s.dg(k, i, j)) - l.low(i, j, k);
        }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          r.codazzi = std::max(r.codazzi, std::abs(cubic(i, j, k) - cubic(j, i, k)) / scale);
          r.coordinate = std::max(r.coordinate, std::abs(s.dg(k, i, j) - s.dg(i, k, j)) / scale);
          r.gamma_self_adjoint = std::max(r.gamma_self_adjoint, std::abs(diff(i, j, k) - diff(i, k, j)) / scale);
          r.gamma_symmetric = std::max(r.gamma_symmetric, std::abs(diff(j, k, i) - diff(i, k, j)) / scale);
        }
  }
  r.affine_chart = max_gamma <= tol;
  r.flat = r.curvature <= tol && r.torsion <= tol;

  std::vector<bool> verdicts{r.codazzi <= tol, r.gamma_self_adjoint <= tol, r.gamma_symmetric <= tol};
  if (r.affine_chart) verdicts.push_back(r.coordinate <= tol);
  bool all = true, none = true;
  for (bool v : verdicts) {
    all = all && v;
    none = none && !v;
  }
  r.agree = all || none;
  r.hessian = r.flat && all;
  return r;
}

namespace {

struct DualNum {
  double v, d;
};

// d/dt det(a + t b) at t = 0 together with det(a), by elimination on dual numbers.
DualNum det_with_derivative(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const int n = static_cast<int>(a.rows());
  std::vector<DualNum> m(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m[i * n + j] = {a(i, j), b(i, j)};
  DualNum det{1.0, 0.0};
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(m[r * n + col].v) > std::abs(m[piv * n + col].v)) piv = r;
    if (m[piv * n + col].v == 0.0) throw NumericError("singular metric at a sample point");
    if (piv != col) {
      for (int j = 0; j < n; ++j) std::swap(m[col * n + j], m[piv * n + j]);
      det = {-det.v, -det.d};
    }
    const DualNum p = m[col * n + col];
    det = {det.v * p.v, det.d * p.v + det.v * p.d};
    for (int r = col + 1; r < n; ++r) {
      const DualNum f{m[r * n + col].v / p.v, (m[r * n + col].d * p.v - m[r * n + col].v * p.d) / (p.v * p.v)};
      for (int j = col; j < n; ++j) {
        const DualNum x = m[col * n + j];
        m[r * n + j].v -= f.v * x.v;
        m[r * n + j].d -= f.d * x.v + f.v * x.d;
      }
    }
  }
  return det;
}

}  // namespace

KoszulSample koszul_form(const MetricField& g, const ConnectionField& c, const Point& p) {
  const int n = g.dim();
  const auto s = g.eval(p, 2);
  const auto cs = c.eval(p, 1);
  KoszulSample k;
  k.log_det_route.resize(n);
  k.trace_route.resize(n);
  k.parallel.resize(n, n);

  std::vector<Eigen::MatrixXd> dg(n, Eigen::MatrixXd(n, n));
  for (int m = 0; m < n; ++m)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) dg[m](i, j) = s.dg(m, i, j);

  Tensor3 lc(n);  // Levi-Civita Gamma^q_ij
  for (int q = 0; q < n; ++q)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double v = 0.0;
        for (int a = 0; a < n; ++a) v += s.g_inv(q, a) * 0.5 * (s.dg(i, j, a) + s.dg(j, i, a) - s.dg(a, i, j));
        lc(q, i, j) = v;
      }

  for (int i = 0; i < n; ++i) {
    const DualNum det = det_with_derivative(s.g, dg[i]);
    double own = 0.0, tr = 0.0;
    for (int q = 0; q < n; ++q) {
      own += cs.gamma(q, i, q);
      tr += lc(q, i, q) - cs.gamma(q, i, q);
    }
    k.log_det_route(i) = 0.5 * det.d / det.v - own;
    k.trace_route(i) = tr;
  }
  k.norm = std::sqrt(std::max(0.0, k.log_det_route.dot(s.g_inv * k.log_det_route)));

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Eigen::MatrixXd ddg(n, n);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) ddg(a, b) = s.ddg(i, j, a, b);
      double d_beta = 0.5 * (-(s.g_inv * dg[i] * s.g_inv * dg[j]).trace() + (s.g_inv * ddg).trace());
      for (int q = 0; q < n; ++q) d_beta -= cs.dgamma(i, q, j, q);
      for (int q = 0; q < n; ++q) d_beta -= lc(q, i, j) * k.log_det_route(q);
      k.parallel(i, j) = d_beta;
    }
  return k;
}

MetricField pullback_metric(const std::vector<Expression>& map, const MetricField& g, ChartSpec new_chart) {
  new_chart.validate();
  const int old_dim = g.dim(), new_dim = new_chart.dim();
  if (static_cast<int>(map.size()) != old_dim)
    throw SpecError("map must give one expression per target coordinate");
  if (new_dim > old_dim) throw SpecError("pullback chart has more coordinates than the target");

  std::vector<std::vector<Expression>> jac(old_dim, std::vector<Expression>(new_dim));
  for (int i = 0; i < old_dim; ++i)
    for (int a = 0; a < new_dim; ++a) jac[i][a] = expr::differentiate(map[i], new_chart.names[a]);

  for (const auto& p : default_samples(new_chart)) {
    Eigen::MatrixXd j(old_dim, new_dim);
    for (int i = 0; i < old_dim; ++i)
      for (int a = 0; a < new_dim; ++a) j(i, a) = expr::evaluate(jac[i][a], new_chart.bind(p));
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(j);
    const auto& sv = svd.singularValues();
    if (sv(0) == 0.0 || sv(new_dim - 1) < 1e-10 * sv(0))
      throw NumericError("rank-deficient Jacobian at a sample point");
  }

  std::map<std::string, Expression> subst;
  for (int i = 0; i < old_dim; ++i) subst.emplace(g.chart().names[i], map[i]);
  std::vector<std::vector<Expression>> moved(old_dim, std::vector<Expression>(old_dim));
  for (int i = 0; i < old_dim; ++i)
    for (int j = i; j < old_dim; ++j) moved[i][j] = moved[j][i] = expr::substitute(g.components()[i][j], subst);

  std::vector<std::vector<Expression>> out(new_dim, std::vector<Expression>(new_dim));
  for (int a = 0; a < new_dim; ++a)
    for (int b = a; b < new_dim; ++b) {
      Expression sum = expr::number(0.0);
      for (int i = 0; i < old_dim; ++i)
        for (int j = 0; j < old_dim; ++j) sum = sum + moved[i][j] * jac[i][a] * jac[j][b];
      out[a][b] = out[b][a] = sum;
    }
  return MetricField(std::move(new_chart), std::move(out));
}

}  // namespace igh::tensor
