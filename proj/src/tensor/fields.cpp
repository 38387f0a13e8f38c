#include <limits>

#include "igh/errors.hpp"
#include "igh/tensor.hpp"

namespace igh::tensor {

using expr::Expression;

namespace {

void check_point(const ChartSpec& chart, const Point& p) {
  if (static_cast<int>(p.size()) != chart.dim())
    throw SpecError("point has " + std::to_string(p.size()) + " coordinates, chart expects " +
                    std::to_string(chart.dim()));
}

double symmetry_gap(const std::vector<std::vector<Expression>>& c, const ChartSpec& chart) {
  const int n = chart.dim();
  bool structural = true;
  for (int i = 0; i < n && structural; ++i)
    for (int j = i + 1; j < n && structural; ++j) structural = c[i][j] == c[j][i];
  if (structural) return 0.0;
  double worst = 0.0;
  for (const auto& p : default_samples(chart)) {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const double a = expr::evaluate(c[i][j], chart.bind(p));
        const double b = expr::evaluate(c[j][i], chart.bind(p));
        worst = std::max(worst, std::abs(a - b) / std::max(1.0, std::abs(a) + std::abs(b)));
      }
  }
  return worst;
}

}  // namespace

MetricField::MetricField(ChartSpec chart, std::vector<std::vector<Expression>> components)
    : chart_(std::move(chart)), components_(std::move(components)) {
  chart_.validate();
  const auto n = static_cast<std::size_t>(chart_.dim());
  if (components_.size() != n)
    throw SpecError("metric must be " + std::to_string(n) + "x" + std::to_string(n));
  for (const auto& row : components_)
    if (row.size() != n) throw SpecError("metric must be " + std::to_string(n) + "x" + std::to_string(n));
  if (symmetry_gap(components_, chart_) > 1e-12) throw SpecError("metric components are not symmetric");
}

MetricField MetricField::hessian_of(ChartSpec chart, const Expression& potential) {
  const int n = chart.dim();
  std::vector<std::vector<Expression>> c(n, std::vector<Expression>(n));
  for (int i = 0; i < n; ++i) {
    const Expression di = expr::differentiate(potential, chart.names[i]);
    for (int j = i; j < n; ++j) {
      c[i][j] = expr::differentiate(di, chart.names[j]);
      c[j][i] = c[i][j];
    }
  }
  return MetricField(std::move(chart), std::move(c));
}

MetricSample MetricField::eval(const Point& p, int order) const {
  check_point(chart_, p);
  const int n = dim();
  MetricSample s;
  s.order = order;
  s.g.resize(n, n);
  if (order >= 1) s.dg = Tensor3(n);
  if (order >= 2) s.ddg = Tensor4(n);
  const auto at = chart_.bind(p);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const auto jet = expr::eval_jet(components_[i][j], at, order);
      s.g(i, j) = s.g(j, i) = jet.value();
      if (order >= 1)
        for (int m = 0; m < n; ++m) s.dg(m, i, j) = s.dg(m, j, i) = jet.d(m);
      if (order >= 2)
        for (int m = 0; m < n; ++m)
          for (int q = 0; q < n; ++q) s.ddg(m, q, i, j) = s.ddg(m, q, j, i) = jet.d(m, q);
    }
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(s.g);
  if (!lu.isInvertible()) throw NumericError("singular metric at a sample point");
  s.g_inv = lu.inverse();
  return s;
}

Eigen::MatrixXd MetricField::value(const Point& p) const {
  check_point(chart_, p);
  const int n = dim();
  Eigen::MatrixXd g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) g(i, j) = g(j, i) = expr::evaluate(components_[i][j], chart_.bind(p));
  return g;
}

DefinitenessReport check_definite(const MetricField& g, const std::vector<Point>& samples) {
  DefinitenessReport r;
  r.min_ratio = std::numeric_limits<double>::infinity();
  const auto& c = g.components();
  const int n = g.dim();
  for (const auto& p : samples) {
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = expr::evaluate(c[i][j], g.chart().bind(p));
    r.symmetry_residual = std::max(r.symmetry_residual, (m - m.transpose()).cwiseAbs().maxCoeff());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    const double top = ev.cwiseAbs().maxCoeff();
    r.min_ratio = std::min(r.min_ratio, top > 0.0 ? ev.minCoeff() / top : 0.0);
  }
  if (samples.empty()) r.min_ratio = 0.0;
  r.positive_definite = !samples.empty() && r.min_ratio > 1e-10;
  return r;
}

ConnectionField::ConnectionField(ChartSpec chart, Evaluator eval, std::string name, bool torsion_free)
    : chart_(std::move(chart)), eval_(std::move(eval)), name_(std::move(name)), torsion_free_(torsion_free) {
  chart_.validate();
}

ConnectionField ConnectionField::flat(ChartSpec chart) {
  const int n = chart.dim();
  return ConnectionField(
      std::move(chart),
      [n](const Point&, int order) {
        ConnectionSample s;
        s.order = order;
        s.gamma = Tensor3(n);
        if (order >= 1) s.dgamma = Tensor4(n);
        return s;
      },
      "flat");
}

ConnectionField ConnectionField::from_expressions(ChartSpec chart,
                                                  std::vector<std::vector<std::vector<Expression>>> components,
                                                  bool torsion_free) {
  chart.validate();
  const auto n = static_cast<std::size_t>(chart.dim());
  bool shape_ok = components.size() == n;
  for (const auto& plane : components) {
    shape_ok = shape_ok && plane.size() == n;
    for (const auto& row : plane) shape_ok = shape_ok && row.size() == n;
  }
  if (!shape_ok) throw SpecError("connection needs dim^3 Christoffel components");

  ConnectionField field(
      chart,
      [chart, components = std::move(components)](const Point& p, int order) {
        check_point(chart, p);
        const int d = chart.dim();
        ConnectionSample s;
        s.order = order;
        s.gamma = Tensor3(d);
        if (order >= 1) s.dgamma = Tensor4(d);
        const auto at = chart.bind(p);
        for (int k = 0; k < d; ++k)
          for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
              const auto jet = expr::eval_jet(components[k][i][j], at, order >= 1 ? 1 : 0);
              s.gamma(k, i, j) = jet.value();
              if (order >= 1)
                for (int m = 0; m < d; ++m) s.dgamma(m, k, i, j) = jet.d(m);
            }
        return s;
      },
      "christoffel", torsion_free);

  if (torsion_free) {
    const double t = max_torsion(field, default_samples(field.chart()));
    if (t > 1e-12) throw SpecError("connection flagged torsion-free has asymmetric Christoffel symbols");
  }
  return field;
}

CubicField::CubicField(ChartSpec chart, Evaluator eval) : chart_(std::move(chart)), eval_(std::move(eval)) {
  chart_.validate();
}

CubicField CubicField::third_derivative_of(ChartSpec chart, const Expression& potential) {
  chart.validate();
  const int n = chart.dim();
  std::vector<std::vector<Expression>> hess(n, std::vector<Expression>(n));
  for (int i = 0; i < n; ++i) {
    const Expression di = expr::differentiate(potential, chart.names[i]);
    for (int j = i; j < n; ++j) hess[i][j] = expr::differentiate(di, chart.names[j]);
  }
  return CubicField(chart, [chart, hess = std::move(hess)](const Point& p, int order) {
    check_point(chart, p);
    const int d = chart.dim();
    CubicSample s;
    s.order = order;
    s.t = Tensor3(d);
    if (order >= 1) s.dt = Tensor4(d);
    const auto at = chart.bind(p);
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) {
        const auto jet = expr::eval_jet(hess[i][j], at, order >= 1 ? 2 : 1);
        for (int k = j; k < d; ++k) {
          const double v = jet.d(k);
          const int perm[6][3] = {{i, j, k}, {i, k, j}, {j, i, k}, {j, k, i}, {k, i, j}, {k, j, i}};
          for (const auto& q : perm) s.t(q[0], q[1], q[2]) = v;
          if (order >= 1)
            for (int m = 0; m < d; ++m) {
              const double dv = jet.d(m, k);
              for (const auto& q : perm) s.dt(m, q[0], q[1], q[2]) = dv;
            }
        }
      }
    return s;
  });
}

Lowered lower(const MetricSample& g, const ConnectionSample& c) {
  const int n = static_cast<int>(g.g.rows());
  const bool deriv = c.order >= 1 && g.order >= 1;
  Lowered l{Tensor3(n), deriv ? Tensor4(n) : Tensor4()};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double v = 0.0;
        for (int q = 0; q < n; ++q) v += g.g(k, q) * c.gamma(q, i, j);
        l.low(i, j, k) = v;
        if (!deriv) continue;
        for (int m = 0; m < n; ++m) {
          double dv = 0.0;
          for (int q = 0; q < n; ++q) dv += g.dg(m, k, q) * c.gamma(q, i, j) + g.g(k, q) * c.dgamma(m, q, i, j);
          l.dlow(m, i, j, k) = dv;
        }
      }
  return l;
}

ConnectionSample raise(const MetricSample& g, const Lowered& l, int order) {
  const int n = static_cast<int>(g.g.rows());
  ConnectionSample c;
  c.order = order;
  c.gamma = Tensor3(n);
  for (int q = 0; q < n; ++q)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double v = 0.0;
        for (int k = 0; k < n; ++k) v += g.g_inv(q, k) * l.low(i, j, k);
        c.gamma(q, i, j) = v;
      }
  if (order < 1) return c;
  if (g.order < 1 || l.dlow.size() == 0) throw NumericError("derivative data missing for raised connection");
  c.dgamma = Tensor4(n);
  for (int m = 0; m < n; ++m) {
    Eigen::MatrixXd dg(n, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) dg(a, b) = g.dg(m, a, b);
    const Eigen::MatrixXd dinv = -g.g_inv * dg * g.g_inv;
    for (int q = 0; q < n; ++q)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double v = 0.0;
          for (int k = 0; k < n; ++k) v += dinv(q, k) * l.low(i, j, k) + g.g_inv(q, k) * l.dlow(m, i, j, k);
          c.dgamma(m, q, i, j) = v;
        }
  }
  return c;
}

}  // namespace igh::tensor
