#include "igh/errors.hpp"
#include "igh/tensor.hpp"

namespace igh::tensor {

using expr::Expression;

namespace {

// Levi-Civita symbols in lowered form from a metric sample of order >= 1
// (order >= 2 also fills the derivative).
Lowered levi_civita_lowered(const MetricSample& g) {
  const int n = static_cast<int>(g.g.rows());
  const bool deriv = g.order >= 2;
  Lowered l{Tensor3(n), deriv ? Tensor4(n) : Tensor4()};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        l.low(i, j, k) = 0.5 * (g.dg(i, j, k) + g.dg(j, i, k) - g.dg(k, i, j));
        if (deriv)
          for (int m = 0; m < n; ++m)
            l.dlow(m, i, j, k) = 0.5 * (g.ddg(m, i, j, k) + g.ddg(m, j, i, k) - g.ddg(m, k, i, j));
      }
  return l;
}

void require_same_chart(const ChartSpec& a, const ChartSpec& b) {
  if (a.names != b.names) throw SpecError("fields live on different charts");
}

}  // namespace

ConnectionField levi_civita(const MetricField& g) {
  return ConnectionField(
      g.chart(),
      [g](const Point& p, int order) {
        const auto s = g.eval(p, order + 1);
        return raise(s, levi_civita_lowered(s), order);
      },
      "levi-civita");
}

ConnectionField dual_connection(const MetricField& g, const ConnectionField& c) {
  require_same_chart(g.chart(), c.chart());
  return ConnectionField(
      g.chart(),
      [g, c](const Point& p, int order) {
        const auto s = g.eval(p, order + 1);
        const auto base = lower(s, c.eval(p, order));
        const int n = g.dim();
        Lowered d{Tensor3(n), order >= 1 ? Tensor4(n) : Tensor4()};
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
              d.low(i, j, k) = s.dg(i, j, k) - base.low(i, k, j);
              if (order >= 1)
                for (int m = 0; m < n; ++m) d.dlow(m, i, j, k) = s.ddg(m, i, j, k) - base.dlow(m, i, k, j);
            }
        return raise(s, d, order);
      },
      "dual(" + c.name() + ")", c.torsion_free_flag());
}

CubicField cubic_form(const MetricField& g, const ConnectionField& c) {
  require_same_chart(g.chart(), c.chart());
  return CubicField(g.chart(), [g, c](const Point& p, int order) {
    const auto s = g.eval(p, order + 1);
    const auto l = lower(s, c.eval(p, order));
    const int n = g.dim();
    CubicSample t;
    t.order = order;
    t.t = Tensor3(n);
    if (order >= 1) t.dt = Tensor4(n);
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          t.t(k, i, j) = s.dg(k, i, j) - l.low(k, i, j) - l.low(k, j, i);
          if (order >= 1)
            for (int m = 0; m < n; ++m)
              t.dt(m, k, i, j) = s.ddg(m, k, i, j) - l.dlow(m, k, i, j) - l.dlow(m, k, j, i);
        }
    return t;
  });
}

ConnectionField alpha_connection(const ConnectionField& base, const CubicField& t, double alpha_base,
                                 double gamma, const MetricField& g) {
  require_same_chart(g.chart(), base.chart());
  require_same_chart(g.chart(), t.chart());
  const double w = 0.5 * (alpha_base - gamma);
  return ConnectionField(
      g.chart(),
      [g, base, t, w](const Point& p, int order) {
        const auto s = g.eval(p, order);
        auto l = lower(s, base.eval(p, order));
        const auto ts = t.eval(p, order);
        const int n = g.dim();
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
              l.low(i, j, k) += w * ts.t(i, j, k);
              if (order >= 1)
                for (int m = 0; m < n; ++m) l.dlow(m, i, j, k) += w * ts.dt(m, i, j, k);
            }
        return raise(s, l, order);
      },
      "alpha", base.torsion_free_flag());
}

std::pair<ConnectionField, ConnectionField> xi_statistical(const MetricField& g, std::vector<Expression> xi,
                                                           double eps) {
  const int n = g.dim();
  if (static_cast<int>(xi.size()) != n) throw SpecError("xi must have one component per coordinate");
  const ChartSpec& chart = g.chart();
  for (const auto& p : default_samples(chart)) {
    const auto m = g.value(p);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = expr::evaluate(xi[i], chart.bind(p));
    if (std::sqrt(std::max(0.0, v.dot(m * v))) < 1e-12) throw NumericError("xi vanishes at a sample point");
  }

  auto make = [g, xi](double e, std::string name) {
    return ConnectionField(
        g.chart(),
        [g, xi, e](const Point& p, int order) {
          const int d = g.dim();
          const auto s = g.eval(p, order + 1);
          auto c = raise(s, levi_civita_lowered(s), order);
          const auto at = g.chart().bind(p);
          Eigen::VectorXd up(d), low(d);
          Eigen::MatrixXd dup(d, d), dlow(d, d);  // (m, i) = d_m xi^i, d_m xi_i
          for (int i = 0; i < d; ++i) {
            const auto jet = expr::eval_jet(xi[i], at, order >= 1 ? 1 : 0);
            up(i) = jet.value();
            if (order >= 1)
              for (int m = 0; m < d; ++m) dup(m, i) = jet.d(m);
          }
          low = s.g * up;
          if (order >= 1)
            for (int m = 0; m < d; ++m)
              for (int i = 0; i < d; ++i) {
                double v = 0.0;
                for (int k = 0; k < d; ++k) v += s.dg(m, i, k) * up(k) + s.g(i, k) * dup(m, k);
                dlow(m, i) = v;
              }
          for (int l = 0; l < d; ++l)
            for (int i = 0; i < d; ++i)
              for (int j = 0; j < d; ++j) {
                c.gamma(l, i, j) += e * low(i) * low(j) * up(l);
                if (order >= 1)
                  for (int m = 0; m < d; ++m)
                    c.dgamma(m, l, i, j) += e * (dlow(m, i) * low(j) * up(l) + low(i) * dlow(m, j) * up(l) +
                                                 low(i) * low(j) * dup(m, l));
              }
          return c;
        },
        std::move(name));
  };
  return {make(eps, "xi-statistical"), make(-eps, "xi-statistical-dual")};
}

Tensor3 torsion(const ConnectionField& c, const Point& p) {
  const auto s = c.eval(p, 0);
  const int n = c.dim();
  Tensor3 t(n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) t(k, i, j) = s.gamma(k, i, j) - s.gamma(k, j, i);
  return t;
}

Tensor4 curvature(const ConnectionSample& c) {
  if (c.order < 1) throw NumericError("curvature needs connection derivatives");
  const int n = c.gamma.dim();
  Tensor4 r(n);
  for (int l = 0; l < n; ++l)
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double v = c.dgamma(i, l, j, k) - c.dgamma(j, l, i, k);
          for (int m = 0; m < n; ++m) v += c.gamma(l, i, m) * c.gamma(m, j, k) - c.gamma(l, j, m) * c.gamma(m, i, k);
          r(l, k, i, j) = v;
        }
  return r;
}

Tensor4 curvature(const ConnectionField& c, const Point& p) { return curvature(c.eval(p, 1)); }

double metric_compatibility_residual(const MetricField& g, const ConnectionField& c,
                                     const std::vector<Point>& samples) {
  const auto t = cubic_form(g, c);
  double worst = 0.0;
  for (const auto& p : samples) worst = std::max(worst, t.eval(p, 0).t.max_abs());
  return worst;
}

double duality_residual(const MetricField& g, const ConnectionField& c, const ConnectionField& dual,
                        const std::vector<Point>& samples) {
  const int n = g.dim();
  double worst = 0.0;
  for (const auto& p : samples) {
    const auto s = g.eval(p, 1);
    const auto a = lower(s, c.eval(p, 0));
    const auto b = lower(s, dual.eval(p, 0));
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          worst = std::max(worst, std::abs(s.dg(k, i, j) - a.low(k, i, j) - b.low(k, j, i)));
  }
  return worst;
}

double max_difference(const ConnectionField& a, const ConnectionField& b, const std::vector<Point>& samples) {
  double worst = 0.0;
  for (const auto& p : samples) {
    const auto x = a.eval(p, 0), y = b.eval(p, 0);
    for (std::size_t i = 0; i < x.gamma.size(); ++i)
      worst = std::max(worst, std::abs(x.gamma.data()[i] - y.gamma.data()[i]));
  }
  return worst;
}

double max_torsion(const ConnectionField& c, const std::vector<Point>& samples) {
  double worst = 0.0;
  for (const auto& p : samples) worst = std::max(worst, torsion(c, p).max_abs());
  return worst;
}

double max_curvature(const ConnectionField& c, const std::vector<Point>& samples) {
  double worst = 0.0;
  for (const auto& p : samples) worst = std::max(worst, curvature(c, p).max_abs());
  return worst;
}

double symmetry_residual(const Tensor3& t) {
  const int n = t.dim();
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const double v = t(i, j, k);
        worst = std::max({worst, std::abs(v - t(j, i, k)), std::abs(v - t(i, k, j)), std::abs(v - t(k, j, i))});
      }
  return worst;
}

double symmetry_residual(const CubicField& t, const std::vector<Point>& samples) {
  double worst = 0.0;
  for (const auto& p : samples) worst = std::max(worst, symmetry_residual(t.eval(p, 0).t));
  return worst;
}

}  // namespace igh::tensor
