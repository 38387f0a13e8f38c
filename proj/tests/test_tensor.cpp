#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "igh/errors.hpp"
#include "igh/tensor.hpp"

using namespace igh;
using namespace igh::tensor;
using expr::Expression;
using expr::parse_expr;

namespace {

ChartSpec chart2(double x0, double x1, double y0, double y1) { return {{"x", "y"}, {{{x0, x1}}, {{y0, y1}}}, {}}; }

MetricField metric(const ChartSpec& c, const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::vector<Expression>> m;
  for (const auto& r : rows) {
    m.emplace_back();
    for (const auto& s : r) m.back().push_back(parse_expr(s));
  }
  return MetricField(c, m);
}

MetricField euclidean(const ChartSpec& c) {
  std::vector<std::vector<std::string>> rows(c.dim(), std::vector<std::string>(c.dim(), "0"));
  for (int i = 0; i < c.dim(); ++i) rows[i][i] = "1";
  return metric(c, rows);
}

const ChartSpec kGaussChart{{"t1", "t2"}, {{{-1.0, 1.0}}, {{-1.0, -0.25}}}, {}};
const Expression kGaussPsi = parse_expr("-t1^2/(4*t2) + 0.5*log(-pi/t2)");

// Third derivatives of the Gaussian log-partition function, by hand.
double gauss_third(int i, int j, int k, double a, double b) {
  const int twos = (i == 1) + (j == 1) + (k == 1);
  switch (twos) {
    case 0: return 0.0;
    case 1: return 1.0 / (2 * b * b);
    case 2: return -a / (b * b * b);
    default: return 3 * a * a / (2 * b * b * b * b) - 1.0 / (b * b * b);
  }
}

const ChartSpec kConeChart{{"x", "y", "z"}, {{{-0.5, 0.5}}, {{-0.5, 0.5}}, {{2.0, 3.0}}}, {}};
MetricField cone_metric() { return MetricField::hessian_of(kConeChart, parse_expr("-1.5*log(z^2 - x^2 - y^2)")); }

// d_m Gamma^k_ij by central differences of the order-0 Christoffel symbols.
double max_derivative_gap(const ConnectionField& c, const std::vector<Point>& pts) {
  const int n = c.dim();
  const double h = 1e-5;
  double worst = 0.0;
  for (const auto& p : pts) {
    const auto s = c.eval(p, 1);
    for (int m = 0; m < n; ++m) {
      Point a = p, b = p;
      a[m] += h;
      b[m] -= h;
      const auto ga = c.eval(a, 0), gb = c.eval(b, 0);
      for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            const double fd = (ga.gamma(k, i, j) - gb.gamma(k, i, j)) / (2 * h);
            worst = std::max(worst, std::abs(fd - s.dgamma(m, k, i, j)) / std::max(1.0, std::abs(fd)));
          }
    }
  }
  return worst;
}

Point pt(std::initializer_list<double> v) { return Point(v); }

// Polynomial SPD metric with random small coefficients on [-1,1]^2.
MetricField random_metric(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  auto poly = [&](double base) {
    return std::to_string(base) + " + " + std::to_string(u(rng)) + "*x + " + std::to_string(u(rng)) + "*y + " +
           std::to_string(u(rng)) + "*x*y";
  };
  const std::string off = poly(0.0);
  return metric(chart2(-1, 1, -1, 1), {{poly(3.0), off}, {off, poly(3.0)}});
}

}  // namespace

TEST_CASE("chart validation and sampling") {
  CHECK_THROWS_AS((ChartSpec{{"x", "y"}, {{{0.0, 1.0}}}, {}}.validate()), SpecError);
  CHECK_THROWS_AS((ChartSpec{{"x"}, {{{1.0, 1.0}}}, {}}.validate()), SpecError);
  CHECK_THROWS_AS((ChartSpec{{"x", "x"}, {{{0.0, 1.0}}, {{0.0, 1.0}}}, {}}.validate()), SpecError);
  const auto c = chart2(-1, 2, 3, 4);
  const auto a = default_samples(c), b = default_samples(c);
  CHECK(a.size() == 128);
  CHECK(a == b);
  for (const auto& p : a) {
    CHECK(c.contains(p));
    CHECK(p[0] > -1.0);
    CHECK(p[0] < 2.0);
  }
  const auto other = default_samples(c, 1);
  for (const auto& p : other)
    for (const auto& q : a) CHECK(p != q);

  const ChartSpec torus{{"u", "v"}, {{{0.0, 1.0}}, {{0.0, 1.0}}}, {true, false}};
  CHECK(torus.wrap(pt({1.25, 0.5}))[0] == doctest::Approx(0.25));
  CHECK(torus.wrap(pt({-0.25, 0.5}))[0] == doctest::Approx(0.75));
  CHECK(torus.wrap(pt({0.5, 1.5}))[1] == 1.5);
}

TEST_CASE("metric field validation") {
  const auto c = chart2(0, 1, 0, 1);
  CHECK_THROWS_AS(metric(c, {{"1", "x"}, {"y", "1"}}), SpecError);
  CHECK_THROWS_AS(metric(c, {{"1", "0"}}), SpecError);
  CHECK_THROWS_AS(metric(c, {{"1", "1"}, {"1", "1"}}).eval(pt({0.5, 0.5})), NumericError);
  CHECK(check_definite(euclidean(c), default_samples(c)).positive_definite);
  CHECK_FALSE(check_definite(metric(c, {{"1", "0"}, {"0", "-1"}}), default_samples(c)).positive_definite);
  CHECK(check_definite(cone_metric(), default_samples(kConeChart)).positive_definite);
}

TEST_CASE("Levi-Civita of the Euclidean plane vanishes") {
  const auto c = chart2(-1, 1, -1, 1);
  const auto lc = levi_civita(euclidean(c));
  for (const auto& p : default_samples(c)) CHECK(lc.eval(p, 1).gamma.max_abs() == 0.0);
}

TEST_CASE("Levi-Civita of the scaled hyperbolic product metric") {
  const ChartSpec c{{"t", "r", "a"}, {{{-1.0, 1.0}}, {{0.2, 2.0}}, {{0.0, 6.0}}}, {}};
  const auto g = metric(c, {{"3", "0", "0"}, {"0", "3", "0"}, {"0", "0", "3*sinh(r)^2"}});
  const auto lc = levi_civita(g);
  const auto pts = default_samples(c);
  for (const auto& p : pts) {
    const double r = p[1];
    const auto s = lc.eval(p, 1);
    CHECK(s.gamma(1, 2, 2) == doctest::Approx(-std::sinh(r) * std::cosh(r)).epsilon(1e-12));
    CHECK(s.gamma(2, 1, 2) == doctest::Approx(std::cosh(r) / std::sinh(r)).epsilon(1e-12));
    CHECK(s.gamma(2, 2, 1) == doctest::Approx(std::cosh(r) / std::sinh(r)).epsilon(1e-12));
    CHECK(std::abs(s.gamma(0, 0, 0)) == 0.0);

    const auto rm = curvature(s);
    const auto gs = g.eval(p, 0);
    auto sectional = [&](int i, int j) {
      double num = 0.0;
      for (int l = 0; l < 3; ++l) num += gs.g(i, l) * rm(l, j, i, j);
      return num / (gs.g(i, i) * gs.g(j, j) - gs.g(i, j) * gs.g(i, j));
    };
    CHECK(sectional(1, 2) == doctest::Approx(-1.0 / 3.0).epsilon(1e-10));
    CHECK(std::abs(sectional(0, 1)) < 1e-12);
    CHECK(std::abs(sectional(0, 2)) < 1e-12);
    for (int l = 0; l < 3; ++l)
      for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) CHECK(std::abs(rm(l, k, i, j) + rm(l, k, j, i)) < 1e-10);
  }
  CHECK(metric_compatibility_residual(g, lc, pts) < 1e-8);
  CHECK(max_torsion(lc, pts) < 1e-12);
}

TEST_CASE("Gaussian Fisher metric: compatibility, dual, cubic form") {
  const auto g = MetricField::hessian_of(kGaussChart, kGaussPsi);
  const auto pts = default_samples(kGaussChart);
  const auto lc = levi_civita(g);
  CHECK(metric_compatibility_residual(g, lc, pts) < 1e-8);

  const auto flat = ConnectionField::flat(kGaussChart);
  const auto dual = dual_connection(g, flat);
  const auto t = cubic_form(g, flat);
  for (const auto& p : pts) {
    const auto s = g.eval(p, 1);
    const auto low = lower(s, dual.eval(p, 0)).low;
    const auto ts = t.eval(p, 0);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) {
          CHECK(low(i, j, k) == doctest::Approx(s.dg(i, j, k)).epsilon(1e-12));
          CHECK(ts.t(i, j, k) == doctest::Approx(gauss_third(i, j, k, p[0], p[1])).epsilon(1e-10));
        }
  }
  CHECK(symmetry_residual(t, pts) < 1e-10);
  CHECK(max_curvature(flat, pts) == 0.0);
  CHECK(max_curvature(dual, pts) < 1e-8);
  CHECK(duality_residual(g, flat, dual, pts) < 1e-10);
}

TEST_CASE("Levi-Civita is self-dual and has zero cubic form") {
  const auto g = cone_metric();
  const auto pts = default_samples(kConeChart);
  const auto lc = levi_civita(g);
  CHECK(max_difference(dual_connection(g, lc), lc, pts) < 1e-10);
  for (const auto& p : pts) CHECK(cubic_form(g, lc).eval(p, 0).t.max_abs() < 1e-10);
}

TEST_CASE("duality is an involution on random metrics and connections") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (int trial = 0; trial < 8; ++trial) {
    const auto g = random_metric(rng);
    const auto& c = g.chart();
    std::vector<std::vector<std::vector<Expression>>> comp(2, std::vector<std::vector<Expression>>(2, std::vector<Expression>(2)));
    for (int k = 0; k < 2; ++k)
      for (int i = 0; i < 2; ++i)
        for (int j = i; j < 2; ++j)
          comp[k][i][j] = comp[k][j][i] =
              parse_expr(std::to_string(u(rng)) + " + " + std::to_string(u(rng)) + "*x*y - " + std::to_string(u(rng)) + "*y^2");
    const auto nabla = ConnectionField::from_expressions(c, comp);
    const auto pts = default_samples(c);
    const auto dual = dual_connection(g, nabla);
    CHECK(max_difference(dual_connection(g, dual), nabla, pts) < 1e-8);
    CHECK(duality_residual(g, nabla, dual, pts) < 1e-10);
    CHECK(max_derivative_gap(dual, pts) < 1e-6);
    CHECK(max_derivative_gap(levi_civita(g), pts) < 1e-6);

    // the dual is torsion-free exactly when nabla g is totally symmetric:
    // lowered torsion of the dual equals C(i,j,k) - C(j,i,k)
    const auto cubic = cubic_form(g, nabla);
    double gap = 0.0;
    for (const auto& p : pts) {
      const auto s = g.eval(p, 0);
      const auto tor = torsion(dual, p);
      const auto ct = cubic.eval(p, 0).t;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          for (int k = 0; k < 2; ++k) {
            double low = 0.0;
            for (int l = 0; l < 2; ++l) low += s.g(k, l) * tor(l, i, j);
            gap = std::max(gap, std::abs(low - (ct(i, j, k) - ct(j, i, k))));
          }
    }
    CHECK(gap < 1e-10);
  }
}

TEST_CASE("torsion-free flag is verified") {
  const auto c = chart2(0, 1, 0, 1);
  std::vector<std::vector<std::vector<Expression>>> comp(2, std::vector<std::vector<Expression>>(2, std::vector<Expression>(2)));
  comp[0][0][1] = parse_expr("x");
  CHECK_THROWS_AS(ConnectionField::from_expressions(c, comp, true), SpecError);
  const auto skew = ConnectionField::from_expressions(c, comp, false);
  CHECK(max_torsion(skew, default_samples(c)) > 0.1);
}

TEST_CASE("alpha family from the Gaussian family") {
  const auto g = MetricField::hessian_of(kGaussChart, kGaussPsi);
  const auto t = CubicField::third_derivative_of(kGaussChart, kGaussPsi);
  const auto pts = default_samples(kGaussChart);
  const auto e = ConnectionField::flat(kGaussChart);
  const auto lc = levi_civita(g);

  CHECK(max_difference(alpha_connection(e, t, 1.0, 1.0, g), e, pts) == 0.0);
  CHECK(max_difference(alpha_connection(e, t, 1.0, 0.0, g), lc, pts) < 1e-8);
  CHECK(max_difference(alpha_connection(e, t, 1.0, -1.0, g), dual_connection(g, e), pts) < 1e-8);

  const auto m = alpha_connection(e, t, 1.0, -1.0, g);
  for (const auto& p : pts) {
    const auto low = lower(g.eval(p, 1), m.eval(p, 0)).low;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k)
          CHECK(low(i, j, k) == doctest::Approx(gauss_third(i, j, k, p[0], p[1])).epsilon(1e-10));
  }

  for (double a : {-2.0, -0.5, 0.3, 1.7}) {
    CAPTURE(a);
    const auto ga = alpha_connection(e, t, 1.0, a, g);
    const auto gm = alpha_connection(e, t, 1.0, -a, g);
    const auto nab = cubic_form(g, ga);
    double sum_gap = 0.0, cubic_gap = 0.0;
    for (const auto& p : pts) {
      const auto x = ga.eval(p, 0), y = gm.eval(p, 0), l = lc.eval(p, 0);
      for (std::size_t q = 0; q < x.gamma.size(); ++q)
        sum_gap = std::max(sum_gap, std::abs(x.gamma.data()[q] + y.gamma.data()[q] - 2 * l.gamma.data()[q]));
      const auto ns = nab.eval(p, 0), ts = t.eval(p, 0);
      for (std::size_t q = 0; q < ns.t.size(); ++q)
        cubic_gap = std::max(cubic_gap, std::abs(ns.t.data()[q] - a * ts.t.data()[q]));
    }
    CHECK(sum_gap < 1e-8);
    CHECK(cubic_gap < 1e-8);
    CHECK(max_derivative_gap(ga, pts) < 1e-6);
  }

  // affine in gamma: the midpoint of two members is the member at the midpoint
  const auto a = alpha_connection(e, t, 1.0, -0.2, g), b = alpha_connection(e, t, 1.0, 0.8, g),
             mid = alpha_connection(e, t, 1.0, 0.3, g);
  double gap = 0.0;
  for (const auto& p : pts) {
    const auto x = a.eval(p, 0), y = b.eval(p, 0), z = mid.eval(p, 0);
    for (std::size_t q = 0; q < x.gamma.size(); ++q)
      gap = std::max(gap, std::abs(0.5 * (x.gamma.data()[q] + y.gamma.data()[q]) - z.gamma.data()[q]));
  }
  CHECK(gap < 1e-8);
}

TEST_CASE("xi construction") {
  const auto c = chart2(-1, 1, -1, 1);
  const auto g = euclidean(c);
  const auto pts = default_samples(c);

  const auto [zero, zero_dual] = xi_statistical(g, {parse_expr("1"), parse_expr("0")}, 0.0);
  CHECK(max_difference(zero, levi_civita(g), pts) == 0.0);
  CHECK(max_difference(zero_dual, levi_civita(g), pts) == 0.0);

  const auto [nabla, dual] = xi_statistical(g, {parse_expr("1"), parse_expr("0")}, 1.0);
  for (const auto& p : pts) {
    const auto s = nabla.eval(p, 0);
    for (int k = 0; k < 2; ++k)
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) CHECK(s.gamma(k, i, j) == (k == 0 && i == 0 && j == 0 ? 1.0 : 0.0));
    const auto ts = cubic_form(g, nabla).eval(p, 0);
    for (int k = 0; k < 2; ++k)
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) CHECK(ts.t(k, i, j) == (k == 0 && i == 0 && j == 0 ? -2.0 : 0.0));
  }
  CHECK(max_difference(dual_connection(g, nabla), dual, pts) < 1e-12);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const auto curved_g = metric(c, {{"2 + x^2", "0.3*y"}, {"0.3*y", "2 + y^2"}});
  const std::vector<Expression> xi{parse_expr("1 + 0.2*y"), parse_expr("x")};
  for (int trial = 0; trial < 5; ++trial) {
    const double eps = u(rng);
    CAPTURE(eps);
    const auto [a, b] = xi_statistical(curved_g, xi, eps);
    CHECK(duality_residual(curved_g, a, b, pts) < 1e-10);
    CHECK(max_torsion(a, pts) < 1e-12);
    CHECK(max_torsion(b, pts) < 1e-12);
    CHECK(symmetry_residual(cubic_form(curved_g, a), pts) < 1e-10);
    CHECK(max_derivative_gap(a, pts) < 1e-6);
    CHECK(max_curvature(a, pts) > 1e-3);
    CHECK(max_curvature(b, pts) > 1e-3);
  }

  CHECK_THROWS_AS(xi_statistical(g, {parse_expr("1")}, 1.0), SpecError);
  CHECK_THROWS_AS(xi_statistical(g, {parse_expr("x - x"), parse_expr("0")}, 1.0), NumericError);
}

TEST_CASE("Hessian criteria") {
  const auto c = chart2(-1, 1, -1, 1);
  const auto flat = ConnectionField::flat(c);
  const auto pts = default_samples(c);

  const auto quartic = MetricField::hessian_of(c, parse_expr("x^4 + y^4 + (x^2 + y^2)/2"));
  auto r = hessian_criteria(quartic, flat, pts);
  CHECK(r.flat);
  CHECK(r.affine_chart);
  CHECK(r.hessian);
  CHECK(r.agree);
  CHECK(r.codazzi < 1e-10);
  CHECK(r.coordinate < 1e-10);
  CHECK(r.gamma_self_adjoint < 1e-10);
  CHECK(r.gamma_symmetric < 1e-10);

  r = hessian_criteria(cone_metric(), ConnectionField::flat(kConeChart), default_samples(kConeChart));
  CHECK(r.hessian);
  CHECK(r.agree);

  const auto skew = metric(c, {{"1 + 0.5*(y + 2)", "0"}, {"0", "1"}});
  r = hessian_criteria(skew, flat, pts);
  CHECK(r.flat);
  CHECK_FALSE(r.hessian);
  CHECK(r.agree);
  CHECK(r.coordinate == doctest::Approx(0.5 / 1.0));
  CHECK(r.coordinate > 0.1);
  CHECK(r.codazzi > 0.1);
  CHECK(r.gamma_self_adjoint > 0.1);
  CHECK(r.gamma_symmetric > 0.1);
  CHECK_FALSE(all_pass(r.table()));

  // A flat but non-affine chart: the Euclidean plane in (log x, y). The
  // coordinate criterion is skipped there and the tensorial ones still pass.
  const auto shifted = chart2(-1, 1, -1, 1);
  const auto e2 = metric(shifted, {{"exp(2*x)", "0"}, {"0", "1"}});
  const auto lc = levi_civita(e2);
  r = hessian_criteria(e2, lc, pts);
  CHECK(r.flat);
  CHECK_FALSE(r.affine_chart);
  CHECK(r.hessian);
  CHECK(r.agree);
}

TEST_CASE("Koszul form") {
  const auto c = chart2(-1, 1, -1, 1);
  const auto k0 = koszul_form(euclidean(c), ConnectionField::flat(c), pt({0.2, 0.3}));
  CHECK(k0.log_det_route.norm() == 0.0);
  CHECK(k0.trace_route.norm() == 0.0);

  const auto g = cone_metric();
  const auto flat = ConnectionField::flat(kConeChart);
  const auto scaled_rows = [&] {
    std::vector<std::vector<Expression>> m = g.components();
    for (auto& row : m)
      for (auto& e : row) e = expr::number(7.5) * e;
    return MetricField(kConeChart, m);
  }();
  for (const auto& p : default_samples(kConeChart)) {
    const auto k = koszul_form(g, flat, p);
    CHECK((k.log_det_route - k.trace_route).cwiseAbs().maxCoeff() < 1e-8);
    const auto ks = koszul_form(scaled_rows, flat, p);
    CHECK((k.log_det_route - ks.log_det_route).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(k.norm * k.norm == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(k.parallel.cwiseAbs().maxCoeff() < 1e-8);
    // log det g = const - 3 log q for this metric, so beta = -(3/2) d log q
    const double q = p[2] * p[2] - p[0] * p[0] - p[1] * p[1];
    CHECK(k.log_det_route(0) == doctest::Approx(-1.5 * (-2 * p[0] / q)).epsilon(1e-10));
    CHECK(k.log_det_route(2) == doctest::Approx(-1.5 * (2 * p[2] / q)).epsilon(1e-10));
  }
}

TEST_CASE("pullback metric") {
  const auto c = chart2(-1, 1, -1, 1);
  const auto g = metric(c, {{"1 + x^2", "x*y"}, {"x*y", "2 + y^2"}});
  const auto same = pullback_metric({parse_expr("x"), parse_expr("y")}, g, c);
  for (const auto& p : default_samples(c))
    CHECK((same.value(p) - g.value(p)).cwiseAbs().maxCoeff() < 1e-14);

  const auto scaled = pullback_metric({parse_expr("2*x"), parse_expr("2*y")}, euclidean(c), c);
  for (const auto& p : default_samples(c))
    CHECK((scaled.value(p) - 4.0 * Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() < 1e-14);

  CHECK_THROWS_AS(pullback_metric({parse_expr("x + y"), parse_expr("x + y")}, g, c), NumericError);

  const ChartSpec cyl{{"t", "r", "a"}, {{{-0.5, 0.5}}, {{0.1, 2.0}}, {{0.0, 2 * std::numbers::pi}}}, {}};
  const std::vector<Expression> map{parse_expr("exp(t)*sinh(r)*cos(a)"), parse_expr("exp(t)*sinh(r)*sin(a)"),
                                    parse_expr("exp(t)*cosh(r)")};
  const ChartSpec wide{{"x", "y", "z"}, {{{-8.0, 8.0}}, {{-8.0, 8.0}}, {{0.5, 8.0}}}, {}};
  const auto cone = MetricField::hessian_of(wide, parse_expr("-1.5*log(z^2 - x^2 - y^2)"));
  const auto pulled = pullback_metric(map, cone, cyl);
  for (const auto& p : default_samples(cyl)) {
    Eigen::Matrix3d want = Eigen::Matrix3d::Zero();
    want(0, 0) = 3;
    want(1, 1) = 3;
    want(2, 2) = 3 * std::sinh(p[1]) * std::sinh(p[1]);
    CHECK((pulled.value(p) - want).cwiseAbs().maxCoeff() < 1e-6);
  }
}
