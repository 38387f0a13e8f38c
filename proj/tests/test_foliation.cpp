#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "igh/errors.hpp"
#include "igh/foliation.hpp"

using namespace igh;
using namespace igh::foliation;
using expr::Expression;
using expr::parse_expr;
using tensor::ChartSpec;
using tensor::ConnectionField;
using tensor::MetricField;

namespace {

const ChartSpec kPlane{{"x", "y"}, {{{-1.0, 1.0}}, {{-1.0, 1.0}}}, {}};
const ChartSpec kTorus{{"x", "y"}, {{{0.0, 1.0}}, {{0.0, 1.0}}}, {true, true}};
const ChartSpec kH2R{{"t", "r", "a"}, {{{-1.0, 1.0}}, {{0.5, 1.5}}, {{0.0, 1.0}}}, {}};

MetricField metric(const ChartSpec& c, const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::vector<Expression>> m;
  for (const auto& r : rows) {
    m.emplace_back();
    for (const auto& s : r) m.back().push_back(parse_expr(s));
  }
  return MetricField(c, m);
}

MetricField plane_metric() { return metric(kPlane, {{"1", "0"}, {"0", "1"}}); }
ConnectionField xi_plane() { return tensor::xi_statistical(plane_metric(), {parse_expr("1"), parse_expr("0")}, 1.0).first; }
MetricField h2r_metric() { return metric(kH2R, {{"3", "0", "0"}, {"0", "3", "0"}, {"0", "0", "3*sinh(r)^2"}}); }

std::vector<Expression> field(std::initializer_list<const char*> comps) {
  std::vector<Expression> out;
  for (const char* c : comps) out.push_back(parse_expr(c));
  return out;
}

// Covariant derivative of nabla X by central differences of (nabla X)^l_j.
tensor::Tensor3 fd_nabla2(const ConnectionField& gamma, const std::vector<Expression>& x, const tensor::Point& p) {
  const auto& chart = gamma.chart();
  const int n = chart.dim();
  auto first = [&](const tensor::Point& q) {
    const auto f = expression_field(chart, x, q);
    const auto c = gamma.eval(q, 0);
    Eigen::MatrixXd y(n, n);  // y(l, j) = (nabla_j X)^l
    for (int l = 0; l < n; ++l)
      for (int j = 0; j < n; ++j) {
        y(l, j) = f.d(l, j);
        for (int k = 0; k < n; ++k) y(l, j) += c.gamma(l, j, k) * f.value[k];
      }
    return y;
  };
  const double h = 1e-5;
  const auto c = gamma.eval(p, 0);
  const Eigen::MatrixXd y = first(p);
  tensor::Tensor3 out(n);
  for (int i = 0; i < n; ++i) {
    tensor::Point a = p, b = p;
    a[i] += h;
    b[i] -= h;
    const Eigen::MatrixXd dy = (first(a) - first(b)) / (2 * h);
    for (int l = 0; l < n; ++l)
      for (int j = 0; j < n; ++j) {
        double s = dy(l, j);
        for (int m = 0; m < n; ++m) s += c.gamma(l, i, m) * y(m, j) - c.gamma(m, i, j) * y(l, m);
        out(l, i, j) = s;
      }
  }
  return out;
}

double max_gap(const tensor::Tensor3& a, const tensor::Tensor3& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

}  // namespace

TEST_CASE("polynomial basis layout and derivatives") {
  PolyVectorBasis b(kPlane, 2);
  CHECK(b.size() == 2 * 6);
  CHECK(b.monomials().front() == std::vector<int>{0, 0});
  CHECK(b.monomials()[1] == std::vector<int>{1, 0});
  CHECK(b.monomials()[3] == std::vector<int>{2, 0});
  CHECK(b.label(1) == "d/dy");
  CHECK(b.label(2 * 4 + 0) == "ux*uy d/dx");

  PolyVectorBasis c(kH2R, 3);
  CHECK(c.size() == 3 * 20);

  // monomial jets against the expression engine: u = (r - 1)/0.5
  const tensor::Point p{0.3, 1.2, 0.7};
  const auto mj = c.monomial_jet(p);
  const auto& mons = c.monomials();
  for (std::size_t q = 0; q < mons.size(); ++q) {
    std::string s = "1";
    const char* u[] = {"(t/1)", "((r-1)/0.5)", "((a-0.5)/0.5)"};
    for (int i = 0; i < 3; ++i) s += "*" + std::string(u[i]) + "^" + std::to_string(mons[q][i]);
    const auto jet = expr::eval_jet(parse_expr(s), kH2R.bind(p), 2);
    CHECK(mj.v[q] == doctest::Approx(jet.value()).epsilon(1e-13));
    for (int i = 0; i < 3; ++i) {
      CHECK(mj.d1[q][i] == doctest::Approx(jet.d(i)).epsilon(1e-12));
      for (int j = 0; j < 3; ++j) CHECK(mj.d2[q][i][j] == doctest::Approx(jet.d(i, j)).epsilon(1e-12));
    }
  }
}

TEST_CASE("second covariant derivative on simple fields") {
  const auto flat = ConnectionField::flat(kPlane);
  const tensor::Point p{0.3, -0.4};
  CHECK(nabla2_apply(flat, expression_field(kPlane, field({"1 + 2*x - y", "3 - x + 0.5*y"}), p), p).max_abs() == 0.0);
  const auto sq = nabla2_apply(flat, expression_field(kPlane, field({"x^2", "0"}), p), p);
  CHECK(sq(0, 0, 0) == doctest::Approx(2.0));
  CHECK(sq(0, 0, 1) == 0.0);

  const auto xi = xi_plane();
  CHECK(xi.eval(p, 0).gamma(0, 0, 0) == doctest::Approx(1.0));
  CHECK(nabla2_apply(xi, expression_field(kPlane, field({"1", "0"}), p), p).max_abs() <= 1e-14);
  CHECK(nabla2_apply(xi, expression_field(kPlane, field({"0", "1"}), p), p).max_abs() <= 1e-14);
  CHECK(nabla2_apply(xi, expression_field(kPlane, field({"x", "0"}), p), p).max_abs() > 0.5);
}

TEST_CASE("operator matches a finite-difference covariant derivative") {
  const auto g = h2r_metric();
  const auto lc = tensor::levi_civita(g);
  const auto xi = xi_plane();
  const auto x3 = field({"t*r + sin(a)", "r^2 - t", "cos(t)*a"});
  const auto x2 = field({"x*y + 0.2*x^3", "sin(x) + y^2"});
  for (const auto& p : tensor::sample_points(kH2R, 6, 3)) {
    CAPTURE(p[1]);
    CHECK(max_gap(nabla2_apply(lc, expression_field(kH2R, x3, p), p), fd_nabla2(lc, x3, p)) <= 1e-6);
  }
  for (const auto& p : tensor::sample_points(kPlane, 6, 3))
    CHECK(max_gap(nabla2_apply(xi, expression_field(kPlane, x2, p), p), fd_nabla2(xi, x2, p)) <= 1e-6);
}

TEST_CASE("flat plane and periodic torus give the affine fields at every degree") {
  for (const auto& chart : {kPlane, kTorus}) {
    const auto flat = ConnectionField::flat(chart);
    for (int d = 1; d <= 4; ++d) {
      CAPTURE(d);
      const auto s = solve_solution_space(flat, {.degree = d});
      CHECK(s.k() == 6);
      CHECK(s.candidates == 6);
      for (double r : s.residuals) CHECK(r <= 1e-6);
      CHECK((s.coeffs.transpose() * s.coeffs - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() <= 1e-12);
      // only constant and linear monomials appear
      CHECK(s.coeffs.bottomRows(s.basis.size() - 6).cwiseAbs().maxCoeff() <= 1e-9);
      CHECK(leaf_rank(s, {0.3, 0.4}) == 2);
    }
  }
  const auto scan = degree_scan(ConnectionField::flat(kPlane), 4);
  CHECK(scan.dims == std::vector<int>{6, 6, 6, 6});
  CHECK(scan.stable_from == 1);
  CHECK_FALSE(scan.degree_too_low);
}

TEST_CASE("periodic matching rows cut the torus down to constant fields") {
  const auto s = solve_solution_space(ConnectionField::flat(kTorus), {.degree = 3, .periodic_constraints = true});
  CHECK(s.k() == 2);
}

TEST_CASE("solution basis is deterministic and independent of seeds") {
  const auto xi = xi_plane();
  const auto a = solve_solution_space(xi, {.degree = 3, .seed = 0});
  const auto b = solve_solution_space(xi, {.degree = 3, .seed = 5});
  REQUIRE(a.k() == b.k());
  CHECK((a.coeffs - b.coeffs).cwiseAbs().maxCoeff() <= 1e-8);
  const auto c = solve_solution_space(xi, {.degree = 3, .seed = 0});
  CHECK(a.coeffs == c.coeffs);
}

TEST_CASE("xi connection on the plane") {
  const auto xi = xi_plane();
  const auto scan = degree_scan(xi, 4);
  CHECK(scan.dims == std::vector<int>{3, 3, 3, 3});
  CHECK(scan.stable_from == 1);

  const auto s = solve_solution_space(xi, {.degree = 3});
  REQUIRE(s.k() == 3);
  for (double r : s.residuals) CHECK(r <= 1e-6);
  // d/dy lies in the span: its coefficient vector projects onto itself
  Eigen::VectorXd dy = Eigen::VectorXd::Zero(s.basis.size());
  dy[1] = 1.0;
  CHECK((dy - s.coeffs * (s.coeffs.transpose() * dy)).norm() <= 1e-8);
  // so do d/dx and uy d/dy; x d/dx does not
  Eigen::VectorXd dx = Eigen::VectorXd::Zero(s.basis.size()), ydy = dx, xdx = dx;
  dx[0] = 1.0;
  ydy[2 * 2 + 1] = 1.0;
  xdx[1 * 2 + 0] = 1.0;
  CHECK((dx - s.coeffs * (s.coeffs.transpose() * dx)).norm() <= 1e-8);
  CHECK((ydy - s.coeffs * (s.coeffs.transpose() * ydy)).norm() <= 1e-8);
  CHECK((xdx - s.coeffs * (s.coeffs.transpose() * xdx)).norm() > 0.5);

  for (const auto& p : tensor::sample_points(kPlane, 5, 9)) CHECK(leaf_rank(s, p) == 2);
}

TEST_CASE("hyperbolic product chart has a stable solution space") {
  const auto lc = tensor::levi_civita(h2r_metric());
  const auto scan = degree_scan(lc, 4);
  CAPTURE(scan.dims[0]);
  CHECK(scan.dims.back() == scan.dims[scan.dims.size() - 2]);
  CHECK_FALSE(scan.degree_too_low);
  const auto s = solve_solution_space(lc, {.degree = 3});
  const auto refined = solve_solution_space(lc, {.degree = 3, .points = 2 * s.collocation_points, .seed = 11});
  CHECK(s.k() == refined.k());
  CHECK(s.k() == 2);
  for (double r : s.residuals) CHECK(r <= 1e-6);
  // d/dt is parallel, so it solves the system
  Eigen::VectorXd dt = Eigen::VectorXd::Zero(s.basis.size());
  dt[0] = 1.0;
  CHECK((dt - s.coeffs * (s.coeffs.transpose() * dt)).norm() <= 1e-8);
  CHECK(leaf_rank(s, {0.2, 1.0, 0.4}) == 1);
}

TEST_CASE("products of solutions close up") {
  const auto g = h2r_metric();
  const auto cases = std::vector<ConnectionField>{ConnectionField::flat(kPlane), ConnectionField::flat(kTorus),
                                                  xi_plane(), tensor::levi_civita(g)};
  for (const auto& c : cases) {
    const auto s = solve_solution_space(c, {.degree = 3});
    const auto r = product_closure_check(c, s);
    CAPTURE(c.name());
    CHECK(all_pass(r.table(1e-5)));
    CHECK(r.product <= 1e-8);
    CHECK(r.lie_bracket <= 1e-8);
  }

  // single field d/dy for the xi connection: d/dy . d/dy = Gamma(d/dy, d/dy) = 0
  const auto xi = xi_plane();
  PolyVectorBasis basis(kPlane, 1);
  Eigen::MatrixXd coeffs = Eigen::MatrixXd::Zero(basis.size(), 1);
  coeffs(1, 0) = 1.0;
  SolutionBasis one{basis, coeffs, {}, {}, 1, 0, 1.0, false};
  const auto r = product_closure_check(xi, one);
  CHECK(r.product <= 1e-12);
  CHECK(r.structure(0, 0) == doctest::Approx(0.0));
}

TEST_CASE("leaf rank of a singular foliation") {
  PolyVectorBasis basis(kPlane, 1);
  Eigen::MatrixXd coeffs = Eigen::MatrixXd::Zero(basis.size(), 1);
  coeffs(1 * 2 + 0, 0) = 1.0;  // x d/dx
  SolutionBasis s{basis, coeffs, {}, {}, 1, 0, 1.0, false};
  CHECK(leaf_rank(s, {0.5, 0.2}) == 1);
  CHECK(leaf_rank(s, {0.0, 0.2}) == 0);
  CHECK_THROWS_AS(trace_leaf(s, {0.0, 0.2}), DomainError);

  const auto flat = solve_solution_space(ConnectionField::flat(kPlane), {.degree = 2});
  SolutionBasis rotated = flat;
  Eigen::MatrixXd q = Eigen::MatrixXd::Random(6, 6).householderQr().householderQ();
  rotated.coeffs = flat.coeffs * q;
  for (const auto& p : tensor::sample_points(kPlane, 8, 1)) CHECK(leaf_rank(rotated, p) == leaf_rank(flat, p));
}

TEST_CASE("leaf traces") {
  const auto flat = solve_solution_space(ConnectionField::flat(kPlane), {.degree = 2});
  const auto leaf = trace_leaf(flat, {0.0, 0.0}, 4, 0.05);
  CHECK(leaf.rank_at_seed == 2);
  for (int r : leaf.ranks) CHECK(r == 2);
  double xs = 0.0, ys = 0.0;
  for (const auto& p : leaf.points) {
    CHECK(kPlane.contains(p));
    xs = std::max(xs, std::abs(p[0]));
    ys = std::max(ys, std::abs(p[1]));
  }
  CHECK(xs > 0.05);
  CHECK(ys > 0.05);

  // only d/dy: a vertical segment
  PolyVectorBasis basis(kPlane, 1);
  Eigen::MatrixXd coeffs = Eigen::MatrixXd::Zero(basis.size(), 1);
  coeffs(1, 0) = 1.0;
  SolutionBasis vertical{basis, coeffs, {}, {}, 1, 0, 1.0, false};
  const auto line = trace_leaf(vertical, {0.25, 0.0}, 10, 0.05);
  CHECK(line.points.size() == 21);
  CHECK_FALSE(line.exited);
  for (const auto& p : line.points) CHECK(p[0] == doctest::Approx(0.25).epsilon(1e-15));
  const auto cut = trace_leaf(vertical, {0.25, 0.9}, 10, 0.05);
  CHECK(cut.exited);
  for (const auto& p : cut.points) CHECK(kPlane.contains(p));

  // the torus wraps instead of exiting
  const auto torus = solve_solution_space(ConnectionField::flat(kTorus), {.degree = 1});
  const auto wrapped = trace_leaf(torus, {0.5, 0.95}, 6, 0.05);
  for (const auto& p : wrapped.points) CHECK(kTorus.contains(p));

  const auto xi = solve_solution_space(xi_plane(), {.degree = 3});
  const auto xl = trace_leaf(xi, {0.1, -0.2}, 6, 0.05);
  for (int r : xl.ranks) CHECK(r == xl.rank_at_seed);
}

TEST_CASE("leaves are Hessian") {
  const auto flat_s = solve_solution_space(ConnectionField::flat(kPlane), {.degree = 2});
  const auto flat_r = leaf_hessian_check(plane_metric(), ConnectionField::flat(kPlane), flat_s, {0.1, 0.2});
  CHECK(flat_r.rank == 2);
  CHECK(flat_r.curvature <= 1e-12);
  CHECK(flat_r.symmetry <= 1e-12);

  const auto xi = xi_plane();
  const auto xs = solve_solution_space(xi, {.degree = 3});
  const auto xr = leaf_hessian_check(plane_metric(), xi, xs, {0.0, 0.0});
  CHECK(xr.curvature <= 1e-5);
  CHECK(xr.symmetry <= 1e-6);

  // curved ambient space, one-dimensional leaves
  const auto g = h2r_metric();
  const auto lc = tensor::levi_civita(g);
  const auto hs = solve_solution_space(lc, {.degree = 2});
  const tensor::Point p{0.2, 1.0, 0.4};
  CHECK(tensor::curvature(lc, p).max_abs() > 0.1);
  const auto hr = leaf_hessian_check(g, lc, hs, p);
  CHECK(hr.rank == 1);
  CHECK(hr.curvature <= 1e-5);
  CHECK(hr.symmetry <= 1e-6);

  PolyVectorBasis basis(kPlane, 1);
  Eigen::MatrixXd coeffs = Eigen::MatrixXd::Zero(basis.size(), 1);
  coeffs(1 * 2 + 0, 0) = 1.0;
  SolutionBasis s{basis, coeffs, {}, {}, 1, 0, 1.0, false};
  CHECK_THROWS_AS(leaf_hessian_check(plane_metric(), ConnectionField::flat(kPlane), s, {0.0, 0.3}), DomainError);
}
