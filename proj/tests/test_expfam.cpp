#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "igh/errors.hpp"
#include "igh/expfam.hpp"
#include "igh/simd.hpp"

using namespace igh;
using namespace igh::expfam;
using expr::parse_expr;
using tensor::ChartSpec;
using tensor::Point;

namespace {

const ChartSpec kThetaBox{{"t1", "t2"}, {{{-2.0, 2.0}}, {{-1.0, -0.25}}}, {}};
const ChartSpec kBernoulliBox{{"t"}, {{{-3.0, 3.0}}}, {}};

SampleSpace gauss_grid() { return SampleSpace::gauss_legendre("x", -15.0, 15.0, 40, 10); }

ExponentialFamily gaussian() { return ExponentialFamily({gauss_grid(), parse_expr("0"), {parse_expr("x"), parse_expr("x^2")}, kThetaBox}); }
ExponentialFamily bernoulli() {
  return ExponentialFamily({SampleSpace::discrete("x", {0.0, 1.0}), parse_expr("0"), {parse_expr("x")}, kBernoulliBox});
}

double gauss_psi(double a, double b) { return -a * a / (4 * b) + 0.5 * std::log(-std::numbers::pi / b); }

StatisticalModel gaussian_explicit() {
  return StatisticalModel({gauss_grid(), kThetaBox, parse_expr("t1*x + t2*x^2 + t1^2/(4*t2) - 0.5*log(-pi/t2)")});
}

StatisticalModel gaussian_mean_sd() {
  const ChartSpec c{{"mu", "s"}, {{{-1.0, 1.0}}, {{0.7, 1.4}}}, {}};
  return StatisticalModel({gauss_grid(), c, parse_expr("-(x - mu)^2/(2*s^2) - log(s) - 0.5*log(2*pi)")});
}

std::vector<Point> interior(const ChartSpec& c) { return tensor::sample_points(c, 12, 3); }

double max_gap(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return (a - b).cwiseAbs().maxCoeff(); }
double max_gap(const tensor::Tensor3& a, const tensor::Tensor3& b) {
  double w = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) w = std::max(w, std::abs(a.data()[i] - b.data()[i]));
  return w;
}

// Lowered Levi-Civita symbols from central differences of a metric function.
template <class F>
tensor::Tensor3 fd_levi_civita(F metric, const Point& p, tensor::Tensor3* dg_out = nullptr) {
  const int n = static_cast<int>(p.size());
  const double h = 1e-4;
  tensor::Tensor3 dg(n), out(n);
  for (int m = 0; m < n; ++m) {
    Point a = p, b = p;
    a[m] += h;
    b[m] -= h;
    const Eigen::MatrixXd d = (metric(a) - metric(b)) / (2 * h);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) dg(m, i, j) = d(i, j);
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) out(i, j, k) = 0.5 * (dg(i, j, k) + dg(j, i, k) - dg(k, i, j));
  if (dg_out) *dg_out = dg;
  return out;
}

}  // namespace

TEST_CASE("Gauss-Legendre rules are exact for low-degree polynomials") {
  for (int n = 1; n <= 24; ++n) {
    CAPTURE(n);
    const auto [x, w] = gauss_legendre_rule(n);
    for (int k = 0; k < 2 * n; ++k) {
      double q = 0.0;
      for (int i = 0; i < n; ++i) q += w[i] * std::pow(x[i], k);
      const double exact = k % 2 == 1 ? 0.0 : 2.0 / (k + 1);
      CHECK(q == doctest::Approx(exact).epsilon(1e-13).scale(1.0));
    }
    for (int i = 1; i < n; ++i) CHECK(x[i] > x[i - 1]);
  }
  const auto s = gauss_grid();
  double total = 0.0;
  for (double w : s.weights) total += w;
  CHECK(total == doctest::Approx(30.0).epsilon(1e-13));
}

TEST_CASE("sample space validation") {
  SampleSpace s = SampleSpace::discrete("x", {0.0, 1.0});
  s.weights[0] = 0.0;
  CHECK_THROWS_AS(s.validate(), SpecError);
  CHECK_THROWS_AS(SampleSpace::discrete("x", {0.0, 0.0}).validate(), SpecError);
  CHECK_THROWS_AS(SampleSpace::discrete("x", {}).validate(), SpecError);
  CHECK_NOTHROW(gauss_grid().validate());
}

TEST_CASE("log-partition") {
  const auto b = bernoulli();
  CHECK(b.log_partition({0.0}) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  for (double t : {-2.5, -1.0, 0.3, 2.9}) CHECK(b.log_partition({t}) == doctest::Approx(std::log1p(std::exp(t))).epsilon(1e-14));

  const auto g = gaussian();
  CHECK(std::abs(g.log_partition({0.0, -0.5}) - 0.5 * std::log(2 * std::numbers::pi)) < 1e-4);
  for (const auto& p : interior(kThetaBox)) CHECK(std::abs(g.log_partition(p) - gauss_psi(p[0], p[1])) < 1e-10);

  const ExponentialFamily shifted({gauss_grid(), parse_expr("2.75"), {parse_expr("x"), parse_expr("x^2")}, kThetaBox});
  for (const auto& p : interior(kThetaBox)) CHECK(shifted.log_partition(p) - g.log_partition(p) == doctest::Approx(2.75).epsilon(1e-14));

  CHECK_THROWS_AS(g.log_partition({0.0, 0.5}), DomainError);
  CHECK_THROWS_AS(g.log_partition({0.0}), DomainError);
}

TEST_CASE("large exponents stay finite through the max shift") {
  const ChartSpec box{{"t"}, {{{-60.0, 60.0}}}, {}};
  const ExponentialFamily f({SampleSpace::discrete("x", {-20.0, 0.0, 20.0}), parse_expr("0"), {parse_expr("x")}, box});
  // theta.F reaches 1200 here
  CHECK(f.log_partition({60.0}) == doctest::Approx(1200.0 + std::log1p(std::exp(-1200.0) + std::exp(-2400.0))));
  const auto j = f.psi_jet({60.0});
  CHECK(std::isfinite(j.fisher(0, 0)));
}

TEST_CASE("Fisher metric and cubic form from psi") {
  const auto g = gaussian();
  const Eigen::MatrixXd f = g.fisher_from_psi({0.0, -0.5});
  CHECK(f(0, 0) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(f(1, 1) == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(std::abs(f(0, 1)) < 1e-10);
  CHECK(std::abs(g.cubic_from_psi({0.0, -0.5})(0, 0, 0)) < 1e-10);

  const auto b = bernoulli();
  CHECK(b.fisher_from_psi({0.0})(0, 0) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(std::abs(b.cubic_from_psi({0.0})(0, 0, 0)) < 1e-15);

  const double h = 1e-4;
  for (const auto& p : interior(kThetaBox)) {
    const auto jet = g.psi_jet(p);
    for (int i = 0; i < 2; ++i) {
      Point a = p, c = p;
      a[i] += h;
      c[i] -= h;
      const double fd_mean = (g.log_partition(a) - g.log_partition(c)) / (2 * h);
      CHECK(jet.mean(i) == doctest::Approx(fd_mean).epsilon(1e-7));
      const Eigen::MatrixXd fd = (g.fisher_from_psi(a) - g.fisher_from_psi(c)) / (2 * h);
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) CHECK(std::abs(jet.cubic(i, j, k) - fd(j, k)) < 1e-6 * std::max(1.0, std::abs(fd(j, k))));
    }
    CHECK((jet.fisher - jet.fisher.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(tensor::symmetry_residual(jet.cubic) == 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jet.fisher);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
  }
}

TEST_CASE("psi route and expectation route agree") {
  const auto g = gaussian();
  const StatisticalModel auto_model(g.as_model());
  const auto explicit_model = gaussian_explicit();
  for (const auto& p : interior(kThetaBox)) {
    const auto jet = g.psi_jet(p);
    CHECK(max_gap(jet.fisher, auto_model.fisher(p)) < 1e-6);
    CHECK(max_gap(jet.fisher, explicit_model.fisher(p)) < 1e-6);
    CHECK(max_gap(jet.cubic, auto_model.cubic(p)) < 1e-5);
    CHECK(max_gap(jet.cubic, explicit_model.cubic(p)) < 1e-5);
    CHECK(tensor::symmetry_residual(explicit_model.cubic(p)) <= 1e-10);
  }

  const auto b = bernoulli();
  const StatisticalModel bm({SampleSpace::discrete("x", {0.0, 1.0}), kBernoulliBox, parse_expr("t*x - log(1 + exp(t))")});
  for (double t : {-2.0, 0.0, 0.7, 2.5}) {
    CHECK(max_gap(b.fisher_from_psi({t}), bm.fisher({t})) < 1e-12);
    CHECK(max_gap(b.cubic_from_psi({t}), bm.cubic({t})) < 1e-12);
  }
  CHECK(bm.fisher({0.0})(0, 0) == doctest::Approx(0.25));
}

TEST_CASE("normalization is enforced") {
  const StatisticalModel raw({SampleSpace::discrete("x", {0.0, 1.0}), kBernoulliBox, parse_expr("t*x")});
  CHECK_THROWS_AS(raw.fisher({0.5}), NumericError);
  const StatisticalModel fixed({SampleSpace::discrete("x", {0.0, 1.0}), kBernoulliBox, parse_expr("t*x"), true});
  const auto mp = fixed.at({0.5});
  CHECK(mp.auto_normalized);
  CHECK(mp.total_mass == doctest::Approx(1.0 + std::exp(0.5)));
  CHECK(fixed.fisher({0.5})(0, 0) == doctest::Approx(bernoulli().fisher_from_psi({0.5})(0, 0)).epsilon(1e-12));
}

TEST_CASE("Fisher metric of the Gaussian in mean and standard deviation") {
  const auto m = gaussian_mean_sd();
  for (const auto& p : interior(m.spec().params)) {
    const auto f = m.fisher(p);
    const double s2 = p[1] * p[1];
    CHECK(std::abs(f(0, 0) - 1.0 / s2) < 1e-5);
    CHECK(std::abs(f(1, 1) - 2.0 / s2) < 1e-5);
    CHECK(std::abs(f(0, 1)) < 1e-5);
  }
  const ChartSpec one{{"t"}, {{{0.0, 1.0}}}, {}};
  const StatisticalModel single({SampleSpace::discrete("x", {3.0}), one, parse_expr("0*t")});
  CHECK(single.fisher({0.4}).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("Fisher metric transforms by congruence under linear reparametrization") {
  const auto g = gaussian();
  const Eigen::Matrix2d a{{1.0, 0.5}, {0.0, 0.5}};
  const ChartSpec u{{"u1", "u2"}, {{{-0.5, 0.5}}, {{-1.5, -1.0}}}, {}};
  std::map<std::string, expr::Expression> sub{{"t1", parse_expr("u1 + 0.5*u2")}, {"t2", parse_expr("0.5*u2")}};
  const auto base = g.as_model();
  const StatisticalModel moved({base.sample, u, expr::substitute(base.log_density, sub), true});
  for (const auto& p : interior(u)) {
    const Eigen::Vector2d th = a * Eigen::Vector2d(p[0], p[1]);
    const Eigen::MatrixXd want = a.transpose() * g.fisher_from_psi({th(0), th(1)}) * a;
    CHECK(max_gap(moved.fisher(p), want) < 1e-6);
  }
}

TEST_CASE("alpha-connections from expectations") {
  const auto g = gaussian();
  const StatisticalModel nat(g.as_model());
  for (const auto& p : interior(kThetaBox)) CHECK(nat.alpha_christoffel(p, 1.0).max_abs() < 1e-6);

  const auto m = gaussian_mean_sd();
  auto fisher = [&](const Point& p) { return m.fisher(p); };
  for (const auto& p : tensor::sample_points(m.spec().params, 8, 9)) {
    tensor::Tensor3 dg;
    const auto lc = fd_levi_civita(fisher, p, &dg);
    CHECK(max_gap(m.alpha_christoffel(p, 0.0), lc) < 1e-6);
    const auto t = m.cubic(p);
    for (double alpha : {-1.0, 0.5, 1.0}) {
      const auto ga = m.alpha_christoffel(p, alpha);
      const auto gm = m.alpha_christoffel(p, -alpha);
      const auto gg = m.alpha_christoffel(p, 0.2);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          for (int k = 0; k < 2; ++k) {
            CHECK(std::abs(ga(i, j, k) - gg(i, j, k) - 0.5 * (0.2 - alpha) * t(i, j, k)) < 1e-6);
            CHECK(std::abs(ga(k, i, j) + gm(k, j, i) - dg(k, i, j)) < 1e-6);
            CHECK(std::abs(ga(i, j, k) - ga(j, i, k)) < 1e-10);
          }
    }
  }
}

TEST_CASE("Gaussian natural parameter map") {
  const auto a = gaussian_natural_map(0.0, 1.0);
  CHECK(a[0] == 0.0);
  CHECK(a[1] == -0.5);
  const auto b = gaussian_natural_map(2.0, 1.0);
  CHECK(b[0] == 2.0);
  CHECK(b[1] == -0.5);
  CHECK_THROWS_AS(gaussian_natural_map(0.0, 0.0), DomainError);
  CHECK_THROWS_AS(gaussian_natural_inverse({1.0, 0.0}), DomainError);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> mu(-10, 10), sd(0.01, 20);
  for (int i = 0; i < 1000; ++i) {
    const double m = mu(rng), s = sd(rng);
    const auto [m2, s2] = gaussian_natural_inverse(gaussian_natural_map(m, s));
    CHECK(std::abs(m2 - m) <= 1e-12 * std::max(1.0, std::abs(m)));
    CHECK(std::abs(s2 - s) <= 1e-12 * s);
  }
}

TEST_CASE("results do not depend on the SIMD backend") {
  const auto g = gaussian();
  const auto original = simd::active_backend();
  for (const auto& p : interior(kThetaBox)) {
    simd::set_backend(simd::Backend::Scalar);
    const auto ref = g.psi_jet(p);
    for (auto b : simd::available_backends()) {
      simd::set_backend(b);
      const auto j = g.psi_jet(p);
      CHECK(std::abs(j.psi - ref.psi) < 1e-13);
      CHECK(max_gap(j.fisher, ref.fisher) < 1e-12);
      CHECK(max_gap(j.cubic, ref.cubic) < 1e-12);
    }
  }
  simd::set_backend(original);
}
