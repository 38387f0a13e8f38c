#include <cmath>
#include <numbers>

#include "doctest.h"
#include "igh/cone.hpp"
#include "igh/errors.hpp"

using namespace igh;
using namespace igh::cone;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Midpoint rule in (zeta, rho, phi) with rho = radius in the (xi, eta) plane.
double crude_char(const ConePoint& p, int n) {
  const double top = 40.0 / (p.z - std::hypot(p.x, p.y));
  const double hz = top / n;
  double total = 0.0;
  for (int a = 0; a < n; ++a) {
    const double zeta = (a + 0.5) * hz;
    const int nr = 60, nphi = 48;
    const double hr = zeta / nr, hphi = kTwoPi / nphi;
    for (int b = 0; b < nr; ++b) {
      const double rho = (b + 0.5) * hr;
      for (int c = 0; c < nphi; ++c) {
        const double phi = (c + 0.5) * hphi;
        total += hz * hr * hphi * rho * std::exp(-(p.x * rho * std::cos(phi) + p.y * rho * std::sin(phi) + p.z * zeta));
      }
    }
  }
  return total;
}

}  // namespace

TEST_CASE("cone points and the quadratic form") {
  CHECK(q_form(make_point(0, 0, 1)) == 1.0);
  CHECK(q_form(make_point(0.3, 0.4, 1)) == doctest::Approx(0.75).epsilon(1e-15));
  const ConePoint p{0.3, -0.2, 1.1};
  for (double l : {0.5, 2.0, 7.0}) CHECK(q_form({l * p.x, l * p.y, l * p.z}) == doctest::Approx(l * l * q_form(p)).epsilon(1e-14));
  CHECK_THROWS_AS(make_point(1, 0, 1), DomainError);
  CHECK_THROWS_AS(make_point(0, 0, -1), DomainError);
  CHECK_THROWS_AS(make_dual_point(0, 2, 1), DomainError);
}

TEST_CASE("characteristic function") {
  const auto c0 = char_numeric({0, 0, 1});
  CHECK(c0.converged);
  CHECK(rel(c0.value, kTwoPi) < 1e-3);
  CHECK(rel(char_numeric({0, 0, 2}).value, kTwoPi / 8) < 1e-3);
  CHECK(rel(char_numeric({0.3, 0.4, 1}).value, kTwoPi * std::pow(0.75, -1.5)) < 1e-3);
  CHECK(rel(crude_char({0.3, 0.4, 1}, 400), kTwoPi * std::pow(0.75, -1.5)) < 1e-3);

  CHECK(chi0_certificate().converged);
  CHECK(char_closed({0, 0, 1}) == chi0());
  for (const ConePoint& p : {ConePoint{0, 0, 1}, ConePoint{0, 0, 2}, ConePoint{0.3, 0.4, 1}, ConePoint{0.5, -0.6, 1.2}}) {
    CHECK(rel(char_closed(p), char_numeric(p).value) < 1e-3);
    for (double l : {0.5, 3.0}) {
      const ConePoint lp{l * p.x, l * p.y, l * p.z};
      CHECK(rel(char_closed(lp), char_closed(p) / (l * l * l)) < 1e-14);
      CHECK(rel(char_numeric(lp).value, char_numeric(p).value / (l * l * l)) < 1e-3);
    }
  }

  QuadratureSettings short_cut;
  short_cut.decay_lengths = 4.0;
  CHECK_FALSE(char_numeric({0, 0, 1}, short_cut).converged);
}

TEST_CASE("density") {
  CHECK(cone_density({0, 0, 1}, {0, 0, 1}) == doctest::Approx(std::exp(-1.0) / kTwoPi).epsilon(1e-6));
  for (const ConePoint& p : {ConePoint{0, 0, 1}, ConePoint{0.3, 0.4, 1}, ConePoint{0.1, 0.7, 0.9}}) {
    const auto mass = density_mass(p);
    CHECK(mass.converged);
    CHECK(std::abs(mass.value - 1.0) < 1e-3);
    const DualConePoint d{0.2, -0.3, 1.4};
    const double expanded = -(p.x * d.xi + p.y * d.eta + p.z * d.zeta) + 1.5 * std::log(q_form(p)) - std::log(chi0());
    CHECK(std::abs(log_density(p, d) - expanded) < 1e-10);
    CHECK(cone_density(p, d) > 0.0);
  }
}

TEST_CASE("Fisher metric of the cone") {
  CHECK((cone_fisher({0, 0, 1}) - 3.0 * Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((cone_fisher_explicit({0, 0, 1}) - 3.0 * Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((cone_fisher({0.3, 0.4, 1}) - cone_fisher_explicit({0.3, 0.4, 1})).cwiseAbs().maxCoeff() < 1e-10);

  // rotation about the z axis is an isometry of q
  const double a = 0.83;
  Eigen::Matrix3d rot;
  rot << std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a), 0, 0, 0, 1;
  const Eigen::Vector3d p(0.2, -0.35, 1.3), rp = rot * p;
  const Eigen::Matrix3d g = cone_fisher({p(0), p(1), p(2)}), rg = cone_fisher({rp(0), rp(1), rp(2)});
  CHECK((rot.transpose() * rg * rot - g).cwiseAbs().maxCoeff() < 1e-12);

  for (const ConePoint& q : {ConePoint{0, 0, 1}, ConePoint{0.3, 0.4, 1}, ConePoint{-0.5, 0.2, 0.8}}) {
    const Eigen::Matrix3d f = cone_fisher_from_family(q);
    const Eigen::Matrix3d h = cone_fisher(q);
    CHECK((f - h).cwiseAbs().maxCoeff() / h.cwiseAbs().maxCoeff() < 1e-3);
    CHECK((f - f.transpose()).cwiseAbs().maxCoeff() < 1e-10);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(f);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
  }
  CHECK_THROWS_AS(cone_fisher({1, 1, 1}), DomainError);
}

TEST_CASE("cylindrical coordinates") {
  for (double a : {0.0, 1.0, 4.0}) {
    const auto p = cylindrical_map(0, 0, a);
    CHECK(p.x == 0.0);
    CHECK(p.y == 0.0);
    CHECK(p.z == 1.0);
  }
  const auto rep = verify_isometry();
  CHECK(rep.points == 125);
  CHECK(rep.max_residual < 1e-6);
  CHECK(rep.translation_residual < 1e-6);
  CHECK(verify_isometry(3, -0.5, 0.5, 0.0, 1.0).max_residual < 1e-6);

  const std::vector<igh::expr::Expression> map{igh::expr::parse_expr("exp(t)*sinh(r)*cos(a)"),
                                               igh::expr::parse_expr("exp(t)*sinh(r)*sin(a)"),
                                               igh::expr::parse_expr("exp(t)*cosh(r)")};
  const igh::tensor::ChartSpec cyl{{"t", "r", "a"}, {{{-1.0, 1.0}}, {{0.5, 1.5}}, {{0.0, 6.0}}}, {}};
  const auto g = igh::tensor::pullback_metric(map, cone_metric_field(), cyl).value({0.0, 1.0, 0.0});
  CHECK(g(0, 0) == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(g(1, 1) == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(g(2, 2) == doctest::Approx(3.0 * std::sinh(1.0) * std::sinh(1.0)).epsilon(1e-10));
}

TEST_CASE("Koszul form of the cone") {
  const auto k0 = cone_koszul({0, 0, 1});
  CHECK(k0.beta(0) == 0.0);
  CHECK(k0.beta(1) == 0.0);
  CHECK(k0.beta(2) != 0.0);

  double lo = 1e9, hi = -1e9;
  for (const auto& c : igh::tensor::sample_points(cone_metric_field().chart(), 20, 4)) {
    const ConePoint p{c[0], c[1], c[2]};
    const auto k = cone_koszul(p);
    const double q = q_form(p);
    // det g = 27 / q^3, so beta = -(3/2) d log q
    CHECK(k.beta(0) == doctest::Approx(3.0 * p.x / q).epsilon(1e-10));
    CHECK(k.beta(1) == doctest::Approx(3.0 * p.y / q).epsilon(1e-10));
    CHECK(k.beta(2) == doctest::Approx(-3.0 * p.z / q).epsilon(1e-10));
    CHECK(k.route_gap < 1e-8);
    CHECK(k.parallel < 1e-5);
    lo = std::min(lo, k.norm);
    hi = std::max(hi, k.norm);
  }
  CHECK(hi - lo < 1e-6);
}

TEST_CASE("full cone verification passes") {
  const auto r = verify();
  CHECK(r.truncation_converged);
  for (const auto& c : r.table()) {
    CAPTURE(c.name);
    CHECK(c.pass());
  }
  CHECK(r.hessian.hessian);
  CHECK(r.hessian.agree);
}
