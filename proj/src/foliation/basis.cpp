#include <algorithm>
#include <sstream>

#include "igh/errors.hpp"
#include "igh/foliation.hpp"

namespace igh::foliation {

namespace {

void exponents(int n, int total, int slot, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (slot == n - 1) {
    cur[slot] = total;
    out.push_back(cur);
    return;
  }
  for (int e = total; e >= 0; --e) {
    cur[slot] = e;
    exponents(n, total - e, slot + 1, cur, out);
  }
}

double ipow(double x, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

}  // namespace

PolyVectorBasis::PolyVectorBasis(tensor::ChartSpec chart, int degree) : chart_(std::move(chart)), degree_(degree) {
  chart_.validate();
  if (degree < 0) throw SpecError("polynomial degree must be non-negative");
  const int n = chart_.dim();
  std::vector<int> cur(n, 0);
  for (int t = 0; t <= degree; ++t) exponents(n, t, 0, cur, monomials_);
  for (int i = 0; i < n; ++i) {
    center_.push_back(0.5 * (chart_.box[i][0] + chart_.box[i][1]));
    half_.push_back(0.5 * (chart_.box[i][1] - chart_.box[i][0]));
  }
}

std::string PolyVectorBasis::label(int b) const {
  const int n = dim();
  const auto& e = monomials_[b / n];
  std::ostringstream os;
  bool any = false;
  for (int i = 0; i < n; ++i) {
    if (e[i] == 0) continue;
    if (any) os << '*';
    os << 'u' << chart_.names[i];
    if (e[i] > 1) os << '^' << e[i];
    any = true;
  }
  if (any) os << ' ';
  os << "d/d" << chart_.names[b % n];
  return os.str();
}

PolyVectorBasis::MonomialJet PolyVectorBasis::monomial_jet(const Point& p) const {
  const int n = dim();
  const int m = static_cast<int>(monomials_.size());
  std::vector<double> u(n);
  for (int i = 0; i < n; ++i) u[i] = (p[i] - center_[i]) / half_[i];

  MonomialJet j;
  j.v.assign(m, 0.0);
  j.d1.assign(m, std::vector<double>(n, 0.0));
  j.d2.assign(m, std::vector<std::vector<double>>(n, std::vector<double>(n, 0.0)));
  // f(e) with each exponent lowered by the requested derivative counts
  auto term = [&](const std::vector<int>& e, int a, int b) {
    double coef = 1.0, prod = 1.0;
    for (int i = 0; i < n; ++i) {
      const int k = (i == a) + (i == b);
      if (e[i] < k) return 0.0;
      for (int q = 0; q < k; ++q) coef *= (e[i] - q);
      prod *= ipow(u[i], e[i] - k);
    }
    return coef * prod;
  };
  for (int q = 0; q < m; ++q) {
    const auto& e = monomials_[q];
    j.v[q] = term(e, -1, -1);
    for (int a = 0; a < n; ++a) {
      j.d1[q][a] = term(e, a, -1) / half_[a];
      for (int b = a; b < n; ++b) {
        const double v = term(e, a, b) / (half_[a] * half_[b]);
        j.d2[q][a][b] = v;
        j.d2[q][b][a] = v;
      }
    }
  }
  return j;
}

FieldJet PolyVectorBasis::field(const Eigen::VectorXd& coeffs, const Point& p) const {
  const int n = dim();
  if (coeffs.size() != size()) throw SpecError("coefficient vector does not match the basis");
  const auto mj = monomial_jet(p);
  FieldJet f{Eigen::VectorXd::Zero(n), Eigen::MatrixXd::Zero(n, n), tensor::Tensor3(n)};
  for (int b = 0; b < size(); ++b) {
    const double c = coeffs[b];
    if (c == 0.0) continue;
    const int q = b / n, l = b % n;
    f.value[l] += c * mj.v[q];
    for (int i = 0; i < n; ++i) {
      f.d(l, i) += c * mj.d1[q][i];
      for (int k = 0; k < n; ++k) f.dd(l, i, k) += c * mj.d2[q][i][k];
    }
  }
  return f;
}

FieldJet expression_field(const tensor::ChartSpec& chart, const std::vector<expr::Expression>& x,
                          const Point& p) {
  const int n = chart.dim();
  if (static_cast<int>(x.size()) != n) throw SpecError("vector field needs one component per coordinate");
  FieldJet f{Eigen::VectorXd::Zero(n), Eigen::MatrixXd::Zero(n, n), tensor::Tensor3(n)};
  for (int l = 0; l < n; ++l) {
    const auto jet = expr::eval_jet(x[l], chart.bind(p), 2);
    f.value[l] = jet.value();
    for (int i = 0; i < n; ++i) {
      f.d(l, i) = jet.d(i);
      for (int k = 0; k < n; ++k) f.dd(l, i, k) = jet.d(i, k);
    }
  }
  return f;
}

tensor::Tensor3 nabla2_apply(const tensor::ConnectionSample& c, const FieldJet& x) {
  const int n = c.gamma.dim();
  if (c.order < 1) throw SpecError("second covariant derivative needs connection derivatives");
  tensor::Tensor3 th(n);
  for (int l = 0; l < n; ++l)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = x.dd(l, i, j);
        for (int k = 0; k < n; ++k) {
          s += c.gamma(l, j, k) * x.d(k, i) + c.gamma(l, i, k) * x.d(k, j) - c.gamma(k, i, j) * x.d(l, k);
          double a = c.dgamma(i, l, j, k);
          for (int m = 0; m < n; ++m) a += c.gamma(l, i, m) * c.gamma(m, j, k) - c.gamma(m, i, j) * c.gamma(l, m, k);
          s += a * x.value[k];
        }
        th(l, i, j) = s;
      }
  return th;
}

tensor::Tensor3 nabla2_apply(const tensor::ConnectionField& gamma, const FieldJet& x, const Point& p) {
  return nabla2_apply(gamma.eval(p, 1), x);
}

Eigen::MatrixXd SolutionBasis::values(const Point& p) const {
  const int n = basis.dim();
  const auto mj = basis.monomial_jet(p);
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(n, k());
  for (int s = 0; s < k(); ++s)
    for (int b = 0; b < basis.size(); ++b) v(b % n, s) += coeffs(b, s) * mj.v[b / n];
  return v;
}

}  // namespace igh::foliation
