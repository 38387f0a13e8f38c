#include <algorithm>
#include <cmath>

#include "igh/errors.hpp"
#include "igh/foliation.hpp"

namespace igh::foliation {

namespace {

// (nabla_U V)^l = U^i (d_i V^l + Gamma^l_ik V^k)
Eigen::VectorXd covariant(const tensor::ConnectionSample& c, const FieldJet& u, const FieldJet& v) {
  const int n = static_cast<int>(u.value.size());
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  for (int l = 0; l < n; ++l)
    for (int i = 0; i < n; ++i) {
      double s = v.d(l, i);
      for (int k = 0; k < n; ++k) s += c.gamma(l, i, k) * v.value[k];
      w[l] += u.value[i] * s;
    }
  return w;
}

double rms(const Eigen::VectorXd& v) { return v.size() ? v.norm() / std::sqrt(double(v.size())) : 0.0; }

double relative(const Eigen::VectorXd& rem, const Eigen::VectorXd& w) { return rms(rem) / std::max(rms(w), 1.0); }

}  // namespace

CheckTable ClosureReport::table(double tol) const {
  return {{"product closure", product, tol},
          {"bracket closure", bracket, tol},
          {"product bracket vs Lie bracket", lie_bracket, tol},
          {"associativity", associativity, tol}};
}

ClosureReport product_closure_check(const tensor::ConnectionField& gamma, const SolutionBasis& s,
                                    unsigned seed) {
  ClosureReport r;
  const int n = s.basis.dim(), k = s.k();
  r.structure = Eigen::MatrixXd::Zero(k, k * k);
  if (k == 0) return r;
  const auto pts = tensor::sample_points(s.basis.chart(), std::max(16, 2 * k), seed);
  const Eigen::Index rows = static_cast<Eigen::Index>(pts.size()) * n;

  Eigen::MatrixXd phi(rows, k);
  std::vector<std::vector<FieldJet>> jets(pts.size());
  std::vector<tensor::ConnectionSample> conn;
  for (std::size_t p = 0; p < pts.size(); ++p) {
    conn.push_back(gamma.eval(pts[p], 0));
    for (int a = 0; a < k; ++a) {
      jets[p].push_back(s.field(a, pts[p]));
      phi.block(static_cast<Eigen::Index>(p) * n, a, n, 1) = jets[p][a].value;
    }
  }
  const auto qr = phi.colPivHouseholderQr();

  auto product = [&](int a, int b) {
    Eigen::VectorXd w(rows);
    for (std::size_t p = 0; p < pts.size(); ++p)
      w.segment(static_cast<Eigen::Index>(p) * n, n) = covariant(conn[p], jets[p][a], jets[p][b]);
    return w;
  };
  std::vector<Eigen::VectorXd> prods(static_cast<std::size_t>(k) * k);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) {
      Eigen::VectorXd w = product(a, b);
      Eigen::VectorXd c = qr.solve(w);
      r.structure.col(a * k + b) = c;
      r.product = std::max(r.product, relative(w - phi * c, w));
      prods[a * k + b] = std::move(w);
    }
  for (int a = 0; a < k; ++a)
    for (int b = a + 1; b < k; ++b) {
      Eigen::VectorXd br = prods[a * k + b] - prods[b * k + a];
      r.bracket = std::max(r.bracket, relative(br - phi * qr.solve(br), br));
      Eigen::VectorXd lie(rows);
      for (std::size_t p = 0; p < pts.size(); ++p) {
        const auto& u = jets[p][a];
        const auto& v = jets[p][b];
        lie.segment(static_cast<Eigen::Index>(p) * n, n) = v.d * u.value - u.d * v.value;
      }
      r.lie_bracket = std::max(r.lie_bracket, relative(br - lie, br));
    }
  // a.(b.c) - (a.b).c in structure constants
  double scale = std::max(1.0, r.structure.cwiseAbs().maxCoeff());
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b)
      for (int c = 0; c < k; ++c) {
        Eigen::VectorXd left = Eigen::VectorXd::Zero(k), right = Eigen::VectorXd::Zero(k);
        for (int e = 0; e < k; ++e) {
          left += r.structure(e, b * k + c) * r.structure.col(a * k + e);
          right += r.structure(e, a * k + b) * r.structure.col(e * k + c);
        }
        r.associativity = std::max(r.associativity, (left - right).cwiseAbs().maxCoeff() / (scale * scale));
      }
  return r;
}

int leaf_rank(const SolutionBasis& s, const Point& p) {
  if (s.k() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(s.values(p));
  const auto sv = svd.singularValues();
  if (!(sv[0] > 0.0)) return 0;
  int r = 0;
  while (r < sv.size() && sv[r] > 1e-8 * sv[0]) ++r;
  return r;
}

namespace {

Eigen::VectorXd field_value(const SolutionBasis& s, int a, const Eigen::VectorXd& x) {
  Point p(x.data(), x.data() + x.size());
  return s.values(p).col(a);
}

// One RK4 flow of basis field a; returns false when the path leaves the box.
bool flow(const SolutionBasis& s, int a, double h, int steps, Point& p, std::vector<Point>& trail) {
  const auto& chart = s.basis.chart();
  for (int i = 0; i < steps; ++i) {
    Eigen::Map<const Eigen::VectorXd> x(p.data(), static_cast<Eigen::Index>(p.size()));
    const Eigen::VectorXd k1 = field_value(s, a, x);
    const Eigen::VectorXd k2 = field_value(s, a, x + 0.5 * h * k1);
    const Eigen::VectorXd k3 = field_value(s, a, x + 0.5 * h * k2);
    const Eigen::VectorXd k4 = field_value(s, a, x + h * k3);
    const Eigen::VectorXd next = x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    Point q = chart.wrap(Point(next.data(), next.data() + next.size()));
    if (!chart.contains(q)) return false;
    p = std::move(q);
    trail.push_back(p);
  }
  return true;
}

}  // namespace

LeafSample trace_leaf(const SolutionBasis& s, const Point& seed, int steps, double h) {
  const auto& chart = s.basis.chart();
  if (!chart.contains(seed)) throw DomainError("leaf seed lies outside the chart");
  LeafSample out;
  out.seed = seed;
  out.rank_at_seed = leaf_rank(s, seed);
  if (out.rank_at_seed == 0) throw DomainError("no leaf passes through the seed: every solution vanishes there");

  out.points.push_back(seed);
  const int k = s.k();
  for (int a = 0; a < k; ++a)
    for (double sign : {1.0, -1.0}) {
      Point p = seed;
      if (!flow(s, a, sign * h, steps, p, out.points)) out.exited = true;
    }
  const int half = std::max(1, steps / 2);
  for (int a = 0; a < k; ++a)
    for (int b = a + 1; b < k; ++b)
      for (double sa : {1.0, -1.0})
        for (double sb : {1.0, -1.0}) {
          Point p = seed;
          std::vector<Point> scratch;
          if (!flow(s, a, sa * h, half, p, scratch) || !flow(s, b, sb * h, half, p, out.points)) out.exited = true;
        }
  for (const auto& p : out.points) {
    out.ranks.push_back(leaf_rank(s, p));
    out.max_rank = std::max(out.max_rank, out.ranks.back());
  }
  return out;
}

LeafHessianResidual leaf_hessian_check(const tensor::MetricField& g, const tensor::ConnectionField& gamma,
                                       const SolutionBasis& s, const Point& p) {
  LeafHessianResidual out;
  out.rank = leaf_rank(s, p);
  if (out.rank == 0) throw DomainError("no leaf passes through the point: every solution vanishes there");
  const int n = s.basis.dim(), r = out.rank;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(s.values(p), Eigen::ComputeThinU);
  const Eigen::MatrixXd e = svd.matrixU().leftCols(r);

  const auto gs = g.eval(p, 1);
  const auto cs = gamma.eval(p, 1);
  const auto curv = tensor::curvature(cs);
  const Eigen::MatrixXd proj = e * (e.transpose() * gs.g * e).inverse() * e.transpose() * gs.g;

  // c(k, i, j) = (nabla_k g)(d_i, d_j)
  tensor::Tensor3 c(n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double v = gs.dg(k, i, j);
        for (int l = 0; l < n; ++l) v -= cs.gamma(l, k, i) * gs.g(l, j) + cs.gamma(l, k, j) * gs.g(i, l);
        c(k, i, j) = v;
      }

  for (int a = 0; a < r; ++a)
    for (int b = 0; b < r; ++b)
      for (int cc = 0; cc < r; ++cc) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
        double ca = 0.0, cb = 0.0;
        for (int l = 0; l < n; ++l)
          for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
              for (int j = 0; j < n; ++j) {
                const double w = e(i, a) * e(j, b) * e(k, cc);
                v[l] += curv(l, k, i, j) * w;
                if (l == 0) {
                  ca += c(i, j, k) * w;  // (nabla_a g)(b, c)
                  cb += c(j, i, k) * w;  // (nabla_b g)(a, c)
                }
              }
        out.curvature = std::max(out.curvature, (proj * v).cwiseAbs().maxCoeff());
        out.symmetry = std::max(out.symmetry, std::abs(ca - cb));
      }
  return out;
}

}  // namespace igh::foliation
