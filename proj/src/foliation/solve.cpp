#include <algorithm>
#include <cmath>

#include "igh/errors.hpp"
#include "igh/foliation.hpp"

namespace igh::foliation {

namespace {

// Rows theta^l_ij(p) for every basis field, n^3 rows per point.
Eigen::MatrixXd collocation(const tensor::ConnectionField& gamma, const PolyVectorBasis& basis,
                            const std::vector<Point>& points) {
  const int n = basis.dim();
  const int rows_per = n * n * n;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(points.size()) * rows_per, basis.size());
  for (std::size_t pi = 0; pi < points.size(); ++pi) {
    const auto c = gamma.eval(points[pi], 1);
    const auto mj = basis.monomial_jet(points[pi]);
    tensor::Tensor4 zero_order(n);  // (l, i, j, k) coefficient of X^k
    for (int l = 0; l < n; ++l)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k) {
            double s = c.dgamma(i, l, j, k);
            for (int m = 0; m < n; ++m) s += c.gamma(l, i, m) * c.gamma(m, j, k) - c.gamma(m, i, j) * c.gamma(l, m, k);
            zero_order(l, i, j, k) = s;
          }
    const Eigen::Index base = static_cast<Eigen::Index>(pi) * rows_per;
    for (int b = 0; b < basis.size(); ++b) {
      const int q = b / n, comp = b % n;
      const double phi = mj.v[q];
      const auto& d1 = mj.d1[q];
      const auto& d2 = mj.d2[q];
      for (int l = 0; l < n; ++l)
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            double s = c.gamma(l, j, comp) * d1[i] + c.gamma(l, i, comp) * d1[j] + zero_order(l, i, j, comp) * phi;
            if (l == comp) {
              s += d2[i][j];
              for (int k = 0; k < n; ++k) s -= c.gamma(k, i, j) * d1[k];
            }
            a(base + (l * n + i) * n + j, b) = s;
          }
    }
  }
  return a;
}

// Rows matching the field and its first derivatives across each pair of periodic faces.
Eigen::MatrixXd periodic_rows(const PolyVectorBasis& basis, unsigned seed) {
  const auto& chart = basis.chart();
  const int n = basis.dim();
  std::vector<Eigen::RowVectorXd> rows;
  const auto face_points = tensor::sample_points(chart, 8 * std::max(1, basis.degree() + 1), seed);
  for (int axis = 0; axis < n; ++axis) {
    if (!chart.is_periodic(axis)) continue;
    for (Point lo : face_points) {
      Point hi = lo;
      lo[axis] = chart.box[axis][0];
      hi[axis] = chart.box[axis][1];
      const auto a = basis.monomial_jet(lo);
      const auto b = basis.monomial_jet(hi);
      for (int l = 0; l < n; ++l) {
        for (int der = -1; der < n; ++der) {
          Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(basis.size());
          for (int q = 0; q < static_cast<int>(basis.monomials().size()); ++q)
            r[q * n + l] = der < 0 ? a.v[q] - b.v[q] : a.d1[q][der] - b.d1[q][der];
          rows.push_back(r);
        }
      }
    }
  }
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), basis.size());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = rows[i];
  return out;
}

// Row-reduce the span (column order) and orthonormalize in pivot order, so the
// result depends only on the subspace.
Eigen::MatrixXd canonical(const Eigen::MatrixXd& span) {
  const Eigen::Index k = span.cols(), b = span.rows();
  if (k == 0) return span;
  Eigen::MatrixXd m = span.transpose();
  Eigen::Index row = 0;
  for (Eigen::Index col = 0; col < b && row < k; ++col) {
    Eigen::Index best = row;
    for (Eigen::Index r = row; r < k; ++r)
      if (std::abs(m(r, col)) > std::abs(m(best, col))) best = r;
    if (std::abs(m(best, col)) <= 1e-8) continue;
    m.row(row).swap(m.row(best));
    m.row(row) /= m(row, col);
    for (Eigen::Index r = 0; r < k; ++r)
      if (r != row) m.row(r) -= m(r, col) * m.row(row);
    ++row;
  }
  Eigen::MatrixXd q = m.transpose();
  for (Eigen::Index c = 0; c < k; ++c) {
    for (Eigen::Index p = 0; p < c; ++p) q.col(c) -= q.col(p).dot(q.col(c)) * q.col(p);
    q.col(c).normalize();
    // sign: first significant entry positive
    for (Eigen::Index r = 0; r < b; ++r)
      if (std::abs(q(r, c)) > 1e-8) {
        if (q(r, c) < 0) q.col(c) = -q.col(c);
        break;
      }
  }
  return q;
}

}  // namespace

SolutionBasis solve_solution_space(const tensor::ConnectionField& gamma, const SolveOptions& opt) {
  PolyVectorBasis basis(gamma.chart(), opt.degree);
  const int n = basis.dim();
  const int bsize = basis.size();
  const int cubes = n * n * n;
  const int points = opt.points > 0 ? opt.points : std::max(32, (3 * bsize + cubes - 1) / cubes);
  if (static_cast<long>(points) * cubes < bsize)
    throw SpecError("collocation system is underdetermined: need at least " +
                    std::to_string((bsize + cubes - 1) / cubes) + " points");

  const auto colloc_pts = tensor::sample_points(basis.chart(), points, opt.seed);
  Eigen::MatrixXd a = collocation(gamma, basis, colloc_pts);
  if (opt.periodic_constraints) {
    Eigen::MatrixXd p = periodic_rows(basis, opt.seed + 7);
    if (p.rows() > 0) {
      Eigen::MatrixXd stacked(a.rows() + p.rows(), bsize);
      stacked << a, p;
      a = std::move(stacked);
    }
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const Eigen::VectorXd sv = svd.singularValues();
  const double top = sv.size() > 0 ? sv[0] : 0.0;
  if (!std::isfinite(top)) throw NumericError("collocation matrix is not finite");
  // an identically zero operator (flat, degree 1) leaves every field a solution
  const double cut = opt.null_tolerance * top;

  SolutionBasis out{basis, {}, {}, {}, 0, points, 0.0, false};
  out.singular_values = Eigen::VectorXd::Zero(bsize);
  out.singular_values.head(sv.size()) = sv;
  int rank = 0;
  while (rank < sv.size() && sv[rank] > cut && sv[rank] > 0.0) ++rank;
  out.candidates = bsize - rank;
  out.condition = rank > 0 ? top / sv[rank - 1] : 1.0;
  // a retained value within two decades of the cut means the split is fragile
  out.ill_conditioned = rank > 0 && sv[rank - 1] < 100.0 * cut;
  Eigen::MatrixXd null = svd.matrixV().rightCols(out.candidates);

  // re-validate on fresh points and keep only directions that stay null there
  const auto val_pts = tensor::sample_points(basis.chart(), points, opt.seed + 1);
  if (out.candidates > 0) {
    Eigen::MatrixXd av = collocation(gamma, basis, val_pts) * null;
    Eigen::JacobiSVD<Eigen::MatrixXd> vsvd(av, Eigen::ComputeFullV);
    const Eigen::VectorXd vs = vsvd.singularValues();
    int keep = 0;
    for (Eigen::Index i = vs.size() - 1; i >= 0; --i) {
      if (vs[i] > opt.validation_tolerance) break;
      ++keep;
    }
    // columns beyond the row count have zero singular value
    keep += static_cast<int>(out.candidates - vs.size());
    null = null * vsvd.matrixV().rightCols(keep);
  }
  out.coeffs = canonical(null);

  for (int s = 0; s < out.k(); ++s) {
    double worst = 0.0, scale = 1.0;
    for (const auto& p : val_pts) {
      const auto f = out.field(s, p);
      worst = std::max(worst, nabla2_apply(gamma, f, p).max_abs());
      scale = std::max(scale, f.value.cwiseAbs().maxCoeff());
    }
    out.residuals.push_back(worst / scale);
  }
  return out;
}

DegreeScan degree_scan(const tensor::ConnectionField& gamma, int max_degree, SolveOptions opt) {
  if (max_degree < 1) throw SpecError("degree scan needs max degree >= 1");
  DegreeScan scan;
  for (int d = 1; d <= max_degree; ++d) {
    opt.degree = d;
    opt.points = 0;
    scan.degrees.push_back(d);
    scan.dims.push_back(solve_solution_space(gamma, opt).k());
  }
  scan.stable_from = scan.degrees.back();
  for (int i = static_cast<int>(scan.dims.size()) - 2; i >= 0 && scan.dims[i] == scan.dims.back(); --i)
    scan.stable_from = scan.degrees[i];
  const auto m = scan.dims.size();
  scan.degree_too_low = m >= 2 && scan.dims[m - 1] > scan.dims[m - 2];
  return scan;
}

}  // namespace igh::foliation
