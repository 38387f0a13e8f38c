#pragma once
// Chart-based tensor calculus on a single coordinate chart.
//
// Index conventions:
//   Gamma(k, i, j)      = upper Christoffel symbol, nabla_{d_i} d_j = Gamma^k_ij d_k
//   lowered(i, j, k)    = Gamma_{ij,k} = g_kl Gamma^l_ij
//   dGamma(m, k, i, j)  = d_m Gamma^k_ij
//   Riemann(l, k, i, j) = R^l_kij with R(d_i, d_j) d_k = R^l_kij d_l
//   cubic(k, i, j)      = (nabla_k g)(d_i, d_j)

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "igh/check.hpp"
#include "igh/expr.hpp"

namespace igh::tensor {

using Point = std::vector<double>;

/// Dense cube-shaped array: every index ranges over 0..n-1.
template <int Rank>
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(int n) : n_(n), data_(size_for(n), 0.0) {}

  int dim() const { return n_; }
  std::size_t size() const { return data_.size(); }

  template <class... I>
  double& operator()(I... idx) {
    static_assert(sizeof...(I) == Rank);
    return data_[offset(idx...)];
  }
  template <class... I>
  double operator()(I... idx) const {
    static_assert(sizeof...(I) == Rank);
    return data_[offset(idx...)];
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
  }
  const std::vector<double>& data() const { return data_; }

 private:
  int n_ = 0;
  std::vector<double> data_;

  static std::size_t size_for(int n) {
    std::size_t s = 1;
    for (int r = 0; r < Rank; ++r) s *= static_cast<std::size_t>(n);
    return s;
  }
  template <class... I>
  std::size_t offset(I... idx) const {
    std::size_t o = 0;
    ((o = o * static_cast<std::size_t>(n_) + static_cast<std::size_t>(idx)), ...);
    return o;
  }
};

using Tensor3 = Tensor<3>;
using Tensor4 = Tensor<4>;

struct ChartSpec {
  std::vector<std::string> names;
  std::vector<std::array<double, 2>> box;
  std::vector<bool> periodic;  // empty means no periodic directions

  int dim() const { return static_cast<int>(names.size()); }
  /// Throws SpecError when sizes disagree or an interval is degenerate.
  void validate() const;
  bool is_periodic(int i) const { return !periodic.empty() && periodic[i]; }
  bool contains(const Point& p) const;
  /// Folds periodic coordinates back into the box.
  Point wrap(const Point& p) const;
  expr::Bindings bind(const Point& p) const { return {names, p}; }
};

/// Deterministic Halton points strictly inside the chart box. `seed` offsets the
/// sequence so different seeds give disjoint point sets.
std::vector<Point> sample_points(const ChartSpec& chart, int count, unsigned seed = 0);
/// Default verification sample: 64 * dim points.
std::vector<Point> default_samples(const ChartSpec& chart, unsigned seed = 0);

struct MetricSample {
  Eigen::MatrixXd g;
  Eigen::MatrixXd g_inv;
  Tensor3 dg;   // dg(m, i, j)      = d_m g_ij
  Tensor4 ddg;  // ddg(m, n, i, j)  = d_m d_n g_ij (order >= 2 only)
  int order = 0;
};

/// Riemannian metric given by expression components on a chart.
class MetricField {
 public:
  MetricField(ChartSpec chart, std::vector<std::vector<expr::Expression>> components);

  /// Metric g_ij = d_i d_j f for a potential f.
  static MetricField hessian_of(ChartSpec chart, const expr::Expression& potential);

  const ChartSpec& chart() const { return chart_; }
  int dim() const { return chart_.dim(); }
  const std::vector<std::vector<expr::Expression>>& components() const { return components_; }

  /// Values and partial derivatives up to `order` (0..2). Throws NumericError
  /// when the matrix is singular.
  MetricSample eval(const Point& p, int order = 2) const;
  /// Component values only; no invertibility check.
  Eigen::MatrixXd value(const Point& p) const;

 private:
  ChartSpec chart_;
  std::vector<std::vector<expr::Expression>> components_;
};

/// Smallest eigenvalue divided by the largest, and whether it clears the
/// definiteness threshold (1e-10).
struct DefinitenessReport {
  double min_ratio = 0.0;
  double symmetry_residual = 0.0;
  bool positive_definite = false;
};
DefinitenessReport check_definite(const MetricField& g, const std::vector<Point>& samples);

struct ConnectionSample {
  Tensor3 gamma;   // gamma(k, i, j)
  Tensor4 dgamma;  // dgamma(m, k, i, j), filled when order >= 1
  int order = 0;
};

/// Affine connection given by a closure over chart points.
class ConnectionField {
 public:
  using Evaluator = std::function<ConnectionSample(const Point&, int order)>;

  ConnectionField(ChartSpec chart, Evaluator eval, std::string name, bool torsion_free = true);

  static ConnectionField flat(ChartSpec chart);
  /// components[k][i][j] = Gamma^k_ij.
  static ConnectionField from_expressions(ChartSpec chart,
                                          std::vector<std::vector<std::vector<expr::Expression>>> components,
                                          bool torsion_free = true);

  const ChartSpec& chart() const { return chart_; }
  int dim() const { return chart_.dim(); }
  const std::string& name() const { return name_; }
  bool torsion_free_flag() const { return torsion_free_; }

  ConnectionSample eval(const Point& p, int order = 1) const { return eval_(p, order); }

 private:
  ChartSpec chart_;
  Evaluator eval_;
  std::string name_;
  bool torsion_free_;
};

struct CubicSample {
  Tensor3 t;   // t(i, j, k)
  Tensor4 dt;  // dt(m, i, j, k), filled when order >= 1
  int order = 0;
};

/// Covariant 3-tensor field (cubic form / skewness tensor).
class CubicField {
 public:
  using Evaluator = std::function<CubicSample(const Point&, int order)>;

  CubicField(ChartSpec chart, Evaluator eval);
  /// t_ijk = d_i d_j d_k f.
  static CubicField third_derivative_of(ChartSpec chart, const expr::Expression& potential);

  const ChartSpec& chart() const { return chart_; }
  int dim() const { return chart_.dim(); }
  CubicSample eval(const Point& p, int order = 1) const { return eval_(p, order); }

 private:
  ChartSpec chart_;
  Evaluator eval_;
};

// Index helpers. lower(): Gamma_{ij,k} = g_kl Gamma^l_ij (and its derivative when
// available); raise() is the inverse.
struct Lowered {
  Tensor3 low;   // low(i, j, k)
  Tensor4 dlow;  // dlow(m, i, j, k)
};
Lowered lower(const MetricSample& g, const ConnectionSample& c);
ConnectionSample raise(const MetricSample& g, const Lowered& l, int order);

ConnectionField levi_civita(const MetricField& g);
ConnectionField dual_connection(const MetricField& g, const ConnectionField& c);
CubicField cubic_form(const MetricField& g, const ConnectionField& c);
/// Gamma^(gamma)_{ij,k} = Gamma^(alpha_base)_{ij,k} + (alpha_base - gamma)/2 T_ijk.
ConnectionField alpha_connection(const ConnectionField& base, const CubicField& t, double alpha_base,
                                 double gamma, const MetricField& g);
/// nabla = LC + eps g(.,xi) g(.,xi) xi and its dual with -eps. Throws
/// NumericError if xi vanishes at a default sample point.
std::pair<ConnectionField, ConnectionField> xi_statistical(const MetricField& g,
                                                           std::vector<expr::Expression> xi, double eps);

Tensor3 torsion(const ConnectionField& c, const Point& p);
Tensor4 curvature(const ConnectionField& c, const Point& p);
Tensor4 curvature(const ConnectionSample& c);

/// Max over samples of |(nabla_k g)_ij|.
double metric_compatibility_residual(const MetricField& g, const ConnectionField& c,
                                     const std::vector<Point>& samples);
/// Max over samples of |d_k g_ij - Gamma_{ki,j} - Gamma*_{kj,i}|.
double duality_residual(const MetricField& g, const ConnectionField& c, const ConnectionField& dual,
                        const std::vector<Point>& samples);
double max_difference(const ConnectionField& a, const ConnectionField& b,
                      const std::vector<Point>& samples);
double max_torsion(const ConnectionField& c, const std::vector<Point>& samples);
double max_curvature(const ConnectionField& c, const std::vector<Point>& samples);
/// Max deviation of a 3-tensor from total symmetry.
double symmetry_residual(const Tensor3& t);
double symmetry_residual(const CubicField& t, const std::vector<Point>& samples);

struct HessianCriteriaReport {
  double curvature = 0.0;  // max |R|, flatness of the connection
  double torsion = 0.0;
  bool flat = false;
  bool affine_chart = false;      // Christoffel symbols vanish at every sample
  double codazzi = 0.0;           // (nabla_X g)(Y,Z) - (nabla_Y g)(X,Z)
  double coordinate = 0.0;        // d_k g_ij - d_i g_kj, meaningful in affine charts
  double gamma_self_adjoint = 0.0;  // g(gamma_X Y, Z) - g(Y, gamma_X Z)
  double gamma_symmetric = 0.0;     // gamma_ijk - gamma_jik
  double tolerance = 0.0;
  bool hessian = false;  // every computed criterion passes
  bool agree = false;    // computed criteria agree on pass/fail
  CheckTable table() const;
};
HessianCriteriaReport hessian_criteria(const MetricField& g, const ConnectionField& c,
                                       const std::vector<Point>& samples, double tol = 1e-8);

struct KoszulSample {
  Eigen::VectorXd log_det_route;  // 1/2 d_i log det g - Gamma^k_ik
  Eigen::VectorXd trace_route;    // tr(gamma_{d_i}), gamma = D - nabla
  double norm = 0.0;              // |beta|_g
  Eigen::MatrixXd parallel;       // (D beta)_ij
};
KoszulSample koszul_form(const MetricField& g, const ConnectionField& c, const Point& p);

/// Pullback of g under old = map(new); map[i] expresses old coordinate i in the
/// new chart's names. Throws NumericError on a rank-deficient Jacobian.
MetricField pullback_metric(const std::vector<expr::Expression>& map, const MetricField& g,
                            ChartSpec new_chart);

}  // namespace igh::tensor
