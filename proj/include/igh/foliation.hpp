#pragma once
// Solutions of nabla^2 X = 0 among polynomial vector fields, their algebra
// under X.Y = nabla_X Y, and the leaves swept out by their flows.

#include <Eigen/Dense>
#include <vector>

#include "igh/check.hpp"
#include "igh/tensor.hpp"

namespace igh::foliation {

using tensor::Point;

/// Value and first two derivatives of a vector field at a point:
/// d(l, i) = d_i X^l, dd(l, i, j) = d_i d_j X^l.
struct FieldJet {
  Eigen::VectorXd value;
  Eigen::MatrixXd d;
  tensor::Tensor3 dd;
};

/// Polynomial vector fields of degree <= d in coordinates normalized to [-1, 1]
/// over the chart box. Index b = monomial * dim + component, monomials by total
/// degree, then lexicographically with higher powers of earlier coordinates first.
class PolyVectorBasis {
 public:
  PolyVectorBasis(tensor::ChartSpec chart, int degree);

  const tensor::ChartSpec& chart() const { return chart_; }
  int dim() const { return chart_.dim(); }
  int degree() const { return degree_; }
  int size() const { return static_cast<int>(monomials_.size()) * dim(); }
  const std::vector<std::vector<int>>& monomials() const { return monomials_; }
  /// Label such as "ux*uy^2 d/dy" (u prefix: normalized coordinate).
  std::string label(int b) const;

  /// Monomial values and x-derivatives at p: v[m], d1[m][i], d2[m][i][j].
  struct MonomialJet {
    std::vector<double> v;
    std::vector<std::vector<double>> d1;
    std::vector<std::vector<std::vector<double>>> d2;
  };
  MonomialJet monomial_jet(const Point& p) const;
  FieldJet field(const Eigen::VectorXd& coeffs, const Point& p) const;

 private:
  tensor::ChartSpec chart_;
  int degree_;
  std::vector<std::vector<int>> monomials_;
  std::vector<double> center_, half_;
};

/// theta^l_ij(X) = (nabla^2 X)(d_i, d_j)^l from a field jet and the connection with derivatives.
tensor::Tensor3 nabla2_apply(const tensor::ConnectionSample& gamma, const FieldJet& x);
tensor::Tensor3 nabla2_apply(const tensor::ConnectionField& gamma, const FieldJet& x, const Point& p);
/// Field given by expressions in the chart coordinates.
FieldJet expression_field(const tensor::ChartSpec& chart, const std::vector<expr::Expression>& x, const Point& p);

struct SolveOptions {
  int degree = 4;
  int points = 0;                   // collocation points; 0 picks 3 * basis size / dim^3 (at least 32)
  unsigned seed = 0;
  double null_tolerance = 1e-8;     // relative to the largest singular value
  double validation_tolerance = 1e-6;
  bool periodic_constraints = false;  // also require X to match across periodic faces
};

struct SolutionBasis {
  PolyVectorBasis basis;
  Eigen::MatrixXd coeffs;             // size() x k, orthonormal columns
  Eigen::VectorXd singular_values;    // of the collocation matrix, descending
  std::vector<double> residuals;      // max |theta(X)| over validation points, per solution
  int candidates = 0;                 // null vectors before validation
  int collocation_points = 0;
  double condition = 0.0;             // largest / smallest retained singular value
  bool ill_conditioned = false;       // retained and null singular values are not separated

  int k() const { return static_cast<int>(coeffs.cols()); }
  FieldJet field(int s, const Point& p) const { return basis.field(coeffs.col(s), p); }
  /// dim x k matrix of field values at p.
  Eigen::MatrixXd values(const Point& p) const;
};

SolutionBasis solve_solution_space(const tensor::ConnectionField& gamma, const SolveOptions& opt = {});

struct DegreeScan {
  std::vector<int> degrees;
  std::vector<int> dims;
  int stable_from = -1;  // smallest degree after which the dimension no longer changes
  bool degree_too_low = false;  // dimension still changed at the last step
};
DegreeScan degree_scan(const tensor::ConnectionField& gamma, int max_degree, SolveOptions opt = {});

struct ClosureReport {
  double product = 0.0;       // remainder of nabla_U V off the span, relative
  double bracket = 0.0;       // remainder of U.V - V.U off the span, relative
  double lie_bracket = 0.0;   // |U.V - V.U - [U, V]|, relative
  double associativity = 0.0; // from the structure constants
  Eigen::MatrixXd structure;  // (e, a*k + b): U_a . U_b = sum_e c^e_ab U_e
  CheckTable table(double tol = 1e-5) const;
};
ClosureReport product_closure_check(const tensor::ConnectionField& gamma, const SolutionBasis& s,
                                    unsigned seed = 17);

/// Numerical rank of the field values at p (threshold 1e-8 of the top singular value).
int leaf_rank(const SolutionBasis& s, const Point& p);

struct LeafSample {
  Point seed;
  std::vector<Point> points;
  std::vector<int> ranks;
  int rank_at_seed = 0;
  int max_rank = 0;
  bool exited = false;  // some flow left the chart box and was cut short
  double curvature_residual = 0.0;
  double symmetry_residual = 0.0;
};

/// Flows of single basis fields and of pairwise compositions, RK4 with step h.
LeafSample trace_leaf(const SolutionBasis& s, const Point& seed, int steps = 6, double h = 0.05);

struct LeafHessianResidual {
  double curvature = 0.0;  // g-projected R(e_a, e_b) e_c over leaf directions
  double symmetry = 0.0;   // (nabla_X g)(Y, Z) - (nabla_Y g)(X, Z) over leaf directions
  int rank = 0;
};
/// Throws DomainError when no leaf passes through p.
LeafHessianResidual leaf_hessian_check(const tensor::MetricField& g, const tensor::ConnectionField& gamma,
                                       const SolutionBasis& s, const Point& p);

}  // namespace igh::foliation
