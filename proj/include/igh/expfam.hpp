#pragma once
// Statistical models on finite or quadrature sample spaces.

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "igh/expr.hpp"
#include "igh/tensor.hpp"

namespace igh::expfam {

enum class SampleKind { Discrete, Grid };

struct SampleSpace {
  SampleKind kind = SampleKind::Discrete;
  std::vector<std::string> names;           // sample-space coordinate names
  std::vector<std::vector<double>> points;  // points[a][d]
  std::vector<double> weights;              // quadrature weights or counting measure

  std::size_t size() const { return points.size(); }
  /// Throws SpecError on non-positive weights, duplicate points or ragged data.
  void validate() const;

  /// Counting measure on the given one-dimensional points.
  static SampleSpace discrete(std::string name, const std::vector<double>& values);
  /// Composite Gauss-Legendre rule on [lo, hi].
  static SampleSpace gauss_legendre(std::string name, double lo, double hi, int panels, int nodes_per_panel);
};

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1], nodes ascending.
std::pair<std::vector<double>, std::vector<double>> gauss_legendre_rule(int n);

struct ExpFamilySpec {
  SampleSpace sample;
  expr::Expression carrier;                  // C(x)
  std::vector<expr::Expression> statistics;  // F_i(x)
  tensor::ChartSpec params;                  // natural parameters and their box

  int dim() const { return static_cast<int>(statistics.size()); }
  void validate() const;
};

struct GeneralModelSpec {
  SampleSpace sample;
  tensor::ChartSpec params;
  expr::Expression log_density;  // in sample and parameter names
  /// Subtract log of the total mass instead of rejecting unnormalized models.
  bool auto_normalize = false;
};

/// Log-partition function and its central-moment derivatives at one parameter.
struct PsiJet {
  double psi = 0.0;
  Eigen::VectorXd mean;    // d_i psi
  Eigen::MatrixXd fisher;  // d_i d_j psi
  tensor::Tensor3 cubic;   // d_i d_j d_k psi
};

/// Exponential family with the carrier and statistics tabulated on the sample space.
class ExponentialFamily {
 public:
  explicit ExponentialFamily(ExpFamilySpec spec);

  const ExpFamilySpec& spec() const { return spec_; }
  int dim() const { return spec_.dim(); }

  /// Throws DomainError outside the parameter box, NumericError on overflow.
  double log_partition(const tensor::Point& theta) const;
  /// order 1: mean, order 2: + Fisher, order 3: + cubic.
  PsiJet psi_jet(const tensor::Point& theta, int order = 3) const;
  Eigen::MatrixXd fisher_from_psi(const tensor::Point& theta) const { return psi_jet(theta, 2).fisher; }
  tensor::Tensor3 cubic_from_psi(const tensor::Point& theta) const { return psi_jet(theta, 3).cubic; }

  /// The family as a general model, log-density C + theta.F, normalized automatically.
  GeneralModelSpec as_model() const;

 private:
  ExpFamilySpec spec_;
  std::vector<double> base_;                // log w_a + C(x_a)
  std::vector<std::vector<double>> stats_;  // stats_[i][a] = F_i(x_a)

  std::vector<double> exponents(const tensor::Point& theta) const;
};

/// Density weights, scores and score derivatives at one parameter.
struct ModelPoint {
  std::vector<double> prob;                 // p(x_a) w_a, summing to one
  std::vector<std::vector<double>> score;   // score[i][a] = d_i l
  std::vector<std::vector<double>> hess;    // hess[i*n+j][a] = d_i d_j l
  double total_mass = 1.0;                  // sum before renormalization
  bool auto_normalized = false;
};

class StatisticalModel {
 public:
  explicit StatisticalModel(GeneralModelSpec spec);

  const GeneralModelSpec& spec() const { return spec_; }
  int dim() const { return spec_.params.dim(); }

  /// Throws NumericError when the mass is off by more than 1e-6 and the model
  /// is not set to auto-normalize.
  ModelPoint at(const tensor::Point& theta, int order = 2) const;

  Eigen::MatrixXd fisher(const tensor::Point& theta) const;
  tensor::Tensor3 cubic(const tensor::Point& theta) const;
  /// Lowered alpha-connection Gamma_{ij,k} = E[(d_ij l + (1 - alpha)/2 d_i l d_j l) d_k l].
  tensor::Tensor3 alpha_christoffel(const tensor::Point& theta, double alpha) const;

 private:
  GeneralModelSpec spec_;
  std::vector<expr::Expression> per_point_;  // log-density with x_a substituted
};

inline constexpr double kNormalizationTolerance = 1e-6;

/// (mu, sigma) -> natural parameters (mu / sigma^2, -1 / (2 sigma^2)).
tensor::Point gaussian_natural_map(double mu, double sigma);
/// Inverse of gaussian_natural_map; returns (mu, sigma).
std::pair<double, double> gaussian_natural_inverse(const tensor::Point& theta);

}  // namespace igh::expfam
