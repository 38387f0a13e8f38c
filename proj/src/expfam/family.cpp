#include <cmath>
#include <map>

#include "igh/errors.hpp"
#include "igh/expfam.hpp"
#include "igh/simd.hpp"

namespace igh::expfam {

using expr::Expression;

namespace {

void check_parameter(const tensor::ChartSpec& params, const tensor::Point& theta) {
  if (static_cast<int>(theta.size()) != params.dim())
    throw DomainError("parameter has " + std::to_string(theta.size()) + " components, expected " +
                      std::to_string(params.dim()));
  if (!params.contains(theta)) throw DomainError("parameter outside the parameter domain");
}

void check_disjoint_names(const SampleSpace& s, const tensor::ChartSpec& params) {
  for (const auto& a : s.names)
    for (const auto& b : params.names)
      if (a == b) throw SpecError("name '" + a + "' used for both a sample and a parameter coordinate");
}

}  // namespace

void ExpFamilySpec::validate() const {
  sample.validate();
  params.validate();
  if (statistics.empty()) throw SpecError("exponential family needs at least one statistic");
  if (params.dim() != dim()) throw SpecError("one natural parameter per statistic is required");
  check_disjoint_names(sample, params);
}

ExponentialFamily::ExponentialFamily(ExpFamilySpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  const auto& s = spec_.sample;
  const std::size_t n = s.size();
  base_.resize(n);
  stats_.assign(dim(), std::vector<double>(n));
  for (std::size_t a = 0; a < n; ++a) {
    const expr::Bindings at{s.names, s.points[a]};
    base_[a] = std::log(s.weights[a]) + expr::evaluate(spec_.carrier, at);
    for (int i = 0; i < dim(); ++i) stats_[i][a] = expr::evaluate(spec_.statistics[i], at);
  }
}

std::vector<double> ExponentialFamily::exponents(const tensor::Point& theta) const {
  check_parameter(spec_.params, theta);
  std::vector<double> s = base_;
  for (int i = 0; i < dim(); ++i) simd::axpy(theta[i], stats_[i], s);
  return s;
}

double ExponentialFamily::log_partition(const tensor::Point& theta) const {
  const double psi = simd::log_sum_exp(exponents(theta));
  if (!std::isfinite(psi)) throw NumericError("log-partition overflow");
  return psi;
}

PsiJet ExponentialFamily::psi_jet(const tensor::Point& theta, int order) const {
  const int n = dim();
  const auto s = exponents(theta);
  PsiJet j;
  j.psi = simd::log_sum_exp(s);
  if (!std::isfinite(j.psi)) throw NumericError("log-partition overflow");
  if (order < 1) return j;

  std::vector<double> p(s.size());
  simd::exp_affine(s, -j.psi, 1.0, p);
  j.mean.resize(n);
  std::vector<std::vector<double>> centered(n);
  for (int i = 0; i < n; ++i) {
    j.mean(i) = simd::dot(p, stats_[i]);
    centered[i] = stats_[i];
    for (double& v : centered[i]) v -= j.mean(i);
  }
  if (order < 2) return j;

  j.fisher.resize(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) j.fisher(a, b) = j.fisher(b, a) = simd::dot3(p, centered[a], centered[b]);
  if (order < 3) return j;

  j.cubic = tensor::Tensor3(n);
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b)
      for (int c = b; c < n; ++c) {
        const double v = simd::dot4(p, centered[a], centered[b], centered[c]);
        j.cubic(a, b, c) = j.cubic(a, c, b) = j.cubic(b, a, c) = v;
        j.cubic(b, c, a) = j.cubic(c, a, b) = j.cubic(c, b, a) = v;
      }
  return j;
}

GeneralModelSpec ExponentialFamily::as_model() const {
  Expression l = spec_.carrier;
  for (int i = 0; i < dim(); ++i) l = l + Expression::variable(spec_.params.names[i]) * spec_.statistics[i];
  return {spec_.sample, spec_.params, l, true};
}

StatisticalModel::StatisticalModel(GeneralModelSpec spec) : spec_(std::move(spec)) {
  spec_.sample.validate();
  spec_.params.validate();
  check_disjoint_names(spec_.sample, spec_.params);
  const auto& s = spec_.sample;
  per_point_.reserve(s.size());
  for (const auto& x : s.points) {
    std::map<std::string, Expression> sub;
    for (std::size_t d = 0; d < s.names.size(); ++d) sub.emplace(s.names[d], expr::number(x[d]));
    per_point_.push_back(expr::substitute(spec_.log_density, sub));
  }
}

ModelPoint StatisticalModel::at(const tensor::Point& theta, int order) const {
  check_parameter(spec_.params, theta);
  const int n = dim();
  const std::size_t m = per_point_.size();
  const expr::Bindings at{spec_.params.names, theta};
  ModelPoint mp;
  std::vector<double> logw(m);
  mp.score.assign(n, std::vector<double>(m));
  if (order >= 2) mp.hess.assign(n * n, std::vector<double>(m));
  for (std::size_t a = 0; a < m; ++a) {
    const auto jet = expr::eval_jet(per_point_[a], at, order);
    logw[a] = jet.value() + std::log(spec_.sample.weights[a]);
    for (int i = 0; i < n; ++i) mp.score[i][a] = jet.d(i);
    if (order >= 2)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) mp.hess[i * n + j][a] = jet.d(i, j);
  }
  const double log_mass = simd::log_sum_exp(logw);
  if (!std::isfinite(log_mass)) throw NumericError("model mass is not finite");
  mp.total_mass = std::exp(log_mass);
  if (std::abs(mp.total_mass - 1.0) > kNormalizationTolerance && !spec_.auto_normalize)
    throw NumericError("model is not normalized: total mass " + std::to_string(mp.total_mass));
  mp.prob.resize(m);
  simd::exp_affine(logw, -log_mass, 1.0, mp.prob);

  if (spec_.auto_normalize) {
    // subtract log Z(theta): first and second derivatives of log Z are moments
    mp.auto_normalized = true;
    std::vector<double> mean(n);
    for (int i = 0; i < n; ++i) mean[i] = simd::dot(mp.prob, mp.score[i]);
    if (order >= 2)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const double d2 = simd::dot(mp.prob, mp.hess[i * n + j]) + simd::dot3(mp.prob, mp.score[i], mp.score[j]) -
                            mean[i] * mean[j];
          for (double& v : mp.hess[i * n + j]) v -= d2;
        }
    for (int i = 0; i < n; ++i)
      for (double& v : mp.score[i]) v -= mean[i];
  }
  return mp;
}

Eigen::MatrixXd StatisticalModel::fisher(const tensor::Point& theta) const {
  const auto mp = at(theta, 1);
  const int n = dim();
  Eigen::MatrixXd g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) g(i, j) = g(j, i) = simd::dot3(mp.prob, mp.score[i], mp.score[j]);
  return g;
}

namespace {

tensor::Tensor3 third_moment(const ModelPoint& mp, int n) {
  tensor::Tensor3 t(n);
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b)
      for (int c = b; c < n; ++c) {
        const double v = simd::dot4(mp.prob, mp.score[a], mp.score[b], mp.score[c]);
        t(a, b, c) = t(a, c, b) = t(b, a, c) = t(b, c, a) = t(c, a, b) = t(c, b, a) = v;
      }
  return t;
}

}  // namespace

tensor::Tensor3 StatisticalModel::cubic(const tensor::Point& theta) const { return third_moment(at(theta, 1), dim()); }

tensor::Tensor3 StatisticalModel::alpha_christoffel(const tensor::Point& theta, double alpha) const {
  const auto mp = at(theta, 2);
  const int n = dim();
  const auto t = third_moment(mp, n);
  tensor::Tensor3 out(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        out(i, j, k) = simd::dot3(mp.prob, mp.hess[i * n + j], mp.score[k]) + 0.5 * (1.0 - alpha) * t(i, j, k);
  return out;
}

}  // namespace igh::expfam
