#include <algorithm>
#include <cmath>
#include <numbers>

#include "igh/errors.hpp"
#include "igh/expfam.hpp"

namespace igh::expfam {

void SampleSpace::validate() const {
  if (points.empty()) throw SpecError("sample space is empty");
  if (names.empty()) throw SpecError("sample space has no coordinate names");
  if (weights.size() != points.size()) throw SpecError("sample space needs one weight per point");
  for (const auto& p : points)
    if (p.size() != names.size()) throw SpecError("sample point has the wrong number of coordinates");
  for (double w : weights)
    if (!(w > 0.0) || !std::isfinite(w)) throw SpecError("sample weights must be positive and finite");
  std::vector<const std::vector<double>*> sorted;
  sorted.reserve(points.size());
  for (const auto& p : points) sorted.push_back(&p);
  std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return *a < *b; });
  for (std::size_t i = 1; i < sorted.size(); ++i)
    if (*sorted[i] == *sorted[i - 1]) throw SpecError("sample points must be distinct");
}

SampleSpace SampleSpace::discrete(std::string name, const std::vector<double>& values) {
  SampleSpace s;
  s.kind = SampleKind::Discrete;
  s.names = {std::move(name)};
  for (double v : values) s.points.push_back({v});
  s.weights.assign(values.size(), 1.0);
  return s;
}

std::pair<std::vector<double>, std::vector<double>> gauss_legendre_rule(int n) {
  if (n < 1) throw SpecError("Gauss-Legendre rule needs at least one node");
  std::vector<double> x(n), w(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 1.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      const double prev = z;
      z = prev - p1 / pp;
      if (std::abs(z - prev) <= 1e-15) {
        // refresh the derivative at the converged node
        p1 = 1.0, p2 = 0.0;
        for (int j = 1; j <= n; ++j) {
          const double p3 = p2;
          p2 = p1;
          p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
        }
        pp = n * (z * p1 - p2) / (z * z - 1.0);
        break;
      }
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
  }
  if (n % 2 == 1) x[n / 2] = 0.0;
  return {x, w};
}

SampleSpace SampleSpace::gauss_legendre(std::string name, double lo, double hi, int panels, int nodes_per_panel) {
  if (!(lo < hi) || panels < 1) throw SpecError("invalid quadrature grid");
  const auto [x, w] = gauss_legendre_rule(nodes_per_panel);
  SampleSpace s;
  s.kind = SampleKind::Grid;
  s.names = {std::move(name)};
  const double width = (hi - lo) / panels;
  for (int p = 0; p < panels; ++p) {
    const double a = lo + p * width, mid = a + 0.5 * width;
    for (int i = 0; i < nodes_per_panel; ++i) {
      s.points.push_back({mid + 0.5 * width * x[i]});
      s.weights.push_back(0.5 * width * w[i]);
    }
  }
  return s;
}

tensor::Point gaussian_natural_map(double mu, double sigma) {
  if (!(sigma > 0.0)) throw DomainError("sigma must be positive");
  const double v = sigma * sigma;
  return {mu / v, -1.0 / (2.0 * v)};
}

std::pair<double, double> gaussian_natural_inverse(const tensor::Point& theta) {
  if (theta.size() != 2 || !(theta[1] < 0.0)) throw DomainError("second natural parameter must be negative");
  const double v = -1.0 / (2.0 * theta[1]);
  return {theta[0] * v, std::sqrt(v)};
}

}  // namespace igh::expfam
