#include <cmath>
#include <set>

#include "igh/errors.hpp"
#include "igh/tensor.hpp"

namespace igh::tensor {

void ChartSpec::validate() const {
  if (names.empty()) throw SpecError("chart has no coordinates");
  if (box.size() != names.size())
    throw SpecError("chart has " + std::to_string(names.size()) + " coordinates but " +
                    std::to_string(box.size()) + " intervals");
  if (!periodic.empty() && periodic.size() != names.size())
    throw SpecError("periodic flags do not match the chart dimension");
  std::set<std::string> seen;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (!seen.insert(names[i]).second) throw SpecError("duplicate coordinate '" + names[i] + "'");
    const auto [lo, hi] = box[i];
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi))
      throw SpecError("degenerate interval for coordinate '" + names[i] + "'");
  }
}

bool ChartSpec::contains(const Point& p) const {
  if (static_cast<int>(p.size()) != dim()) return false;
  for (int i = 0; i < dim(); ++i) {
    if (is_periodic(i)) continue;
    if (p[i] < box[i][0] || p[i] > box[i][1]) return false;
  }
  return true;
}

Point ChartSpec::wrap(const Point& p) const {
  Point q = p;
  for (int i = 0; i < dim() && i < static_cast<int>(q.size()); ++i) {
    if (!is_periodic(i)) continue;
    const double lo = box[i][0], width = box[i][1] - box[i][0];
    q[i] = lo + (q[i] - lo) - width * std::floor((q[i] - lo) / width);
  }
  return q;
}

namespace {

constexpr int kPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53,
                           59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113};

double radical_inverse(std::uint64_t index, int base) {
  double result = 0.0, f = 1.0 / base;
  while (index > 0) {
    result += f * static_cast<double>(index % base);
    index /= base;
    f /= base;
  }
  return result;
}

}  // namespace

std::vector<Point> sample_points(const ChartSpec& chart, int count, unsigned seed) {
  chart.validate();
  const int n = chart.dim();
  if (n > static_cast<int>(std::size(kPrimes))) throw SpecError("chart dimension too large for sampling");
  std::vector<Point> out;
  out.reserve(count);
  const std::uint64_t start = 1 + (static_cast<std::uint64_t>(seed) << 20);
  for (int s = 0; s < count; ++s) {
    Point p(n);
    for (int i = 0; i < n; ++i) {
      const double u = radical_inverse(start + s, kPrimes[i]);
      p[i] = chart.box[i][0] + u * (chart.box[i][1] - chart.box[i][0]);
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<Point> default_samples(const ChartSpec& chart, unsigned seed) {
  return sample_points(chart, 64 * chart.dim(), seed);
}

}  // namespace igh::tensor
