#include <cstdlib>
#include <numeric>
#include <sstream>

#include "igh/errors.hpp"
#include "igh/topo.hpp"

namespace igh::topo {

MonodromyMatrix::MonodromyMatrix(long a, long b, long c, long d) : m_{{{a, b}, {c, d}}} {
  if (a * d - b * c != 1)
    throw SpecError("monodromy " + to_string() + " has determinant " + std::to_string(a * d - b * c) + ", not 1");
}

MonodromyMatrix MonodromyMatrix::operator*(const MonodromyMatrix& o) const {
  return {m_[0][0] * o.m_[0][0] + m_[0][1] * o.m_[1][0], m_[0][0] * o.m_[0][1] + m_[0][1] * o.m_[1][1],
          m_[1][0] * o.m_[0][0] + m_[1][1] * o.m_[1][0], m_[1][0] * o.m_[0][1] + m_[1][1] * o.m_[1][1]};
}

std::string MonodromyMatrix::to_string() const {
  std::ostringstream os;
  os << "[[" << m_[0][0] << "," << m_[0][1] << "],[" << m_[1][0] << "," << m_[1][1] << "]]";
  return os.str();
}

MonodromyMatrix parse_matrix(const std::string& text) {
  std::vector<long> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    char* end = nullptr;
    const long x = std::strtol(item.c_str(), &end, 10);
    if (item.empty() || end == item.c_str() || *end != '\0') throw SpecError("matrix entry '" + item + "' is not an integer");
    v.push_back(x);
  }
  if (v.size() != 4) throw SpecError("matrix needs four comma-separated integers a,b,c,d");
  return {v[0], v[1], v[2], v[3]};
}

std::optional<int> is_periodic(const MonodromyMatrix& a) {
  const bool minus_identity = a(0, 0) == -1 && a(0, 1) == 0 && a(1, 0) == 0 && a(1, 1) == -1;
  if (!a.is_identity() && !minus_identity && std::labs(a.trace()) >= 2) return std::nullopt;
  MonodromyMatrix p = a;
  for (int n = 1; n <= 6; ++n) {
    if (p.is_identity()) return n;
    p = p * a;
  }
  throw NumericError("elliptic matrix " + a.to_string() + " has no order up to 6");
}

int rational_rank(std::vector<std::vector<long>> rows) {
  int rank = 0;
  const std::size_t cols = rows.empty() ? 0 : rows[0].size();
  for (std::size_t c = 0; c < cols && rank < static_cast<int>(rows.size()); ++c) {
    std::size_t piv = rank;
    while (piv < rows.size() && rows[piv][c] == 0) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[rank], rows[piv]);
    for (std::size_t r = rank + 1; r < rows.size(); ++r) {
      const long f = rows[r][c], p = rows[rank][c];
      if (f == 0) continue;
      long g = 0;
      for (std::size_t k = 0; k < cols; ++k) {
        rows[r][k] = rows[r][k] * p - rows[rank][k] * f;
        g = std::gcd(g, rows[r][k]);
      }
      if (g > 1)
        for (auto& x : rows[r]) x /= g;
    }
    ++rank;
  }
  return rank;
}

Betti mapping_torus_betti(const MonodromyMatrix& a) {
  if (!is_periodic(a))
    throw DomainError("monodromy " + a.to_string() + " is not periodic (trace " + std::to_string(a.trace()) +
                      "); only A = +-I or |tr A| < 2 are supported");
  const int kernel = 2 - rational_rank({{a(0, 0) - 1, a(0, 1)}, {a(1, 0), a(1, 1) - 1}});
  const int b1 = 1 + kernel;
  return {1, b1, b1, 1};
}

bool parity_check(const Betti& b) {
  for (int x : b)
    if (x % 2 == 0) return false;
  return true;
}

std::vector<MonodromyMatrix> enumerate_sl2(int bound) {
  std::vector<MonodromyMatrix> out;
  for (long a = -bound; a <= bound; ++a)
    for (long b = -bound; b <= bound; ++b)
      for (long c = -bound; c <= bound; ++c)
        for (long d = -bound; d <= bound; ++d)
          if (a * d - b * c == 1) out.emplace_back(a, b, c, d);
  return out;
}

std::string_view dichotomy_name(Dichotomy d) { return d == Dichotomy::Flat ? "flat" : "mapping-torus"; }

Dichotomy classify_dichotomy(double koszul_norm, double curvature_norm, double tol) {
  if (koszul_norm < tol) {
    if (curvature_norm >= tol) {
      std::ostringstream os;
      os << "inconsistent leaf data: Koszul norm " << koszul_norm << " vanishes but curvature norm "
         << curvature_norm << " exceeds " << tol << "; the fixture is not a Hessian leaf";
      throw DomainError(os.str());
    }
    return Dichotomy::Flat;
  }
  return Dichotomy::MappingTorus;
}

LeafTopologyReport leaf_topology(double koszul_norm, double curvature_norm, double tol,
                                 const std::optional<MonodromyMatrix>& monodromy) {
  LeafTopologyReport r;
  r.koszul_norm = koszul_norm;
  r.curvature_norm = curvature_norm;
  r.dichotomy = classify_dichotomy(koszul_norm, curvature_norm, tol);
  if (r.dichotomy == Dichotomy::MappingTorus && monodromy) {
    r.betti = mapping_torus_betti(*monodromy);
    r.all_odd = parity_check(*r.betti);
  }
  return r;
}

}  // namespace igh::topo
