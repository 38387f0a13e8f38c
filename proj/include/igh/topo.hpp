#pragma once
// Leaf-topology arithmetic: the flat / mapping-torus dichotomy and Betti
// numbers of torus bundles over the circle with periodic monodromy.

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace igh::topo {

/// 2x2 integer matrix {{a, b}, {c, d}} with determinant 1.
class MonodromyMatrix {
 public:
  /// Throws SpecError unless a*d - b*c == 1.
  MonodromyMatrix(long a, long b, long c, long d);

  long operator()(int i, int j) const { return m_[i][j]; }
  long trace() const { return m_[0][0] + m_[1][1]; }
  MonodromyMatrix operator*(const MonodromyMatrix& o) const;
  bool operator==(const MonodromyMatrix& o) const = default;
  bool is_identity() const { return m_[0][0] == 1 && m_[0][1] == 0 && m_[1][0] == 0 && m_[1][1] == 1; }
  MonodromyMatrix transpose() const { return {m_[0][0], m_[1][0], m_[0][1], m_[1][1]}; }
  std::string to_string() const;

 private:
  std::array<std::array<long, 2>, 2> m_;
};

/// Parses "a,b,c,d" (row-major).
MonodromyMatrix parse_matrix(const std::string& text);

/// Order n with A^n = I when A = +-I or |tr A| < 2; nullopt otherwise.
std::optional<int> is_periodic(const MonodromyMatrix& a);

/// Rank over Q of an integer matrix given as rows, by fraction-free elimination.
int rational_rank(std::vector<std::vector<long>> rows);

using Betti = std::array<int, 4>;

/// (b0, b1, b2, b3) of the torus bundle with monodromy A. Throws DomainError
/// for non-periodic A.
Betti mapping_torus_betti(const MonodromyMatrix& a);
bool parity_check(const Betti& b);

/// Every determinant-one matrix with entries in [-bound, bound], row-major order.
std::vector<MonodromyMatrix> enumerate_sl2(int bound);

enum class Dichotomy { Flat, MappingTorus };
std::string_view dichotomy_name(Dichotomy d);

/// Koszul-form norm below tol means flat; a vanishing Koszul form with
/// curvature above tol is inconsistent and throws DomainError.
Dichotomy classify_dichotomy(double koszul_norm, double curvature_norm, double tol = 1e-8);

struct LeafTopologyReport {
  Dichotomy dichotomy = Dichotomy::Flat;
  double koszul_norm = 0.0;
  double curvature_norm = 0.0;
  std::optional<Betti> betti;  // only for mapping tori with given monodromy
  bool all_odd = false;
};
LeafTopologyReport leaf_topology(double koszul_norm, double curvature_norm, double tol,
                                 const std::optional<MonodromyMatrix>& monodromy = std::nullopt);

}  // namespace igh::topo
