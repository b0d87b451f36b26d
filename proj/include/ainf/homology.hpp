#pragma once

/**
 * @file homology.hpp
 * @brief Smith-type normal form over the valuation ring Lambda_0 and homology
 *        of square-zero maps as free rank plus torsion exponents.
 *
 * Reduction works in Lambda_0 / T^E. Every pivot is an entry of minimal
 * valuation in the remaining block, so all other entries in its row and column
 * are divisible by it and every elimination step is exact modulo T^E. Pivots
 * therefore come out in ascending order.
 *
 * A square-zero map with pivots T^{l_1}, ..., T^{l_r} on a basis of size n has
 *     H = Lambda_0^{n - 2r}  (+)  sum_i Lambda_0 / T^{l_i}
 * where pivots with l_i = 0 contribute nothing. A torsion exponent at or above
 * the cutoff is indistinguishable from zero and shows up as two free summands.
 */

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ainf/lincomb.hpp"

namespace ainf {

struct Pivot {
  Index row;
  Index col;
  Rational exponent;
};

/// left * f * right == diagonal (entries T^exponent at the pivot positions).
struct NormalForm {
  std::vector<Pivot> pivots;
  LinearMap left;      // codomain -> codomain
  LinearMap right;     // domain -> domain
  LinearMap diagonal;  // domain -> codomain

  std::vector<Rational> exponents() const {
    std::vector<Rational> out;
    for (const auto& p : pivots) out.push_back(p.exponent);
    return out;
  }
};

inline NormalForm valuation_normal_form(const LinearMap& f) {
  const auto& ring = f.ring();
  const std::size_t nr = f.rows();
  const std::size_t nc = f.cols();
  LinearMap a = f;
  LinearMap u = LinearMap::identity(f.codomain(), ring);
  LinearMap v = LinearMap::identity(f.domain(), ring);
  std::vector<bool> row_free(nr, true);
  std::vector<bool> col_free(nc, true);
  std::vector<Pivot> pivots;

  const auto& row_names = f.codomain()->generators();
  const auto& col_names = f.domain()->generators();

  while (true) {
    std::optional<Pivot> best;
    for (Index r = 0; r < nr; ++r) {
      if (!row_free[r]) continue;
      for (Index c = 0; c < nc; ++c) {
        if (!col_free[c] || a.at(r, c).is_zero()) continue;
        const Rational e = a.at(r, c).valuation().value();
        // minimal valuation, ties broken by the (row name, column name) pair
        if (!best || e < best->exponent ||
            (e == best->exponent &&
             std::tie(row_names[r], col_names[c]) < std::tie(row_names[best->row], col_names[best->col]))) {
          best = Pivot{r, c, e};
        }
      }
    }
    if (!best) break;
    const Index pr = best->row;
    const Index pc = best->col;
    const Rational lambda = best->exponent;

    // normalize the pivot to exactly T^lambda
    const NovikovScalar unit_inv = a.at(pr, pc).shifted_down(lambda).inverse();
    for (Index c = 0; c < nc; ++c) a.at(pr, c) = a.at(pr, c) * unit_inv;
    for (Index c = 0; c < nr; ++c) u.at(pr, c) = u.at(pr, c) * unit_inv;

    // clear the pivot column: row_i -= q * row_pr
    for (Index r = 0; r < nr; ++r) {
      if (r == pr || a.at(r, pc).is_zero()) continue;
      const NovikovScalar q = a.at(r, pc).shifted_down(lambda);
      for (Index c = 0; c < nc; ++c) {
        if (!a.at(pr, c).is_zero()) a.at(r, c) = a.at(r, c) - q * a.at(pr, c);
      }
      for (Index c = 0; c < nr; ++c) {
        if (!u.at(pr, c).is_zero()) u.at(r, c) = u.at(r, c) - q * u.at(pr, c);
      }
    }
    // clear the pivot row: col_j -= q * col_pc
    for (Index c = 0; c < nc; ++c) {
      if (c == pc || a.at(pr, c).is_zero()) continue;
      const NovikovScalar q = a.at(pr, c).shifted_down(lambda);
      for (Index r = 0; r < nr; ++r) {
        if (!a.at(r, pc).is_zero()) a.at(r, c) = a.at(r, c) - q * a.at(r, pc);
      }
      for (Index r = 0; r < nc; ++r) {
        if (!v.at(r, pc).is_zero()) v.at(r, c) = v.at(r, c) - q * v.at(r, pc);
      }
    }
    row_free[pr] = false;
    col_free[pc] = false;
    pivots.push_back(*best);
  }

  LinearMap diagonal(f.domain(), f.codomain(), ring);
  for (const auto& p : pivots) diagonal.at(p.row, p.col) = NovikovScalar::monomial(ring, p.exponent);
  return NormalForm{std::move(pivots), std::move(u), std::move(v), std::move(diagonal)};
}

struct DegreeHomology {
  int degree = 0;
  std::size_t free_rank = 0;
  std::vector<Rational> torsion;
};

struct HomologyReport {
  std::size_t free_rank = 0;
  std::vector<Rational> torsion;  // ascending, each < threshold
  Rational threshold;
  /// Filled only for graded bases where the differential has a fixed degree.
  std::vector<DegreeHomology> per_degree;

  /// Stable one-line rendering: "free 0, torsion [1/2], threshold 4".
  std::string render() const { return render_parts(free_rank, torsion) + ", threshold " + to_string(threshold); }

  std::vector<std::string> render_lines() const {
    std::vector<std::string> out{render()};
    for (const auto& d : per_degree) out.push_back("degree " + std::to_string(d.degree) + ": " + render_parts(d.free_rank, d.torsion));
    return out;
  }

  /// Same free rank and torsion multiset (threshold must agree too).
  bool same_invariants(const HomologyReport& o) const {
    return free_rank == o.free_rank && torsion == o.torsion && threshold == o.threshold;
  }

  static std::string render_parts(std::size_t free, const std::vector<Rational>& torsion) {
    std::string out = "free " + std::to_string(free) + ", torsion [";
    for (std::size_t i = 0; i < torsion.size(); ++i) {
      if (i) out += ", ";
      out += to_string(torsion[i]);
    }
    return out + "]";
  }
};

/// Throws NotAComplexError naming the first domain generator (and energy)
/// at which d o d is nonzero.
inline void require_square_zero(const LinearMap& d) {
  const LinearMap dd = compose(d, d);
  std::optional<std::pair<Rational, Index>> worst;
  for (Index c = 0; c < dd.cols(); ++c) {
    const Valuation v = dd.column(c).valuation();
    if (v.is_infinite()) continue;
    if (!worst || v.value() < worst->first) worst = std::make_pair(v.value(), c);
  }
  if (worst) {
    const auto& name = d.domain()->generator(worst->second);
    throw NotAComplexError("d o d is nonzero on " + name + " at level " + to_string(worst->first), name,
                           to_string(worst->first));
  }
}

namespace detail {

inline LinearMap restrict_block(const LinearMap& d, const std::vector<Index>& cols, const std::vector<Index>& rows,
                                int from, int to) {
  std::vector<std::string> cn, rn;
  for (Index c : cols) cn.push_back(d.domain()->generator(c));
  for (Index r : rows) rn.push_back(d.codomain()->generator(r));
  auto dom = make_basis(d.domain()->name() + "[" + std::to_string(from) + "]", cn);
  auto cod = make_basis(d.codomain()->name() + "[" + std::to_string(to) + "]", rn);
  LinearMap block(dom, cod, d.ring());
  for (Index i = 0; i < rows.size(); ++i) {
    for (Index j = 0; j < cols.size(); ++j) block.at(i, j) = d.at(rows[i], cols[j]);
  }
  return block;
}

inline std::optional<int> degree_shift(const LinearMap& d) {
  const auto& b = *d.domain();
  const int n = b.modulus();
  std::optional<int> shift;
  for (Index r = 0; r < d.rows(); ++r) {
    for (Index c = 0; c < d.cols(); ++c) {
      if (d.at(r, c).is_zero()) continue;
      int s = b.degree(r) - b.degree(c);
      if (n > 0) s = ((s % n) + n) % n;
      if (shift && *shift != s) return std::nullopt;
      shift = s;
    }
  }
  return shift.value_or(0);
}

inline std::vector<DegreeHomology> graded_homology(const LinearMap& d) {
  const auto& b = *d.domain();
  const auto shift = degree_shift(d);
  if (!shift) return {};  // not homogeneous: aggregate report only
  const int n = b.modulus();
  auto wrap = [n](int x) { return n > 0 ? ((x % n) + n) % n : x; };
  std::map<int, std::vector<Index>> classes;
  for (Index i = 0; i < b.size(); ++i) classes[b.degree(i)].push_back(i);

  // pivots of the block d: D_c -> D_{c+shift}
  std::map<int, std::vector<Rational>> pivots;
  for (const auto& [deg, cols] : classes) {
    auto target = classes.find(wrap(deg + *shift));
    if (target == classes.end()) continue;
    pivots[deg] = valuation_normal_form(restrict_block(d, cols, target->second, deg, target->first)).exponents();
  }
  std::vector<DegreeHomology> out;
  for (const auto& [deg, gens] : classes) {
    DegreeHomology h;
    h.degree = deg;
    const auto outgoing = pivots.count(deg) ? pivots.at(deg).size() : 0;
    const int source = wrap(deg - *shift);
    const std::vector<Rational> empty;
    const auto& incoming = pivots.count(source) ? pivots.at(source) : empty;
    h.free_rank = gens.size() - outgoing - incoming.size();
    for (const auto& e : incoming) {
      if (e > 0) h.torsion.push_back(e);
    }
    out.push_back(std::move(h));
  }
  return out;
}

}  // namespace detail

inline HomologyReport homology(const LinearMap& d) {
  if (!same_basis(d.domain(), d.codomain())) {
    throw IncompatibleError("homology needs an endomorphism, got " + d.domain()->name() + " -> " +
                            d.codomain()->name());
  }
  require_square_zero(d);
  const NormalForm nf = valuation_normal_form(d);
  HomologyReport report;
  report.threshold = d.ring()->cutoff();
  report.free_rank = d.cols() - 2 * nf.pivots.size();
  for (const auto& p : nf.pivots) {
    if (p.exponent > 0) report.torsion.push_back(p.exponent);
  }
  std::sort(report.torsion.begin(), report.torsion.end());
  if (d.domain()->graded()) report.per_degree = detail::graded_homology(d);
  return report;
}

}  // namespace ainf
