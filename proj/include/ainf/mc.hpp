#pragma once

/**
 * @file mc.hpp
 * @brief Cyclic elements, the level-by-level Maurer-Cartan solver and an
 *        exhaustive oracle for small cases.
 *
 * Write 1 = sum T^{l_i} 1_i for the cyclic element and b = sum T^{l_n} b_n
 * (l_n > 0). The coefficient of T^{l_n} in d^b(1) = sum_k n_k(1; b, .., b) is
 *     n_{1,0}(1_0; b_n) + sum n_{k,m}(1_{n0}; b_{n1}, .., b_{nk})
 * where the sum runs over l_m + l_{n0} + l_{n1} + .. + l_{nk} = l_n with every
 * l_{ni} > 0, except (k, m, n0, n1) = (1, 0, 0, n). Every b_{ni} in the sum has
 * a strictly smaller level, so b_n is determined by inverting the residue map
 * x -> n_{1,0}(1_0; x).
 */

#include <cstdint>
#include <cstdlib>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ainf/gf2.hpp"
#include "ainf/twist.hpp"

namespace ainf {

struct CyclicElementCertificate {
  ModulePtr module;
  Element one;
  Gf2Matrix leading;          // C -> D, x -> n_{1,0}(1_0; x)
  Gf2Matrix leading_inverse;  // D -> C
};

namespace detail {

inline std::string names(const BasisPtr& basis, const std::vector<Index>& support) {
  if (support.empty()) return "0";
  std::string out;
  for (Index g : support) out += (out.empty() ? "" : " + ") + basis->generator(g);
  return out;
}

}  // namespace detail

/// Checks both cyclic-element conditions: (1) x -> n_{1,0}(1_0; x) is
/// invertible over Z/2, (2) n_0(1) has no level-0 part.
inline CyclicElementCertificate certify_cyclic(const ModulePtr& m, const Element& one) {
  detail::require_basis(one, m->basis(), m->name());
  const auto& algebra = m->algebra();
  const Element one0 = Element::from_indices(m->basis(), m->ring(), one.residue());

  Gf2Matrix leading(m->basis()->size(), algebra->basis()->size());
  for (Index c = 0; c < algebra->basis()->size(); ++c) {
    const Element x = Element::generator(algebra->basis(), m->ring(), c);
    for (Index r : m->n(one0, {&x}).level_component(0)) leading.set(r, c, true);
  }
  auto inverse = leading.inverse();
  if (!inverse) {
    throw NotCyclicError("cyclic condition (1) fails: x -> n_{1,0}(1_0; x) is not invertible mod T (rank " +
                             std::to_string(leading.rank()) + " on " + std::to_string(algebra->basis()->size()) +
                             " -> " + std::to_string(m->basis()->size()) + ")",
                         1);
  }
  const auto n0 = m->n(one, {}).level_component(0);
  if (!n0.empty()) {
    throw NotCyclicError("cyclic condition (2) fails: n_0(1) has level-0 part " + detail::names(m->basis(), n0), 2);
  }
  return CyclicElementCertificate{m, one, std::move(leading), std::move(*inverse)};
}

/// One summand n_{k,m}(1_{n0}; b_{n1}, .., b_{nk}) of the forcing term.
struct ForcingTerm {
  int arity = 0;
  Rational op_level;
  Rational one_level;
  std::vector<Rational> parts;  // levels of the b inputs, in slot order
};

/// Ordered tuples of `k` values from `pool` (positive, ascending) summing to `total`.
inline std::vector<std::vector<Rational>> compositions(const std::vector<Rational>& pool, int k, const Rational& total) {
  // table[j][t] = compositions of t into j parts, built up in j
  std::map<Rational, std::vector<std::vector<Rational>>> current{{Rational(0), {{}}}};
  for (int j = 0; j < k; ++j) {
    std::map<Rational, std::vector<std::vector<Rational>>> next;
    for (const auto& [sum, tuples] : current) {
      for (const auto& p : pool) {
        const Rational s = sum + p;
        if (s > total) break;
        // the remaining k-j-1 parts are positive, so s must leave room
        if (j + 1 < k && s == total) break;
        auto& bucket = next[s];
        for (const auto& t : tuples) {
          bucket.push_back(t);
          bucket.back().push_back(p);
        }
      }
    }
    current = std::move(next);
  }
  auto it = current.find(total);
  return it == current.end() ? std::vector<std::vector<Rational>>{} : it->second;
}

/// All decompositions l_m + l_{n0} + sum l_{ni} = target with l_{ni} in
/// `b_levels` (positive), l_m in `op_levels[k]`, l_{n0} in `one_levels`,
/// omitting the term solved for, (k, m, n0, n1) = (1, 0, 0, target).
inline std::vector<ForcingTerm> forcing_decompositions(const std::map<int, std::vector<Rational>>& op_levels,
                                                       const std::vector<Rational>& one_levels,
                                                       const std::vector<Rational>& b_levels, const Rational& target) {
  std::vector<ForcingTerm> out;
  for (const auto& [k, levels] : op_levels) {
    for (const auto& m : levels) {
      for (const auto& n0 : one_levels) {
        const Rational rest = target - m - n0;
        if (rest < 0) continue;
        if (k == 0) {
          if (rest == 0) out.push_back(ForcingTerm{0, m, n0, {}});
          continue;
        }
        for (auto& parts : compositions(b_levels, k, rest)) {
          if (k == 1 && m == 0 && n0 == 0) continue;  // the excluded term n_{1,0}(1_0; b_n)
          out.push_back(ForcingTerm{k, m, n0, std::move(parts)});
        }
      }
    }
  }
  return out;
}

namespace detail {

/// Z/2 value of the level-`level` part of n_k on Z/2 vectors.
inline std::vector<bool> z2_operation(const GappedOperationTable& table, int k, const Rational& level,
                                      const std::vector<const std::vector<bool>*>& inputs, std::size_t out_size) {
  std::vector<bool> out(out_size, false);
  const auto* tuples = table.find(Signature{k, 0});
  if (!tuples) return out;
  for (const auto& [tuple, levels] : *tuples) {
    auto it = levels.find(level);
    if (it == levels.end()) continue;
    bool hit = true;
    for (std::size_t i = 0; i < tuple.size() && hit; ++i) hit = (*inputs[i])[tuple[i]];
    if (!hit) continue;
    for (Index o : it->second) out[o] = !out[o];
  }
  return out;
}

inline std::vector<bool> bits(const std::vector<Index>& support, std::size_t size) {
  std::vector<bool> out(size, false);
  for (Index i : support) out[i] = true;
  return out;
}

inline std::vector<Index> support(const std::vector<bool>& bits) {
  std::vector<Index> out;
  for (Index i = 0; i < bits.size(); ++i) {
    if (bits[i]) out.push_back(i);
  }
  return out;
}

}  // namespace detail

struct MaurerCartanResidual {
  Rational level;
  std::vector<std::string> generators;

  std::string render() const {
    std::string out = "residual at level " + to_string(level) + " on [";
    for (std::size_t i = 0; i < generators.size(); ++i) out += (i ? ", " : "") + generators[i];
    return out + "]";
  }
};

/// First level below `bound` where sum_k m_k(b, .., b) is nonzero.
inline std::optional<MaurerCartanResidual> verify_mc(const FilteredAlgebra& a, const Element& b, const Rational& bound) {
  const Element r = maurer_cartan_sum(a, b);
  const Valuation v = r.valuation();
  if (v.is_infinite() || v.value() >= bound) return std::nullopt;
  MaurerCartanResidual out{v.value(), {}};
  for (Index g : r.level_component(v.value())) out.generators.push_back(a.basis()->generator(g));
  return out;
}

struct BoundingCochain {
  Element value;
  Rational certified_cutoff;
  /// One line per positive level: "level l: forcing <D-vector>, b_l = <C-vector>".
  std::vector<std::string> trace;
};

/// Solves for b level by level below `bound`, then verifies Maurer-Cartan and
/// d^b(1) = 0 below `bound`; a failure there means the module or its algebra
/// does not satisfy its relations, reported as InconsistencyError.
inline BoundingCochain solve_bounding_cochain(const CyclicElementCertificate& cert, const Rational& bound) {
  const auto& m = *cert.module;
  const auto& algebra = *m.algebra();
  const auto& ring = m.ring();
  detail::require_bound(ring, bound);
  detail::forbid_level0_curvature(algebra);

  std::map<int, std::vector<Rational>> op_levels;
  for (const auto& [sig, tuples] : m.ops().by_signature()) {
    std::set<Rational> found;
    for (const auto& [tuple, levels] : tuples) {
      for (const auto& [level, outputs] : levels) found.insert(level);
    }
    op_levels[sig.left] = std::vector<Rational>(found.begin(), found.end());
  }
  const std::vector<Rational> one_levels = cert.one.levels();
  const std::size_t dsize = m.basis()->size();
  const std::size_t csize = algebra.basis()->size();

  std::map<Rational, std::vector<bool>> one_parts;
  for (const auto& l : one_levels) one_parts[l] = detail::bits(cert.one.level_component(l), dsize);

  std::map<Rational, std::vector<bool>> b_parts;  // only nonzero levels are kept
  std::vector<Rational> b_levels;
  BoundingCochain result{Element(algebra.basis(), ring), bound, {}};

  for (const auto& target : ring->levels()) {
    if (target == 0) continue;
    if (target >= bound) break;
    std::vector<bool> forcing(dsize, false);
    for (const auto& term : forcing_decompositions(op_levels, one_levels, b_levels, target)) {
      std::vector<const std::vector<bool>*> inputs{&one_parts.at(term.one_level)};
      for (const auto& p : term.parts) inputs.push_back(&b_parts.at(p));
      const auto value = detail::z2_operation(m.ops(), term.arity, term.op_level, inputs, dsize);
      for (std::size_t i = 0; i < dsize; ++i) forcing[i] = forcing[i] != value[i];
    }
    const auto forcing_support = detail::support(forcing);
    const auto bn = cert.leading_inverse.apply(forcing_support);
    result.trace.push_back("level " + to_string(target) + ": forcing " + detail::names(m.basis(), forcing_support) +
                           ", b_" + to_string(target) + " = " + detail::names(algebra.basis(), bn));
    if (bn.empty()) continue;
    b_parts[target] = detail::bits(bn, csize);
    b_levels.push_back(target);
    result.value += Element::from_indices(algebra.basis(), ring, bn, target);
  }

  if (auto r = verify_mc(algebra, result.value, bound)) {
    throw InconsistencyError(m.name() + ": solved b = " + to_string(result.value) +
                             " fails Maurer-Cartan, " + r->render());
  }
  const Element dbone = twisted_map_unchecked(m, result.value).apply(cert.one);
  const Valuation v = dbone.valuation();
  if (!v.is_infinite() && v.value() < bound) {
    throw InconsistencyError(m.name() + ": solved b = " + to_string(result.value) + " leaves d^b(1) nonzero at level " +
                             to_string(v.value()));
  }
  return result;
}

/// Enumeration budget: AINF_ORACLE_BUDGET when set, else 2^20 candidates.
inline std::uint64_t oracle_budget_from_env() {
  if (const char* text = std::getenv("AINF_ORACLE_BUDGET")) {
    char* end = nullptr;
    const auto value = std::strtoull(text, &end, 10);
    if (end && *end == '\0' && end != text) return value;
  }
  return std::uint64_t{1} << 20;
}

/// Every b supported on the positive levels below `bound` with
/// sum m_k(b..b) = 0 and sum n_k(1; b..b) = 0 below `bound`, by enumerating
/// all 2^(|C| * #levels) candidates and evaluating both sums term by term.
inline std::vector<Element> oracle_bounding_cochains(const FilteredRightModule& m, const Element& one,
                                                     const Rational& bound, std::uint64_t budget) {
  detail::require_basis(one, m.basis(), m.name());
  const auto& algebra = *m.algebra();
  const auto& ring = m.ring();
  detail::require_bound(ring, bound);
  std::vector<Rational> levels;
  for (const auto& l : ring->levels()) {
    if (l > 0 && l < bound) levels.push_back(l);
  }
  const std::size_t csize = algebra.basis()->size();
  const std::size_t bits = csize * levels.size();
  if (bits >= 63 || (std::uint64_t{1} << bits) > budget) {
    throw BudgetExceededError("oracle needs 2^" + std::to_string(bits) + " candidates, budget is " +
                                  std::to_string(budget),
                              bits >= 63 ? UINT64_MAX : std::uint64_t{1} << bits);
  }
  const int max_m = algebra.ops().empty() ? 0 : algebra.ops().max_total();
  const int max_n = m.ops().empty() ? 0 : m.ops().max_total();

  std::vector<Element> out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << bits); ++mask) {
    Element b(algebra.basis(), ring);
    for (std::size_t i = 0; i < bits; ++i) {
      if (mask >> i & 1) b.add(static_cast<Index>(i % csize), NovikovScalar::monomial(ring, levels[i / csize]));
    }
    Element mc = algebra.zero();
    for (int k = 0; k <= max_m; ++k) mc += algebra.m(Inputs(static_cast<std::size_t>(k), &b));
    if (mc.valuation() < Valuation(bound)) continue;
    Element d = m.zero();
    for (int k = 0; k <= max_n; ++k) d += m.n(one, Inputs(static_cast<std::size_t>(k), &b));
    if (d.valuation() < Valuation(bound)) continue;
    out.push_back(std::move(b));
  }
  return out;
}

}  // namespace ainf
