#pragma once

/**
 * @file twist.hpp
 * @brief Twisting operation tables by elements of C (x) Lambda_+, and the
 *        constructions derived from tables alone: opposite algebra, diagonal
 *        module and bimodule, twisted differentials.
 *
 * Twisting inserts b in every possible way into the twistable slots:
 *     m^b_k(x_1..x_k) = sum m(b..b, x_1, b..b, ..., x_k, b..b).
 * Since tables have finitely many arities, the sum is finite and is computed
 * entry by entry: for each entry and each subset S of its twistable slots,
 * the slots in S are filled with b and the rest stay as inputs.
 */

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "ainf/relations.hpp"

namespace ainf {

/// Twist group of every slot of a signature: -1 for a fixed slot, otherwise
/// the index of the element substituted there.
using TwistGroups = std::function<std::vector<int>(Signature)>;

/// Twisted table; the output signature counts the slots of group 0 (left)
/// and group 1 (right) left as inputs. With `full_only`, only substitutions
/// that fill every twistable slot are kept.
inline GappedOperationTable twist_table(const GappedOperationTable& table, const TwistGroups& groups,
                                        const std::array<const Element*, 2>& twists, bool full_only) {
  GappedOperationTable out(table.ring());
  for (const auto& [sig, tuples] : table.by_signature()) {
    const std::vector<int> group = groups(sig);
    std::vector<std::size_t> slots;
    for (std::size_t s = 0; s < group.size(); ++s) {
      if (group[s] < 0) continue;
      const Element* b = twists[static_cast<std::size_t>(group[s])];
      if (b && !b->is_zero()) {
        slots.push_back(s);
      } else if (full_only) {
        slots.clear();
        slots.push_back(group.size());  // marks the signature as unusable
        break;
      }
    }
    if (!slots.empty() && slots.back() == group.size()) continue;
    const std::size_t first_mask = full_only ? (std::size_t{1} << slots.size()) - 1 : 0;
    for (const auto& [tuple, levels] : tuples) {
      for (std::size_t mask = first_mask; mask < (std::size_t{1} << slots.size()); ++mask) {
        NovikovScalar coeff = NovikovScalar::one(table.ring());
        std::vector<bool> filled(group.size(), false);
        for (std::size_t i = 0; i < slots.size() && !coeff.is_zero(); ++i) {
          if (!(mask >> i & 1)) continue;
          const std::size_t s = slots[i];
          filled[s] = true;
          coeff = coeff * (*twists[static_cast<std::size_t>(group[s])])[tuple[s]];
        }
        if (coeff.is_zero()) continue;
        Tuple rest;
        Signature reduced{0, 0};
        for (std::size_t s = 0; s < group.size(); ++s) {
          if (filled[s]) continue;
          rest.push_back(tuple[s]);
          if (group[s] == 0) ++reduced.left;
          if (group[s] == 1) ++reduced.right;
        }
        for (const auto& [level, outputs] : levels) {
          const NovikovScalar c = coeff.shifted_up(level);
          if (c.is_zero()) break;
          out.add_scaled(reduced, c, rest, outputs);
        }
      }
    }
  }
  return out;
}

namespace detail {

inline std::vector<int> algebra_groups(Signature s) { return std::vector<int>(static_cast<std::size_t>(s.left), 0); }

inline std::vector<int> module_groups(Signature s) {
  std::vector<int> g{-1};
  g.insert(g.end(), static_cast<std::size_t>(s.left), 0);
  return g;
}

inline std::vector<int> bimodule_groups(Signature s) {
  std::vector<int> g(static_cast<std::size_t>(s.left), 0);
  g.push_back(-1);
  g.insert(g.end(), static_cast<std::size_t>(s.right), 1);
  return g;
}

/// b must live on `basis` and lie in Lambda_+.
inline void require_twist(const Element& b, const BasisPtr& basis, const std::string& what) {
  require_basis(b, basis, what);
  const Valuation v = b.valuation();
  if (!v.is_infinite() && v.value() == 0) {
    std::string gens;
    for (Index g : b.residue()) gens += (gens.empty() ? "" : ", ") + b.basis()->generator(g);
    throw ValidationError(what + ": twisting element has a level-0 part on [" + gens + "]");
  }
}

inline void forbid_level0_curvature(const FilteredAlgebra& a) {
  const auto* m0 = a.ops().find(Signature{0, 0});
  if (!m0) return;
  for (const auto& [tuple, levels] : *m0) {
    if (levels.count(Rational(0))) {
      throw ValidationError(a.name() + ": curvature at level 0 cannot be twisted away");
    }
  }
}

/// Arity-0 part of a table as a matrix, with slot 0 the domain generator.
inline LinearMap arity_zero_map(const GappedOperationTable& table, Signature sig, const BasisPtr& domain,
                                const BasisPtr& codomain) {
  LinearMap out(domain, codomain, table.ring());
  const auto* tuples = table.find(sig);
  if (!tuples) return out;
  for (const auto& [tuple, levels] : *tuples) {
    for (const auto& [level, outputs] : levels) {
      const auto mono = NovikovScalar::monomial(table.ring(), level);
      for (Index o : outputs) out.at(o, tuple.at(0)) += mono;
    }
  }
  return out;
}

}  // namespace detail

/// sum_k m_k(b, ..., b)
inline Element maurer_cartan_sum(const FilteredAlgebra& a, const Element& b) {
  detail::require_twist(b, a.basis(), a.name());
  const auto twisted = twist_table(a.ops(), detail::algebra_groups, {&b, nullptr}, true);
  Element out = a.zero();
  const auto* m0 = twisted.find(Signature{0, 0});
  if (!m0) return out;
  for (const auto& [tuple, levels] : *m0) {
    for (const auto& [level, outputs] : levels) {
      for (Index o : outputs) out.add(o, NovikovScalar::monomial(a.ring(), level));
    }
  }
  return out;
}

/// Throws MaurerCartanError naming the lowest level where sum m_k(b..b) != 0.
inline void require_maurer_cartan(const FilteredAlgebra& a, const Element& b) {
  const Element r = maurer_cartan_sum(a, b);
  const Valuation v = r.valuation();
  if (v.is_infinite()) return;
  std::string gens;
  for (Index g : r.level_component(v.value())) gens += (gens.empty() ? "" : ", ") + r.basis()->generator(g);
  throw MaurerCartanError(a.name() + ": b = " + to_string(b) + " is not a bounding cochain, residual at level " +
                          to_string(v.value()) + " on [" + gens + "]");
}

inline AlgebraPtr twist_algebra(const FilteredAlgebra& a, const Element& b) {
  detail::forbid_level0_curvature(a);
  detail::require_twist(b, a.basis(), a.name());
  return std::make_shared<FilteredAlgebra>(a.name(), a.basis(),
                                           twist_table(a.ops(), detail::algebra_groups, {&b, nullptr}, false));
}

/// n^b_k(y; x) = sum n(y; b..b, x_1, b..b, ..., x_k, b..b), a module over A^b.
inline ModulePtr twist_module(const FilteredRightModule& m, const Element& b) {
  auto algebra = twist_algebra(*m.algebra(), b);
  return std::make_shared<FilteredRightModule>(m.name(), m.basis(), std::move(algebra),
                                               twist_table(m.ops(), detail::module_groups, {&b, nullptr}, false));
}

inline BimodulePtr twist_bimodule(const FilteredBimodule& bm, const Element& b1, const Element& b2) {
  auto left = twist_algebra(*bm.left_algebra(), b1);
  auto right = twist_algebra(*bm.right_algebra(), b2);
  return std::make_shared<FilteredBimodule>(bm.name(), bm.basis(), std::move(left), std::move(right),
                                            twist_table(bm.ops(), detail::bimodule_groups, {&b1, &b2}, false));
}

/// y -> sum_k n_k(y; b, ..., b) without the Maurer-Cartan precondition.
inline LinearMap twisted_map_unchecked(const FilteredRightModule& m, const Element& b) {
  detail::require_twist(b, m.algebra()->basis(), m.name());
  const auto full = twist_table(m.ops(), detail::module_groups, {&b, nullptr}, true);
  return detail::arity_zero_map(full, Signature{0, 0}, m.basis(), m.basis());
}

/// d^b(y) = sum_k n_k(y; b, ..., b). b must satisfy Maurer-Cartan.
inline LinearMap twisted_differential(const FilteredRightModule& m, const Element& b) {
  detail::forbid_level0_curvature(*m.algebra());
  detail::require_twist(b, m.algebra()->basis(), m.name());
  require_maurer_cartan(*m.algebra(), b);
  return twisted_map_unchecked(m, b);
}

/// delta_{b1,b2}(y) = sum n_{k1,k2}(b1..b1; y; b2..b2).
inline LinearMap bimodule_twisted_differential(const FilteredBimodule& bm, const Element& b1, const Element& b2) {
  detail::forbid_level0_curvature(*bm.left_algebra());
  detail::forbid_level0_curvature(*bm.right_algebra());
  detail::require_twist(b1, bm.left_algebra()->basis(), bm.name());
  detail::require_twist(b2, bm.right_algebra()->basis(), bm.name());
  require_maurer_cartan(*bm.left_algebra(), b1);
  require_maurer_cartan(*bm.right_algebra(), b2);
  const auto full = twist_table(bm.ops(), detail::bimodule_groups, {&b1, &b2}, true);
  // after the full twist the only slot left is y
  return detail::arity_zero_map(full, Signature{0, 0}, bm.basis(), bm.basis());
}

/// m^op_k(x_1, ..., x_k) = m_k(x_k, ..., x_1)
inline AlgebraPtr opposite_algebra(const FilteredAlgebra& a, std::string name = {}) {
  GappedOperationTable ops(a.ring());
  for (const auto& e : a.ops().canonical_entries()) {
    Tuple reversed(e.inputs.rbegin(), e.inputs.rend());
    ops.add(e.signature, e.level, reversed, e.outputs);
  }
  return std::make_shared<FilteredAlgebra>(name.empty() ? a.name() : std::move(name), a.basis(), std::move(ops));
}

/// n_k(y; x_1..x_k) = m_{k+1}(y, x_1..x_k) on the algebra's own basis.
inline ModulePtr diagonal_module(const AlgebraPtr& a, std::string name = {}) {
  GappedOperationTable ops(a->ring());
  for (const auto& e : a->ops().canonical_entries()) {
    if (e.signature.left == 0) continue;
    ops.add(Signature{e.signature.left - 1, 0}, e.level, e.inputs, e.outputs);
  }
  return std::make_shared<FilteredRightModule>(name.empty() ? a->name() : std::move(name), a->basis(), a,
                                               std::move(ops));
}

/// n_{k1,k2}(x..; y; x..) = m_{k1+k2+1}(x.., y, x..).
inline BimodulePtr diagonal_bimodule(const AlgebraPtr& a, std::string name = {}) {
  GappedOperationTable ops(a->ring());
  for (const auto& e : a->ops().canonical_entries()) {
    const int k = e.signature.left;
    for (int i = 0; i < k; ++i) ops.add(Signature{i, k - 1 - i}, e.level, e.inputs, e.outputs);
  }
  return std::make_shared<FilteredBimodule>(name.empty() ? a->name() : std::move(name), a->basis(), a, a,
                                            std::move(ops));
}

/// For n_k(y; x) := m_{k+1}(y, x): the module relation at (y; xs) and
/// m_{k+2}(m_0, y, xs). The two agree for any algebra satisfying its relations.
inline std::pair<Element, Element> unit_defect(const AlgebraPtr& a, const Element& unit, const Element& y,
                                               const Inputs& xs) {
  detail::require_basis(unit, a->basis(), a->name());
  const Element e0 = Element::from_indices(a->basis(), a->ring(), unit.residue());
  for (Index g = 0; g < a->basis()->size(); ++g) {
    const Element x = Element::generator(a->basis(), a->ring(), g);
    const auto left = a->m({&e0, &x}).level_component(0);
    const auto right = a->m({&x, &e0}).level_component(0);
    if (left != std::vector<Index>{g} || right != std::vector<Index>{g}) {
      throw ValidationError(a->name() + ": " + to_string(unit) + " is not a unit for m_2 at level 0 (fails on " +
                            a->basis()->generator(g) + ")");
    }
  }
  const auto module = diagonal_module(a);
  Element lhs = module_relation(*module, y, xs);
  const Element m0 = a->m({});
  Inputs inputs{&m0, &y};
  inputs.insert(inputs.end(), xs.begin(), xs.end());
  Element rhs = a->m(inputs);
  return {std::move(lhs), std::move(rhs)};
}

/// phi^b(y) = sum_k phi_k(y; b, ..., b); verified to be a chain map from
/// (D1, d^b) to (D2, d^b).
inline LinearMap realize_phi_b(const AInftyHomomorphism& f, const Element& b) {
  const auto& source = *f.source();
  const auto& target = *f.target();
  const LinearMap d1 = twisted_differential(source, b);
  const LinearMap d2 = twisted_differential(target, b);
  const auto full = twist_table(f.ops(), detail::module_groups, {&b, nullptr}, true);
  LinearMap phi = detail::arity_zero_map(full, Signature{0, 0}, source.basis(), target.basis());
  const LinearMap lhs = compose(d2, phi);
  const LinearMap rhs = compose(phi, d1);
  std::optional<Rational> worst;
  for (Index c = 0; c < phi.cols(); ++c) {
    const Valuation v = (lhs.column(c) + rhs.column(c)).valuation();
    if (!v.is_infinite() && (!worst || v.value() < *worst)) worst = v.value();
  }
  if (worst) {
    throw InconsistencyError(f.name() + ": phi^b is not a chain map, residual at level " + to_string(*worst));
  }
  return phi;
}

}  // namespace ainf
