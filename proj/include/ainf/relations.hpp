#pragma once

/**
 * @file relations.hpp
 * @brief Residuals of the quadratic relations and exhaustive checkers.
 *
 * Each *_relation function returns the full sum of the relation on the given
 * inputs; the structure satisfies the relation there iff the result is zero.
 * Checkers run these on every generator tuple up to an arity bound beyond
 * which no relation term can be nonzero, and report the first nonzero residual
 * in the order (level, arity, tuple).
 */

#include <algorithm>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ainf/structures.hpp"

namespace ainf {

/// Inputs x[begin, end) of a list.
inline Inputs slice(const Inputs& xs, std::size_t begin, std::size_t end) {
  return Inputs(xs.begin() + static_cast<std::ptrdiff_t>(begin), xs.begin() + static_cast<std::ptrdiff_t>(end));
}

/// x[0, i) + {inner} + x[i + j, k): the list with block [i, i+j) replaced by `inner`.
inline Inputs splice(const Inputs& xs, std::size_t i, std::size_t j, const Element* inner) {
  Inputs out(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(i));
  out.push_back(inner);
  out.insert(out.end(), xs.begin() + static_cast<std::ptrdiff_t>(i + j), xs.end());
  return out;
}

/// Sum over all ways of applying m to a consecutive block (possibly empty) of
/// xs and feeding the result to `outer`.
inline void add_algebra_insertions(Element& acc, const FilteredAlgebra& a, const Inputs& xs,
                                   const std::function<Element(const Inputs&)>& outer) {
  const std::size_t k = xs.size();
  for (std::size_t j = 0; j <= k; ++j) {
    if (!a.ops().find(Signature{static_cast<int>(j), 0})) continue;
    for (std::size_t i = 0; i + j <= k; ++i) {
      const Element inner = a.m(slice(xs, i, i + j));
      if (inner.is_zero()) continue;
      acc += outer(splice(xs, i, j, &inner));
    }
  }
}

/// sum m(x_1, .., m(x_i, .., x_{i+j-1}), .., x_k)
inline Element algebra_relation(const FilteredAlgebra& a, const Inputs& xs) {
  Element acc = a.zero();
  add_algebra_insertions(acc, a, xs, [&](const Inputs& outer) { return a.m(outer); });
  return acc;
}

/// sum_l n(n(y; x_1..x_l); x_{l+1}..x_k) + sum n(y; x_1, .., m(..), .., x_k)
inline Element module_relation(const FilteredRightModule& mod, const Element& y, const Inputs& xs) {
  Element acc = mod.zero();
  const std::size_t k = xs.size();
  for (std::size_t l = 0; l <= k; ++l) {
    const Element inner = mod.n(y, slice(xs, 0, l));
    if (!inner.is_zero()) acc += mod.n(inner, slice(xs, l, k));
  }
  add_algebra_insertions(acc, *mod.algebra(), xs, [&](const Inputs& outer) { return mod.n(y, outer); });
  return acc;
}

/// Three-sum bimodule relation: n applied to the tail of the left string, y
/// and the head of the right string, fed to n; plus m inserted into either string.
inline Element bimodule_relation(const FilteredBimodule& b, const Inputs& left, const Element& y,
                                 const Inputs& right) {
  Element acc = b.zero();
  const std::size_t k1 = left.size();
  const std::size_t k2 = right.size();
  for (std::size_t i = 0; i <= k1; ++i) {
    for (std::size_t j = 0; j <= k2; ++j) {
      const Element inner = b.n(slice(left, i, k1), y, slice(right, 0, j));
      if (!inner.is_zero()) acc += b.n(slice(left, 0, i), inner, slice(right, j, k2));
    }
  }
  add_algebra_insertions(acc, *b.left_algebra(), left, [&](const Inputs& outer) { return b.n(outer, y, right); });
  add_algebra_insertions(acc, *b.right_algebra(), right, [&](const Inputs& outer) { return b.n(left, y, outer); });
  return acc;
}

/// sum n2(phi(y; x..); x..) + sum phi(n1(y; x..); x..) + sum phi(y; .., m(..), ..)
inline Element homomorphism_relation(const AInftyHomomorphism& f, const Element& y, const Inputs& xs) {
  const auto& source = *f.source();
  const auto& target = *f.target();
  Element acc = target.zero();
  const std::size_t k = xs.size();
  for (std::size_t l = 0; l <= k; ++l) {
    const Element image = f.phi(y, slice(xs, 0, l));
    if (!image.is_zero()) acc += target.n(image, slice(xs, l, k));
    const Element moved = source.n(y, slice(xs, 0, l));
    if (!moved.is_zero()) acc += f.phi(moved, slice(xs, l, k));
  }
  add_algebra_insertions(acc, *source.algebra(), xs, [&](const Inputs& outer) { return f.phi(y, outer); });
  return acc;
}

/// A relation instance with nonzero residual.
struct Counterexample {
  std::string structure;
  Rational level;
  Signature arity;
  bool two_string = false;              // render arity as "k1,k2" even when k2 = 0
  Tuple tuple;                          // generator indices, in slot order
  std::string inputs;                   // rendered tuple, e.g. "(w; p)"
  std::vector<std::string> residual;    // generators of the level component
  std::optional<Element> residual_element;

  std::string render() const {
    std::string out = structure + ": level " + to_string(level) + ", arity " + arity_str() + ", inputs " + inputs +
                      ", residual [";
    for (std::size_t i = 0; i < residual.size(); ++i) out += (i ? ", " : "") + residual[i];
    return out + "]";
  }

  std::string arity_str() const {
    return two_string ? std::to_string(arity.left) + "," + std::to_string(arity.right) : arity.str();
  }
};

using CheckResult = std::optional<Counterexample>;

/// How one structure's relation instances are laid out for scanning.
struct RelationScan {
  std::string structure;
  std::vector<Signature> signatures;                  // ascending arity order
  std::function<SlotLayout(Signature)> layout;
  /// Slot indices after which the rendering puts "; " instead of ", ".
  std::function<std::vector<bool>(Signature)> separators;
  std::function<Element(Signature, const std::vector<Element>&)> residual;
  bool two_string = false;
};

inline std::string render_tuple(const SlotLayout& slots, const Tuple& tuple, const std::vector<bool>& semicolon_after) {
  std::string out = "(";
  for (std::size_t i = 0; i < tuple.size(); ++i) {
    out += slots[i]->generator(tuple[i]);
    if (i + 1 < tuple.size()) out += semicolon_after[i] ? "; " : ", ";
  }
  return out + ")";
}

/// Runs every instance of a relation and returns the first nonzero residual
/// in the order (level, arity, tuple), considering levels below `bound`.
inline CheckResult scan_relations(const RelationScan& scan, const TruncationPtr& ring, const Rational& bound) {
  CheckResult best;
  for (const Signature& sig : scan.signatures) {
    const SlotLayout slots = scan.layout(sig);
    if (std::any_of(slots.begin(), slots.end(), [](const BasisPtr& b) { return b->size() == 0; })) continue;
    std::vector<Element> units;
    Tuple tuple(slots.size(), 0);
    while (true) {
      units.clear();
      for (std::size_t i = 0; i < slots.size(); ++i) units.push_back(Element::generator(slots[i], ring, tuple[i]));
      const Element r = scan.residual(sig, units);
      const Valuation v = r.valuation();
      if (!v.is_infinite() && v.value() < bound && (!best || v.value() < best->level)) {
        Counterexample c;
        c.structure = scan.structure;
        c.level = v.value();
        c.arity = sig;
        c.two_string = scan.two_string;
        c.tuple = tuple;
        c.inputs = render_tuple(slots, tuple, scan.separators(sig));
        for (Index g : r.level_component(c.level)) c.residual.push_back(r.basis()->generator(g));
        c.residual_element = r;
        best = std::move(c);
        if (best->level == 0) return best;  // nothing later can beat level 0
      }
      std::size_t i = slots.size();
      while (i > 0 && ++tuple[i - 1] == slots[i - 1]->size()) tuple[--i] = 0;
      if (i == 0) break;
    }
  }
  return best;
}

namespace detail {

inline void require_bound(const TruncationPtr& ring, const Rational& bound) {
  if (bound > ring->cutoff()) {
    throw ValidationError("check bound " + to_string(bound) + " exceeds the cutoff " + to_string(ring->cutoff()));
  }
}

inline std::vector<Signature> single_string(int max_arity) {
  std::vector<Signature> out;
  for (int k = 0; k <= max_arity; ++k) out.push_back(Signature{k, 0});
  return out;
}

inline std::vector<Signature> two_strings(int max_total) {
  std::vector<Signature> out;
  for (int t = 0; t <= max_total; ++t) {
    for (int l = t; l >= 0; --l) out.push_back(Signature{l, t - l});
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline Inputs pointers(const std::vector<Element>& xs, std::size_t begin, std::size_t end) {
  Inputs out;
  for (std::size_t i = begin; i < end; ++i) out.push_back(&xs[i]);
  return out;
}

}  // namespace detail

// Arity bounds: a nonzero term of a relation of arity k composes two table
// operations, so k is at most the sum of the two operations' arities (minus
// one when the inner result is fed into an algebra slot).

inline int algebra_relation_arity(const FilteredAlgebra& a) {
  return std::max(0, 2 * a.ops().max_total() - 1);
}

inline CheckResult check_algebra_relations(const FilteredAlgebra& a, const Rational& bound) {
  detail::require_bound(a.ring(), bound);
  if (a.ops().empty()) return std::nullopt;
  RelationScan scan{a.name(),
                    detail::single_string(algebra_relation_arity(a)),
                    [&](Signature s) { return a.layout(s); },
                    [](Signature s) { return std::vector<bool>(static_cast<std::size_t>(s.total()), false); },
                    [&](Signature, const std::vector<Element>& xs) {
                      return algebra_relation(a, detail::pointers(xs, 0, xs.size()));
                    }};
  return scan_relations(scan, a.ring(), bound);
}

inline int module_relation_arity(const FilteredRightModule& m) {
  const int kn = m.ops().max_total();
  const int km = m.algebra()->ops().empty() ? 0 : m.algebra()->ops().max_total();
  return std::max({0, 2 * kn, kn + km - 1});
}

/// Checks the algebra first; an algebra failure is returned as is.
inline CheckResult check_module_relations(const FilteredRightModule& m, const Rational& bound) {
  detail::require_bound(m.ring(), bound);
  if (auto c = check_algebra_relations(*m.algebra(), bound)) return c;
  if (m.ops().empty()) return std::nullopt;
  RelationScan scan{m.name(),
                    detail::single_string(module_relation_arity(m)),
                    [&](Signature s) { return m.layout(s); },
                    [](Signature s) {
                      std::vector<bool> sep(static_cast<std::size_t>(s.total()) + 1, false);
                      sep[0] = true;
                      return sep;
                    },
                    [&](Signature, const std::vector<Element>& xs) {
                      return module_relation(m, xs[0], detail::pointers(xs, 1, xs.size()));
                    }};
  return scan_relations(scan, m.ring(), bound);
}

inline int bimodule_relation_arity(const FilteredBimodule& b) {
  const int kb = b.ops().max_total();
  const auto arity = [](const FilteredAlgebra& a) { return a.ops().empty() ? 0 : a.ops().max_total(); };
  return std::max({0, 2 * kb, kb + arity(*b.left_algebra()) - 1, kb + arity(*b.right_algebra()) - 1});
}

inline CheckResult check_bimodule_relations(const FilteredBimodule& b, const Rational& bound) {
  detail::require_bound(b.ring(), bound);
  if (auto c = check_algebra_relations(*b.left_algebra(), bound)) return c;
  if (auto c = check_algebra_relations(*b.right_algebra(), bound)) return c;
  if (b.ops().empty()) return std::nullopt;
  RelationScan scan{b.name(),
                    detail::two_strings(bimodule_relation_arity(b)),
                    [&](Signature s) { return b.layout(s); },
                    [](Signature s) {
                      std::vector<bool> sep(static_cast<std::size_t>(s.total()) + 1, false);
                      if (s.left > 0) sep[static_cast<std::size_t>(s.left) - 1] = true;
                      sep[static_cast<std::size_t>(s.left)] = true;
                      return sep;
                    },
                    [&](Signature s, const std::vector<Element>& xs) {
                      const auto l = static_cast<std::size_t>(s.left);
                      return bimodule_relation(b, detail::pointers(xs, 0, l), xs[l],
                                               detail::pointers(xs, l + 1, xs.size()));
                    }};
  scan.two_string = true;
  return scan_relations(scan, b.ring(), bound);
}

inline int homomorphism_relation_arity(const AInftyHomomorphism& f) {
  const int kf = f.ops().max_total();
  const int k1 = f.source()->ops().max_total();
  const int k2 = f.target()->ops().max_total();
  const int km = f.source()->algebra()->ops().empty() ? 0 : f.source()->algebra()->ops().max_total();
  return std::max({0, kf + k1, kf + k2, kf + km - 1});
}

/// Checks source and target modules first; their failures are returned as is.
inline CheckResult check_homomorphism(const AInftyHomomorphism& f, const Rational& bound) {
  detail::require_bound(f.ring(), bound);
  if (auto c = check_module_relations(*f.source(), bound)) return c;
  if (auto c = check_module_relations(*f.target(), bound)) return c;
  RelationScan scan{f.name(),
                    detail::single_string(homomorphism_relation_arity(f)),
                    [&](Signature s) { return f.layout(s); },
                    [](Signature s) {
                      std::vector<bool> sep(static_cast<std::size_t>(s.total()) + 1, false);
                      sep[0] = true;
                      return sep;
                    },
                    [&](Signature, const std::vector<Element>& xs) {
                      return homomorphism_relation(f, xs[0], detail::pointers(xs, 1, xs.size()));
                    }};
  return scan_relations(scan, f.ring(), bound);
}

}  // namespace ainf
