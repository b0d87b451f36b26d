#pragma once

/**
 * @file pairing.hpp
 * @brief Floer complexes given by weighted boundary counts, gluing tensors
 *        Phi_{k1,k2} and the chain map they induce.
 *
 * A gluing tensor reads (y1; x1_1..x1_k1; a; y2; x2_1..x2_k2) with y1 in a
 * right module D1 over C1, a in a bimodule P over (C1, C2), y2 in a module D2
 * and x2 in C2, and outputs into the Floer complex F. Its relation is
 *
 *   d(Phi(y1; X1; a; y2; X2))
 *     = sum Phi(y1; x1_1..x1_i; n_P(x1_{i+1}..x1_k1; a; x2_1..x2_j); y2; x2_{j+1}..)
 *     + sum Phi(n_D1(y1; x1_1..x1_l); x1_{l+1}..; a; y2; X2)
 *     + sum Phi(y1; X1; a; n_D2(y2; x2_k2, .., x2_{l+1}); x2_1..x2_l)
 *     + sum Phi(.., m_C1(..), ..) + sum Phi(.., m_C2(..), ..)
 *
 * The third line feeds the tail of the second string to D2 in reverse order,
 * so D2 is a right module over the opposite algebra of C2.
 */

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ainf/gf2.hpp"
#include "ainf/homology.hpp"
#include "ainf/mc.hpp"

namespace ainf {

struct BoundaryWeight {
  Rational energy;
  int count = 1;
};

/// Free complex over Lambda_0 whose boundary is given by counts
/// #M(a_-, a_+; E): d[a_-] = sum T^E #M [a_+].
class FloerComplexData {
 public:
  using Weights = std::map<std::pair<Index, Index>, std::vector<BoundaryWeight>>;

  FloerComplexData(std::string name, BasisPtr basis, TruncationPtr ring, Weights weights)
      : name_(std::move(name)), basis_(std::move(basis)), ring_(std::move(ring)), weights_(std::move(weights)) {
    for (const auto& [pair, list] : weights_) {
      const auto [from, to] = pair;
      if (from >= basis_->size() || to >= basis_->size()) throw ValidationError(name_ + ": weight index out of range");
      for (const auto& w : list) {
        if (!ring_->is_level(w.energy)) {
          throw ValidationError(name_ + ": energy " + to_string(w.energy) + " is not a monoid level below the cutoff");
        }
        if (w.energy == 0 && from != to) {
          throw ValidationError(name_ + ": weight " + basis_->generator(from) + " -> " + basis_->generator(to) +
                                " has energy 0");
        }
      }
    }
  }

  const std::string& name() const noexcept { return name_; }
  const BasisPtr& basis() const noexcept { return basis_; }
  const TruncationPtr& ring() const noexcept { return ring_; }
  const Weights& weights() const noexcept { return weights_; }

  /// Boundary matrix without the square-zero check.
  LinearMap boundary() const {
    LinearMap d(basis_, basis_, ring_);
    for (const auto& [pair, list] : weights_) {
      for (const auto& w : list) {
        if (w.count % 2 != 0) d.at(pair.second, pair.first) += NovikovScalar::monomial(ring_, w.energy);
      }
    }
    return d;
  }

 private:
  std::string name_;
  BasisPtr basis_;
  TruncationPtr ring_;
  Weights weights_;
};

using FloerPtr = std::shared_ptr<const FloerComplexData>;

/// Boundary matrix; throws NotAComplexError if it does not square to zero.
inline LinearMap realize_floer_boundary(const FloerComplexData& f) {
  LinearMap d = f.boundary();
  require_square_zero(d);
  return d;
}

class GluingTensor {
 public:
  GluingTensor(std::string name, ModulePtr module1, BimodulePtr pair, ModulePtr module2, FloerPtr floer,
               GappedOperationTable ops)
      : name_(std::move(name)),
        module1_(std::move(module1)),
        pair_(std::move(pair)),
        module2_(std::move(module2)),
        floer_(std::move(floer)),
        ops_(std::move(ops)) {
    if (!same_algebra(*module1_->algebra(), *pair_->left_algebra())) {
      throw IncompatibleError(name_ + ": " + module1_->name() + " is not a module over the left algebra of " +
                              pair_->name());
    }
    if (!same_algebra(*module2_->algebra(), *opposite_algebra(*pair_->right_algebra()))) {
      throw IncompatibleError(name_ + ": " + module2_->name() + " is not a module over the opposite of the right " +
                              "algebra of " + pair_->name());
    }
    for (const auto& ring : {module1_->ring(), pair_->ring(), module2_->ring(), floer_->ring()}) {
      detail::require_ring(ring, ops_.ring(), name_);
    }
    validate_slots(ops_, name_, [this](Signature s) { return layout(s); }, floer_->basis());
  }

  const std::string& name() const noexcept { return name_; }
  const ModulePtr& module1() const noexcept { return module1_; }
  const BimodulePtr& pair() const noexcept { return pair_; }
  const ModulePtr& module2() const noexcept { return module2_; }
  const FloerPtr& floer() const noexcept { return floer_; }
  const TruncationPtr& ring() const noexcept { return ops_.ring(); }
  const GappedOperationTable& ops() const noexcept { return ops_; }

  /// D1, C1^k1, P, D2, C2^k2
  SlotLayout layout(Signature s) const {
    SlotLayout out{module1_->basis()};
    out.insert(out.end(), static_cast<std::size_t>(s.left), pair_->left_algebra()->basis());
    out.push_back(pair_->basis());
    out.push_back(module2_->basis());
    out.insert(out.end(), static_cast<std::size_t>(s.right), pair_->right_algebra()->basis());
    return out;
  }

  /// Phi_{k1,k2}(y1; x1..; a; y2; x2..)
  Element phi(const Element& y1, const Inputs& x1, const Element& a, const Element& y2, const Inputs& x2) const {
    Inputs all{&y1};
    all.insert(all.end(), x1.begin(), x1.end());
    all.push_back(&a);
    all.push_back(&y2);
    all.insert(all.end(), x2.begin(), x2.end());
    return evaluate(ops_, Signature{static_cast<int>(x1.size()), static_cast<int>(x2.size())}, all,
                    floer_->basis());
  }

  Element zero() const { return Element(floer_->basis(), ring()); }

 private:
  std::string name_;
  ModulePtr module1_;
  BimodulePtr pair_;
  ModulePtr module2_;
  FloerPtr floer_;
  GappedOperationTable ops_;
};

using GluingPtr = std::shared_ptr<const GluingTensor>;

/// Both sides of the gluing relation, summed.
inline Element pairing_relation(const GluingTensor& g, const LinearMap& floer_d, const Element& y1, const Inputs& x1,
                                const Element& a, const Element& y2, const Inputs& x2) {
  const auto& pair = *g.pair();
  const auto& m1 = *g.module1();
  const auto& m2 = *g.module2();
  const std::size_t k1 = x1.size();
  const std::size_t k2 = x2.size();
  Element acc = floer_d.apply(g.phi(y1, x1, a, y2, x2));
  for (std::size_t i = 0; i <= k1; ++i) {
    for (std::size_t j = 0; j <= k2; ++j) {
      const Element inner = pair.n(slice(x1, i, k1), a, slice(x2, 0, j));
      if (!inner.is_zero()) acc += g.phi(y1, slice(x1, 0, i), inner, y2, slice(x2, j, k2));
    }
  }
  for (std::size_t l = 0; l <= k1; ++l) {
    const Element inner = m1.n(y1, slice(x1, 0, l));
    if (!inner.is_zero()) acc += g.phi(inner, slice(x1, l, k1), a, y2, x2);
  }
  for (std::size_t l = 0; l <= k2; ++l) {
    Inputs tail = slice(x2, l, k2);
    std::reverse(tail.begin(), tail.end());
    const Element inner = m2.n(y2, tail);
    if (!inner.is_zero()) acc += g.phi(y1, x1, a, inner, slice(x2, 0, l));
  }
  add_algebra_insertions(acc, *pair.left_algebra(), x1,
                         [&](const Inputs& outer) { return g.phi(y1, outer, a, y2, x2); });
  add_algebra_insertions(acc, *pair.right_algebra(), x2,
                         [&](const Inputs& outer) { return g.phi(y1, x1, a, y2, outer); });
  return acc;
}

inline int pairing_relation_arity(const GluingTensor& g) {
  const auto arity = [](const GappedOperationTable& t) { return t.empty() ? 0 : t.max_total(); };
  const int kf = arity(g.ops());
  return std::max({0, kf + arity(g.pair()->ops()), kf + arity(g.module1()->ops()), kf + arity(g.module2()->ops()),
                   kf + arity(g.pair()->left_algebra()->ops()) - 1, kf + arity(g.pair()->right_algebra()->ops()) - 1});
}

/// Checks both modules, the bimodule and the Floer boundary first; module and
/// bimodule failures are returned as is, a non-square-zero boundary throws.
inline CheckResult check_pairing_relation(const GluingTensor& g, const Rational& bound) {
  detail::require_bound(g.ring(), bound);
  if (auto c = check_module_relations(*g.module1(), bound)) return c;
  if (auto c = check_module_relations(*g.module2(), bound)) return c;
  if (auto c = check_bimodule_relations(*g.pair(), bound)) return c;
  const LinearMap d = realize_floer_boundary(*g.floer());
  if (g.ops().empty()) return std::nullopt;
  RelationScan scan{g.name(),
                    detail::two_strings(pairing_relation_arity(g)),
                    [&](Signature s) { return g.layout(s); },
                    [](Signature s) {
                      const auto k1 = static_cast<std::size_t>(s.left);
                      std::vector<bool> sep(static_cast<std::size_t>(s.total()) + 3, false);
                      sep[0] = true;
                      if (k1 > 0) sep[k1] = true;
                      sep[k1 + 1] = true;
                      sep[k1 + 2] = true;
                      return sep;
                    },
                    [&](Signature s, const std::vector<Element>& xs) {
                      const auto k1 = static_cast<std::size_t>(s.left);
                      return pairing_relation(g, d, xs[0], detail::pointers(xs, 1, k1 + 1), xs[k1 + 1], xs[k1 + 2],
                                              detail::pointers(xs, k1 + 3, xs.size()));
                    }};
  scan.two_string = true;
  return scan_relations(scan, g.ring(), bound);
}

/// Phi(a) = sum Phi(1_1; b1, .., b1; a; 1_2; b2, .., b2), without checks.
inline LinearMap gluing_map_unchecked(const GluingTensor& g, const Element& one1, const Element& b1,
                                      const Element& one2, const Element& b2) {
  detail::require_basis(one1, g.module1()->basis(), g.name());
  detail::require_basis(one2, g.module2()->basis(), g.name());
  detail::require_twist(b1, g.pair()->left_algebra()->basis(), g.name());
  detail::require_twist(b2, g.pair()->right_algebra()->basis(), g.name());
  const auto groups = [](Signature s) {
    std::vector<int> out{-1};
    out.insert(out.end(), static_cast<std::size_t>(s.left), 0);
    out.push_back(-1);
    out.push_back(-1);
    out.insert(out.end(), static_cast<std::size_t>(s.right), 1);
    return out;
  };
  const auto full = twist_table(g.ops(), groups, {&b1, &b2}, true);
  const BasisPtr& source = g.pair()->basis();
  LinearMap out(source, g.floer()->basis(), g.ring());
  for (Index c = 0; c < source->size(); ++c) {
    const Element a = Element::generator(source, g.ring(), c);
    out.set_column(c, evaluate(full, Signature{0, 0}, Inputs{&one1, &a, &one2}, g.floer()->basis()));
  }
  return out;
}

/// The induced map from (P, delta_{b1,b2}) to (F, d), verified to be a chain
/// map below the cutoff.
inline LinearMap induced_gluing_map(const GluingTensor& g, const CyclicElementCertificate& cert1, const Element& b1,
                                    const CyclicElementCertificate& cert2, const Element& b2) {
  if (cert1.module != g.module1() || cert2.module != g.module2()) {
    throw IncompatibleError(g.name() + ": certificates are for other modules");
  }
  const LinearMap phi = gluing_map_unchecked(g, cert1.one, b1, cert2.one, b2);
  const LinearMap delta = bimodule_twisted_differential(*g.pair(), b1, b2);
  const LinearMap d = realize_floer_boundary(*g.floer());
  const LinearMap lhs = compose(d, phi);
  const LinearMap rhs = compose(phi, delta);
  std::optional<std::pair<Rational, Index>> worst;
  for (Index c = 0; c < phi.cols(); ++c) {
    const Valuation v = (lhs.column(c) + rhs.column(c)).valuation();
    if (!v.is_infinite() && (!worst || v.value() < worst->first)) worst = std::make_pair(v.value(), c);
  }
  if (worst) {
    throw InconsistencyError(g.name() + ": induced map is not a chain map, residual at level " +
                             to_string(worst->first) + " on " + phi.domain()->generator(worst->second));
  }
  return phi;
}

/// Checks that a map between bases with the same generator names reduces to
/// the identity at T = 0; returns a description of the failure otherwise.
inline std::optional<std::string> leading_term_failure(const LinearMap& phi) {
  const auto& source = *phi.domain();
  const auto& target = *phi.codomain();
  if (source.size() != target.size()) {
    return "bases " + source.name() + " and " + target.name() + " have different sizes";
  }
  std::vector<Index> image(source.size());
  for (Index c = 0; c < source.size(); ++c) {
    const auto r = target.find(source.generator(c));
    if (!r) return "generator " + source.generator(c) + " of " + source.name() + " is missing from " + target.name();
    image[c] = *r;
  }
  const Gf2Matrix residue = residue_matrix(phi);
  if (residue.rank() < source.size()) {
    return "residue map has rank " + std::to_string(residue.rank()) + " of " + std::to_string(source.size());
  }
  for (Index c = 0; c < source.size(); ++c) {
    for (Index r = 0; r < target.size(); ++r) {
      if (residue.get(r, c) != (r == image[c])) {
        return "residue map differs from the identity at " + source.generator(c);
      }
    }
  }
  return std::nullopt;
}

}  // namespace ainf
