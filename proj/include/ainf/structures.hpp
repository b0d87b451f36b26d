#pragma once

/**
 * @file structures.hpp
 * @brief Gapped filtered A-infinity algebras, right modules, bimodules and
 *        homomorphisms of right modules, as bases plus operation tables.
 *
 * Slot layouts (input bases in order) per signature:
 *   algebra       m_k           (k,0)    C^k                     -> C
 *   right module  n_k(y; x)     (k,0)    D, C^k                  -> D
 *   bimodule      n_{k1,k2}     (k1,k2)  C1^k1, P, C2^k2         -> P
 *   homomorphism  phi_k(y; x)   (k,0)    D1, C^k                 -> D2
 */

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "ainf/table.hpp"

namespace ainf {

namespace detail {

inline void require_basis(const Element& x, const BasisPtr& basis, const std::string& what) {
  if (!same_basis(x.basis(), basis)) {
    throw IncompatibleError(what + " expects an element of " + basis->name() + ", got " + x.basis()->name());
  }
}

inline void require_ring(const TruncationPtr& a, const TruncationPtr& b, const std::string& what) {
  if (!same_truncation(a, b)) throw IncompatibleError(what + ": tables over different truncations");
}

}  // namespace detail

class FilteredAlgebra {
 public:
  FilteredAlgebra(std::string name, BasisPtr basis, GappedOperationTable ops)
      : name_(std::move(name)), basis_(std::move(basis)), ops_(std::move(ops)) {
    for (const auto& [sig, m] : ops_.by_signature()) {
      if (sig.right != 0) throw ValidationError(name_ + ": algebra operations take a single string of inputs");
    }
    validate_slots(ops_, name_, [this](Signature s) { return layout(s); }, basis_);
  }

  const std::string& name() const noexcept { return name_; }
  const BasisPtr& basis() const noexcept { return basis_; }
  const TruncationPtr& ring() const noexcept { return ops_.ring(); }
  const GappedOperationTable& ops() const noexcept { return ops_; }

  SlotLayout layout(Signature s) const { return SlotLayout(static_cast<std::size_t>(s.left), basis_); }

  /// m_k(x_1, ..., x_k)
  Element m(const Inputs& xs) const {
    return evaluate(ops_, Signature{static_cast<int>(xs.size()), 0}, xs, basis_);
  }

  Element zero() const { return Element(basis_, ring()); }

 private:
  std::string name_;
  BasisPtr basis_;
  GappedOperationTable ops_;
};

using AlgebraPtr = std::shared_ptr<const FilteredAlgebra>;

class FilteredRightModule {
 public:
  FilteredRightModule(std::string name, BasisPtr basis, AlgebraPtr algebra, GappedOperationTable ops)
      : name_(std::move(name)), basis_(std::move(basis)), algebra_(std::move(algebra)), ops_(std::move(ops)) {
    detail::require_ring(algebra_->ring(), ops_.ring(), name_);
    for (const auto& [sig, m] : ops_.by_signature()) {
      if (sig.right != 0) throw ValidationError(name_ + ": module operations take a single string of inputs");
    }
    validate_slots(ops_, name_, [this](Signature s) { return layout(s); }, basis_);
  }

  const std::string& name() const noexcept { return name_; }
  const BasisPtr& basis() const noexcept { return basis_; }
  const AlgebraPtr& algebra() const noexcept { return algebra_; }
  const TruncationPtr& ring() const noexcept { return ops_.ring(); }
  const GappedOperationTable& ops() const noexcept { return ops_; }

  SlotLayout layout(Signature s) const {
    SlotLayout out{basis_};
    out.insert(out.end(), static_cast<std::size_t>(s.left), algebra_->basis());
    return out;
  }

  /// n_k(y; x_1, ..., x_k)
  Element n(const Element& y, const Inputs& xs) const {
    Inputs all{&y};
    all.insert(all.end(), xs.begin(), xs.end());
    return evaluate(ops_, Signature{static_cast<int>(xs.size()), 0}, all, basis_);
  }

  Element zero() const { return Element(basis_, ring()); }

 private:
  std::string name_;
  BasisPtr basis_;
  AlgebraPtr algebra_;
  GappedOperationTable ops_;
};

using ModulePtr = std::shared_ptr<const FilteredRightModule>;

class FilteredBimodule {
 public:
  FilteredBimodule(std::string name, BasisPtr basis, AlgebraPtr left, AlgebraPtr right, GappedOperationTable ops)
      : name_(std::move(name)),
        basis_(std::move(basis)),
        left_(std::move(left)),
        right_(std::move(right)),
        ops_(std::move(ops)) {
    detail::require_ring(left_->ring(), ops_.ring(), name_);
    detail::require_ring(right_->ring(), ops_.ring(), name_);
    validate_slots(ops_, name_, [this](Signature s) { return layout(s); }, basis_);
  }

  const std::string& name() const noexcept { return name_; }
  const BasisPtr& basis() const noexcept { return basis_; }
  const AlgebraPtr& left_algebra() const noexcept { return left_; }
  const AlgebraPtr& right_algebra() const noexcept { return right_; }
  const TruncationPtr& ring() const noexcept { return ops_.ring(); }
  const GappedOperationTable& ops() const noexcept { return ops_; }

  SlotLayout layout(Signature s) const {
    SlotLayout out(static_cast<std::size_t>(s.left), left_->basis());
    out.push_back(basis_);
    out.insert(out.end(), static_cast<std::size_t>(s.right), right_->basis());
    return out;
  }

  /// n_{k1,k2}(x^(1)_1..x^(1)_k1; y; x^(2)_1..x^(2)_k2)
  Element n(const Inputs& left, const Element& y, const Inputs& right) const {
    Inputs all = left;
    all.push_back(&y);
    all.insert(all.end(), right.begin(), right.end());
    return evaluate(ops_, Signature{static_cast<int>(left.size()), static_cast<int>(right.size())}, all, basis_);
  }

  Element zero() const { return Element(basis_, ring()); }

 private:
  std::string name_;
  BasisPtr basis_;
  AlgebraPtr left_;
  AlgebraPtr right_;
  GappedOperationTable ops_;
};

using BimodulePtr = std::shared_ptr<const FilteredBimodule>;

/// Same basis and identical tables.
inline bool same_algebra(const FilteredAlgebra& a, const FilteredAlgebra& b) {
  return same_basis(a.basis(), b.basis()) && a.ops() == b.ops();
}

/// Homomorphism of right modules over one algebra. Every component phi_k
/// takes the module input y, so there is no constant term: the structure is
/// strict by construction.
class AInftyHomomorphism {
 public:
  AInftyHomomorphism(std::string name, ModulePtr source, ModulePtr target, GappedOperationTable ops)
      : name_(std::move(name)), source_(std::move(source)), target_(std::move(target)), ops_(std::move(ops)) {
    if (!same_algebra(*source_->algebra(), *target_->algebra())) {
      throw IncompatibleError(name_ + ": source and target are modules over different algebras");
    }
    detail::require_ring(source_->ring(), ops_.ring(), name_);
    for (const auto& [sig, m] : ops_.by_signature()) {
      if (sig.right != 0) throw ValidationError(name_ + ": homomorphism components take a single string of inputs");
    }
    validate_slots(ops_, name_, [this](Signature s) { return layout(s); }, target_->basis());
  }

  const std::string& name() const noexcept { return name_; }
  const ModulePtr& source() const noexcept { return source_; }
  const ModulePtr& target() const noexcept { return target_; }
  const TruncationPtr& ring() const noexcept { return ops_.ring(); }
  const GappedOperationTable& ops() const noexcept { return ops_; }

  SlotLayout layout(Signature s) const {
    SlotLayout out{source_->basis()};
    out.insert(out.end(), static_cast<std::size_t>(s.left), source_->algebra()->basis());
    return out;
  }

  /// phi_k(y; x_1, ..., x_k)
  Element phi(const Element& y, const Inputs& xs) const {
    Inputs all{&y};
    all.insert(all.end(), xs.begin(), xs.end());
    return evaluate(ops_, Signature{static_cast<int>(xs.size()), 0}, all, target_->basis());
  }

 private:
  std::string name_;
  ModulePtr source_;
  ModulePtr target_;
  GappedOperationTable ops_;
};

using HomomorphismPtr = std::shared_ptr<const AInftyHomomorphism>;

}  // namespace ainf
