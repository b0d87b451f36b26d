#pragma once

/**
 * @file lincomb.hpp
 * @brief Free Lambda_0-modules on named bases and Lambda_0-linear maps between them.
 */

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ainf/error.hpp"
#include "ainf/novikov.hpp"

namespace ainf {

using Index = std::uint32_t;

/// Ordered list of distinct generator names, optionally graded mod N.
class Basis {
 public:
  Basis(std::string name, std::vector<std::string> generators)
      : name_(std::move(name)), generators_(std::move(generators)) {
    for (Index i = 0; i < generators_.size(); ++i) {
      if (!lookup_.emplace(generators_[i], i).second) {
        throw ValidationError("duplicate generator '" + generators_[i] + "' in basis " + name_);
      }
    }
  }

  const std::string& name() const noexcept { return name_; }
  std::size_t size() const noexcept { return generators_.size(); }
  const std::string& generator(Index i) const { return generators_.at(i); }
  const std::vector<std::string>& generators() const noexcept { return generators_; }

  std::optional<Index> find(const std::string& generator) const {
    auto it = lookup_.find(generator);
    if (it == lookup_.end()) return std::nullopt;
    return it->second;
  }

  Index index(const std::string& generator) const {
    auto i = find(generator);
    if (!i) throw ValidationError("no generator '" + generator + "' in basis " + name_);
    return *i;
  }

  /// Degrees modulo `modulus` (modulus 0: integer degrees). Grading is only
  /// ever used for reporting.
  void set_grading(int modulus, std::vector<int> degrees) {
    if (modulus < 0) throw ValidationError("grading modulus must be non-negative");
    if (degrees.size() != generators_.size()) {
      throw ValidationError("basis " + name_ + ": every generator needs a degree");
    }
    if (modulus > 0) {
      for (auto& d : degrees) d = ((d % modulus) + modulus) % modulus;
    }
    modulus_ = modulus;
    degrees_ = std::move(degrees);
  }

  bool graded() const noexcept { return degrees_.has_value(); }
  int modulus() const noexcept { return modulus_; }
  int degree(Index i) const { return degrees_.value().at(i); }
  const std::vector<int>& degrees() const { return degrees_.value(); }

  /// Same generator names in the same order.
  bool same_generators(const Basis& o) const { return generators_ == o.generators_; }

 private:
  std::string name_;
  std::vector<std::string> generators_;
  std::map<std::string, Index> lookup_;
  int modulus_ = 0;
  std::optional<std::vector<int>> degrees_;
};

using BasisPtr = std::shared_ptr<const Basis>;

inline BasisPtr make_basis(std::string name, std::vector<std::string> generators) {
  return std::make_shared<const Basis>(std::move(name), std::move(generators));
}

inline bool same_basis(const BasisPtr& a, const BasisPtr& b) {
  return a == b || (a && b && a->name() == b->name() && a->same_generators(*b));
}

/// Lambda_0-linear combination of basis generators (dense coefficient vector).
class Element {
 public:
  Element(BasisPtr basis, TruncationPtr ring)
      : basis_(std::move(basis)), ring_(std::move(ring)), coeffs_(basis_->size(), NovikovScalar(ring_)) {}

  static Element zero(BasisPtr basis, TruncationPtr ring) { return Element(std::move(basis), std::move(ring)); }

  /// T^level * generator
  static Element generator(BasisPtr basis, TruncationPtr ring, Index i, const Rational& level = 0) {
    Element e(std::move(basis), std::move(ring));
    e.coeffs_.at(i) = NovikovScalar::monomial(e.ring_, level);
    return e;
  }

  /// Sum of T^level * generator over a Z/2 vector of generator indices.
  static Element from_indices(BasisPtr basis, TruncationPtr ring, const std::vector<Index>& gens,
                              const Rational& level = 0) {
    Element e(std::move(basis), std::move(ring));
    const auto mono = NovikovScalar::monomial(e.ring_, level);
    for (Index g : gens) e.coeffs_.at(g) += mono;
    return e;
  }

  const BasisPtr& basis() const noexcept { return basis_; }
  const TruncationPtr& ring() const noexcept { return ring_; }
  std::size_t size() const noexcept { return coeffs_.size(); }

  const NovikovScalar& operator[](Index i) const { return coeffs_[i]; }
  const NovikovScalar& coeff(Index i) const { return coeffs_.at(i); }
  void set(Index i, NovikovScalar s) { coeffs_.at(i) = std::move(s); }
  void add(Index i, const NovikovScalar& s) { coeffs_.at(i) += s; }

  bool is_zero() const {
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](const auto& c) { return c.is_zero(); });
  }

  Valuation valuation() const {
    Valuation v;
    for (const auto& c : coeffs_) v = std::min(v, c.valuation());
    return v;
  }

  /// Z/2 components of T^level: generators whose coefficient contains T^level.
  std::vector<Index> level_component(const Rational& level) const {
    std::vector<Index> out;
    for (Index i = 0; i < coeffs_.size(); ++i) {
      if (!coeffs_[i].coefficient(level).is_zero()) out.push_back(i);
    }
    return out;
  }

  /// Reduction mod Lambda_+.
  std::vector<Index> residue() const { return level_component(Rational(0)); }

  /// All exponents occurring in any coefficient, ascending.
  std::vector<Rational> levels() const {
    std::vector<Rational> out;
    for (const auto& c : coeffs_) {
      for (const auto& t : c.terms()) out.push_back(t.first);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  Element operator+(const Element& o) const {
    check_compatible(o);
    Element out = *this;
    for (Index i = 0; i < coeffs_.size(); ++i) out.coeffs_[i] += o.coeffs_[i];
    return out;
  }
  Element& operator+=(const Element& o) {
    check_compatible(o);
    for (Index i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
    return *this;
  }

  Element scaled(const NovikovScalar& s) const {
    Element out = *this;
    for (auto& c : out.coeffs_) c = c * s;
    return out;
  }

  Element truncated(const Rational& bound) const {
    Element out = *this;
    for (auto& c : out.coeffs_) c = c.truncated(bound);
    return out;
  }

  friend bool operator==(const Element& a, const Element& b) {
    return same_basis(a.basis_, b.basis_) && a.coeffs_ == b.coeffs_;
  }

 private:
  void check_compatible(const Element& o) const {
    if (!same_basis(basis_, o.basis_)) {
      throw IncompatibleError("elements over different bases " + basis_->name() + " and " + o.basis_->name());
    }
  }

  BasisPtr basis_;
  TruncationPtr ring_;
  std::vector<NovikovScalar> coeffs_;
};

/// "0", or "T^a * g + T^b * h" sorted by level then basis order.
inline std::string to_string(const Element& e) {
  std::vector<std::pair<Rational, Index>> monomials;
  for (Index i = 0; i < e.size(); ++i) {
    for (const auto& t : e[i].terms()) monomials.emplace_back(t.first, i);
  }
  if (monomials.empty()) return "0";
  std::sort(monomials.begin(), monomials.end());
  std::string out;
  for (const auto& [level, i] : monomials) {
    if (!out.empty()) out += " + ";
    out += "T^" + to_string(level) + " * " + e.basis()->generator(i);
  }
  return out;
}

/// Lambda_0-linear map, stored as a dense matrix (rows: codomain, columns: domain).
class LinearMap {
 public:
  LinearMap(BasisPtr domain, BasisPtr codomain, TruncationPtr ring)
      : domain_(std::move(domain)),
        codomain_(std::move(codomain)),
        ring_(std::move(ring)),
        entries_(domain_->size() * codomain_->size(), NovikovScalar(ring_)) {}

  static LinearMap zero(BasisPtr domain, BasisPtr codomain, TruncationPtr ring) {
    return LinearMap(std::move(domain), std::move(codomain), std::move(ring));
  }

  static LinearMap identity(BasisPtr basis, TruncationPtr ring) {
    LinearMap m(basis, basis, std::move(ring));
    for (Index i = 0; i < basis->size(); ++i) m.at(i, i) = NovikovScalar::one(m.ring_);
    return m;
  }

  /// Map whose j-th column is columns[j].
  static LinearMap from_columns(BasisPtr domain, const std::vector<Element>& columns) {
    if (columns.size() != domain->size()) throw IncompatibleError("column count does not match domain");
    if (columns.empty()) throw IncompatibleError("from_columns needs a codomain; use zero()");
    LinearMap m(domain, columns.front().basis(), columns.front().ring());
    for (Index j = 0; j < columns.size(); ++j) m.set_column(j, columns[j]);
    return m;
  }

  const BasisPtr& domain() const noexcept { return domain_; }
  const BasisPtr& codomain() const noexcept { return codomain_; }
  const TruncationPtr& ring() const noexcept { return ring_; }
  std::size_t rows() const noexcept { return codomain_->size(); }
  std::size_t cols() const noexcept { return domain_->size(); }

  NovikovScalar& at(Index row, Index col) { return entries_.at(row * cols() + col); }
  const NovikovScalar& at(Index row, Index col) const { return entries_.at(row * cols() + col); }

  Element column(Index col) const {
    Element e(codomain_, ring_);
    for (Index r = 0; r < rows(); ++r) e.set(r, at(r, col));
    return e;
  }

  void set_column(Index col, const Element& e) {
    if (!same_basis(e.basis(), codomain_)) throw IncompatibleError("column is not in the codomain");
    for (Index r = 0; r < rows(); ++r) at(r, col) = e[r];
  }

  Element apply(const Element& x) const {
    if (!same_basis(x.basis(), domain_)) {
      throw IncompatibleError("cannot apply map on " + domain_->name() + " to element of " + x.basis()->name());
    }
    Element out(codomain_, ring_);
    for (Index c = 0; c < cols(); ++c) {
      if (x[c].is_zero()) continue;
      for (Index r = 0; r < rows(); ++r) {
        if (!at(r, c).is_zero()) out.add(r, at(r, c) * x[c]);
      }
    }
    return out;
  }

  bool is_zero() const {
    return std::all_of(entries_.begin(), entries_.end(), [](const auto& s) { return s.is_zero(); });
  }

  /// Z/2 matrix at T = 0, row-major.
  std::vector<std::vector<bool>> residue() const {
    std::vector<std::vector<bool>> out(rows(), std::vector<bool>(cols(), false));
    for (Index r = 0; r < rows(); ++r) {
      for (Index c = 0; c < cols(); ++c) out[r][c] = !at(r, c).residue().is_zero();
    }
    return out;
  }

  LinearMap operator+(const LinearMap& o) const {
    if (!same_basis(domain_, o.domain_) || !same_basis(codomain_, o.codomain_)) {
      throw IncompatibleError("sum of maps with different bases");
    }
    LinearMap out = *this;
    for (std::size_t i = 0; i < entries_.size(); ++i) out.entries_[i] += o.entries_[i];
    return out;
  }

  friend bool operator==(const LinearMap& a, const LinearMap& b) {
    return same_basis(a.domain_, b.domain_) && same_basis(a.codomain_, b.codomain_) && a.entries_ == b.entries_;
  }

 private:
  BasisPtr domain_;
  BasisPtr codomain_;
  TruncationPtr ring_;
  std::vector<NovikovScalar> entries_;
};

/// g o f, truncated.
inline LinearMap compose(const LinearMap& g, const LinearMap& f) {
  if (!same_basis(f.codomain(), g.domain())) {
    throw IncompatibleError("cannot compose: codomain " + f.codomain()->name() + " is not domain " +
                            g.domain()->name());
  }
  LinearMap out(f.domain(), g.codomain(), f.ring());
  for (Index i = 0; i < g.rows(); ++i) {
    for (Index k = 0; k < g.cols(); ++k) {
      const auto& gik = g.at(i, k);
      if (gik.is_zero()) continue;
      for (Index j = 0; j < f.cols(); ++j) {
        const auto& fkj = f.at(k, j);
        if (!fkj.is_zero()) out.at(i, j) += gik * fkj;
      }
    }
  }
  return out;
}

}  // namespace ainf
