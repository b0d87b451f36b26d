#pragma once

/**
 * @file novikov.hpp
 * @brief Truncated universal Novikov ring over a coefficient field.
 *
 * A scalar is a finite sum  sum_i a_i T^{lambda_i}  with exact rational
 * exponents 0 <= lambda_i < cutoff. Products whose exponent reaches the cutoff
 * are dropped, so every scalar is an element of Lambda_0 / T^E Lambda_0 and
 * truncation commutes with the ring operations.
 *
 * Exponents come from a discrete monoid G generated by finitely many positive
 * rationals. Every scalar carries a pointer to its Truncation (monoid plus
 * cutoff) and operations between scalars of different truncations throw.
 */

#include <algorithm>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ainf/error.hpp"
#include "ainf/rational.hpp"

namespace ainf {

/// Submonoid of the non-negative rationals generated by finitely many
/// positive energy units.
class DiscreteMonoid {
 public:
  DiscreteMonoid() = default;

  explicit DiscreteMonoid(std::vector<Rational> generators) {
    for (const auto& g : generators) {
      if (g <= 0) throw ValidationError("monoid generator must be positive, got " + to_string(g));
    }
    std::sort(generators.begin(), generators.end());
    generators.erase(std::unique(generators.begin(), generators.end()), generators.end());
    generators_ = std::move(generators);
  }

  const std::vector<Rational>& generators() const noexcept { return generators_; }

  /// G intersected with [0, bound), sorted ascending; first element is 0.
  std::vector<Rational> levels(const Rational& bound) const {
    if (bound <= 0) throw ValidationError("level bound must be positive, got " + to_string(bound));
    std::set<Rational> found{Rational(0)};
    std::vector<Rational> frontier{Rational(0)};
    while (!frontier.empty()) {
      std::vector<Rational> next;
      for (const auto& base : frontier) {
        for (const auto& g : generators_) {
          Rational sum = base + g;
          if (sum < bound && found.insert(sum).second) next.push_back(sum);
        }
      }
      frontier = std::move(next);
    }
    return {found.begin(), found.end()};
  }

  /// Membership by bounded search over the generators.
  bool contains(const Rational& value) const {
    if (value < 0) return false;
    if (value == 0) return true;
    auto all = levels(value + 1);
    return std::binary_search(all.begin(), all.end(), value);
  }

  friend bool operator==(const DiscreteMonoid&, const DiscreteMonoid&) = default;

 private:
  std::vector<Rational> generators_;
};

/// Monoid plus cutoff; the ambient ring Lambda_0 / T^cutoff.
class Truncation {
 public:
  Truncation(DiscreteMonoid monoid, Rational cutoff) : monoid_(std::move(monoid)), cutoff_(cutoff) {
    if (cutoff_ <= 0) throw ValidationError("cutoff must be positive, got " + to_string(cutoff_));
    levels_ = monoid_.levels(cutoff_);
  }

  const DiscreteMonoid& monoid() const noexcept { return monoid_; }
  const Rational& cutoff() const noexcept { return cutoff_; }
  /// G intersected with [0, cutoff).
  const std::vector<Rational>& levels() const noexcept { return levels_; }

  bool is_level(const Rational& value) const {
    return std::binary_search(levels_.begin(), levels_.end(), value);
  }

  /// Smallest positive level, if any lies below the cutoff.
  std::optional<Rational> min_positive_level() const {
    if (levels_.size() < 2) return std::nullopt;
    return levels_[1];
  }

  friend bool operator==(const Truncation& a, const Truncation& b) {
    return a.cutoff_ == b.cutoff_ && a.monoid_ == b.monoid_;
  }

 private:
  DiscreteMonoid monoid_;
  Rational cutoff_;
  std::vector<Rational> levels_;
};

using TruncationPtr = std::shared_ptr<const Truncation>;

inline TruncationPtr make_truncation(std::vector<Rational> generators, Rational cutoff) {
  return std::make_shared<const Truncation>(DiscreteMonoid(std::move(generators)), cutoff);
}

inline bool same_truncation(const TruncationPtr& a, const TruncationPtr& b) {
  return a == b || (a && b && *a == *b);
}

/// The field with two elements.
struct Z2 {
  bool bit = false;

  constexpr Z2() = default;
  constexpr explicit Z2(bool b) : bit(b) {}
  static constexpr Z2 one() { return Z2(true); }
  static constexpr Z2 zero() { return Z2(false); }

  constexpr bool is_zero() const { return !bit; }
  constexpr Z2 inverse() const {
    if (!bit) throw NotAUnitError("zero is not invertible in Z/2");
    return *this;
  }
  constexpr Z2 operator+(Z2 o) const { return Z2(bit != o.bit); }
  constexpr Z2 operator-(Z2 o) const { return *this + o; }
  constexpr Z2 operator-() const { return *this; }
  constexpr Z2 operator*(Z2 o) const { return Z2(bit && o.bit); }
  friend constexpr bool operator==(Z2, Z2) = default;
};

/// Truncated power series  sum a_i T^{lambda_i}  over a coefficient field.
/// Terms are kept sorted by exponent with no zero coefficients.
template <class Field>
class Series {
 public:
  using Term = std::pair<Rational, Field>;

  Series() = default;
  explicit Series(TruncationPtr ring) : ring_(std::move(ring)) {}

  /// Builds a canonical series; exponents must lie in the monoid. Exponents at
  /// or above the cutoff are dropped and repeated exponents are summed.
  static Series from_terms(TruncationPtr ring, std::vector<Term> terms) {
    for (const auto& [e, c] : terms) {
      // exponents at or above the cutoff are dropped below, membership is moot
      if (e < 0 || (e < ring->cutoff() && !ring->is_level(e))) {
        throw ValidationError("exponent " + to_string(e) + " is not in the monoid");
      }
    }
    Series s(std::move(ring));
    s.terms_ = std::move(terms);
    s.normalize();
    return s;
  }

  static Series monomial(TruncationPtr ring, const Rational& exponent, Field coeff = Field::one()) {
    return from_terms(std::move(ring), {{exponent, coeff}});
  }
  static Series one(TruncationPtr ring) { return monomial(std::move(ring), Rational(0)); }
  static Series zero(TruncationPtr ring) { return Series(std::move(ring)); }

  const TruncationPtr& ring() const noexcept { return ring_; }
  const std::vector<Term>& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }

  /// Coefficient of T^exponent.
  Field coefficient(const Rational& exponent) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), exponent,
                               [](const Term& t, const Rational& e) { return t.first < e; });
    return (it != terms_.end() && it->first == exponent) ? it->second : Field::zero();
  }

  Valuation valuation() const {
    return terms_.empty() ? Valuation::infinite() : Valuation(terms_.front().first);
  }

  /// Reduction modulo Lambda_+ : the coefficient of T^0.
  Field residue() const { return coefficient(Rational(0)); }

  Series operator+(const Series& o) const {
    check_compatible(o);
    Series out(ring_);
    out.terms_.reserve(terms_.size() + o.terms_.size());
    auto a = terms_.begin();
    auto b = o.terms_.begin();
    while (a != terms_.end() || b != o.terms_.end()) {
      if (b == o.terms_.end() || (a != terms_.end() && a->first < b->first)) {
        out.terms_.push_back(*a++);
      } else if (a == terms_.end() || b->first < a->first) {
        out.terms_.push_back(*b++);
      } else {
        Field c = a->second + b->second;
        if (!c.is_zero()) out.terms_.emplace_back(a->first, c);
        ++a;
        ++b;
      }
    }
    return out;
  }

  Series operator-() const {
    Series out = *this;
    for (auto& t : out.terms_) t.second = -t.second;
    return out;
  }
  Series operator-(const Series& o) const { return *this + (-o); }

  Series operator*(const Series& o) const {
    check_compatible(o);
    Series out(ring_);
    if (terms_.empty() || o.terms_.empty()) return out;
    const Rational& cutoff = ring_->cutoff();
    for (const auto& [ea, ca] : terms_) {
      if (ea + o.terms_.front().first >= cutoff) break;
      for (const auto& [eb, cb] : o.terms_) {
        Rational e = ea + eb;
        if (e >= cutoff) break;
        out.terms_.emplace_back(e, ca * cb);
      }
    }
    out.normalize();
    return out;
  }

  Series& operator+=(const Series& o) { return *this = *this + o; }
  Series& operator*=(const Series& o) { return *this = *this * o; }

  /// Multiplication by T^shift (shift >= 0), truncated.
  Series shifted_up(const Rational& shift) const {
    Series out(ring_);
    for (const auto& [e, c] : terms_) {
      if (e + shift < ring_->cutoff()) out.terms_.emplace_back(e + shift, c);
    }
    return out;
  }

  /// Division by T^shift. Requires valuation >= shift. The quotient is a lift
  /// in Lambda_0 / T^cutoff; its exponents may leave the monoid G (they lie in
  /// the group generated by G), which is why this bypasses from_terms.
  Series shifted_down(const Rational& shift) const {
    if (!terms_.empty() && terms_.front().first < shift) {
      throw Error("cannot divide by T^" + to_string(shift) + ": valuation too small");
    }
    Series out(ring_);
    for (const auto& [e, c] : terms_) out.terms_.emplace_back(e - shift, c);
    return out;
  }

  /// Inverse of a unit (valuation 0) by the truncated geometric series.
  Series inverse() const {
    if (terms_.empty() || terms_.front().first != 0) {
      throw NotAUnitError("not a unit: valuation " + valuation().str() + " is not 0");
    }
    const Field lead_inv = terms_.front().second.inverse();
    Series normalized = *this * constant(lead_inv);
    // normalized = 1 + t with val(t) > 0; 1/(1+t) = sum (-t)^j.
    Series t = normalized - one(ring_);
    Series neg_t = -t;
    Series power = one(ring_);
    Series sum = one(ring_);
    while (true) {
      power = power * neg_t;
      if (power.is_zero()) break;
      sum += power;
    }
    return sum * constant(lead_inv);
  }

  /// Drops all exponents at or above `bound`.
  Series truncated(const Rational& bound) const {
    Series out(ring_);
    for (const auto& t : terms_) {
      if (t.first < bound) out.terms_.push_back(t);
    }
    return out;
  }

  friend bool operator==(const Series& a, const Series& b) {
    return same_truncation(a.ring_, b.ring_) && a.terms_ == b.terms_;
  }

 private:
  Series constant(Field c) const {
    Series s(ring_);
    if (!c.is_zero()) s.terms_.emplace_back(Rational(0), c);
    return s;
  }

  void check_compatible(const Series& o) const {
    if (!same_truncation(ring_, o.ring_)) {
      throw IncompatibleError("Novikov scalars over different truncations");
    }
  }

  void normalize() {
    const Rational& cutoff = ring_->cutoff();
    std::sort(terms_.begin(), terms_.end(),
              [](const Term& a, const Term& b) { return a.first < b.first; });
    std::vector<Term> merged;
    merged.reserve(terms_.size());
    for (const auto& t : terms_) {
      if (t.first >= cutoff) break;
      if (!merged.empty() && merged.back().first == t.first) {
        merged.back().second = merged.back().second + t.second;
      } else {
        merged.push_back(t);
      }
    }
    std::erase_if(merged, [](const Term& t) { return t.second.is_zero(); });
    terms_ = std::move(merged);
  }

  TruncationPtr ring_;
  std::vector<Term> terms_;
};

using NovikovScalar = Series<Z2>;

/// Z/2 scalar from a list of exponents (each coefficient is 1; repeats cancel).
inline NovikovScalar novikov(const TruncationPtr& ring, const std::vector<Rational>& exponents) {
  std::vector<NovikovScalar::Term> terms;
  terms.reserve(exponents.size());
  for (const auto& e : exponents) terms.emplace_back(e, Z2::one());
  return NovikovScalar::from_terms(ring, std::move(terms));
}

inline std::vector<Rational> exponents(const NovikovScalar& s) {
  std::vector<Rational> out;
  out.reserve(s.terms().size());
  for (const auto& t : s.terms()) out.push_back(t.first);
  return out;
}

/// "0", or "T^a + T^b + ..." with exponents ascending.
inline std::string to_string(const NovikovScalar& s) {
  if (s.is_zero()) return "0";
  std::string out;
  for (const auto& t : s.terms()) {
    if (!out.empty()) out += " + ";
    out += "T^" + to_string(t.first);
  }
  return out;
}

}  // namespace ainf
