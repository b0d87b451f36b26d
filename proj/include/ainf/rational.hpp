#pragma once

/**
 * @file rational.hpp
 * @brief Exact rational energies and the valuation type built on them.
 *
 * Energies and exponents are never floating point. Text form is "p/q" in
 * lowest terms with q > 0, or "p" when q = 1.
 */

#include <boost/rational.hpp>

#include <charconv>
#include <compare>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include "ainf/error.hpp"

namespace ainf {

/// Exact rational with value semantics. Arithmetic and normalization are
/// boost::rational's; comparisons are defined here because boost 1.74's
/// mixed rational/integer operator== recurses under C++20 rewritten
/// comparison rules.
class Rational {
 public:
  using Base = boost::rational<std::int64_t>;

  Rational() = default;
  Rational(std::int64_t n) : v_(n) {}  // NOLINT: integers convert implicitly
  Rational(std::int64_t n, std::int64_t d) : v_(n, d) {}
  explicit Rational(const Base& v) : v_(v) {}

  std::int64_t numerator() const noexcept { return v_.numerator(); }
  std::int64_t denominator() const noexcept { return v_.denominator(); }
  const Base& base() const noexcept { return v_; }

  /// Largest integer <= this.
  std::int64_t floor() const {
    const auto q = v_.numerator() / v_.denominator();
    return (v_.numerator() < 0 && q * v_.denominator() != v_.numerator()) ? q - 1 : q;
  }

  friend Rational operator+(const Rational& a, const Rational& b) { return Rational(a.v_ + b.v_); }
  friend Rational operator-(const Rational& a, const Rational& b) { return Rational(a.v_ - b.v_); }
  friend Rational operator*(const Rational& a, const Rational& b) { return Rational(a.v_ * b.v_); }
  friend Rational operator/(const Rational& a, const Rational& b) { return Rational(a.v_ / b.v_); }
  Rational operator-() const { return Rational(-v_); }
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  // Both sides are kept in lowest terms with positive denominator.
  friend bool operator==(const Rational& a, const Rational& b) {
    return a.v_.numerator() == b.v_.numerator() && a.v_.denominator() == b.v_.denominator();
  }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    if (a.v_ < b.v_) return std::strong_ordering::less;
    if (b.v_ < a.v_) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

 private:
  Base v_;
};

inline std::string to_string(const Rational& r) {
  std::string out = std::to_string(r.numerator());
  if (r.denominator() != 1) {
    out += '/';
    out += std::to_string(r.denominator());
  }
  return out;
}

inline std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << to_string(r); }

namespace detail {

inline std::optional<std::int64_t> parse_int(std::string_view text, bool allow_sign) {
  if (text.empty()) return std::nullopt;
  if (text.front() == '-' && !allow_sign) return std::nullopt;
  if (text.front() == '+') return std::nullopt;
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

}  // namespace detail

/// Parses "p" or "p/q"; returns nullopt on anything else (q must be positive).
inline std::optional<Rational> parse_rational(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) {
    auto p = detail::parse_int(text, true);
    if (!p) return std::nullopt;
    return Rational(*p);
  }
  auto p = detail::parse_int(text.substr(0, slash), true);
  auto q = detail::parse_int(text.substr(slash + 1), false);
  if (!p || !q || *q == 0) return std::nullopt;
  return Rational(*p, *q);
}

/// Throwing variant for programmatic use.
inline Rational rational(std::string_view text) {
  auto r = parse_rational(text);
  if (!r) throw ValidationError("not a rational: '" + std::string(text) + "'");
  return *r;
}

/// T-adic valuation: a rational, or the infinite valuation of zero which is
/// ordered above every rational.
class Valuation {
 public:
  constexpr Valuation() = default;  // infinite
  explicit Valuation(Rational value) : value_(value) {}

  static Valuation infinite() { return Valuation(); }

  bool is_infinite() const noexcept { return !value_.has_value(); }
  const Rational& value() const {
    if (!value_) throw Error("valuation of zero has no finite value");
    return *value_;
  }

  friend bool operator==(const Valuation& a, const Valuation& b) { return a.value_ == b.value_; }
  friend std::strong_ordering operator<=>(const Valuation& a, const Valuation& b) {
    if (a.is_infinite() || b.is_infinite()) {
      return static_cast<int>(a.is_infinite()) <=> static_cast<int>(b.is_infinite());
    }
    if (*a.value_ < *b.value_) return std::strong_ordering::less;
    if (*b.value_ < *a.value_) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  std::string str() const { return value_ ? to_string(*value_) : std::string("inf"); }

 private:
  std::optional<Rational> value_;
};

}  // namespace ainf
