#pragma once

#include <gmpxx.h>

#include <compare>
#include <string>
#include <string_view>

namespace loadbal {

// All mechanism decisions are taken on exact rationals so that ties are
// reproducible; doubles only appear in report output.
using Rational = mpq_class;

// Accepts "p/q", plain integers and finite decimals ("0.6", "1e-3").
// Throws ParseError on anything else.
Rational parse_rational(std::string_view text);

// "p/q", or just "p" for integers.
std::string to_string(const Rational& value);

double to_double(const Rational& value);

Rational pow(const Rational& base, long exponent);

bool is_positive(const Rational& value);

// A rational extended with +infinity, used for posted prices.
class ExtendedRational {
 public:
  ExtendedRational() = default;
  ExtendedRational(Rational value) : value_(std::move(value)) {}  // NOLINT

  static ExtendedRational infinity() {
    ExtendedRational r;
    r.infinite_ = true;
    return r;
  }

  bool is_finite() const { return !infinite_; }
  const Rational& value() const;

  friend bool operator==(const ExtendedRational& a, const ExtendedRational& b) {
    if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
    return a.value_ == b.value_;
  }
  friend std::strong_ordering operator<=>(const ExtendedRational& a, const ExtendedRational& b) {
    if (a.infinite_ || b.infinite_) return a.infinite_ <=> b.infinite_;
    int c = cmp(a.value_, b.value_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

 private:
  Rational value_{0};
  bool infinite_ = false;
};

// "inf" for infinity, otherwise as to_string(Rational).
std::string to_string(const ExtendedRational& value);

}  // namespace loadbal
