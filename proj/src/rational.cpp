#include "loadbal/rational.hpp"

#include <cctype>

#include "loadbal/error.hpp"

namespace loadbal {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

mpz_class parse_integer(std::string_view digits) {
  return mpz_class(std::string(digits), 10);
}

[[noreturn]] void fail(std::string_view text) {
  throw ParseError("not a rational number: \"" + std::string(text) + "\"");
}

}  // namespace

Rational parse_rational(std::string_view text) {
  const std::string_view original = text;
  text = trim(text);
  bool negative = false;
  if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }

  Rational result;
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    auto num = trim(text.substr(0, slash));
    auto den = trim(text.substr(slash + 1));
    if (!all_digits(num) || !all_digits(den)) fail(original);
    mpz_class d = parse_integer(den);
    if (d == 0) throw ParseError("zero denominator in \"" + std::string(original) + "\"");
    result = Rational(parse_integer(num), d);
    result.canonicalize();
  } else {
    std::string_view mantissa = text;
    long exponent = 0;
    if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
      mantissa = text.substr(0, e);
      std::string_view exp = text.substr(e + 1);
      bool exp_negative = false;
      if (!exp.empty() && (exp.front() == '-' || exp.front() == '+')) {
        exp_negative = exp.front() == '-';
        exp.remove_prefix(1);
      }
      if (!all_digits(exp) || exp.size() > 6) fail(original);
      exponent = std::stol(std::string(exp));
      if (exp_negative) exponent = -exponent;
    }
    std::string_view int_part = mantissa;
    std::string_view frac_part;
    if (auto dot = mantissa.find('.'); dot != std::string_view::npos) {
      int_part = mantissa.substr(0, dot);
      frac_part = mantissa.substr(dot + 1);
    }
    if (int_part.empty() && frac_part.empty()) fail(original);
    if (!int_part.empty() && !all_digits(int_part)) fail(original);
    if (!frac_part.empty() && !all_digits(frac_part)) fail(original);
    std::string digits = std::string(int_part) + std::string(frac_part);
    result = Rational(parse_integer(digits));
    exponent -= static_cast<long>(frac_part.size());
    result *= pow(Rational(10), exponent);
  }
  if (negative) result = -result;
  return result;
}

std::string to_string(const Rational& value) {
  if (value.get_den() == 1) return value.get_num().get_str();
  return value.get_str();
}

double to_double(const Rational& value) { return value.get_d(); }

Rational pow(const Rational& base, long exponent) {
  if (exponent < 0) {
    if (base == 0) throw RangeError("zero raised to a negative power");
    return Rational(1) / pow(base, -exponent);
  }
  mpz_class num, den;
  mpz_pow_ui(num.get_mpz_t(), base.get_num_mpz_t(), static_cast<unsigned long>(exponent));
  mpz_pow_ui(den.get_mpz_t(), base.get_den_mpz_t(), static_cast<unsigned long>(exponent));
  Rational r(num, den);
  r.canonicalize();
  return r;
}

bool is_positive(const Rational& value) { return sgn(value) > 0; }

const Rational& ExtendedRational::value() const {
  if (infinite_) throw RangeError("value() of an infinite price");
  return value_;
}

std::string to_string(const ExtendedRational& value) {
  return value.is_finite() ? to_string(value.value()) : std::string("inf");
}

}  // namespace loadbal
