#include "ucfg/rational.hpp"

#include <cctype>
#include <cmath>
#include <limits>
#include <string>

#include "ucfg/errors.hpp"

namespace ucfg {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

std::int64_t to_int64(const BigInt& z) {
  if (!z.fits_slong_p()) throw PrecisionLoss("integer does not fit in 64 bits: " + z.get_str());
  return z.get_si();
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  Rational result;
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    auto num = s.substr(0, slash);
    auto den = s.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) {
      throw ParseError("not a rational: '" + std::string(text) + "'");
    }
    BigInt d(std::string(den), 10);
    if (d == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
    result = Rational(BigInt(std::string(num), 10), d);
  } else {
    auto dot = s.find('.');
    auto whole = s.substr(0, dot);
    auto frac = dot == std::string_view::npos ? std::string_view{} : s.substr(dot + 1);
    if ((whole.empty() && frac.empty()) || (!whole.empty() && !all_digits(whole)) ||
        (!frac.empty() && !all_digits(frac))) {
      throw ParseError("not a rational: '" + std::string(text) + "'");
    }
    BigInt num(whole.empty() ? std::string("0") : std::string(whole), 10);
    BigInt den = 1;
    for (char c : frac) {
      num = num * 10 + (c - '0');
      den *= 10;
    }
    result = Rational(num, den);
  }
  result.canonicalize();
  return negative ? Rational(-result) : result;
}

Rational rational_from_double(double value) {
  if (!std::isfinite(value)) throw PrecisionLoss("non-finite value has no rational form");
  Rational r;
  mpq_set_d(r.get_mpq_t(), value);
  return r;
}

std::string to_string(const Rational& value) { return value.get_str(); }

std::int64_t floor_to_int(const Rational& value) {
  BigInt q;
  mpz_fdiv_q(q.get_mpz_t(), value.get_num_mpz_t(), value.get_den_mpz_t());
  return to_int64(q);
}

std::int64_t ceil_to_int(const Rational& value) {
  BigInt q;
  mpz_cdiv_q(q.get_mpz_t(), value.get_num_mpz_t(), value.get_den_mpz_t());
  return to_int64(q);
}

}  // namespace ucfg
