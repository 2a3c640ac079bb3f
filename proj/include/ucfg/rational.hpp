#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

namespace ucfg {

/// Exact arbitrary-precision rational. All probabilities live in this type.
using Rational = mpq_class;
using BigInt = mpz_class;

/// Parses "num/den", an integer, or a decimal literal such as "0.25".
/// Decimal literals are read exactly in base ten (0.1 is 1/10).
Rational parse_rational(std::string_view text);

/// Exact value of a finite double (every finite double is a dyadic rational).
Rational rational_from_double(double value);

/// Canonical "num/den" (or "num" when den == 1).
std::string to_string(const Rational& value);

/// floor(value) as a 64-bit integer; value must fit.
std::int64_t floor_to_int(const Rational& value);
/// ceil(value) as a 64-bit integer; value must fit.
std::int64_t ceil_to_int(const Rational& value);

inline double to_double(const Rational& value) { return value.get_d(); }

}  // namespace ucfg
