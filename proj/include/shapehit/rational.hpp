#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>

namespace shapehit {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Parses "a/b", an integer, or a decimal literal such as "0.17" exactly.
Rational parse_rational(const std::string& text);

/// Canonical "num/den" (or "num" when den == 1).
std::string to_string(const Rational& value);

double to_double(const Rational& value);

/// Smallest integer k >= 0 with 2^k >= 1/eps, for eps in (0,1].
int ceil_log2_inverse(const Rational& eps);

/// ceil(log2(n)) for n >= 1; ceil_log2(1) == 0.
int ceil_log2(std::uint64_t n);

}  // namespace shapehit
