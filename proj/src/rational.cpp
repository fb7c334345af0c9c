#include "shapehit/rational.hpp"

#include <stdexcept>

namespace shapehit {

Rational parse_rational(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty rational");
  auto slash = text.find('/');
  if (slash != std::string::npos) {
    BigInt num(text.substr(0, slash));
    BigInt den(text.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator: " + text);
    return Rational(num, den);
  }
  auto dot = text.find('.');
  if (dot == std::string::npos) return Rational(BigInt(text));
  std::string digits = text.substr(0, dot) + text.substr(dot + 1);
  if (digits.empty() || digits == "-") throw std::invalid_argument("bad decimal: " + text);
  BigInt den = 1;
  for (std::size_t i = dot + 1; i < text.size(); ++i) den *= 10;
  return Rational(BigInt(digits), den);
}

std::string to_string(const Rational& value) {
  const BigInt& num = boost::multiprecision::numerator(value);
  const BigInt& den = boost::multiprecision::denominator(value);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

double to_double(const Rational& value) { return value.convert_to<double>(); }

int ceil_log2_inverse(const Rational& eps) {
  if (eps <= 0 || eps > 1) throw std::invalid_argument("eps must lie in (0,1]");
  int k = 0;
  Rational scaled = eps;
  while (scaled < 1) {
    scaled *= 2;
    ++k;
  }
  return k;
}

int ceil_log2(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("ceil_log2(0)");
  int k = 0;
  while ((std::uint64_t{1} << k) < n) ++k;
  return k;
}

}  // namespace shapehit
