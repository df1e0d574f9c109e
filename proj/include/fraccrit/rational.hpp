#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>
#include <vector>

namespace fraccrit {

// Arbitrary-precision rational; GMP keeps it canonical (gcd 1, positive denominator).
using Rational = mpq_class;
using Integer = mpz_class;

// "p/q" in lowest terms; integers print without a denominator.
std::string to_string(const Rational& r);

// Accepts "p", "-p", "p/q". Throws std::invalid_argument on anything else.
Rational parse_rational(std::string_view text);

std::string join(const std::vector<Rational>& values, std::string_view sep = " ");

}  // namespace fraccrit
