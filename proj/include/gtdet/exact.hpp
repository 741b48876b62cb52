#pragma once

#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace gtdet {

using Rational = boost::multiprecision::cpp_rational;
using RationalMatrix = std::vector<std::vector<Rational>>;

// Fraction-exact Gaussian elimination with row pivoting on the first nonzero.
Rational det_exact(RationalMatrix a);

Rational parse_rational(const std::string& s);  // "1/3", "2", "0.25"
double to_double(const Rational& r);

}  // namespace gtdet
