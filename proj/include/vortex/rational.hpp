#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <stdexcept>
#include <string>

namespace vortex {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

struct ParsedRational {
    Rational value;
    bool from_decimal = false; // true when the text was a decimal literal
};

// Accepts "p", "p/q", or a finite decimal "x.y" / "x.yEz". Decimals are
// converted exactly (0.1 -> 1/10), never through a double.
ParsedRational parse_rational(const std::string& text);

std::string to_string(const Rational& q); // "p/q", or "p" when q == 1

double to_double(const Rational& q);

inline BigInt numerator_of(const Rational& q) { return boost::multiprecision::numerator(q); }
inline BigInt denominator_of(const Rational& q) { return boost::multiprecision::denominator(q); }

class RationalParseError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

} // namespace vortex
