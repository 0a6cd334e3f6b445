#include "vortex/rational.hpp"

#include <cctype>

namespace vortex {

namespace {

bool all_digits(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

BigInt parse_integer(std::string s, const std::string& whole) {
    bool negative = false;
    if (!s.empty() && (s[0] == '+' || s[0] == '-')) {
        negative = s[0] == '-';
        s.erase(0, 1);
    }
    if (!all_digits(s)) throw RationalParseError("not a rational number: '" + whole + "'");
    BigInt v(s);
    return negative ? BigInt(-v) : v;
}

} // namespace

ParsedRational parse_rational(const std::string& raw) {
    std::string text;
    for (char c : raw)
        if (!std::isspace(static_cast<unsigned char>(c))) text.push_back(c);
    if (text.empty()) throw RationalParseError("empty rational");

    auto slash = text.find('/');
    if (slash != std::string::npos) {
        BigInt p = parse_integer(text.substr(0, slash), raw);
        BigInt q = parse_integer(text.substr(slash + 1), raw);
        if (q == 0) throw RationalParseError("zero denominator: '" + raw + "'");
        return {Rational(p) / q, false};
    }

    auto epos = text.find_first_of("eE");
    long exponent = 0;
    std::string mantissa = text;
    if (epos != std::string::npos) {
        std::string e = text.substr(epos + 1);
        BigInt ev = parse_integer(e, raw);
        if (ev > 400 || ev < -400) throw RationalParseError("exponent out of range: '" + raw + "'");
        exponent = ev.convert_to<long>();
        mantissa = text.substr(0, epos);
    }

    auto dot = mantissa.find('.');
    bool decimal = dot != std::string::npos || epos != std::string::npos;
    std::string digits = mantissa;
    long frac_len = 0;
    if (dot != std::string::npos) {
        frac_len = static_cast<long>(mantissa.size() - dot - 1);
        digits = mantissa.substr(0, dot) + mantissa.substr(dot + 1);
        if (digits == "" || digits == "+" || digits == "-")
            throw RationalParseError("not a rational number: '" + raw + "'");
    }
    BigInt n = parse_integer(digits, raw);
    long shift = exponent - frac_len;
    BigInt scale = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(shift < 0 ? -shift : shift));
    Rational v = shift >= 0 ? Rational(n * scale) : Rational(n) / scale;
    return {v, decimal};
}

std::string to_string(const Rational& q) {
    if (denominator_of(q) == 1) return numerator_of(q).str();
    return numerator_of(q).str() + "/" + denominator_of(q).str();
}

double to_double(const Rational& q) { return q.convert_to<double>(); }

} // namespace vortex
