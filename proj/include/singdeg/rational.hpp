#pragma once

#include <boost/rational.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace singdeg {

using Rational = boost::rational<std::int64_t>;

/// "p/q" with q > 0, always including the denominator ("0/1", "2/3", "-1/3").
std::string toString(const Rational& r);

/// Parses "p/q" or "p".
Rational parseRational(const std::string& text);

inline double toDouble(const Rational& r) {
    return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

/// Least common denominator of a list of rationals (1 for an empty list).
std::int64_t leastCommonDenominator(const std::vector<Rational>& values);

}  // namespace singdeg
