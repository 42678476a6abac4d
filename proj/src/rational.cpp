#include "singdeg/rational.hpp"

#include "singdeg/error.hpp"

#include <boost/integer/common_factor_rt.hpp>

#include <charconv>

namespace singdeg {

std::string toString(const Rational& r) {
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

namespace {

std::int64_t parseInt(std::string_view text, const std::string& whole) {
    std::int64_t value = 0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end) {
        throw Error(ErrorCode::ParseError, "not a rational: '" + whole + "'");
    }
    return value;
}

}  // namespace

Rational parseRational(const std::string& text) {
    const auto slash = text.find('/');
    if (slash == std::string::npos) {
        return Rational(parseInt(text, text));
    }
    const std::string_view view(text);
    const auto den = parseInt(view.substr(slash + 1), text);
    if (den == 0) {
        throw Error(ErrorCode::ParseError, "zero denominator: '" + text + "'");
    }
    return Rational(parseInt(view.substr(0, slash), text), den);
}

std::int64_t leastCommonDenominator(const std::vector<Rational>& values) {
    std::int64_t lcd = 1;
    for (const auto& v : values) {
        lcd = boost::integer::lcm(lcd, v.denominator());
    }
    return lcd;
}

}  // namespace singdeg
