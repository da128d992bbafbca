#include "moments/scalar.hpp"

#include <cctype>
#include <string>

namespace moments {

namespace {

bool all_digits(std::string_view s) {
    if (s.empty())
        return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c)))
            return false;
    return true;
}

/// Optional sign followed by digits.
Integer parse_integer(std::string_view s, std::string_view whole) {
    bool negative = false;
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }
    if (!all_digits(s))
        throw Error(ErrorCode::InvalidInput, "not a rational number: '" + std::string(whole) + "'");
    Integer v{std::string(s)};
    return negative ? Integer(-v) : v;
}

} // namespace

Rational make_rational(const Integer& num, const Integer& den) {
    if (den == 0)
        throw Error(ErrorCode::InvalidInput, "zero denominator");
    return Rational(num, den);
}

Rational parse_rational(std::string_view text) {
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front())))
        text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back())))
        text.remove_suffix(1);
    const std::string_view whole = text;
    if (const auto slash = text.find('/'); slash != std::string_view::npos) {
        const Integer num = parse_integer(text.substr(0, slash), whole);
        const std::string_view den_text = text.substr(slash + 1);
        if (!all_digits(den_text))
            throw Error(ErrorCode::InvalidInput, "not a rational number: '" + std::string(whole) + "'");
        return make_rational(num, Integer(std::string(den_text)));
    }
    if (const auto dot = text.find('.'); dot != std::string_view::npos) {
        std::string_view int_part = text.substr(0, dot);
        const std::string_view frac = text.substr(dot + 1);
        if (!all_digits(frac))
            throw Error(ErrorCode::InvalidInput, "not a rational number: '" + std::string(whole) + "'");
        bool negative = false;
        if (!int_part.empty() && (int_part.front() == '-' || int_part.front() == '+')) {
            negative = int_part.front() == '-';
            int_part.remove_prefix(1);
        }
        if (!int_part.empty() && !all_digits(int_part))
            throw Error(ErrorCode::InvalidInput, "not a rational number: '" + std::string(whole) + "'");
        Integer num(std::string(int_part.empty() ? "0" : int_part) + std::string(frac));
        Integer den = 1;
        for (std::size_t i = 0; i < frac.size(); ++i)
            den *= 10;
        return make_rational(negative ? Integer(-num) : num, den);
    }
    return Rational(parse_integer(text, whole));
}

std::string format_rational(const Rational& q) {
    return q.str();
}

} // namespace moments
