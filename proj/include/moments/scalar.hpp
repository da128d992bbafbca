#pragma once

// Scalar model. A computation runs either over exact rationals (GMP backed)
// or over doubles; every algorithm in the library is templated on the scalar
// and branches on ScalarTraits<T>::exact where the two modes differ.

#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/gmp.hpp>

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>

#include "moments/error.hpp"

namespace moments {

using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;
using Integer = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                              boost::multiprecision::et_off>;

/// Relative tolerance used for every zero test in float mode. Rational mode
/// ignores it and tests for exact zero.
struct Tolerance {
    double relative = 1e-9;
};

template <class T>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
    static constexpr bool exact = false;
    static constexpr std::string_view mode = "float";
};

template <>
struct ScalarTraits<Rational> {
    static constexpr bool exact = true;
    static constexpr std::string_view mode = "rational";
};

template <class T>
inline constexpr bool is_exact_v = ScalarTraits<T>::exact;

template <class T>
double to_double(const T& v) {
    if constexpr (is_exact_v<T>)
        return v.template convert_to<double>();
    else
        return static_cast<double>(v);
}

template <class T>
double magnitude(const T& v) {
    return std::abs(to_double(v));
}

template <class T>
T abs_value(const T& v) {
    return v < T(0) ? T(-v) : v;
}

/// Zero test against a magnitude scale: exact in rational mode,
/// |v| <= eps * scale in float mode.
template <class T>
bool is_zero(const T& v, double scale, const Tolerance& tol) {
    if constexpr (is_exact_v<T>)
        return v == 0;
    else
        return std::abs(v) <= tol.relative * scale;
}

/// Builds a canonical rational p/q (lowest terms, positive denominator).
Rational make_rational(const Integer& num, const Integer& den);

/// Parses "p", "p/q", or a finite decimal literal such as "-1.25" exactly.
/// Throws Error(InvalidInput) on malformed text or zero denominator.
Rational parse_rational(std::string_view text);

/// "p/q" or "p" for integers.
std::string format_rational(const Rational& q);

inline bool is_integer(const Rational& q) {
    return boost::multiprecision::denominator(q) == 1;
}

/// s^a. Float mode evaluates exp(a ln s); rational mode admits only integer
/// exponents and throws ModeUnsupported otherwise.
template <class T>
T power(const T& base, const T& exponent) {
    if constexpr (is_exact_v<T>) {
        if (!is_integer(exponent))
            throw Error(ErrorCode::ModeUnsupported,
                        "non-integer exponent " + format_rational(exponent) +
                            " is not available in rational mode");
        Integer e = boost::multiprecision::numerator(exponent);
        if (base == 0) {
            if (e < 0)
                throw Error(ErrorCode::CoincidentPoints, "zero raised to a negative power");
            return e == 0 ? T(1) : T(0);
        }
        const bool invert = e < 0;
        if (invert)
            e = -e;
        T result = 1;
        T b = base;
        while (e > 0) {
            if (boost::multiprecision::bit_test(e, 0))
                result *= b;
            b *= b;
            e >>= 1;
        }
        return invert ? T(T(1) / result) : result;
    } else {
        return std::pow(base, exponent);
    }
}

} // namespace moments
