#pragma once

#include <initializer_list>
#include <vector>

#include "moments/types.hpp"

namespace th {

using moments::Configuration;
using moments::Index;
using moments::Matrix;
using moments::Rational;
using moments::Vector;

/// Configuration from a list of points given as rows.
template <class T>
Configuration<T> pts(std::initializer_list<std::initializer_list<T>> rows) {
    std::vector<std::vector<T>> v;
    for (const auto& r : rows)
        v.emplace_back(r);
    return Configuration<T>::from_points(v);
}

template <class T>
Vector<T> vec(std::initializer_list<T> xs) {
    Vector<T> v(static_cast<Index>(xs.size()));
    Index i = 0;
    for (const auto& x : xs)
        v(i++) = x;
    return v;
}

inline Rational q(long p, long d = 1) {
    return Rational(moments::Integer(p), moments::Integer(d));
}

template <class T>
Configuration<T> unit_square() {
    return pts<T>({{T(0), T(0)}, {T(1), T(0)}, {T(1), T(1)}, {T(0), T(1)}});
}

inline Configuration<double> equilateral() {
    return pts<double>({{0.0, 0.0}, {1.0, 0.0}, {0.5, 0.8660254037844386}});
}

} // namespace th
