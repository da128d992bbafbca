#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

#include "moments/error.hpp"
#include "moments/scalar.hpp"

namespace moments {

using Index = Eigen::Index;

template <class T>
using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

template <class T>
using Vector = Eigen::Matrix<T, Eigen::Dynamic, 1>;

/// Ascending list of 0-based point indices.
using IndexSet = std::vector<Index>;

namespace detail {

template <class Derived>
void require_finite(const Eigen::MatrixBase<Derived>& m, const char* what) {
    using T = typename Derived::Scalar;
    if constexpr (!is_exact_v<T>) {
        if (!m.allFinite())
            throw Error(ErrorCode::InvalidInput, std::string(what) + " contains NaN or infinity");
    }
}

} // namespace detail

/// An ordered list of n points of an N-dimensional ambient space, stored as
/// the columns of an N x n matrix.
template <class T>
class Configuration {
public:
    Configuration() = default;

    explicit Configuration(Matrix<T> points) : points_(std::move(points)) {
        if (points_.cols() < 1)
            throw Error(ErrorCode::InvalidInput, "a configuration needs at least one point");
        if (points_.rows() < 1)
            throw Error(ErrorCode::InvalidInput, "ambient dimension must be at least one");
        detail::require_finite(points_, "configuration");
    }

    /// One inner vector per point.
    static Configuration from_points(const std::vector<std::vector<T>>& pts) {
        if (pts.empty())
            throw Error(ErrorCode::InvalidInput, "a configuration needs at least one point");
        const auto dim = static_cast<Index>(pts.front().size());
        Matrix<T> m(dim, static_cast<Index>(pts.size()));
        for (std::size_t j = 0; j < pts.size(); ++j) {
            if (static_cast<Index>(pts[j].size()) != dim)
                throw Error(ErrorCode::DimensionMismatch, "points have unequal coordinate length");
            for (Index i = 0; i < dim; ++i)
                m(i, static_cast<Index>(j)) = pts[j][static_cast<std::size_t>(i)];
        }
        return Configuration(std::move(m));
    }

    Index size() const { return points_.cols(); }
    Index ambient_dimension() const { return points_.rows(); }
    const Matrix<T>& points() const { return points_; }
    auto point(Index j) const { return points_.col(j); }

    /// Subconfiguration with the given columns, in the given order.
    Configuration subset(const IndexSet& indices) const {
        Matrix<T> m(points_.rows(), static_cast<Index>(indices.size()));
        for (std::size_t k = 0; k < indices.size(); ++k)
            m.col(static_cast<Index>(k)) = points_.col(indices[k]);
        return Configuration(std::move(m));
    }

    template <class U>
    Configuration<U> cast() const {
        return Configuration<U>(points_.template cast<U>());
    }

private:
    Matrix<T> points_;
};

/// A configuration with one weight per point.
template <class T>
struct WeightedSystem {
    Configuration<T> configuration;
    Vector<T> weights;

    WeightedSystem(Configuration<T> x, Vector<T> w)
        : configuration(std::move(x)), weights(std::move(w)) {
        if (weights.size() != configuration.size())
            throw Error(ErrorCode::DimensionMismatch,
                        "weight vector length differs from the number of points");
        detail::require_finite(weights, "weights");
    }

    Index size() const { return configuration.size(); }
};

/// Squared mutual distances, s_ij = |x_i - x_j|^2.
template <class T>
T squared_distance(const Configuration<T>& x, Index i, Index j) {
    return (x.point(i) - x.point(j)).squaredNorm();
}

template <class T>
Matrix<T> squared_distances(const Configuration<T>& x) {
    const Index n = x.size();
    Matrix<T> s = Matrix<T>::Zero(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j) {
            s(i, j) = squared_distance(x, i, j);
            s(j, i) = s(i, j);
        }
    return s;
}

} // namespace moments
