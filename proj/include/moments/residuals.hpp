#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <utility>

#include "moments/types.hpp"

namespace moments {

/// Residual grid of an identity together with, entry by entry, the largest
/// magnitude among the terms that enter it. Float-mode pass/fail is judged
/// against that magnitude; rational mode requires exact zeros.
template <class T>
struct Residuals {
    Matrix<T> values;
    Matrix<double> scale;

    Residuals() = default;
    Residuals(Index rows, Index cols)
        : values(Matrix<T>::Zero(rows, cols)), scale(Matrix<double>::Zero(rows, cols)) {}

    double max_abs() const {
        double m = 0.0;
        for (Index j = 0; j < values.cols(); ++j)
            for (Index i = 0; i < values.rows(); ++i)
                m = std::max(m, magnitude(values(i, j)));
        return m;
    }

    /// Entry with the largest absolute residual; nullopt for an empty grid.
    std::optional<std::pair<Index, Index>> worst() const {
        std::optional<std::pair<Index, Index>> at;
        double m = -1.0;
        for (Index j = 0; j < values.cols(); ++j)
            for (Index i = 0; i < values.rows(); ++i)
                if (magnitude(values(i, j)) > m) {
                    m = magnitude(values(i, j));
                    at = {i, j};
                }
        return at;
    }

    bool passes(const Tolerance& tol) const {
        for (Index j = 0; j < values.cols(); ++j)
            for (Index i = 0; i < values.rows(); ++i)
                if (!is_zero(values(i, j), scale(i, j), tol))
                    return false;
        return true;
    }
};

/// Scalar-free digest of a residual check, used by reports and certificates.
struct CheckSummary {
    std::string name;
    double max_abs_residual = 0.0;
    std::optional<std::pair<Index, Index>> worst;
    bool pass = true;
};

template <class T>
CheckSummary summarize(std::string name, const Residuals<T>& r, const Tolerance& tol) {
    return CheckSummary{std::move(name), r.max_abs(), r.worst(), r.passes(tol)};
}

} // namespace moments
