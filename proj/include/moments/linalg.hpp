#pragma once

// Dense linear algebra shared by both scalar modes. Rational mode uses
// fraction-free (Bareiss) elimination; float mode uses partial pivoting with
// the pivot threshold eps * (largest row norm of the input).

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "moments/types.hpp"

namespace moments {

/// All k-element subsets of {0, ..., n-1}, in lexicographic order.
inline std::vector<IndexSet> combinations(Index n, Index k) {
    std::vector<IndexSet> out;
    if (k < 0 || k > n)
        return out;
    IndexSet c(static_cast<std::size_t>(k));
    for (Index i = 0; i < k; ++i)
        c[static_cast<std::size_t>(i)] = i;
    while (true) {
        out.push_back(c);
        Index i = k - 1;
        while (i >= 0 && c[static_cast<std::size_t>(i)] == n - k + i)
            --i;
        if (i < 0)
            break;
        ++c[static_cast<std::size_t>(i)];
        for (Index j = i + 1; j < k; ++j)
            c[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j - 1)] + 1;
    }
    return out;
}

/// Hadamard bound of a matrix of magnitudes: the product of column norms.
/// This is the scale against which a float determinant is compared to zero.
inline double hadamard_scale(const Matrix<double>& magnitudes) {
    double s = 1.0;
    for (Index j = 0; j < magnitudes.cols(); ++j)
        s *= magnitudes.col(j).norm();
    return s;
}

template <class T>
Matrix<double> magnitudes_of(const Matrix<T>& m) {
    Matrix<double> out(m.rows(), m.cols());
    for (Index j = 0; j < m.cols(); ++j)
        for (Index i = 0; i < m.rows(); ++i)
            out(i, j) = magnitude(m(i, j));
    return out;
}

template <class T>
T determinant(Matrix<T> a) {
    const Index n = a.rows();
    if (a.cols() != n)
        throw Error(ErrorCode::ShapeMismatch, "determinant of a non-square matrix");
    if (n == 0)
        return T(1);
    if constexpr (is_exact_v<T>) {
        T prev = 1;
        bool negate = false;
        for (Index k = 0; k + 1 < n; ++k) {
            if (a(k, k) == 0) {
                Index p = k + 1;
                while (p < n && a(p, k) == 0)
                    ++p;
                if (p == n)
                    return T(0);
                a.row(k).swap(a.row(p));
                negate = !negate;
            }
            for (Index i = k + 1; i < n; ++i) {
                for (Index j = k + 1; j < n; ++j)
                    a(i, j) = (a(i, j) * a(k, k) - a(i, k) * a(k, j)) / prev;
                a(i, k) = 0;
            }
            prev = a(k, k);
        }
        return negate ? T(-a(n - 1, n - 1)) : a(n - 1, n - 1);
    } else {
        return a.partialPivLu().determinant();
    }
}

/// Determinant paired with the magnitude scale used to judge it in float mode.
template <class T>
bool determinant_vanishes(const Matrix<T>& a, const Tolerance& tol) {
    return is_zero(determinant(a), hadamard_scale(magnitudes_of(a)), tol);
}

template <class T>
struct Echelon {
    Matrix<T> form;
    std::vector<Index> pivots; ///< pivot column of each leading row

    Index rank() const { return static_cast<Index>(pivots.size()); }
};

template <class T>
Echelon<T> row_echelon(Matrix<T> a, const Tolerance& tol = {}) {
    const Index m = a.rows();
    const Index n = a.cols();
    std::vector<Index> pivots;
    Index r = 0;
    if constexpr (is_exact_v<T>) {
        T prev = 1;
        for (Index col = 0; col < n && r < m; ++col) {
            Index p = r;
            while (p < m && a(p, col) == 0)
                ++p;
            if (p == m)
                continue;
            if (p != r)
                a.row(r).swap(a.row(p));
            for (Index i = r + 1; i < m; ++i) {
                for (Index j = col + 1; j < n; ++j)
                    a(i, j) = (a(r, col) * a(i, j) - a(i, col) * a(r, j)) / prev;
                a(i, col) = 0;
            }
            prev = a(r, col);
            pivots.push_back(col);
            ++r;
        }
    } else {
        double max_row = 0.0;
        for (Index i = 0; i < m; ++i)
            max_row = std::max(max_row, a.row(i).norm());
        const double threshold = tol.relative * max_row;
        for (Index col = 0; col < n && r < m; ++col) {
            Index p = r;
            for (Index i = r + 1; i < m; ++i)
                if (std::abs(a(i, col)) > std::abs(a(p, col)))
                    p = i;
            if (std::abs(a(p, col)) <= threshold) {
                for (Index i = r; i < m; ++i)
                    a(i, col) = 0.0;
                continue;
            }
            if (p != r)
                a.row(r).swap(a.row(p));
            for (Index i = r + 1; i < m; ++i) {
                const double f = a(i, col) / a(r, col);
                a.row(i).tail(n - col) -= f * a.row(r).tail(n - col);
                a(i, col) = 0.0;
            }
            pivots.push_back(col);
            ++r;
        }
    }
    return Echelon<T>{std::move(a), std::move(pivots)};
}

template <class T>
Index rank(const Matrix<T>& a, const Tolerance& tol = {}) {
    return row_echelon(a, tol).rank();
}

/// Lexicographically first maximal set of linearly independent columns.
template <class T>
IndexSet independent_columns(const Matrix<T>& a, const Tolerance& tol = {}) {
    return row_echelon(a, tol).pivots;
}

/// Basis of the right kernel, one column per free variable of the echelon form.
template <class T>
Matrix<T> kernel_basis(const Matrix<T>& a, const Tolerance& tol = {}) {
    const Echelon<T> e = row_echelon(a, tol);
    const Index n = a.cols();
    const Index r = e.rank();
    std::vector<bool> is_pivot(static_cast<std::size_t>(n), false);
    for (Index c : e.pivots)
        is_pivot[static_cast<std::size_t>(c)] = true;
    Matrix<T> basis = Matrix<T>::Zero(n, n - r);
    Index k = 0;
    for (Index f = 0; f < n; ++f) {
        if (is_pivot[static_cast<std::size_t>(f)])
            continue;
        Vector<T> x = Vector<T>::Zero(n);
        x(f) = 1;
        for (Index pi = r - 1; pi >= 0; --pi) {
            const Index c = e.pivots[static_cast<std::size_t>(pi)];
            T sum = 0;
            for (Index j = c + 1; j < n; ++j)
                sum += e.form(pi, j) * x(j);
            x(c) = -sum / e.form(pi, c);
        }
        basis.col(k++) = x;
    }
    return basis;
}

/// Solves the square system M X = B. Throws DegenerateFrame when M is singular.
template <class T>
Matrix<T> solve_square(const Matrix<T>& m, const Matrix<T>& b, const Tolerance& tol = {}) {
    const Index n = m.rows();
    if (m.cols() != n || b.rows() != n)
        throw Error(ErrorCode::ShapeMismatch, "solve_square dimensions");
    if constexpr (is_exact_v<T>) {
        Matrix<T> a(n, n + b.cols());
        a << m, b;
        for (Index k = 0; k < n; ++k) {
            Index p = k;
            while (p < n && a(p, k) == 0)
                ++p;
            if (p == n)
                throw Error(ErrorCode::DegenerateFrame, "singular linear system");
            if (p != k)
                a.row(k).swap(a.row(p));
            const T pivot = a(k, k);
            a.row(k) /= pivot;
            for (Index i = 0; i < n; ++i) {
                if (i == k || a(i, k) == 0)
                    continue;
                const T f = a(i, k);
                a.row(i) -= f * a.row(k);
            }
        }
        return a.rightCols(b.cols());
    } else {
        if (rank(m, tol) < n)
            throw Error(ErrorCode::DegenerateFrame, "singular linear system");
        return m.partialPivLu().solve(b);
    }
}

/// Least-squares solution of A X = B for A of full column rank, exact in
/// rational mode (normal equations) and Householder QR in float mode.
template <class T>
Matrix<T> solve_least_squares(const Matrix<T>& a, const Matrix<T>& b, const Tolerance& tol = {}) {
    if (a.rows() != b.rows())
        throw Error(ErrorCode::ShapeMismatch, "least squares row mismatch");
    if (a.cols() == 0)
        return Matrix<T>::Zero(0, b.cols());
    if constexpr (is_exact_v<T>) {
        const Matrix<T> at = a.transpose();
        return solve_square<T>(at * a, at * b, tol);
    } else {
        return a.colPivHouseholderQr().solve(b);
    }
}

template <class T>
struct MinorWitness {
    IndexSet rows;
    IndexSet cols;
    T value;
};

/// First k x k minor (rows and columns in lexicographic order) that does not
/// vanish. `magnitudes`, when given, supplies the entry magnitudes used as the
/// float-mode scale; otherwise the entries themselves are used.
template <class T>
std::optional<MinorWitness<T>> find_nonvanishing_minor(const Matrix<T>& m, Index k,
                                                      const Matrix<double>* magnitudes,
                                                      const Tolerance& tol) {
    if (k <= 0 || k > m.rows() || k > m.cols())
        return std::nullopt;
    const Matrix<double> mags = magnitudes ? *magnitudes : magnitudes_of(m);
    const auto row_sets = combinations(m.rows(), k);
    const auto col_sets = combinations(m.cols(), k);
    for (const auto& rs : row_sets)
        for (const auto& cs : col_sets) {
            const Matrix<T> sub = m(rs, cs);
            const T det = determinant<T>(sub);
            const Matrix<double> sub_mag = mags(rs, cs);
            if (!is_zero(det, hadamard_scale(sub_mag), tol))
                return MinorWitness<T>{rs, cs, det};
        }
    return std::nullopt;
}

/// The k x k minor of largest magnitude; nullopt when k is out of range.
template <class T>
std::optional<MinorWitness<T>> largest_minor(const Matrix<T>& m, Index k) {
    if (k <= 0 || k > m.rows() || k > m.cols())
        return std::nullopt;
    std::optional<MinorWitness<T>> best;
    for (const auto& rs : combinations(m.rows(), k))
        for (const auto& cs : combinations(m.cols(), k)) {
            T det = determinant<T>(Matrix<T>(m(rs, cs)));
            if (!best || abs_value(det) > abs_value(best->value))
                best = MinorWitness<T>{rs, cs, std::move(det)};
        }
    return best;
}

} // namespace moments
