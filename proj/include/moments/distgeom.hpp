#pragma once

// Distance geometry: the relative configuration matrix B(X) of squared
// mutual distances, its Cayley-Menger bordering, and the dimension
// constraints among the s_ij.

#include <optional>
#include <vector>

#include "moments/linalg.hpp"
#include "moments/moments.hpp"
#include "moments/nullspace.hpp"

namespace moments {

template <class T>
Matrix<T> rel_config_matrix(const Configuration<T>& x) {
    return squared_distances(x);
}

/// [[0, 1^T], [1, B]] from a grid of squared distances.
template <class T>
Matrix<T> bordered_distance_matrix(const Matrix<T>& b) {
    if (b.rows() != b.cols())
        throw Error(ErrorCode::ShapeMismatch, "squared distance grid must be square");
    const Index k = b.rows();
    Matrix<T> c(k + 1, k + 1);
    c(0, 0) = 0;
    c.row(0).tail(k).setOnes();
    c.col(0).tail(k).setOnes();
    c.bottomRightCorner(k, k) = b;
    return c;
}

/// [[0, 1^T], [1, B]] for the points `indices` (all points when absent).
template <class T>
Matrix<T> cayley_menger_matrix(const Configuration<T>& x, const std::optional<IndexSet>& indices = std::nullopt) {
    if (indices) {
        detail::require_index_set(*indices, x.size(), "cayley_menger");
        return bordered_distance_matrix<T>(squared_distances(x)(*indices, *indices));
    }
    return bordered_distance_matrix<T>(squared_distances(x));
}

template <class T>
T cayley_menger_det(const Configuration<T>& x, const std::optional<IndexSet>& indices = std::nullopt) {
    return determinant<T>(cayley_menger_matrix(x, indices));
}

template <class T>
struct KernelCorrespondence {
    Index codimension = 0;
    Matrix<T> basis;       ///< n x c basis of W0(X)
    std::vector<T> w0;     ///< extra coordinate of each lifted basis vector
    bool well_defined = true;  ///< -sum_j w_j s_ij independent of i
    bool lifts_into_kernel = true; ///< C(X) (w0, W) = 0 for every basis vector
    Index kernel_c_dimension = 0;
    Index kernel_b_zero_sum_dimension = 0; ///< dim (Ker B intersected with mu0 = 0)
    bool inclusion = true; ///< Ker B with mu0 = 0 lies in W0(X)
    bool equality = false; ///< ... and equals it (all w0 vanish)

    /// Ker C isomorphic to W0 and the inclusion holds.
    bool passed() const {
        return well_defined && lifts_into_kernel && kernel_c_dimension == codimension && inclusion;
    }
};

/// Checks Ker C(X) = {(w0, W)} over W in W0(X), w0 = -sum_j w_j s_ij, and
/// Ker B(X) with mu0 = 0 inside W0(X), equality exactly when mu2 vanishes
/// on W0(X) (which holds for co-spherical X).
template <class T>
KernelCorrespondence<T> kernel_correspondence(const Configuration<T>& x, const Tolerance& tol = {}) {
    const Index n = x.size();
    const Matrix<T> b = squared_distances(x);
    const Matrix<double> bm = magnitudes_of<T>(b);
    KernelCorrespondence<T> rep;
    rep.basis = w0_basis_matrix(x, tol);
    rep.codimension = rep.basis.cols();

    const Matrix<T> bw = b * rep.basis;
    const Matrix<double> bw_scale = bm * magnitudes_of<T>(rep.basis);
    for (Index l = 0; l < rep.codimension; ++l) {
        const T w0 = -bw(0, l);
        rep.w0.push_back(w0);
        for (Index i = 1; i < n; ++i)
            if (!is_zero(T(bw(i, l) - bw(0, l)), std::max(bw_scale(i, l), bw_scale(0, l)), tol))
                rep.well_defined = false;
        Vector<T> lifted(n + 1);
        lifted(0) = w0;
        lifted.tail(n) = rep.basis.col(l);
        const Vector<T> image = cayley_menger_matrix(x) * lifted;
        for (Index i = 0; i <= n; ++i) {
            const double sc = i == 0 ? magnitudes_of<T>(Matrix<T>(rep.basis.col(l))).sum()
                                     : std::max(bw_scale(i - 1, l), magnitude(w0));
            if (!is_zero(image(i), sc, tol))
                rep.lifts_into_kernel = false;
        }
    }

    const Matrix<T> cm = cayley_menger_matrix(x);
    rep.kernel_c_dimension = (n + 1) - rank<T>(cm, tol);

    Matrix<T> stacked(n + 1, n);
    stacked.row(0).setOnes();
    stacked.bottomRows(n) = b;
    const Matrix<T> kb = kernel_basis<T>(stacked, tol);
    rep.kernel_b_zero_sum_dimension = kb.cols();
    if (kb.cols() > 0) {
        const Matrix<T> xm = config_matrix(x);
        const Matrix<T> image = xm * kb;
        const Matrix<double> sc = magnitudes_of<T>(xm) * magnitudes_of<T>(kb);
        for (Index j = 0; j < image.cols(); ++j)
            for (Index i = 0; i < image.rows(); ++i)
                if (!is_zero(image(i, j), sc(i, j), tol))
                    rep.inclusion = false;
    }
    rep.equality = rep.inclusion && rep.kernel_b_zero_sum_dimension == rep.codimension;
    return rep;
}

template <class T>
struct Cospherical {
    bool cospherical = false;
    std::optional<Vector<T>> center;  ///< in the affine hull of X
    std::optional<T> radius_squared;
    std::optional<T> det_b;           ///< reported when codimension >= 1
    std::optional<bool> det_b_vanishes;
};

/// Looks for p with |x_i - p|^2 = R^2 for all i. Such a p may be taken in
/// the affine hull, where it is the circumcenter of any core; the remaining
/// points are then checked against it.
template <class T>
Cospherical<T> cospherical_test(const Configuration<T>& x, const Tolerance& tol = {}) {
    const IndexSet core = find_core(x, tol);
    const Index d = static_cast<Index>(core.size()) - 1;
    const Vector<T> origin = x.point(core.front());
    Matrix<T> dirs(x.ambient_dimension(), d);
    for (Index k = 0; k < d; ++k)
        dirs.col(k) = x.point(core[static_cast<std::size_t>(k + 1)]) - origin;
    // 2 <x_k - x_0, p - x_0> = |x_k - x_0|^2 with p - x_0 = dirs t.
    const Matrix<T> gram = dirs.transpose() * dirs;
    Matrix<T> rhs(d, 1);
    for (Index k = 0; k < d; ++k)
        rhs(k, 0) = gram(k, k) / T(2);
    Vector<T> p = origin;
    if (d > 0)
        p += dirs * solve_square<T>(gram, rhs, tol).col(0);

    Cospherical<T> out;
    const T r2 = (origin - p).squaredNorm();
    double scale = magnitude(r2);
    bool ok = true;
    for (Index i = 0; i < x.size(); ++i) {
        const T si = (x.point(i) - p).squaredNorm();
        if (!is_zero(T(si - r2), std::max(scale, magnitude(si)), tol))
            ok = false;
    }
    out.cospherical = ok;
    if (ok) {
        out.center = p;
        out.radius_squared = r2;
    }
    if (x.size() - 1 - d >= 1) {
        const Matrix<T> b = squared_distances(x);
        out.det_b = determinant<T>(b);
        out.det_b_vanishes = is_zero(*out.det_b, hadamard_scale(magnitudes_of<T>(b)), tol);
    }
    return out;
}

/// (c+1 choose 2) with c = (n-1) - d.
inline Index constraint_count(Index n, Index d) {
    if (d < 1 || d > n - 1)
        throw Error(ErrorCode::OutOfRange, "constraint_count needs 1 <= d <= n-1");
    const Index c = (n - 1) - d;
    return c * (c + 1) / 2;
}

/// Index sets of size d+2 whose Cayley-Menger determinants cut out the
/// configurations of dimension <= d: the first d+2 points, then for each
/// further point p and each q in [d, p) the set {0..d-1} + {q, p}.
inline std::vector<IndexSet> constraint_set(Index n, Index d) {
    if (d < 1 || d > n - 2)
        throw Error(ErrorCode::OutOfRange, "constraint_set needs 1 <= d <= n-2");
    std::vector<IndexSet> out;
    IndexSet base(static_cast<std::size_t>(d));
    for (Index i = 0; i < d; ++i)
        base[static_cast<std::size_t>(i)] = i;
    IndexSet first = base;
    first.push_back(d);
    first.push_back(d + 1);
    out.push_back(first);
    for (Index p = d + 2; p < n; ++p)
        for (Index q = d; q < p; ++q) {
            IndexSet s = base;
            s.push_back(q);
            s.push_back(p);
            out.push_back(s);
        }
    return out;
}

/// Rows: the given determinants; columns: s_ij for i < j in lexicographic
/// order. The derivative of a bordered determinant by s_ij is twice the
/// cofactor of the symmetric entry pair.
template <class T>
Matrix<T> constraint_jacobian(const Configuration<T>& x, const std::vector<IndexSet>& sets) {
    const Index n = x.size();
    const Index pairs = n * (n - 1) / 2;
    auto pair_index = [n](Index i, Index j) { return i * n - i * (i + 1) / 2 + (j - i - 1); };
    Matrix<T> jac = Matrix<T>::Zero(static_cast<Index>(sets.size()), pairs);
    for (std::size_t r = 0; r < sets.size(); ++r) {
        const IndexSet& s = sets[r];
        const Matrix<T> cm = cayley_menger_matrix(x, s);
        const Index k = cm.rows();
        for (std::size_t a = 0; a < s.size(); ++a)
            for (std::size_t b = a + 1; b < s.size(); ++b) {
                const Index ra = static_cast<Index>(a) + 1;
                const Index cb = static_cast<Index>(b) + 1;
                IndexSet rows, cols;
                for (Index i = 0; i < k; ++i) {
                    if (i != ra)
                        rows.push_back(i);
                    if (i != cb)
                        cols.push_back(i);
                }
                T cof = determinant<T>(cm(rows, cols));
                if ((ra + cb) % 2 != 0)
                    cof = -cof;
                jac(static_cast<Index>(r), pair_index(s[a], s[b])) = T(2) * cof;
            }
    }
    return jac;
}

struct ConstraintIndependence {
    Index constraints = 0;
    Index rank = 0;
    bool independent() const { return rank == constraints; }
};

/// Rank of the constraint Jacobian at X; full row rank certifies functional
/// independence of the constraint_set determinants near X.
template <class T>
ConstraintIndependence constraint_independence(const Configuration<T>& x, Index d, const Tolerance& tol = {}) {
    const auto sets = constraint_set(x.size(), d);
    const Matrix<T> jac = constraint_jacobian(x, sets);
    return {static_cast<Index>(sets.size()), rank<T>(jac, tol)};
}

/// W2^T B(X) W1; vanishes for W1 in W0(X) and W2 of total weight zero.
template <class T>
T extended_leibniz_form(const Configuration<T>& x, const Vector<T>& w1, const Vector<T>& w2) {
    if (w1.size() != x.size() || w2.size() != x.size())
        throw Error(ErrorCode::ShapeMismatch, "weight vectors must have one entry per point");
    return w2.dot(squared_distances(x) * w1);
}

} // namespace moments
