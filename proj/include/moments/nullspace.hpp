#pragma once

// The space W0(X) of weight vectors with zero total weight and vanishing
// first moment, i.e. the kernel of the augmented configuration matrix.
//
// Volume convention: Delta over a deletion set means the determinant of the
// configuration matrix of the remaining points, columns in ascending index
// order. Indices are 0-based throughout, so the printed sign (-1)^j Delta_j of
// a 1-based point j becomes (-1)^(k+1) for the 0-based position k.

#include <algorithm>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "moments/linalg.hpp"
#include "moments/residuals.hpp"
#include "moments/types.hpp"

namespace moments {

/// (N+1) x n matrix whose column j is (1, x_j).
template <class T>
Matrix<T> config_matrix(const Configuration<T>& x) {
    Matrix<T> m(x.ambient_dimension() + 1, x.size());
    m.row(0).setOnes();
    m.bottomRows(x.ambient_dimension()) = x.points();
    return m;
}

struct DimCodim {
    Index dimension;
    Index codimension;
};

template <class T>
DimCodim dimension_codimension(const Configuration<T>& x, const Tolerance& tol = {}) {
    const Index d = rank(config_matrix(x), tol) - 1;
    return {d, (x.size() - 1) - d};
}

/// Lexicographically smallest index set spanning a d-simplex. Scanning the
/// points in order and keeping each one that raises the affine dimension is
/// the replacement procedure carried to completion; on the affine matroid it
/// returns the lexicographically first basis.
template <class T>
IndexSet find_core(const Configuration<T>& x, const Tolerance& tol = {}) {
    return independent_columns(config_matrix(x), tol);
}

namespace detail {

inline bool is_strictly_ascending(const IndexSet& s) {
    return std::adjacent_find(s.begin(), s.end(), [](Index a, Index b) { return a >= b; }) == s.end();
}

inline void require_index_set(const IndexSet& s, Index n, const char* what) {
    for (Index i : s)
        if (i < 0 || i >= n)
            throw Error(ErrorCode::OutOfRange, std::string(what) + ": index out of range");
    if (!is_strictly_ascending(s))
        throw Error(ErrorCode::InvalidInput, std::string(what) + ": indices must be strictly ascending");
}

/// Rows of the configuration matrix that form a basis of its row space,
/// chosen greedily from the top (the ones row always survives). When the
/// ambient dimension equals the intrinsic one these are all rows; otherwise
/// volumes are taken in the coordinate projection onto the kept axes, which
/// multiplies every (d+1)-volume by one common nonzero factor.
template <class T>
Matrix<T> frame_matrix(const Configuration<T>& x, const Tolerance& tol) {
    const Matrix<T> full = config_matrix(x);
    const Matrix<T> transposed = full.transpose();
    const IndexSet rows = independent_columns<T>(transposed, tol);
    return full(rows, Eigen::all);
}

/// Determinant of the frame matrix restricted to `cols` (ascending).
template <class T>
T frame_volume(const Matrix<T>& frame, const IndexSet& cols) {
    return determinant<T>(frame(Eigen::all, cols));
}

template <class T>
double frame_volume_scale(const Matrix<T>& frame, const IndexSet& cols) {
    return hadamard_scale(magnitudes_of<T>(frame(Eigen::all, cols)));
}

/// Generator (-1)^(k+1) Delta_k of a codimension-1 set of columns, laid out
/// over the positions of `cols` and zero elsewhere.
template <class T>
Vector<T> leaf_generator(const Matrix<T>& frame, const IndexSet& cols, Index n) {
    Vector<T> w = Vector<T>::Zero(n);
    for (std::size_t k = 0; k < cols.size(); ++k) {
        IndexSet rest;
        for (std::size_t i = 0; i < cols.size(); ++i)
            if (i != k)
                rest.push_back(cols[i]);
        const T delta = frame_volume(frame, rest);
        w(cols[k]) = (k % 2 == 0) ? T(-delta) : delta;
    }
    return w;
}

inline IndexSet iota_set(Index n) {
    IndexSet s(static_cast<std::size_t>(n));
    std::iota(s.begin(), s.end(), Index{0});
    return s;
}

inline IndexSet complement(const IndexSet& s, Index n) {
    IndexSet out;
    for (Index i = 0; i < n; ++i)
        if (!std::binary_search(s.begin(), s.end(), i))
            out.push_back(i);
    return out;
}

} // namespace detail

/// Oriented volume of the subconfiguration `indices` (taken in ascending
/// order). The configuration matrix of the subconfiguration must be square
/// in the user's frame, i.e. ambient dimension == |indices| - 1.
template <class T>
T volume(const Configuration<T>& x, const IndexSet& indices) {
    detail::require_index_set(indices, x.size(), "volume");
    if (static_cast<Index>(indices.size()) != x.ambient_dimension() + 1)
        throw Error(ErrorCode::FrameMismatch,
                    "volume needs exactly ambient_dimension + 1 points; reduce the frame first");
    return determinant<T>(config_matrix(x)(Eigen::all, indices));
}

struct DziobekTree {
    std::vector<IndexSet> chain; ///< S_0 c S_1 c ... c S_d
    std::vector<Index> extras;   ///< points outside the core, ascending
    std::vector<IndexSet> leaves; ///< core + {extra}, one per extra

    const IndexSet& core() const { return chain.back(); }
};

template <class T>
DziobekTree dziobek_tree(const Configuration<T>& x, const IndexSet& core, const Tolerance& tol = {}) {
    detail::require_index_set(core, x.size(), "core");
    const DimCodim dc = dimension_codimension(x, tol);
    if (static_cast<Index>(core.size()) != dc.dimension + 1 ||
        rank<T>(config_matrix(x)(Eigen::all, core), tol) != dc.dimension + 1)
        throw Error(ErrorCode::NotACore, "index set does not span a simplex of full dimension");
    DziobekTree tree;
    for (std::size_t k = 1; k <= core.size(); ++k)
        tree.chain.emplace_back(core.begin(), core.begin() + static_cast<std::ptrdiff_t>(k));
    tree.extras = detail::complement(core, x.size());
    for (Index e : tree.extras) {
        IndexSet leaf = core;
        leaf.insert(std::upper_bound(leaf.begin(), leaf.end(), e), e);
        tree.leaves.push_back(std::move(leaf));
    }
    return tree;
}

/// ((-1)^1 Delta_1, ..., (-1)^n Delta_n) for a configuration of codimension 1.
template <class T>
Vector<T> codim1_generator(const Configuration<T>& x, const Tolerance& tol = {}) {
    if (dimension_codimension(x, tol).codimension != 1)
        throw Error(ErrorCode::WrongCodimension, "codimension must be exactly 1");
    const Matrix<T> frame = detail::frame_matrix(x, tol);
    return detail::leaf_generator(frame, detail::iota_set(x.size()), x.size());
}

template <class T>
struct W0Basis {
    Matrix<T> vectors;          ///< n x c, column l spans W0 of the l-th leaf
    IndexSet core;
    std::vector<Index> extras;  ///< extra point of each leaf, column order
    Matrix<T> volumes;          ///< c x (d+2): Delta_k of leaf l with its k-th point removed

    Index codimension() const { return vectors.cols(); }
};

/// One codimension-1 generator per Dziobek leaf of `core`, zero-padded to
/// length n. The column of extra e is nonzero at e only among the extras, with
/// value +-Delta(core), so the columns are independent.
template <class T>
W0Basis<T> w0_basis(const Configuration<T>& x, const IndexSet& core, const Tolerance& tol = {}) {
    const DziobekTree tree = dziobek_tree(x, core, tol);
    const Index c = static_cast<Index>(tree.leaves.size());
    if (c == 0)
        throw Error(ErrorCode::WrongCodimension, "a simplex has a trivial W0 space");
    const Matrix<T> frame = detail::frame_matrix(x, tol);
    W0Basis<T> b;
    b.core = core;
    b.extras = tree.extras;
    b.vectors = Matrix<T>::Zero(x.size(), c);
    b.volumes = Matrix<T>::Zero(c, static_cast<Index>(core.size()) + 1);
    for (Index l = 0; l < c; ++l) {
        const IndexSet& leaf = tree.leaves[static_cast<std::size_t>(l)];
        b.vectors.col(l) = detail::leaf_generator(frame, leaf, x.size());
        for (std::size_t k = 0; k < leaf.size(); ++k) {
            IndexSet rest;
            for (std::size_t i = 0; i < leaf.size(); ++i)
                if (i != k)
                    rest.push_back(leaf[i]);
            b.volumes(l, static_cast<Index>(k)) = detail::frame_volume(frame, rest);
        }
    }
    return b;
}

/// Basis from the lexicographically smallest core; an n x 0 matrix for a simplex.
template <class T>
Matrix<T> w0_basis_matrix(const Configuration<T>& x, const Tolerance& tol = {}) {
    const IndexSet core = find_core(x, tol);
    if (static_cast<Index>(core.size()) == x.size())
        return Matrix<T>::Zero(x.size(), 0);
    return w0_basis(x, core, tol).vectors;
}

namespace detail {

/// The d+1 membership residuals for a frame whose first d+1 columns form a
/// core. `mags` gives per-entry magnitudes of w for the float-mode scale.
template <class T>
Residuals<T> membership_residuals_ordered(const Matrix<T>& frame, const Vector<T>& w,
                                          const Vector<double>& mags, const Tolerance& tol) {
    const Index n = frame.cols();
    const Index d = frame.rows() - 1;
    const IndexSet head = iota_set(d + 1);
    const T base = frame_volume(frame, head);
    if (is_zero(base, frame_volume_scale(frame, head), tol))
        throw Error(ErrorCode::DegenerateFrame, "the first d+1 points do not span a simplex");
    Residuals<T> r(d + 1, 1);
    for (Index i = 0; i <= d; ++i) {
        // 1-based i' = i + 1, so (-1)^(i'-d) = (-1)^(i+1+d).
        const bool negative = ((i + 1 + d) % 2) != 0;
        T lhs = w(i) * base;
        if (negative)
            lhs = -lhs;
        double scale = mags(i) * magnitude(base);
        T rhs = 0;
        for (Index l = d + 1; l < n; ++l) {
            IndexSet cols;
            for (Index k = 0; k <= d; ++k)
                if (k != i)
                    cols.push_back(k);
            cols.push_back(l);
            const T delta = frame_volume(frame, cols);
            rhs += w(l) * delta;
            scale = std::max(scale, mags(l) * frame_volume_scale(frame, cols));
        }
        r.values(i, 0) = lhs - rhs;
        r.scale(i, 0) = std::max(scale, mags(i) * frame_volume_scale(frame, head));
    }
    return r;
}

/// Core points first (ascending), then the remaining points (ascending).
inline IndexSet core_first_order(const IndexSet& core, Index n) {
    IndexSet order = core;
    const IndexSet rest = complement(core, n);
    order.insert(order.end(), rest.begin(), rest.end());
    return order;
}

template <class T>
Residuals<T> membership_residuals(const Configuration<T>& x, const Vector<T>& w,
                                  const Vector<double>& mags, const std::optional<IndexSet>& core,
                                  const Tolerance& tol) {
    if (w.size() != x.size())
        throw Error(ErrorCode::DimensionMismatch, "weight vector length differs from point count");
    if (!core)
        return membership_residuals_ordered(frame_matrix(x, tol), w, mags, tol);
    require_index_set(*core, x.size(), "core");
    const IndexSet order = core_first_order(*core, x.size());
    const Configuration<T> permuted = x.subset(order);
    return membership_residuals_ordered(frame_matrix(permuted, tol), Vector<T>(w(order)),
                                        Vector<double>(mags(order)), tol);
}

} // namespace detail

/// Residuals (-1)^(i-d) w_i Delta_{d+2..n} - sum_l w_l Delta_{i,d+2..^l..n},
/// i = 1..d+1, which all vanish iff w lies in W0(X). By default the first
/// d+1 points must form a core; pass `core` to reindex so that it comes
/// first. Membership is invariant under w -> -w.
template <class T>
Residuals<T> membership_identities(const Configuration<T>& x, const Vector<T>& w,
                                   const std::optional<IndexSet>& core = std::nullopt,
                                   const Tolerance& tol = {}) {
    Vector<double> mags(w.size());
    for (Index i = 0; i < w.size(); ++i)
        mags(i) = magnitude(w(i));
    return detail::membership_residuals(x, w, mags, core, tol);
}

template <class T>
struct MinorTest {
    bool vanishes = true;
    std::optional<MinorWitness<T>> witness;
};

/// True iff every (c+1) x (c+1) minor of the n x k matrix `vectors` vanishes;
/// otherwise reports the first offending minor.
template <class T>
MinorTest<T> minor_vanishing_test(const Matrix<T>& vectors, Index c, const Tolerance& tol = {},
                                  const Matrix<double>* magnitudes = nullptr) {
    if (c < 0)
        throw Error(ErrorCode::OutOfRange, "codimension must be nonnegative");
    MinorTest<T> t;
    t.witness = find_nonvanishing_minor(vectors, c + 1, magnitudes, tol);
    t.vanishes = !t.witness.has_value();
    return t;
}

/// Pluecker coordinates of the plane spanned by x1x2..x1x5 for five planar points.
template <class T>
struct PlueckerCoordinates {
    T p12, p13, p14, p23, p24, p34;
};

template <class T>
T plucker_relation(const PlueckerCoordinates<T>& p) {
    return p.p12 * p.p34 - p.p13 * p.p24 + p.p14 * p.p23;
}

template <class T>
PlueckerCoordinates<T> plucker_coordinates(const Configuration<T>& x, const Tolerance& tol = {}) {
    if (x.size() != 5 || dimension_codimension(x, tol).dimension != 2)
        throw Error(ErrorCode::WrongShape, "Pluecker relation needs five points of dimension 2");
    const Matrix<T> frame = detail::frame_matrix(x, tol);
    // Delta_{ab} deletes points a and b (1-based); keep the other three.
    auto delta = [&](Index a, Index b) {
        IndexSet keep;
        for (Index i = 1; i <= 5; ++i)
            if (i != a && i != b)
                keep.push_back(i - 1);
        return detail::frame_volume(frame, keep);
    };
    return {delta(2, 3), delta(3, 5), delta(3, 4), delta(2, 5), delta(2, 4), delta(4, 5)};
}

/// Delta23 Delta45 - Delta24 Delta35 + Delta25 Delta34 for five planar points.
template <class T>
T plucker_residual(const Configuration<T>& x, const Tolerance& tol = {}) {
    return plucker_relation(plucker_coordinates(x, tol));
}

/// Isometric reduction of a float configuration to its affine span: returns
/// the points expressed in an orthonormal frame of dimension d anchored at
/// x_1. The frame comes from a Householder QR with the sign of each R
/// diagonal entry made positive.
Configuration<double> reduce_frame(const Configuration<double>& x, const Tolerance& tol = {});

} // namespace moments
