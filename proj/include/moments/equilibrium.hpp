#pragma once

// Interacting particles with forces F(x,y) = phi(x,y) (y - x). Each particle
// x induces a weighted system w_x with w_x(y) = phi(x,y) and
// w_x(x) = -sum_y phi(x,y); X is an equilibrium iff all of them lie in W0(X).

#include <algorithm>
#include <optional>
#include <string>

#include "moments/linalg.hpp"
#include "moments/nullspace.hpp"
#include "moments/residuals.hpp"

namespace moments {

/// n x n coefficients phi(x_i, x_j); the diagonal is never read.
template <class T>
class InteractionCoefficients {
public:
    InteractionCoefficients() = default;

    explicit InteractionCoefficients(Matrix<T> phi) : phi_(std::move(phi)) {
        if (phi_.rows() != phi_.cols())
            throw Error(ErrorCode::ShapeMismatch, "interaction coefficients must be square");
        detail::require_finite(phi_, "interaction coefficients");
        for (Index i = 0; i < phi_.rows(); ++i)
            phi_(i, i) = 0;
    }

    Index size() const { return phi_.rows(); }
    const Matrix<T>& matrix() const { return phi_; }
    const T& operator()(Index i, Index j) const { return phi_(i, j); }

    /// Newton's third law, phi(x,y) == phi(y,x).
    bool symmetric(const Tolerance& tol = {}) const {
        for (Index i = 0; i < size(); ++i)
            for (Index j = i + 1; j < size(); ++j)
                if (!is_zero(T(phi_(i, j) - phi_(j, i)),
                             std::max(magnitude(phi_(i, j)), magnitude(phi_(j, i))), tol))
                    return false;
        return true;
    }

private:
    Matrix<T> phi_;
};

namespace detail {

template <class T>
void require_shape(const Configuration<T>& x, const InteractionCoefficients<T>& phi) {
    if (phi.size() != x.size())
        throw Error(ErrorCode::ShapeMismatch, "coefficient grid does not match the point count");
}

/// Weight matrix with magnitudes, reused by the equilibrium checks.
template <class T>
Matrix<double> weight_magnitudes(const InteractionCoefficients<T>& phi) {
    const Index n = phi.size();
    Matrix<double> m = Matrix<double>::Zero(n, n);
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i)
            if (i != j) {
                m(i, j) = magnitude(phi(j, i));
                m(j, j) += m(i, j);
            }
    return m;
}

} // namespace detail

/// Weight matrix: column j is the induced weight vector of particle j.
template <class T>
Matrix<T> induced_weight_systems(const Configuration<T>& x, const InteractionCoefficients<T>& phi) {
    detail::require_shape(x, phi);
    const Index n = x.size();
    Matrix<T> f = Matrix<T>::Zero(n, n);
    for (Index j = 0; j < n; ++j) {
        T diag = 0;
        for (Index i = 0; i < n; ++i)
            if (i != j) {
                f(i, j) = phi(j, i);
                diag -= phi(j, i);
            }
        f(j, j) = diag;
    }
    return f;
}

/// Total force on each particle (columns), which is the constant first
/// moment of its induced weighted system.
template <class T>
Matrix<T> total_forces(const Configuration<T>& x, const InteractionCoefficients<T>& phi) {
    return x.points() * induced_weight_systems(x, phi);
}

/// R(x,y) = sum_z phi(x,z) (s_xy - s_yz + s_zx). All zero iff X is an equilibrium.
template <class T>
Residuals<T> verify_equilibrium_ac(const Configuration<T>& x, const InteractionCoefficients<T>& phi) {
    detail::require_shape(x, phi);
    const Index n = x.size();
    const Matrix<T> s = squared_distances(x);
    Residuals<T> r(n, n);
    for (Index a = 0; a < n; ++a)
        for (Index b = 0; b < n; ++b) {
            T acc = 0;
            double scale = 0.0;
            for (Index z = 0; z < n; ++z) {
                if (z == a)
                    continue;
                const T bracket = s(a, b) - s(b, z) + s(z, a);
                acc += phi(a, z) * bracket;
                scale = std::max(scale, magnitude(phi(a, z)) *
                                            (magnitude(s(a, b)) + magnitude(s(b, z)) + magnitude(s(z, a))));
            }
            r.values(a, b) = acc;
            r.scale(a, b) = scale;
        }
    return r;
}

/// Bilinear family L(x,y) = sum over unordered pairs {z,w} of
/// (w_x(z) w_y(w) + w_x(w) w_y(z)) / 2 * s_zw = (1/2) W_x^T B W_y, which
/// reduces to sum_{z<w} w_x(z) w_x(w) s_zw on the diagonal. The diagonal
/// alone already characterizes equilibrium.
template <class T>
Residuals<T> verify_equilibrium_leibniz(const Configuration<T>& x, const InteractionCoefficients<T>& phi) {
    detail::require_shape(x, phi);
    const Index n = x.size();
    const Matrix<T> f = induced_weight_systems(x, phi);
    const Matrix<double> fm = detail::weight_magnitudes(phi);
    const Matrix<T> s = squared_distances(x);
    const Matrix<T> bf = s * f;
    const Matrix<double> bm = magnitudes_of(s) * fm;
    Residuals<T> r(n, n);
    r.values = (f.transpose() * bf) / T(2);
    r.scale = (fm.transpose() * bm) / 2.0;
    return r;
}

namespace detail {

template <class T>
bool is_symmetric(const Matrix<T>& m, const Tolerance& tol) {
    if (m.rows() != m.cols())
        return false;
    const double scale = m.size() == 0 ? 0.0 : magnitudes_of(m).maxCoeff();
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = i + 1; j < m.cols(); ++j)
            if (!is_zero(T(m(i, j) - m(j, i)), scale, tol))
                return false;
    return true;
}

} // namespace detail

/// Interactions read off a weight matrix: phi(x_j, x_i) = F(i, j), i != j.
template <class T>
InteractionCoefficients<T> interactions_from_weight_matrix(const Matrix<T>& f) {
    if (f.rows() != f.cols())
        throw Error(ErrorCode::ShapeMismatch, "weight matrix must be square");
    return InteractionCoefficients<T>(Matrix<T>(f.transpose()));
}

/// Every interaction model for which X is an equilibrium. Column j of the
/// weight matrix ranges over W0(X) = span(basis), so the general model is
/// F = W A for an arbitrary c x n coefficient matrix A; models obeying
/// Newton's third law are F = W S W^T with S symmetric, (c+1 choose 2)
/// parameters.
template <class T>
struct InteractionFamily {
    Matrix<T> basis; ///< n x c
    std::optional<W0Basis<T>> w0;

    Index codimension() const { return basis.cols(); }
    Index symmetric_parameter_count() const { return codimension() * (codimension() + 1) / 2; }

    InteractionCoefficients<T> general(const Matrix<T>& coefficients) const {
        if (coefficients.rows() != codimension() || coefficients.cols() != basis.rows())
            throw Error(ErrorCode::ShapeMismatch, "coefficients must be c x n");
        return interactions_from_weight_matrix<T>(basis * coefficients);
    }

    InteractionCoefficients<T> symmetric(const Matrix<T>& s) const {
        if (s.rows() != codimension() || s.cols() != codimension())
            throw Error(ErrorCode::ShapeMismatch, "parameter matrix must be c x c");
        if (!detail::is_symmetric(s, Tolerance{}))
            throw Error(ErrorCode::NotSymmetric, "parameter matrix must be symmetric");
        return interactions_from_weight_matrix<T>(Matrix<T>(basis * s * basis.transpose()));
    }

    /// Symmetric matrix with ones at (a,b) and (b,a): the parameter basis.
    Matrix<T> unit_parameter(Index a, Index b) const {
        Matrix<T> e = Matrix<T>::Zero(codimension(), codimension());
        e(a, b) = 1;
        e(b, a) = 1;
        return e;
    }
};

template <class T>
InteractionFamily<T> inverse_interactions(const Configuration<T>& x, bool require_nontrivial = false,
                                          const Tolerance& tol = {}) {
    const IndexSet core = find_core(x, tol);
    InteractionFamily<T> family;
    if (static_cast<Index>(core.size()) == x.size()) {
        if (require_nontrivial)
            throw Error(ErrorCode::WrongCodimension, "a simplex admits no nonzero equilibrium interactions");
        family.basis = Matrix<T>::Zero(x.size(), 0);
        return family;
    }
    family.w0 = w0_basis(x, core, tol);
    family.basis = family.w0->vectors;
    return family;
}


/// F = W S W^T.
template <class T>
Matrix<T> dziobek_synthesize(const Matrix<T>& basis, const Matrix<T>& s, const Tolerance& tol = {}) {
    if (s.rows() != basis.cols() || s.cols() != basis.cols())
        throw Error(ErrorCode::ShapeMismatch, "S must be c x c for an n x c basis");
    if (!detail::is_symmetric(s, tol))
        throw Error(ErrorCode::NotSymmetric, "S must be symmetric");
    return basis * s * basis.transpose();
}

template <class T>
Matrix<T> dziobek_synthesize(const W0Basis<T>& basis, const Matrix<T>& s, const Tolerance& tol = {}) {
    return dziobek_synthesize<T>(basis.vectors, s, tol);
}

template <class T>
struct DziobekFactorization {
    Matrix<T> basis; ///< W, n x c
    Matrix<T> s;     ///< c x c, symmetric
    Matrix<T> a;     ///< c x n, A = S W^T
    double projection_residual = 0.0;
};

/// Recovers the unique S with F = W S W^T for the given basis of W0(X).
template <class T>
DziobekFactorization<T> dziobek_factorize(const Configuration<T>& x, const Matrix<T>& f,
                                          const Matrix<T>& basis, const Tolerance& tol = {}) {
    const Index n = x.size();
    if (f.rows() != n || f.cols() != n || basis.rows() != n)
        throw Error(ErrorCode::ShapeMismatch, "weight matrix and basis must have n rows");
    if (!detail::is_symmetric(f, tol))
        throw Error(ErrorCode::AsymmetricInput, "weight matrix must be symmetric");

    const Matrix<T> xm = config_matrix(x);
    const Matrix<T> image = xm * f;
    const Matrix<double> image_scale = magnitudes_of(xm) * magnitudes_of(f);
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < image.rows(); ++i)
            if (!is_zero(image(i, j), image_scale(i, j), tol))
                throw Error(ErrorCode::ColumnNotInKernel,
                            "column " + std::to_string(j) + " of the weight matrix is not in W0(X)");

    DziobekFactorization<T> out;
    out.basis = basis;
    out.a = solve_least_squares<T>(basis, f, tol);
    // A = S W^T  <=>  W S^T = A^T.
    const Matrix<T> at = out.a.transpose();
    out.s = solve_least_squares<T>(basis, at, tol).transpose();
    const Matrix<T> recon = basis * out.a - f;
    const double f_scale = f.size() == 0 ? 0.0 : magnitudes_of(f).maxCoeff();
    out.projection_residual = recon.size() == 0 ? 0.0 : magnitudes_of(recon).maxCoeff();
    if constexpr (is_exact_v<T>) {
        if (std::any_of(recon.data(), recon.data() + recon.size(), [](const T& v) { return v != 0; }))
            throw Error(ErrorCode::ColumnNotInKernel, "weight matrix is not in the span of the basis");
    } else {
        if (out.projection_residual > tol.relative * std::max(f_scale, 1e-300))
            throw Error(ErrorCode::ColumnNotInKernel, "least-squares projection residual above tolerance");
        out.s = (out.s + out.s.transpose()) / 2.0;
    }
    return out;
}

template <class T>
DziobekFactorization<T> dziobek_factorize(const Configuration<T>& x, const Matrix<T>& f,
                                          const W0Basis<T>& basis, const Tolerance& tol = {}) {
    return dziobek_factorize<T>(x, f, basis.vectors, tol);
}

} // namespace moments
