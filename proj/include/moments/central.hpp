#pragma once

// Central configurations of point masses under the homogeneous interaction
// gamma_j = sum_{i != j} m_i s_ij^a (x_i - x_j).
//
// Sign convention: lambda is the constant of the S-matrix equations
//   sum_{i != j} m_i S_ij (x_i - x_j) = 0,   S_ij = s_ij^a - lambda / mu0,
// equivalently gamma_j = -lambda (x_j - G). Attractive potentials with
// positive masses give lambda / mu0 > 0. The definitional form
// gamma_j - gamma_O = lambda' (x_j - x_O) uses lambda' = -lambda.

#include <optional>
#include <string>
#include <vector>

#include "moments/linalg.hpp"
#include "moments/moments.hpp"
#include "moments/nullspace.hpp"
#include "moments/residuals.hpp"

namespace moments {

template <class T>
struct CentralSystem {
    Configuration<T> configuration;
    Vector<T> masses;
    T exponent;
    std::optional<T> lambda;

    CentralSystem(Configuration<T> x, Vector<T> m, T a, std::optional<T> lam = std::nullopt)
        : configuration(std::move(x)), masses(std::move(m)), exponent(std::move(a)), lambda(std::move(lam)) {
        if (masses.size() != configuration.size())
            throw Error(ErrorCode::DimensionMismatch, "mass vector length differs from point count");
        detail::require_finite(masses, "masses");
        for (Index i = 0; i < masses.size(); ++i)
            if (masses(i) == 0)
                throw Error(ErrorCode::InvalidInput, "masses must be nonvanishing");
        if constexpr (!is_exact_v<T>) {
            if (!std::isfinite(exponent) || (lambda && !std::isfinite(*lambda)))
                throw Error(ErrorCode::InvalidInput, "exponent and lambda must be finite");
        }
    }

    Index size() const { return configuration.size(); }
    WeightedSystem<T> weighted() const { return WeightedSystem<T>(configuration, masses); }
    T total_mass() const { return masses.sum(); }
};

namespace detail {

template <class T>
void require_distinct(const Configuration<T>& x) {
    for (Index i = 0; i < x.size(); ++i)
        for (Index j = i + 1; j < x.size(); ++j)
            if (squared_distance(x, i, j) == 0)
                throw Error(ErrorCode::CoincidentPoints,
                            "points " + std::to_string(i) + " and " + std::to_string(j) + " coincide");
}

/// s_ij^a off the diagonal, zero on it.
template <class T>
Matrix<T> distance_powers(const CentralSystem<T>& cs) {
    if (cs.exponent == 0)
        throw Error(ErrorCode::PreconditionViolated, "exponent a must be nonzero");
    require_distinct(cs.configuration);
    const Matrix<T> s = squared_distances(cs.configuration);
    Matrix<T> p = Matrix<T>::Zero(cs.size(), cs.size());
    for (Index i = 0; i < cs.size(); ++i)
        for (Index j = i + 1; j < cs.size(); ++j) {
            p(i, j) = power(s(i, j), cs.exponent);
            p(j, i) = p(i, j);
        }
    return p;
}

template <class T>
void require_nonzero_mass(const CentralSystem<T>& cs, const Tolerance& tol) {
    if (has_zero_total_weight(cs.weighted(), tol))
        throw Error(ErrorCode::ZeroTotalWeight, "total mass vanishes; use the zero-total-mass checks");
}

} // namespace detail

/// gamma_j = -sum_{i != j} m_i s_ij^a (x_j - x_i), one column per point.
template <class T>
Matrix<T> accelerations(const CentralSystem<T>& cs) {
    const Matrix<T> p = detail::distance_powers(cs);
    const Matrix<T>& x = cs.configuration.points();
    Matrix<T> g = Matrix<T>::Zero(x.rows(), cs.size());
    for (Index j = 0; j < cs.size(); ++j)
        for (Index i = 0; i < cs.size(); ++i)
            if (i != j)
                g.col(j) += (cs.masses(i) * p(i, j)) * (x.col(i) - x.col(j));
    return g;
}

template <class T>
struct LambdaFit {
    T lambda;              ///< S-matrix convention
    T definitional_lambda; ///< = -lambda, the constant of gamma_j - gamma_O = lambda' (x_j - x_O)
    Vector<T> center;      ///< x_O, the center of mass
    Vector<T> gamma_center; ///< gamma_O, the null vector
    double residual;       ///< max |gamma_j + lambda (x_j - G)| over all components
};

/// Least-squares lambda over the n*N component equations gamma_j + lambda (x_j - G) = 0.
template <class T>
LambdaFit<T> fit_lambda(const CentralSystem<T>& cs, const Tolerance& tol = {}) {
    detail::require_nonzero_mass(cs, tol);
    const Vector<T> g = barycenter(cs.weighted(), tol);
    const Matrix<T> gamma = accelerations(cs);
    const Matrix<T> rel = cs.configuration.points().colwise() - g;
    const T den = rel.squaredNorm();
    T lam = 0;
    if (den != 0)
        lam = -(gamma.cwiseProduct(rel)).sum() / den;
    const Matrix<T> r = gamma + lam * rel;
    const double res = r.size() == 0 ? 0.0 : magnitudes_of<T>(r).maxCoeff();
    return {lam, T(-lam), g, Vector<T>::Zero(g.size()), res};
}

namespace detail {

/// Everything the verification families share, computed once.
template <class T>
struct CentralData {
    T lambda;
    T ratio; ///< lambda / mu0
    Matrix<T> s;      ///< squared distances
    Matrix<T> powers; ///< s_ij^a
    Matrix<T> S;
    Matrix<T> C;      ///< C(i,j) = m_i S_ij
    Matrix<double> s_mag; ///< |s_ij^a| + |lambda/mu0| off the diagonal
    Matrix<double> c_mag;
};

template <class T>
CentralData<T> central_data(const CentralSystem<T>& cs, const Tolerance& tol) {
    detail::require_nonzero_mass(cs, tol);
    CentralData<T> d;
    d.lambda = cs.lambda ? *cs.lambda : fit_lambda(cs, tol).lambda;
    d.ratio = d.lambda / cs.total_mass();
    d.s = squared_distances(cs.configuration);
    d.powers = distance_powers(cs);
    const Index n = cs.size();
    d.S = Matrix<T>::Zero(n, n);
    d.C = Matrix<T>::Zero(n, n);
    d.s_mag = Matrix<double>::Zero(n, n);
    d.c_mag = Matrix<double>::Zero(n, n);
    const double ratio_mag = magnitude(d.ratio);
    for (Index j = 0; j < n; ++j) {
        T col = 0;
        double col_mag = 0.0;
        for (Index i = 0; i < n; ++i) {
            if (i == j)
                continue;
            d.S(i, j) = d.powers(i, j) - d.ratio;
            d.s_mag(i, j) = magnitude(d.powers(i, j)) + ratio_mag;
            d.C(i, j) = cs.masses(i) * d.S(i, j);
            d.c_mag(i, j) = magnitude(cs.masses(i)) * d.s_mag(i, j);
            col -= d.C(i, j);
            col_mag += d.c_mag(i, j);
        }
        d.C(j, j) = col;
        d.S(j, j) = col / cs.masses(j);
        d.c_mag(j, j) = col_mag;
        d.s_mag(j, j) = col_mag / magnitude(cs.masses(j));
    }
    return d;
}

} // namespace detail

/// S_ij = s_ij^a - lambda/mu0 off the diagonal; S_jj closes sum_i m_i S_ij = 0.
/// Uses the system's lambda, or the fitted one when absent.
template <class T>
Matrix<T> s_matrix(const CentralSystem<T>& cs, const Tolerance& tol = {}) {
    return detail::central_data(cs, tol).S;
}

/// Column j is the weight vector C_j, C_j(x_i) = m_i S_ij.
template <class T>
Matrix<T> cc_weight_vectors(const CentralSystem<T>& cs, const Tolerance& tol = {}) {
    return detail::central_data(cs, tol).C;
}

/// gamma_j + lambda (x_j - G), one column per point; zero iff central with this lambda.
template <class T>
Residuals<T> definition_residuals(const CentralSystem<T>& cs, const Tolerance& tol = {}) {
    const detail::CentralData<T> d = detail::central_data(cs, tol);
    const Vector<T> g = barycenter(cs.weighted(), tol);
    const Matrix<T>& x = cs.configuration.points();
    const Matrix<T> gamma = accelerations(cs);
    Residuals<T> r(x.rows(), cs.size());
    for (Index j = 0; j < cs.size(); ++j)
        for (Index k = 0; k < x.rows(); ++k) {
            r.values(k, j) = gamma(k, j) + d.lambda * (x(k, j) - g(k));
            double scale = magnitude(d.lambda) * (magnitude(x(k, j)) + magnitude(g(k)));
            for (Index i = 0; i < cs.size(); ++i)
                if (i != j)
                    scale = std::max(scale, magnitude(cs.masses(i)) * magnitude(d.powers(i, j)) *
                                                (magnitude(x(k, i)) + magnitude(x(k, j))));
            r.scale(k, j) = scale;
        }
    return r;
}

/// sum_{i != j} m_i S_ij (s_ij + s_jk - s_ki) over all (j, k).
template <class T>
Residuals<T> verify_central_ac(const CentralSystem<T>& cs, const Tolerance& tol = {}) {
    const detail::CentralData<T> d = detail::central_data(cs, tol);
    const Index n = cs.size();
    Residuals<T> r(n, n);
    for (Index j = 0; j < n; ++j)
        for (Index k = 0; k < n; ++k) {
            T acc = 0;
            double scale = 0.0;
            for (Index i = 0; i < n; ++i) {
                if (i == j)
                    continue;
                acc += d.C(i, j) * (d.s(i, j) + d.s(j, k) - d.s(k, i));
                scale = std::max(scale, d.c_mag(i, j) * (magnitude(d.s(i, j)) + magnitude(d.s(j, k)) +
                                                         magnitude(d.s(k, i))));
            }
            r.values(j, k) = acc;
            r.scale(j, k) = scale;
        }
    return r;
}

/// Membership identities applied to every C_j: a (d+1) x n grid whose entry
/// (i, j) is (-1)^(i-d) m_i S_ij Delta_{d+2..n} - sum_l m_l S_lj Delta_{i,d+2..^l..n}.
template <class T>
Residuals<T> verify_central_dias(const CentralSystem<T>& cs, const std::optional<IndexSet>& core = std::nullopt,
                                 const Tolerance& tol = {}) {
    const DimCodim dc = dimension_codimension(cs.configuration, tol);
    if (dc.codimension == 0)
        throw Error(ErrorCode::WrongShape, "the Dias identities need codimension >= 1");
    const detail::CentralData<T> d = detail::central_data(cs, tol);
    Residuals<T> r(dc.dimension + 1, cs.size());
    for (Index j = 0; j < cs.size(); ++j) {
        const Residuals<T> col = detail::membership_residuals(
            cs.configuration, Vector<T>(d.C.col(j)), Vector<double>(d.c_mag.col(j)), core, tol);
        r.values.col(j) = col.values.col(0);
        r.scale.col(j) = col.scale.col(0);
    }
    return r;
}

template <class T>
struct CentralMinorTest {
    MinorTest<T> weight_vectors; ///< minors of [C | extra kernel vectors]
    MinorTest<T> s_grid;         ///< minors of the S grid itself

    bool vanishes() const { return weight_vectors.vanishes && s_grid.vanishes; }
};

/// Every (c+1) x (c+1) minor of [C_1 .. C_n | extra vectors of W0(X)] and of
/// the S grid must vanish for a central configuration of codimension c.
template <class T>
CentralMinorTest<T> verify_central_minors(const CentralSystem<T>& cs, const std::optional<Matrix<T>>& extra = std::nullopt,
                                          const Tolerance& tol = {}) {
    const Index c = dimension_codimension(cs.configuration, tol).codimension;
    const detail::CentralData<T> d = detail::central_data(cs, tol);
    const Index n = cs.size();
    const Index k = extra ? extra->cols() : 0;
    if (extra && extra->rows() != n)
        throw Error(ErrorCode::ShapeMismatch, "extra kernel vectors must have n entries");
    Matrix<T> m(n, n + k);
    Matrix<double> mag(n, n + k);
    m.leftCols(n) = d.C;
    mag.leftCols(n) = d.c_mag;
    if (extra) {
        m.rightCols(k) = *extra;
        mag.rightCols(k) = magnitudes_of<T>(*extra);
    }
    CentralMinorTest<T> out;
    out.weight_vectors = minor_vanishing_test<T>(m, c, tol, &mag);
    out.s_grid = minor_vanishing_test<T>(d.S, c, tol, &d.s_mag);
    return out;
}

/// (j, l) entry: (1/2) C_j^T B C_l, i.e. the unordered-pair sum
/// sum_{i<k} (C_j(i) C_l(k) + C_j(k) C_l(i)) / 2 s_ik, which is
/// sum_{i<k} m_i m_k S_ij S_kj s_ik on the diagonal.
template <class T>
Residuals<T> verify_central_extended_leibniz(const CentralSystem<T>& cs, const Tolerance& tol = {}) {
    const detail::CentralData<T> d = detail::central_data(cs, tol);
    Residuals<T> r(cs.size(), cs.size());
    r.values = (d.C.transpose() * d.s * d.C) / T(2);
    r.scale = (d.c_mag.transpose() * magnitudes_of<T>(d.s) * d.c_mag) / 2.0;
    return r;
}

struct ZeroMassItem {
    std::string name;
    bool pass;
    double max_abs_residual;
    bool has_residual = true;
};

struct ZeroMassReport {
    std::vector<ZeroMassItem> items;
    long codimension = 0;
    /// For codimension 1 only: whether x_j lies strictly inside the simplex
    /// X \ {x_j} (all barycentric coordinates m_i / -m_j positive).
    /// Informational; not part of the pass flag.
    std::optional<std::vector<bool>> interior;

    bool passed() const {
        for (const auto& i : items)
            if (!i.pass)
                return false;
        return true;
    }
};

/// The four properties forced on a central configuration with zero total
/// mass and lambda != 0.
template <class T>
ZeroMassReport zero_total_mass_checks(const CentralSystem<T>& cs, const Tolerance& tol = {}) {
    const WeightedSystem<T> ws = cs.weighted();
    if (!has_zero_total_weight(ws, tol))
        throw Error(ErrorCode::PreconditionViolated, "total mass must vanish");
    if (!cs.lambda || is_zero(*cs.lambda, 1.0, tol))
        throw Error(ErrorCode::PreconditionViolated, "lambda must be given and nonzero");

    const Configuration<T>& x = cs.configuration;
    const Index n = x.size();
    const Matrix<T> s = squared_distances(x);
    ZeroMassReport rep;
    const DimCodim dc = dimension_codimension(x, tol);
    rep.codimension = static_cast<long>(dc.codimension);

    {
        Residuals<T> r(x.ambient_dimension() + 1, 1);
        const Matrix<T> xm = config_matrix(x);
        r.values.col(0) = xm * cs.masses;
        r.scale.col(0) = magnitudes_of<T>(xm) * magnitudes_of<T>(Matrix<T>(cs.masses));
        rep.items.push_back({"1: m in W0(X)", r.passes(tol), r.max_abs()});
    }
    {
        Residuals<T> r(x.ambient_dimension(), n);
        bool ok = n > 1;
        for (Index j = 0; j < n && ok; ++j) {
            IndexSet rest;
            for (Index i = 0; i < n; ++i)
                if (i != j)
                    rest.push_back(i);
            const WeightedSystem<T> sub(x.subset(rest), Vector<T>(cs.masses(rest)));
            const Vector<T> g = barycenter(sub, tol);
            r.values.col(j) = g - x.point(j);
            for (Index k = 0; k < x.ambient_dimension(); ++k) {
                double sc = magnitude(x.point(j)(k));
                for (Index i : rest)
                    sc = std::max(sc, magnitude(x.point(i)(k)));
                r.scale(k, j) = sc;
            }
        }
        rep.items.push_back({"2: x_j = bar(X_j, m)", ok && r.passes(tol), r.max_abs()});
    }
    rep.items.push_back({"3a: codimension >= 1", dc.codimension >= 1, 0.0, false});
    {
        Residuals<T> r(n, 1);
        const Vector<T> s_m = s * cs.masses; // mu2(x_i)
        for (Index i = 0; i < n; ++i) {
            r.values(i, 0) = s_m(i) - s_m(0);
            double sc = 0.0;
            for (Index k = 0; k < n; ++k)
                sc = std::max(sc, magnitude(cs.masses(k)) * std::max(magnitude(s(i, k)), magnitude(s(0, k))));
            r.scale(i, 0) = sc;
        }
        rep.items.push_back({"3b: mu2 constant on X", r.passes(tol), r.max_abs()});
    }
    {
        Residuals<T> r(1, 1);
        double sc = 0.0;
        for (Index i = 0; i < n; ++i)
            for (Index j = i + 1; j < n; ++j) {
                r.values(0, 0) += cs.masses(i) * cs.masses(j) * s(i, j);
                sc = std::max(sc, magnitude(cs.masses(i)) * magnitude(cs.masses(j)) * magnitude(s(i, j)));
            }
        r.scale(0, 0) = sc;
        rep.items.push_back({"3c: sum m_i m_j s_ij = 0", r.passes(tol), r.max_abs()});
    }
    {
        Residuals<T> r(n, n);
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < n; ++j) {
                double sc = 0.0;
                for (Index k = 0; k < n; ++k) {
                    r.values(i, j) += cs.masses(k) * (s(i, j) - s(j, k) + s(i, k));
                    sc = std::max(sc, magnitude(cs.masses(k)) *
                                          (magnitude(s(i, j)) + magnitude(s(j, k)) + magnitude(s(i, k))));
                }
                r.scale(i, j) = sc;
            }
        rep.items.push_back({"3d: sum_k m_k (s_ij - s_jk + s_ik) = 0", r.passes(tol), r.max_abs()});
    }
    if (dc.codimension >= 1) {
        Residuals<T> r;
        try {
            r = membership_identities(x, cs.masses, std::nullopt, tol);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::DegenerateFrame)
                throw;
            r = membership_identities(x, cs.masses, find_core(x, tol), tol);
        }
        rep.items.push_back({"4: membership identities for m", r.passes(tol), r.max_abs()});
    } else {
        rep.items.push_back({"4: membership identities for m", false, 0.0, false});
    }
    if (dc.codimension == 1) {
        std::vector<bool> inside;
        for (Index j = 0; j < n; ++j) {
            bool all_pos = true;
            for (Index i = 0; i < n; ++i)
                if (i != j && !(cs.masses(i) / -cs.masses(j) > 0))
                    all_pos = false;
            inside.push_back(all_pos);
        }
        rep.interior = inside;
    }
    return rep;
}

} // namespace moments
