#include "moments/solver.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>

namespace moments {

namespace {

Index residual_count(Index n, Index dim) {
    return n * (n - 1) + 1 + dim;
}

double max_abs(const Vector<double>& v) {
    return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

Matrix<double> unpack(const Vector<double>& z, Index dim, Index n) {
    return Eigen::Map<const Matrix<double>>(z.data(), dim, n);
}

Vector<double> pack(const Matrix<double>& x, double lambda) {
    Vector<double> z(x.size() + 1);
    z.head(x.size()) = Eigen::Map<const Vector<double>>(x.data(), x.size());
    z(x.size()) = lambda;
    return z;
}

void check_inputs(const Vector<double>& masses, const Matrix<double>& x) {
    if (masses.size() != x.cols())
        throw Error(ErrorCode::DimensionMismatch, "mass vector length differs from point count");
    if (x.cols() < 2)
        throw Error(ErrorCode::InvalidInput, "the solver needs at least two points");
}

} // namespace

Vector<double> ac_residuals(const Vector<double>& masses, double a, const Matrix<double>& x, double lambda) {
    check_inputs(masses, x);
    const Index n = x.cols();
    const Index dim = x.rows();
    const double mu0 = masses.sum();
    const double ratio = lambda / mu0;
    const Matrix<double> s = squared_distances(Configuration<double>(x));
    Vector<double> r(residual_count(n, dim));
    Index row = 0;
    for (Index j = 0; j < n; ++j)
        for (Index k = 0; k < n; ++k) {
            if (k == j)
                continue;
            double acc = 0.0;
            for (Index i = 0; i < n; ++i)
                if (i != j)
                    acc += masses(i) * (power(s(i, j), a) - ratio) * (s(i, j) + s(j, k) - s(k, i));
            r(row++) = acc;
        }
    r(row++) = s(0, 1) - 1.0;
    r.tail(dim) = x * masses / mu0;
    return r;
}

Matrix<double> ac_jacobian(const Vector<double>& masses, double a, const Matrix<double>& x, double lambda) {
    check_inputs(masses, x);
    const Index n = x.cols();
    const Index dim = x.rows();
    const double mu0 = masses.sum();
    const double ratio = lambda / mu0;
    const Matrix<double> s = squared_distances(Configuration<double>(x));
    Matrix<double> jac = Matrix<double>::Zero(residual_count(n, dim), x.size() + 1);
    Matrix<double> g(n, n); // d r / d s_pq, symmetric
    Index row = 0;
    for (Index j = 0; j < n; ++j)
        for (Index k = 0; k < n; ++k) {
            if (k == j)
                continue;
            g.setZero();
            double dlambda = 0.0;
            for (Index i = 0; i < n; ++i) {
                if (i == j)
                    continue;
                const double bracket = s(i, j) + s(j, k) - s(k, i);
                const double t = masses(i) * (power(s(i, j), a) - ratio);
                const double dpow = a * power(s(i, j), a - 1.0);
                g(i, j) += masses(i) * dpow * bracket + t;
                g(j, k) += t;
                if (k != i)
                    g(k, i) -= t;
                dlambda -= masses(i) * bracket / mu0;
            }
            const Matrix<double> gs = g + g.transpose();
            for (Index p = 0; p < n; ++p)
                for (Index q = 0; q < n; ++q) {
                    if (p == q || gs(p, q) == 0.0)
                        continue;
                    // Each unordered pair was stored once in g, so gs(p,q) is its coefficient.
                    jac.block(row, p * dim, 1, dim) += 2.0 * gs(p, q) * (x.col(p) - x.col(q)).transpose();
                }
            jac(row, x.size()) = dlambda;
            ++row;
        }
    jac.block(row, 0, 1, dim) = 2.0 * (x.col(0) - x.col(1)).transpose();
    jac.block(row, dim, 1, dim) = -2.0 * (x.col(0) - x.col(1)).transpose();
    ++row;
    for (Index p = 0; p < n; ++p)
        for (Index c = 0; c < dim; ++c)
            jac(row + c, p * dim + c) = masses(p) / mu0;
    return jac;
}

SolveCertificate certify_central(const CentralSystem<double>& cs, double tol) {
    const Tolerance t{tol};
    SolveCertificate cert;
    cert.tolerance = tol;
    cert.ac = summarize("ac", verify_central_ac(cs, t), t);
    const auto minors = verify_central_minors<double>(cs, std::nullopt, t);
    cert.minors.name = "minors";
    cert.minors.pass = minors.vanishes();
    if (minors.weight_vectors.witness)
        cert.minors.max_abs_residual = std::abs(minors.weight_vectors.witness->value);
    if (minors.s_grid.witness)
        cert.minors.max_abs_residual =
            std::max(cert.minors.max_abs_residual, std::abs(minors.s_grid.witness->value));
    cert.extended_leibniz = summarize("extended_leibniz", verify_central_extended_leibniz(cs, t), t);
    if (dimension_codimension(cs.configuration, t).codimension >= 1) {
        Residuals<double> dias;
        try {
            dias = verify_central_dias(cs, std::nullopt, t);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::DegenerateFrame)
                throw;
            dias = verify_central_dias(cs, find_core(cs.configuration, t), t);
        }
        cert.dias = summarize("dias", dias, t);
    }
    return cert;
}

SolveResult solve_central(const Vector<double>& masses, double a, const Configuration<double>& initial,
                          const SolveOptions& opts) {
    if (opts.max_iterations < 1 || !(opts.tolerance > 0.0) || !(opts.damping > 0.0))
        throw Error(ErrorCode::InvalidInput, "need max_iterations >= 1, tolerance > 0, damping > 0");
    if (a == 0.0)
        throw Error(ErrorCode::PreconditionViolated, "exponent a must be nonzero");
    check_inputs(masses, initial.points());
    // Validates masses and distinct points, and supplies the starting lambda.
    const CentralSystem<double> start(initial, masses, a);
    detail::require_distinct(initial);
    detail::require_nonzero_mass(start, Tolerance{});

    const Index dim = initial.ambient_dimension();
    const Index n = initial.size();
    const WeightedSystem<double> ws(initial, masses);
    Matrix<double> x = initial.points().colwise() - barycenter(ws);
    x /= std::sqrt(squared_distance(Configuration<double>(x), 0, 1));
    const double lambda0 = fit_lambda(CentralSystem<double>(Configuration<double>(x), masses, a)).lambda;

    Vector<double> z = pack(x, lambda0);
    Vector<double> r = ac_residuals(masses, a, x, lambda0);
    double trust = std::min(opts.damping, 1.0);
    SolveResult out;
    bool done = false;
    while (true) {
        out.residual_history.push_back(max_abs(r));
        if (max_abs(r) <= opts.tolerance) {
            done = true;
            break;
        }
        if (out.iterations >= opts.max_iterations)
            break;
        ++out.iterations;
        const Matrix<double> jac = ac_jacobian(masses, a, unpack(z, dim, n), z(z.size() - 1));
        Eigen::CompleteOrthogonalDecomposition<Matrix<double>> cod(jac);
        if (cod.rank() == 0)
            throw Error(ErrorCode::SingularJacobian, "Jacobian vanishes");
        const Vector<double> step = -cod.solve(r);
        if (!step.allFinite())
            throw Error(ErrorCode::SingularJacobian, "Gauss-Newton step is not finite");
        // Retry with a shrinking trust factor until the residual norm drops.
        while (true) {
            const Vector<double> trial = z + trust * step;
            const Matrix<double> tx = unpack(trial, dim, n);
            bool distinct = true;
            for (Index i = 0; i < n && distinct; ++i)
                for (Index j = i + 1; j < n && distinct; ++j)
                    distinct = (tx.col(i) - tx.col(j)).squaredNorm() > 0.0;
            Vector<double> tr;
            if (distinct)
                tr = ac_residuals(masses, a, tx, trial(trial.size() - 1));
            if (distinct && tr.allFinite() && tr.norm() < r.norm()) {
                z = trial;
                r = tr;
                trust = std::min(1.0, 2.0 * trust);
                break;
            }
            trust /= 2.0;
            if (trust < 1e-12)
                throw Error(ErrorCode::SingularJacobian, "no descent along the Gauss-Newton direction");
        }
    }
    if (!done)
        throw Error(ErrorCode::MaxIterations,
                    "no convergence in " + std::to_string(opts.max_iterations) + " iterations");

    out.configuration = Configuration<double>(unpack(z, dim, n));
    out.lambda = z(z.size() - 1);
    const CentralSystem<double> final_cs(out.configuration, masses, a, out.lambda);
    out.certificate = certify_central(final_cs, 10.0 * opts.tolerance);
    out.converged = out.certificate.passed();
    return out;
}

} // namespace moments
