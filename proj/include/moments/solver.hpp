#pragma once

// Damped Gauss-Newton search for central configurations. The unknowns are
// the point coordinates (in the dimension of the initial configuration) and
// lambda; the residuals are the Albouy-Chenciner entries for j != k plus a
// gauge fixing s_12 = 1 and the center of mass at the origin.

#include <optional>
#include <vector>

#include "moments/central.hpp"
#include "moments/residuals.hpp"

namespace moments {

struct SolveOptions {
    int max_iterations = 50;
    double tolerance = 1e-10;
    double damping = 1.0; ///< initial trust factor, in (0, 1]
};

struct SolveCertificate {
    CheckSummary ac;
    CheckSummary minors;
    CheckSummary extended_leibniz;
    std::optional<CheckSummary> dias; ///< present when c >= 1
    double tolerance = 0.0;

    bool passed() const { return ac.pass && minors.pass && extended_leibniz.pass && (!dias || dias->pass); }
};

struct SolveResult {
    Configuration<double> configuration;
    double lambda = 0.0;
    std::vector<double> residual_history; ///< max-abs stacked residual per iteration
    int iterations = 0;
    bool converged = false;
    SolveCertificate certificate;
};

/// Stacked residual vector at (X, lambda), in the solver's ordering.
Vector<double> ac_residuals(const Vector<double>& masses, double a, const Matrix<double>& x, double lambda);

/// Analytic Jacobian of ac_residuals with respect to (vec(X) column-major, lambda).
Matrix<double> ac_jacobian(const Vector<double>& masses, double a, const Matrix<double>& x, double lambda);

/// Runs the four central verification families at tolerance `tol`.
SolveCertificate certify_central(const CentralSystem<double>& cs, double tol);

/// Throws ZeroTotalWeight, CoincidentPoints, SingularJacobian (no descent
/// direction left) or MaxIterations.
SolveResult solve_central(const Vector<double>& masses, double a, const Configuration<double>& initial,
                          const SolveOptions& opts = {});

} // namespace moments
