#include "moments/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "moments/central.hpp"
#include "moments/distgeom.hpp"
#include "moments/equilibrium.hpp"
#include "moments/moments.hpp"
#include "moments/nullspace.hpp"
#include "moments/solver.hpp"

namespace moments::cli {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

struct Flags {
    std::string command;
    std::string action;
    std::string input;
    std::optional<double> tolerance;
    bool no_timing = false;
    bool verbose = false;
};

Error input_error(const std::string& msg) {
    return Error(ErrorCode::InvalidInput, msg);
}

// ---- reading ---------------------------------------------------------------

template <class T>
T read_scalar(const json& v, const std::string& field) {
    if constexpr (is_exact_v<T>) {
        if (v.is_number_unsigned())
            return Rational(Integer(v.get<std::uint64_t>()));
        if (v.is_number_integer())
            return Rational(Integer(v.get<std::int64_t>()));
        if (v.is_string())
            return parse_rational(v.get<std::string>());
        throw input_error(field + ": rational mode needs integers or \"p/q\" strings");
    } else {
        if (v.is_number())
            return v.get<double>();
        if (v.is_string())
            return to_double(parse_rational(v.get<std::string>()));
        throw input_error(field + ": expected a number");
    }
}

template <class T>
Vector<T> read_vector(const json& v, const std::string& field) {
    if (!v.is_array())
        throw input_error(field + ": expected an array of numbers");
    Vector<T> out(static_cast<Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i)
        out(static_cast<Index>(i)) = read_scalar<T>(v[i], field);
    return out;
}

/// Array of equally long arrays; `transpose` stores inner arrays as columns.
template <class T>
Matrix<T> read_grid(const json& v, const std::string& field, bool transpose = false) {
    if (!v.is_array() || v.empty())
        throw input_error(field + ": expected a nonempty array of arrays");
    std::vector<Vector<T>> rows;
    for (const auto& r : v) {
        rows.push_back(read_vector<T>(r, field));
        if (rows.back().size() != rows.front().size())
            throw input_error(field + ": rows have unequal length");
    }
    const Index a = static_cast<Index>(rows.size());
    const Index b = rows.front().size();
    Matrix<T> m(transpose ? b : a, transpose ? a : b);
    for (Index i = 0; i < a; ++i) {
        if (transpose)
            m.col(i) = rows[static_cast<std::size_t>(i)];
        else
            m.row(i) = rows[static_cast<std::size_t>(i)].transpose();
    }
    return m;
}

IndexSet read_indices(const json& v, const std::string& field) {
    if (!v.is_array())
        throw input_error(field + ": expected an array of 0-based indices");
    IndexSet out;
    for (const auto& e : v) {
        if (!e.is_number_integer())
            throw input_error(field + ": indices must be integers");
        out.push_back(e.get<Index>());
    }
    return out;
}

template <class T>
struct Doc {
    const json& raw;

    bool has(const char* key) const { return raw.contains(key) && !raw.at(key).is_null(); }

    Configuration<T> points() const {
        if (!has("points"))
            throw input_error("document has no \"points\"");
        return Configuration<T>(read_grid<T>(raw.at("points"), "points", true));
    }

    Vector<T> weights() const {
        if (has("masses"))
            return read_vector<T>(raw.at("masses"), "masses");
        if (has("weights"))
            return read_vector<T>(raw.at("weights"), "weights");
        throw input_error("document needs \"masses\" or \"weights\"");
    }

    T scalar(const char* key) const {
        if (!has(key))
            throw input_error(std::string("document has no \"") + key + "\"");
        return read_scalar<T>(raw.at(key), key);
    }

    std::optional<T> opt_scalar(const char* key) const {
        if (!has(key))
            return std::nullopt;
        return read_scalar<T>(raw.at(key), key);
    }

    Matrix<T> grid(const char* key) const {
        if (!has(key))
            throw input_error(std::string("document has no \"") + key + "\"");
        return read_grid<T>(raw.at(key), key);
    }

    std::optional<IndexSet> indices(const char* key) const {
        if (!has(key))
            return std::nullopt;
        return read_indices(raw.at(key), key);
    }

    CentralSystem<T> central(bool need_lambda = false) const {
        std::optional<T> lam = opt_scalar("lambda");
        if (need_lambda && !lam)
            throw Error(ErrorCode::PreconditionViolated, "document has no \"lambda\"");
        Configuration<T> x = points();
        Vector<T> m = weights();
        return CentralSystem<T>(std::move(x), std::move(m), scalar("exponent_a"), lam);
    }
};

// ---- writing ---------------------------------------------------------------

template <class T>
ojson jv(const T& v) {
    if constexpr (is_exact_v<T>)
        return format_rational(v);
    else
        return std::isfinite(v) ? ojson(v) : ojson(nullptr);
}

template <class Derived>
ojson jvec(const Eigen::MatrixBase<Derived>& v) {
    ojson a = ojson::array();
    for (Index i = 0; i < v.size(); ++i)
        a.push_back(jv(typename Derived::Scalar(v(i))));
    return a;
}

/// Row-major grid.
template <class T>
ojson jgrid(const Matrix<T>& m) {
    ojson a = ojson::array();
    for (Index i = 0; i < m.rows(); ++i)
        a.push_back(jvec(m.row(i)));
    return a;
}

/// One entry per column (points, basis vectors).
template <class T>
ojson jcols(const Matrix<T>& m) {
    ojson a = ojson::array();
    for (Index j = 0; j < m.cols(); ++j)
        a.push_back(jvec(m.col(j)));
    return a;
}

ojson jindices(const IndexSet& s) {
    ojson a = ojson::array();
    for (Index i : s)
        a.push_back(i);
    return a;
}

struct Report {
    double tolerance;
    ojson results = ojson::object();
    ojson checks = ojson::array();
    bool pass = true;

    /// Float checks pass iff the largest residual is within the tolerance;
    /// rational checks iff every residual is exactly zero.
    template <class T>
    void residual(const std::string& name, const Residuals<T>& r) {
        bool ok = true;
        if constexpr (is_exact_v<T>) {
            for (Index j = 0; j < r.values.cols(); ++j)
                for (Index i = 0; i < r.values.rows(); ++i)
                    ok = ok && r.values(i, j) == 0;
        } else {
            ok = r.max_abs() <= tolerance;
        }
        ojson c;
        c["name"] = name;
        c["max_abs_residual"] = r.max_abs();
        if (const auto w = r.worst(); w && r.max_abs() > 0.0)
            c["worst"] = ojson::array({w->first, w->second});
        else
            c["worst"] = nullptr;
        c["pass"] = ok;
        checks.push_back(c);
        pass = pass && ok;
    }

    void boolean(const std::string& name, bool ok, std::optional<double> residual = std::nullopt) {
        ojson c;
        c["name"] = name;
        c["max_abs_residual"] = residual ? ojson(*residual) : ojson(nullptr);
        c["worst"] = nullptr;
        c["pass"] = ok;
        checks.push_back(c);
        pass = pass && ok;
    }
};

/// Residuals of a matrix that should vanish, with a given entry scale.
template <class T>
Residuals<T> grid_residual(const Matrix<T>& values, const Matrix<double>& scale) {
    Residuals<T> r;
    r.values = values;
    r.scale = scale;
    return r;
}

template <class T>
Residuals<T> kernel_residual(const Configuration<T>& x, const Matrix<T>& w) {
    const Matrix<T> xm = config_matrix(x);
    return grid_residual<T>(Matrix<T>(xm * w), magnitudes_of<T>(xm) * magnitudes_of<T>(w));
}

// ---- commands --------------------------------------------------------------

template <class T>
void cmd_moments(const Doc<T>& doc, const Tolerance& tol, Report& rep) {
    Configuration<T> x = doc.points();
    const WeightedSystem<T> ws(std::move(x), doc.weights());
    const Index dim = ws.configuration.ambient_dimension();
    std::vector<Vector<T>> probes;
    if (doc.has("probes")) {
        const Matrix<T> p = read_grid<T>(doc.raw.at("probes"), "probes", true);
        for (Index j = 0; j < p.cols(); ++j)
            probes.emplace_back(p.col(j));
    } else {
        probes.push_back(Vector<T>::Zero(dim));
        for (Index j = 0; j < ws.size(); ++j)
            probes.emplace_back(ws.configuration.point(j));
    }
    const MomentSummary<T> s = summarize_moments(ws, probes, tol);
    rep.results["mu0"] = jv(s.mu0);
    rep.results["barycenter"] = s.barycenter ? jvec(*s.barycenter) : ojson(nullptr);
    ojson pr = ojson::array();
    for (const auto& p : s.probes)
        pr.push_back({{"point", jvec(p.point)}, {"mu1", jvec(p.mu1)}, {"mu2", jv(p.mu2)}});
    rep.results["probes"] = pr;

    const Index k = static_cast<Index>(probes.size());
    Residuals<T> lemma(dim, k * k), hlk(1, k * k), leibniz(1, k);
    for (Index a = 0; a < k; ++a) {
        const auto& p = s.probes[static_cast<std::size_t>(a)];
        leibniz.values(0, a) = leibniz_identity_residual(ws, p.point);
        for (Index b = 0; b < k; ++b) {
            const auto& q = s.probes[static_cast<std::size_t>(b)];
            lemma.values.col(a * k + b) = p.mu1 - q.mu1 - s.mu0 * (q.point - p.point);
            hlk.values(0, a * k + b) = hlk_difference_residual(ws, p.point, q.point);
        }
    }
    rep.residual("lemma: mu1(p) - mu1(q) = mu0 (q - p)", lemma);
    rep.residual("hlk: mu2(p) - mu2(q) = (q - p).(mu1(p) + mu1(q))", hlk);
    rep.residual("leibniz: mu0 mu2(q) = |mu1(q)|^2 + sum w_i w_j s_ij", leibniz);
    if (s.barycenter) {
        Residuals<T> bary(1, k);
        for (Index a = 0; a < k; ++a)
            bary.values(0, a) = hlk_barycentric_residual(ws, probes[static_cast<std::size_t>(a)], tol);
        rep.residual("hlk barycentric: mu2(p) = mu2(G) + mu0 |p - G|^2", bary);
    } else {
        Residuals<T> zero(1, k * k);
        for (Index a = 0; a < k; ++a)
            for (Index b = 0; b < k; ++b)
                zero.values(0, a * k + b) = hlk_zero_weight_residual(
                    ws, probes[static_cast<std::size_t>(a)], probes[static_cast<std::size_t>(b)], tol);
        rep.residual("hlk zero weight: mu2(p) - mu2(q) = 2 mu1 . (q - p)", zero);
    }
}

template <class T>
void cmd_nullspace(const Doc<T>& doc, const std::string& action, const Tolerance& tol, Report& rep) {
    const Configuration<T> x = doc.points();
    const DimCodim dc = dimension_codimension(x, tol);
    rep.results["dimension"] = dc.dimension;
    rep.results["codimension"] = dc.codimension;
    if (action == "codimension")
        return;
    const IndexSet core = doc.indices("core").value_or(find_core(x, tol));
    rep.results["core"] = jindices(core);
    if (action == "core")
        return;
    const DziobekTree tree = dziobek_tree(x, core, tol);
    ojson chain = ojson::array(), leaves = ojson::array();
    for (const auto& c : tree.chain)
        chain.push_back(jindices(c));
    for (const auto& l : tree.leaves)
        leaves.push_back(jindices(l));
    rep.results["tree"] = {{"chain", chain}, {"extras", jindices(tree.extras)}, {"leaves", leaves}};
    if (action == "tree")
        return;
    Matrix<T> basis = Matrix<T>::Zero(x.size(), 0);
    if (dc.codimension > 0) {
        const W0Basis<T> b = w0_basis(x, core, tol);
        basis = b.vectors;
        rep.results["leaf_volumes"] = jgrid(b.volumes);
    }
    rep.results["basis"] = jcols(basis);
    rep.residual("basis in W0(X)", kernel_residual(x, basis));
}

template <class T>
void cmd_membership(const Doc<T>& doc, const Tolerance& tol, Report& rep) {
    const Configuration<T> x = doc.points();
    const Vector<T> w = doc.weights();
    const auto core = doc.indices("core");
    const Residuals<T> r = membership_identities(x, w, core, tol);
    rep.results["residuals"] = jvec(r.values.col(0));
    rep.residual("membership identities", r);
    rep.results["member"] = rep.pass;
}

template <class T>
void cmd_plucker(const Doc<T>& doc, const Tolerance& tol, Report& rep) {
    const Configuration<T> x = doc.points();
    const PlueckerCoordinates<T> p = plucker_coordinates(x, tol);
    rep.results["coordinates"] = {{"p12", jv(p.p12)}, {"p13", jv(p.p13)}, {"p14", jv(p.p14)},
                                  {"p23", jv(p.p23)}, {"p24", jv(p.p24)}, {"p34", jv(p.p34)}};
    Residuals<T> r(1, 1);
    r.values(0, 0) = plucker_relation(p);
    rep.results["residual"] = jv(r.values(0, 0));
    rep.residual("pluecker relation", r);
}

template <class T>
void cmd_equilibrium(const Doc<T>& doc, const std::string& action, Report& rep) {
    const Configuration<T> x = doc.points();
    const InteractionCoefficients<T> phi(doc.grid("phi"));
    const Residuals<T> r = action == "ac" ? verify_equilibrium_ac(x, phi) : verify_equilibrium_leibniz(x, phi);
    rep.results["residuals"] = jgrid(r.values);
    rep.results["newton_third_law"] = phi.symmetric();
    rep.residual(action == "ac" ? "albouy-chenciner equilibrium" : "leibniz bilinear equilibrium", r);
}

template <class T>
void cmd_inverse(const Doc<T>& doc, const Tolerance& tol, Report& rep) {
    const Configuration<T> x = doc.points();
    const InteractionFamily<T> fam = inverse_interactions(x, false, tol);
    rep.results["codimension"] = fam.codimension();
    rep.results["general_parameter_count"] = fam.codimension() * x.size();
    rep.results["symmetric_parameter_count"] = fam.symmetric_parameter_count();
    rep.results["basis"] = jcols(fam.basis);
    rep.residual("basis in W0(X)", kernel_residual(x, fam.basis));
    if (doc.has("S")) {
        const InteractionCoefficients<T> phi = fam.symmetric(doc.grid("S"));
        rep.results["phi"] = jgrid(phi.matrix());
        rep.residual("albouy-chenciner equilibrium", verify_equilibrium_ac(x, phi));
    }
}

template <class T>
void cmd_dziobek(const Doc<T>& doc, const std::string& action, const Tolerance& tol, Report& rep) {
    const Configuration<T> x = doc.points();
    const Matrix<T> basis = w0_basis_matrix(x, tol);
    if (basis.cols() == 0)
        throw Error(ErrorCode::WrongCodimension, "a simplex has a trivial W0 space");
    rep.results["basis"] = jcols(basis);
    if (action == "synthesize") {
        const Matrix<T> f = dziobek_synthesize<T>(basis, doc.grid("S"), tol);
        rep.results["F"] = jgrid(f);
        rep.residual("columns of F in W0(X)", kernel_residual(x, f));
        return;
    }
    const Matrix<T> f = doc.grid("F");
    const DziobekFactorization<T> fac = dziobek_factorize<T>(x, f, basis, tol);
    rep.results["S"] = jgrid(fac.s);
    rep.results["A"] = jgrid(fac.a);
    const Matrix<T> recon = basis * fac.s * basis.transpose();
    const Matrix<double> bm = magnitudes_of<T>(basis);
    rep.residual("F = W S W^T",
                 grid_residual<T>(Matrix<T>(recon - f),
                                  Matrix<double>(bm * magnitudes_of<T>(fac.s) * bm.transpose() + magnitudes_of<T>(f))));
}

template <class T>
void minor_check(Report& rep, const std::string& name, const Matrix<T>& m, Index c) {
    const auto best = largest_minor<T>(m, c + 1);
    Residuals<T> r(1, 1);
    if (best) {
        r.values(0, 0) = best->value;
        rep.results[name + " largest minor"] = {
            {"rows", jindices(best->rows)}, {"cols", jindices(best->cols)}, {"value", jv(best->value)}};
    }
    rep.residual(name, r);
}

template <class T>
void cmd_central(const Doc<T>& doc, const std::string& action, const Tolerance& tol, Report& rep) {
    if (action == "zero-mass") {
        const CentralSystem<T> cs = doc.central(true);
        const ZeroMassReport z = zero_total_mass_checks(cs, tol);
        rep.results["codimension"] = z.codimension;
        rep.results["lambda"] = jv(*cs.lambda);
        if (z.interior) {
            ojson a = ojson::array();
            for (bool b : *z.interior)
                a.push_back(b);
            rep.results["strictly_inside_hull_of_others"] = a;
        }
        for (const auto& item : z.items) {
            const bool ok = (is_exact_v<T> || !item.has_residual) ? item.pass
                                                                   : item.max_abs_residual <= rep.tolerance;
            rep.boolean(item.name, ok, item.has_residual ? std::optional<double>(item.max_abs_residual)
                                                         : std::nullopt);
        }
        return;
    }
    const CentralSystem<T> base = doc.central();
    if (action == "fit-lambda") {
        const LambdaFit<T> fit = fit_lambda(base, tol);
        rep.results["lambda"] = jv(fit.lambda);
        rep.results["definitional_lambda"] = jv(fit.definitional_lambda);
        rep.results["center"] = jvec(fit.center);
        rep.results["gamma_center"] = jvec(fit.gamma_center);
        rep.results["residual"] = fit.residual;
        const CentralSystem<T> cs(base.configuration, base.masses, base.exponent, fit.lambda);
        rep.residual("gamma_j + lambda (x_j - G) = 0", definition_residuals(cs, tol));
        return;
    }
    const bool fitted = !base.lambda;
    const T lam = fitted ? fit_lambda(base, tol).lambda : *base.lambda;
    const CentralSystem<T> cs(base.configuration, base.masses, base.exponent, lam);
    rep.results["lambda"] = jv(lam);
    rep.results["definitional_lambda"] = jv(T(-lam));
    rep.results["lambda_source"] = fitted ? "fitted" : "document";
    rep.results["s_matrix"] = jgrid(s_matrix(cs, tol));
    if (action == "verify-ac") {
        const Residuals<T> r = verify_central_ac(cs, tol);
        rep.results["residuals"] = jgrid(r.values);
        rep.residual("albouy-chenciner", r);
    } else if (action == "verify-dias") {
        const Residuals<T> r = verify_central_dias(cs, doc.indices("core"), tol);
        rep.results["residuals"] = jgrid(r.values);
        rep.residual("dias", r);
    } else if (action == "verify-minors") {
        const Index c = dimension_codimension(cs.configuration, tol).codimension;
        rep.results["codimension"] = c;
        Matrix<T> m = cc_weight_vectors(cs, tol);
        if (doc.has("kernel_vectors")) {
            const Matrix<T> extra = read_grid<T>(doc.raw.at("kernel_vectors"), "kernel_vectors", true);
            if (extra.rows() != cs.size())
                throw Error(ErrorCode::ShapeMismatch, "kernel vectors must have one entry per point");
            Matrix<T> joined(cs.size(), m.cols() + extra.cols());
            joined << m, extra;
            m = joined;
        }
        minor_check(rep, "minors of [C | kernel vectors]", m, c);
        minor_check(rep, "minors of S", s_matrix(cs, tol), c);
    } else if (action == "verify-leibniz") {
        const Residuals<T> r = verify_central_extended_leibniz(cs, tol);
        rep.results["residuals"] = jgrid(r.values);
        rep.residual("extended leibniz", r);
    }
}

template <class T>
void cmd_distgeom(const Doc<T>& doc, const std::string& action, const Tolerance& tol, Report& rep) {
    const Configuration<T> x = doc.points();
    if (action == "cm-det") {
        const auto idx = doc.indices("indices");
        if (idx)
            rep.results["indices"] = jindices(*idx);
        rep.results["cayley_menger_det"] = jv(cayley_menger_det(x, idx));
    } else if (action == "cospherical") {
        const Cospherical<T> c = cospherical_test(x, tol);
        rep.results["center"] = c.center ? jvec(*c.center) : ojson(nullptr);
        rep.results["radius_squared"] = c.radius_squared ? jv(*c.radius_squared) : ojson(nullptr);
        if (c.det_b) {
            rep.results["det_b"] = jv(*c.det_b);
            rep.results["det_b_vanishes"] = *c.det_b_vanishes;
        }
        rep.boolean("co-spherical", c.cospherical);
    } else if (action == "constraints") {
        const Index d = doc.has("d") ? doc.raw.at("d").template get<Index>()
                                     : dimension_codimension(x, tol).dimension;
        const Index n = x.size();
        rep.results["n"] = n;
        rep.results["d"] = d;
        rep.results["count"] = constraint_count(n, d);
        if (n - 1 - d < 1) {
            rep.results["sets"] = ojson::array();
            return;
        }
        const auto sets = constraint_set(n, d);
        ojson js = ojson::array();
        Residuals<T> r(1, static_cast<Index>(sets.size()));
        for (std::size_t k = 0; k < sets.size(); ++k) {
            js.push_back(jindices(sets[k]));
            r.values(0, static_cast<Index>(k)) = cayley_menger_det(x, sets[k]);
        }
        rep.results["sets"] = js;
        rep.results["determinants"] = jvec(r.values.row(0));
        rep.residual("cayley-menger determinants vanish", r);
        const ConstraintIndependence ind = constraint_independence(x, d, tol);
        rep.results["jacobian_rank"] = ind.rank;
        rep.boolean("jacobian has full row rank", ind.independent());
    } else if (action == "kernel-bridge") {
        const KernelCorrespondence<T> k = kernel_correspondence(x, tol);
        rep.results["codimension"] = k.codimension;
        rep.results["basis"] = jcols(k.basis);
        ojson w0 = ojson::array();
        for (const auto& v : k.w0)
            w0.push_back(jv(v));
        rep.results["w0"] = w0;
        rep.results["kernel_c_dimension"] = k.kernel_c_dimension;
        rep.results["kernel_b_zero_sum_dimension"] = k.kernel_b_zero_sum_dimension;
        rep.results["equality"] = k.equality;
        rep.boolean("w0 well defined", k.well_defined);
        rep.boolean("(w0, W) in Ker C(X)", k.lifts_into_kernel);
        rep.boolean("dim Ker C(X) = codimension", k.kernel_c_dimension == k.codimension);
        rep.boolean("Ker B(X) with mu0 = 0 inside W0(X)", k.inclusion);
    }
}

void cmd_solve(const Doc<double>& doc, Report& rep) {
    SolveOptions opts;
    if (doc.has("max_iterations"))
        opts.max_iterations = doc.raw.at("max_iterations").get<int>();
    if (doc.has("solve_tolerance"))
        opts.tolerance = doc.scalar("solve_tolerance");
    if (doc.has("damping"))
        opts.damping = doc.scalar("damping");
    rep.results["solve_tolerance"] = opts.tolerance;
    rep.results["max_iterations"] = opts.max_iterations;
    try {
        const Configuration<double> initial = doc.points();
        const Vector<double> masses = doc.weights();
        const SolveResult r = solve_central(masses, doc.scalar("exponent_a"), initial, opts);
        rep.results["converged"] = r.converged;
        rep.results["iterations"] = r.iterations;
        rep.results["lambda"] = r.lambda;
        rep.results["definitional_lambda"] = -r.lambda;
        rep.results["configuration"] = jcols(r.configuration.points());
        rep.results["residual_history"] = r.residual_history;
        rep.results["certificate_tolerance"] = r.certificate.tolerance;
        rep.boolean("final residual within solve tolerance", r.residual_history.back() <= opts.tolerance,
                    r.residual_history.back());
        const SolveCertificate& c = r.certificate;
        rep.boolean("certificate: albouy-chenciner", c.ac.pass, c.ac.max_abs_residual);
        rep.boolean("certificate: minors", c.minors.pass, c.minors.max_abs_residual);
        rep.boolean("certificate: extended leibniz", c.extended_leibniz.pass, c.extended_leibniz.max_abs_residual);
        if (c.dias)
            rep.boolean("certificate: dias", c.dias->pass, c.dias->max_abs_residual);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::MaxIterations && e.code() != ErrorCode::SingularJacobian)
            throw;
        rep.results["converged"] = false;
        rep.results["failure"] = {{"code", to_string(e.code())}, {"message", e.what()}};
        rep.boolean("converged", false);
    }
}

template <class T>
void dispatch(const Flags& f, const json& raw, const Tolerance& tol, Report& rep) {
    const Doc<T> doc{raw};
    if (f.command == "moments")
        cmd_moments(doc, tol, rep);
    else if (f.command == "nullspace")
        cmd_nullspace(doc, f.action, tol, rep);
    else if (f.command == "membership")
        cmd_membership(doc, tol, rep);
    else if (f.command == "plucker")
        cmd_plucker(doc, tol, rep);
    else if (f.command == "verify-equilibrium")
        cmd_equilibrium(doc, f.action, rep);
    else if (f.command == "inverse-interactions")
        cmd_inverse(doc, tol, rep);
    else if (f.command == "dziobek")
        cmd_dziobek(doc, f.action, tol, rep);
    else if (f.command == "central")
        cmd_central(doc, f.action, tol, rep);
    else if (f.command == "distgeom")
        cmd_distgeom(doc, f.action, tol, rep);
    else if (f.command == "solve") {
        if constexpr (is_exact_v<T>)
            throw Error(ErrorCode::ModeUnsupported, "solve runs in float mode only");
        else
            cmd_solve(doc, rep);
    }
}

const std::map<std::string, std::vector<std::string>>& command_table() {
    static const std::map<std::string, std::vector<std::string>> t = {
        {"moments", {}},
        {"nullspace", {"codimension", "core", "tree", "basis"}},
        {"membership", {}},
        {"plucker", {}},
        {"verify-equilibrium", {"ac", "leibniz"}},
        {"inverse-interactions", {}},
        {"dziobek", {"factorize", "synthesize"}},
        {"central", {"fit-lambda", "verify-ac", "verify-dias", "verify-minors", "verify-leibniz", "zero-mass"}},
        {"distgeom", {"cm-det", "cospherical", "constraints", "kernel-bridge"}},
        {"solve", {}},
    };
    return t;
}

void print_error(std::ostream& out, std::ostream& err, const std::string& command, std::string_view code,
                 const std::string& message) {
    ojson e;
    e["command"] = command;
    e["error"] = {{"code", std::string(code)}, {"message", message}};
    out << e.dump(2) << "\n";
    err << "error: " << message << "\n";
}

} // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
    CLI::App app{"Moments, W0(X), equilibria and central configurations"};
    app.name("moments-cli");
    app.fallthrough();
    app.require_subcommand(1);
    Flags f;
    double tolerance = 0.0;
    CLI::Option* tol_opt = app.add_option("--tolerance", tolerance, "zero tolerance for float checks (default 1e-9)");
    app.add_flag("--no-timing", f.no_timing, "omit the timing field");
    app.add_flag("--verbose", f.verbose, "human-readable summary on stderr");

    for (const auto& [name, actions] : command_table()) {
        CLI::App* sub = app.add_subcommand(name);
        sub->fallthrough();
        if (actions.empty()) {
            sub->add_option("input", f.input, "input document, or - for stdin")->required();
            continue;
        }
        if (name == "nullspace")
            sub->add_option("input", f.input, "input document, or - for stdin");
        else
            sub->require_subcommand(1);
        for (const auto& a : actions) {
            CLI::App* leaf = sub->add_subcommand(a);
            leaf->fallthrough();
            leaf->add_option("input", f.input, "input document, or - for stdin")->required();
        }
    }

    std::vector<const char*> argv{"moments-cli"};
    for (const auto& a : args)
        argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n" << app.help();
        return 2;
    }
    CLI::App* top = app.get_subcommands().front();
    f.command = top->get_name();
    if (!top->get_subcommands().empty())
        f.action = top->get_subcommands().front()->get_name();
    if (f.command == "nullspace" && f.input.empty()) {
        err << "usage error: nullspace needs an input document\n";
        return 2;
    }
    if (tol_opt->count() > 0)
        f.tolerance = tolerance;
    const std::string label = f.action.empty() ? f.command : f.command + " " + f.action;

    const auto start = std::chrono::steady_clock::now();
    json doc;
    try {
        if (f.input == "-") {
            doc = json::parse(in);
        } else {
            std::ifstream file(f.input);
            if (!file)
                throw input_error("cannot open " + f.input);
            doc = json::parse(file);
        }
    } catch (const json::exception& e) {
        print_error(out, err, label, "InvalidInput", std::string("malformed document: ") + e.what());
        return 2;
    } catch (const Error& e) {
        print_error(out, err, label, to_string(e.code()), e.what());
        return 2;
    }

    Report rep{1e-9};
    std::string mode = "float";
    try {
        if (!doc.is_object())
            throw input_error("document must be an object");
        if (doc.contains("mode")) {
            if (!doc.at("mode").is_string())
                throw input_error("mode must be \"rational\" or \"float\"");
            mode = doc.at("mode").get<std::string>();
            if (mode != "rational" && mode != "float")
                throw input_error("mode must be \"rational\" or \"float\"");
        }
        if (f.tolerance)
            rep.tolerance = *f.tolerance;
        else if (doc.contains("tolerance"))
            rep.tolerance = read_scalar<double>(doc.at("tolerance"), "tolerance");
        if (!(rep.tolerance > 0.0))
            throw input_error("tolerance must be positive");
        const Tolerance tol{rep.tolerance};
        if (mode == "rational")
            dispatch<Rational>(f, doc, tol, rep);
        else
            dispatch<double>(f, doc, tol, rep);
    } catch (const Error& e) {
        print_error(out, err, label, to_string(e.code()), e.what());
        return 2;
    } catch (const json::exception& e) {
        print_error(out, err, label, "InvalidInput", e.what());
        return 2;
    }
    const auto elapsed = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start);

    ojson report;
    report["command"] = label;
    report["mode"] = mode;
    report["tolerance"] = rep.tolerance;
    report["inputs"] = ojson::parse(doc.dump());
    report["checks"] = rep.checks;
    report["results"] = rep.results;
    report["pass"] = rep.pass;
    if (!f.no_timing)
        report["timing_ms"] = elapsed.count();
    out << report.dump(2) << "\n";

    if (f.verbose) {
        err << label << " [" << mode << ", tolerance " << rep.tolerance << "]: " << (rep.pass ? "PASS" : "FAIL")
            << "\n";
        for (const auto& c : rep.checks) {
            err << "  " << (c["pass"].get<bool>() ? "pass" : "FAIL") << "  " << c["name"].get<std::string>();
            if (!c["max_abs_residual"].is_null())
                err << "  max |residual| = " << c["max_abs_residual"].get<double>();
            err << "\n";
        }
    }
    return rep.pass ? 0 : 1;
}

} // namespace moments::cli
