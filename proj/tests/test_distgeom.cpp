#include <doctest.h>

#include <algorithm>
#include <functional>

#include "helpers.hpp"
#include "moments/distgeom.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace moments;
using th::pts;
using th::q;
using th::vec;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::InvalidInput;
}

/// Bordered distance matrix of `set` with s_ij shifted by e (both entries).
Rational bordered_det(const Matrix<Rational>& s, const IndexSet& set, Index i, Index j, const Rational& e) {
    const Index k = static_cast<Index>(set.size());
    Matrix<Rational> c = Matrix<Rational>::Ones(k + 1, k + 1);
    c(0, 0) = 0;
    for (Index a = 0; a < k; ++a)
        for (Index b = 0; b < k; ++b) {
            Rational v = s(set[static_cast<std::size_t>(a)], set[static_cast<std::size_t>(b)]);
            const Index p = set[static_cast<std::size_t>(a)], r = set[static_cast<std::size_t>(b)];
            if ((p == i && r == j) || (p == j && r == i))
                v += e;
            c(a + 1, b + 1) = v;
        }
    return oracle::leibniz_det(c);
}

/// Points on the unit circle from the rational parametrization.
Configuration<Rational> circle_points(gen::Rng& rng, Index n) {
    Matrix<Rational> m(2, n);
    std::vector<Rational> used;
    for (Index k = 0; k < n; ++k) {
        Rational t;
        do {
            t = rng.rational();
        } while (std::find(used.begin(), used.end(), t) != used.end());
        used.push_back(t);
        m(0, k) = (Rational(1) - t * t) / (Rational(1) + t * t);
        m(1, k) = Rational(2) * t / (Rational(1) + t * t);
    }
    return Configuration<Rational>(m);
}

} // namespace

TEST_CASE("relative configuration matrix") {
    const Matrix<Rational> seg = rel_config_matrix(pts<Rational>({{q(0)}, {q(1)}}));
    CHECK(seg(0, 1) == 1);
    CHECK(seg(0, 0) == 0);
    const Matrix<Rational> sq = rel_config_matrix(th::unit_square<Rational>());
    CHECK(sq(0, 1) == 1);
    CHECK(sq(0, 2) == 2);
    CHECK(sq(1, 3) == 2);
    CHECK(sq == Matrix<Rational>(sq.transpose()));
    const Matrix<double> tri = rel_config_matrix(th::equilateral());
    CHECK(tri(0, 2) == doctest::Approx(1.0));
    CHECK(tri(1, 2) == doctest::Approx(1.0));
}

TEST_CASE("Cayley-Menger matrix and determinant") {
    const Matrix<Rational> c = cayley_menger_matrix(th::unit_square<Rational>());
    REQUIRE(c.rows() == 5);
    CHECK(c(0, 0) == 0);
    CHECK(c.row(0).tail(4) == Matrix<Rational>::Ones(1, 4));
    CHECK(c.bottomRightCorner(4, 4) == rel_config_matrix(th::unit_square<Rational>()));

    CHECK(cayley_menger_det(th::equilateral()) == doctest::Approx(-3.0));
    CHECK(cayley_menger_det(pts<Rational>({{q(0)}, {q(1)}, {q(2)}})) == 0);
    const auto pair = pts<Rational>({{q(0), q(0)}, {q(3), q(4)}});
    CHECK(cayley_menger_det(pair) == oracle::leibniz_det(cayley_menger_matrix(pair)));
    CHECK(cayley_menger_det(pair) == 50);
    CHECK(cayley_menger_det(th::unit_square<Rational>(), IndexSet{0, 1, 2}) == -4);
}

TEST_CASE("triangle determinant is -16 area squared") {
    gen::Rng rng(51);
    for (int t = 0; t < 50; ++t) {
        const Matrix<Rational> m = rng.rational_matrix(2, 3);
        const Configuration<Rational> x(m);
        const Rational twice = oracle::twice_signed_area<Rational>(m.col(0), m.col(1), m.col(2));
        CHECK(cayley_menger_det(x) == Rational(-4) * twice * twice);
    }
}

TEST_CASE("kernel of the Cayley-Menger matrix has dimension c") {
    gen::Rng rng(52);
    for (int t = 0; t < 60; ++t) {
        const Index d = rng.integer(1, 3), n = d + 1 + rng.integer(0, 3);
        const auto x = gen::configuration(rng, n, d, d + rng.integer(0, 1));
        const Index c = n - 1 - d;
        CHECK(oracle::kernel(cayley_menger_matrix(x)).cols() == c);
        CHECK(kernel_correspondence(x).kernel_c_dimension == c);
        if (c == 0)
            continue;
        const Matrix<Rational> cm = cayley_menger_matrix(x);
        const Index k = n - c + 2;
        for (const auto& rows : combinations(n + 1, k))
            CHECK(determinant<Rational>(Matrix<Rational>(cm(rows, rows))) == 0);
    }
}

TEST_CASE("kernel correspondence") {
    const auto sq = kernel_correspondence(th::unit_square<Rational>());
    CHECK(sq.codimension == 1);
    REQUIRE(sq.w0.size() == 1);
    CHECK(sq.w0[0] == 0);
    CHECK(sq.well_defined);
    CHECK(sq.lifts_into_kernel);
    CHECK(sq.inclusion);
    CHECK(sq.equality);
    CHECK(sq.passed());

    const auto simplex = kernel_correspondence(pts<Rational>({{q(0), q(0)}, {q(1), q(0)}, {q(0), q(1)}}));
    CHECK(simplex.codimension == 0);
    CHECK(simplex.kernel_c_dimension == 0);
    CHECK(simplex.kernel_b_zero_sum_dimension == 0);

    const auto trap = kernel_correspondence(pts<Rational>({{q(0), q(0)}, {q(4), q(0)}, {q(2), q(1)}, {q(0), q(1)}}));
    CHECK(trap.codimension == 1);
    REQUIRE(trap.w0.size() == 1);
    CHECK(trap.w0[0] != 0);
    CHECK(trap.inclusion);
    CHECK(!trap.equality);
    CHECK(trap.kernel_b_zero_sum_dimension == 0);
    CHECK(trap.passed());
}

TEST_CASE("kernel correspondence holds on random configurations") {
    gen::Rng rng(53);
    for (int t = 0; t < 40; ++t) {
        const Index d = rng.integer(1, 3), n = d + 1 + rng.integer(0, 3);
        const auto x = gen::configuration(rng, n, d, d);
        const auto rep = kernel_correspondence(x);
        CHECK(rep.passed());
        // Lift of each basis vector, rebuilt by hand and checked against C(X).
        const Matrix<Rational> s = squared_distances(x);
        const Matrix<Rational> cm = cayley_menger_matrix(x);
        for (Index l = 0; l < rep.codimension; ++l) {
            Vector<Rational> lift(n + 1);
            lift(0) = -s.row(0).dot(rep.basis.col(l));
            lift.tail(n) = rep.basis.col(l);
            CHECK((cm * lift).isZero());
            CHECK(lift(0) == rep.w0[static_cast<std::size_t>(l)]);
        }
    }
}

TEST_CASE("co-spherical test") {
    const auto sq = cospherical_test(th::unit_square<Rational>());
    CHECK(sq.cospherical);
    REQUIRE(sq.center.has_value());
    CHECK(*sq.center == vec({q(1, 2), q(1, 2)}));
    CHECK(*sq.radius_squared == q(1, 2));
    CHECK(sq.det_b_vanishes.value());

    CHECK(!cospherical_test(pts<Rational>({{q(0), q(0)}, {q(1), q(0)}, {q(2), q(0)}})).cospherical);
    const auto rect = cospherical_test(pts<Rational>({{q(0), q(0)}, {q(2), q(0)}, {q(2), q(1)}, {q(0), q(1)}}));
    CHECK(rect.cospherical);
    CHECK(*rect.radius_squared == q(5, 4));

    const auto trap = cospherical_test(pts<Rational>({{q(0), q(0)}, {q(4), q(0)}, {q(2), q(1)}, {q(0), q(1)}}));
    CHECK(!trap.cospherical);
    CHECK(!trap.det_b_vanishes.value());

    const auto tri = cospherical_test(pts<Rational>({{q(0), q(0)}, {q(1), q(0)}, {q(0), q(1)}}));
    CHECK(tri.cospherical);
    CHECK(!tri.det_b.has_value());
}

TEST_CASE("co-spherical configurations have singular distance matrices") {
    gen::Rng rng(54);
    for (int t = 0; t < 20; ++t) {
        const auto x = circle_points(rng, rng.integer(4, 6));
        const auto c = cospherical_test(x);
        CHECK(c.cospherical);
        CHECK(*c.radius_squared == 1);
        CHECK(c.center->isZero());
        CHECK(*c.det_b == 0);
        const auto k = kernel_correspondence(x);
        CHECK(k.equality);
        for (const auto& w : k.w0)
            CHECK(w == 0);
    }
}

TEST_CASE("constraint counts and sets") {
    CHECK(constraint_count(4, 2) == 1);
    CHECK(constraint_count(5, 2) == 3);
    CHECK(constraint_count(3, 2) == 0);
    CHECK(constraint_count(6, 3) == 3);
    CHECK(code_of([] { constraint_count(3, 0); }) == ErrorCode::OutOfRange);
    CHECK(code_of([] { constraint_count(3, 3); }) == ErrorCode::OutOfRange);

    CHECK(constraint_set(4, 2) == std::vector<IndexSet>{{0, 1, 2, 3}});
    CHECK(constraint_set(5, 2) == std::vector<IndexSet>{{0, 1, 2, 3}, {0, 1, 2, 4}, {0, 1, 3, 4}});
    const auto six = constraint_set(6, 3);
    CHECK(six.size() == 3);
    for (const auto& s : six)
        CHECK(s.size() == 5);
    CHECK(code_of([] { constraint_set(3, 2); }) == ErrorCode::OutOfRange);
    for (Index n = 3; n <= 9; ++n)
        for (Index d = 1; d <= n - 2; ++d)
            CHECK(static_cast<Index>(constraint_set(n, d).size()) == constraint_count(n, d));
}

TEST_CASE("constraint determinants vanish on the d-flat and detect leaving it") {
    gen::Rng rng(55);
    for (int t = 0; t < 30; ++t) {
        const Index d = rng.integer(1, 3), n = d + 2 + rng.integer(0, 2);
        const auto x = gen::configuration(rng, n, d, d + 1);
        for (const auto& s : constraint_set(n, d))
            CHECK(cayley_menger_det(x, s) == 0);
        Matrix<Rational> moved = x.points();
        const Index p = rng.integer(0, n - 1);
        moved.col(p) += rng.rational_vector(d + 1);
        const Configuration<Rational> y(moved);
        if (dimension_codimension(y).dimension == d)
            continue;
        bool any = false;
        for (const auto& s : constraint_set(n, d))
            any = any || cayley_menger_det(y, s) != 0;
        CHECK(any);
    }
}

TEST_CASE("constraint Jacobian matches exact differences") {
    gen::Rng rng(56);
    for (int t = 0; t < 10; ++t) {
        const Index d = rng.integer(1, 2), n = d + 2 + rng.integer(0, 2);
        const auto x = gen::configuration(rng, n, d, d, true);
        const auto sets = constraint_set(n, d);
        const Matrix<Rational> jac = constraint_jacobian(x, sets);
        const Matrix<Rational> s = squared_distances(x);
        Index col = 0;
        for (Index i = 0; i < n; ++i)
            for (Index j = i + 1; j < n; ++j, ++col)
                for (std::size_t r = 0; r < sets.size(); ++r) {
                    // The determinant is quadratic in the shift, so the central difference is exact.
                    const Rational diff =
                        (bordered_det(s, sets[r], i, j, Rational(1)) - bordered_det(s, sets[r], i, j, Rational(-1))) / 2;
                    CHECK(jac(static_cast<Index>(r), col) == diff);
                }
        const ConstraintIndependence ind = constraint_independence(x, d);
        CHECK(ind.constraints == constraint_count(n, d));
        CHECK(ind.independent());
    }
}

TEST_CASE("extended Leibniz form") {
    const auto sq = th::unit_square<Rational>();
    const Vector<Rational> w = vec({q(-1), q(1), q(-1), q(1)});
    CHECK(extended_leibniz_form(sq, w, w) == 0);
    const Vector<Rational> e = vec({q(1), q(0), q(0), q(0)});
    CHECK(extended_leibniz_form(sq, e, e) == 0);
    CHECK(code_of([&] { extended_leibniz_form(sq, w, Vector<Rational>(vec({q(1), q(2)}))); }) ==
          ErrorCode::ShapeMismatch);

    gen::Rng rng(57);
    for (int t = 0; t < 40; ++t) {
        const Index d = rng.integer(1, 3), n = d + 2 + rng.integer(0, 2);
        const auto x = gen::configuration(rng, n, d, d);
        const Vector<Rational> w1 = gen::combination(rng, oracle::kernel(config_matrix(x)));
        const Vector<Rational> w2 = gen::zero_sum(rng, n);
        CHECK(extended_leibniz_form(x, w1, w2) == 0);
    }
}
