#include <doctest.h>

#include "helpers.hpp"
#include "moments/linalg.hpp"
#include "moments/moments.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace moments;
using th::pts;
using th::q;
using th::vec;

TEST_CASE("rational parsing") {
    CHECK(parse_rational("3/6") == q(1, 2));
    CHECK(format_rational(parse_rational("3/6")) == "1/2");
    CHECK(parse_rational(" -7 ") == q(-7));
    CHECK(parse_rational("-1.25") == q(-5, 4));
    CHECK(parse_rational(".5") == q(1, 2));
    CHECK(format_rational(q(4, 2)) == "2");
    CHECK_THROWS_AS(parse_rational("1/0"), Error);
    CHECK_THROWS_AS(parse_rational("abc"), Error);
    CHECK_THROWS_AS(parse_rational("1/-2"), Error);
    CHECK_THROWS_AS(parse_rational(""), Error);
}

TEST_CASE("power in both modes") {
    CHECK(power(q(4), q(-1)) == q(1, 4));
    CHECK(power(q(2, 3), q(3)) == q(8, 27));
    CHECK(power(q(5), q(0)) == q(1));
    CHECK_THROWS_AS(power(q(2), q(-3, 2)), Error);
    ErrorCode code = ErrorCode::InvalidInput;
    try {
        power(q(2), q(1, 2));
    } catch (const Error& e) {
        code = e.code();
    }
    CHECK(code == ErrorCode::ModeUnsupported);
    CHECK(power(2.0, -1.5) == doctest::Approx(std::pow(2.0, -1.5)).epsilon(1e-15));
}

TEST_CASE("determinant against the permutation expansion") {
    gen::Rng rng(11);
    for (int t = 0; t < 40; ++t) {
        const Index n = rng.integer(1, 6);
        const Matrix<Rational> m = rng.rational_matrix(n, n);
        CHECK(determinant<Rational>(m) == oracle::leibniz_det(m));
    }
    Matrix<Rational> z = Matrix<Rational>::Zero(3, 3);
    z(0, 1) = 1;
    CHECK(determinant<Rational>(z) == 0);
    CHECK(determinant<Rational>(Matrix<Rational>(0, 0)) == 1);
}

TEST_CASE("rank and kernel against reduced row echelon form") {
    gen::Rng rng(12);
    for (int t = 0; t < 40; ++t) {
        const Index r = rng.integer(1, 5), c = rng.integer(1, 7), k = rng.integer(1, 4);
        const Matrix<Rational> m = rng.rational_matrix(r, k) * rng.rational_matrix(k, c);
        CHECK(rank<Rational>(m) == oracle::rank(m));
        const Matrix<Rational> kb = kernel_basis<Rational>(m);
        CHECK(kb.cols() == oracle::kernel(m).cols());
        CHECK((m * kb).isZero());
        CHECK(oracle::rank(kb) == kb.cols());
    }
}

TEST_CASE("float rank threshold is relative") {
    Matrix<double> m(2, 2);
    m << 1e6, 2e6, 1.0, 2.0 + 1e-12;
    CHECK(rank<double>(m) == 1);
    m(1, 1) = 3.0;
    CHECK(rank<double>(m) == 2);
}

TEST_CASE("combinations are lexicographic") {
    const auto c = combinations(4, 2);
    REQUIRE(c.size() == 6);
    CHECK(c.front() == IndexSet{0, 1});
    CHECK(c[2] == IndexSet{0, 3});
    CHECK(c.back() == IndexSet{2, 3});
    CHECK(combinations(3, 4).empty());
}

TEST_CASE("total weight") {
    const auto sq = th::unit_square<Rational>();
    CHECK(total_weight(WeightedSystem<Rational>(sq, vec({q(1), q(-1), q(1), q(-1)}))) == 0);
    CHECK(total_weight(WeightedSystem<Rational>(pts<Rational>({{q(3)}}), vec({q(2)}))) == 2);
    const auto tri = pts<Rational>({{q(0), q(0)}, {q(1), q(0)}, {q(0), q(1)}});
    CHECK(total_weight(WeightedSystem<Rational>(tri, vec({q(1), q(2), q(3)}))) == 6);
}

TEST_CASE("first moment") {
    const WeightedSystem<Rational> alt(th::unit_square<Rational>(), vec({q(1), q(-1), q(1), q(-1)}));
    CHECK(first_moment(alt, vec({q(0), q(0)})).isZero());
    const WeightedSystem<Rational> one(pts<Rational>({{q(3), q(4)}}), vec({q(5)}));
    CHECK(first_moment(one, vec({q(3), q(4)})).isZero());
    const WeightedSystem<Rational> line(pts<Rational>({{q(0)}, {q(2)}}), vec({q(1), q(1)}));
    CHECK(first_moment(line, vec({q(0)}))(0) == 2);
    CHECK_THROWS_AS(first_moment(line, vec({q(0), q(0)})), Error);
}

TEST_CASE("barycenter") {
    const auto line = pts<Rational>({{q(0)}, {q(2)}});
    CHECK(barycenter(WeightedSystem<Rational>(line, vec({q(1), q(1)})))(0) == 1);
    const auto line4 = pts<Rational>({{q(0)}, {q(4)}});
    CHECK(barycenter(WeightedSystem<Rational>(line4, vec({q(1), q(3)})))(0) == 3);
    const WeightedSystem<Rational> alt(th::unit_square<Rational>(), vec({q(1), q(-1), q(1), q(-1)}));
    try {
        barycenter(alt);
        FAIL("expected ZeroTotalWeight");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ZeroTotalWeight);
    }
}

TEST_CASE("second moment") {
    const WeightedSystem<Rational> sq(th::unit_square<Rational>(), vec({q(1), q(1), q(1), q(1)}));
    CHECK(second_moment(sq, vec({q(1, 2), q(1, 2)})) == 2);
    const WeightedSystem<Rational> one(pts<Rational>({{q(3)}}), vec({q(7)}));
    CHECK(second_moment(one, vec({q(3)})) == 0);
    const WeightedSystem<Rational> pair(pts<Rational>({{q(0)}, {q(1)}}), vec({q(1), q(-1)}));
    CHECK(second_moment(pair, vec({q(0)})) == -1);
}

TEST_CASE("Leibniz identity examples") {
    const WeightedSystem<Rational> alt(th::unit_square<Rational>(), vec({q(1), q(-1), q(1), q(-1)}));
    CHECK(leibniz_identity_residual(alt, vec({q(0), q(0)})) == 0);
    const WeightedSystem<Rational> m12(pts<Rational>({{q(0)}, {q(1)}}), vec({q(1), q(2)}));
    // 3 * 2 - 2^2 - 2 * 1: every term evaluated on its own.
    CHECK(total_weight(m12) * second_moment(m12, vec({q(0)})) == 6);
    CHECK(first_moment(m12, vec({q(0)})).squaredNorm() == 4);
    CHECK(leibniz_identity_residual(m12, vec({q(0)})) == 0);
}

TEST_CASE("HLK difference examples") {
    const WeightedSystem<Rational> alt(th::unit_square<Rational>(), vec({q(1), q(-1), q(1), q(-1)}));
    const auto p = vec({q(0), q(0)}), r = vec({q(1), q(1)});
    CHECK(hlk_difference_residual(alt, p, p) == 0);
    CHECK(hlk_difference_residual(alt, p, r) == 0);
    // mu0 = 0, mu1 = v = -1 constant: mu2(p) - mu2(q) = 2 v (q - p).
    const WeightedSystem<Rational> pair(pts<Rational>({{q(0)}, {q(1)}}), vec({q(1), q(-1)}));
    CHECK(first_moment(pair, vec({q(5)}))(0) == -1);
    CHECK(second_moment(pair, vec({q(3)})) - second_moment(pair, vec({q(0)})) == 2 * -1 * (0 - 3));
    CHECK(hlk_zero_weight_residual(pair, vec({q(3)}), vec({q(0)})) == 0);
    CHECK_THROWS_AS(hlk_zero_weight_residual(WeightedSystem<Rational>(pair.configuration, vec({q(1), q(1)})),
                                             vec({q(3)}), vec({q(0)})),
                    Error);
}

TEST_CASE("identities hold exactly on random rational systems") {
    gen::Rng rng(13);
    for (int t = 0; t < 60; ++t) {
        const Index n = rng.integer(1, 8), dim = rng.integer(1, 4);
        const WeightedSystem<Rational> ws(Configuration<Rational>(rng.rational_matrix(dim, n)),
                                          rng.rational_vector(n));
        const Vector<Rational> p = rng.rational_vector(dim), r = rng.rational_vector(dim);
        CHECK(leibniz_identity_residual(ws, p) == 0);
        CHECK(hlk_difference_residual(ws, p, r) == 0);
        CHECK(first_moment(ws, p) - first_moment(ws, r) == total_weight(ws) * (r - p));
        if (total_weight(ws) != 0) {
            CHECK(first_moment(ws, barycenter(ws)).isZero());
            CHECK(hlk_barycentric_residual(ws, p) == 0);
        }
    }
}

TEST_CASE("identities hold to rounding on random float systems") {
    gen::Rng rng(14);
    for (int t = 0; t < 60; ++t) {
        const Index n = rng.integer(2, 8), dim = rng.integer(1, 4);
        Matrix<double> x(dim, n);
        Vector<double> w(n), p(dim), r(dim);
        for (Index j = 0; j < n; ++j) {
            w(j) = rng.real(-2, 2);
            for (Index i = 0; i < dim; ++i)
                x(i, j) = rng.real(-3, 3);
        }
        for (Index i = 0; i < dim; ++i) {
            p(i) = rng.real(-3, 3);
            r(i) = rng.real(-3, 3);
        }
        const WeightedSystem<double> ws{Configuration<double>(x), w};
        const double scale = std::abs(second_moment(ws, p)) + std::abs(second_moment(ws, r)) + 1.0;
        CHECK(std::abs(hlk_difference_residual(ws, p, r)) <= 1e-12 * scale * 10);
    }
}

TEST_CASE("second moment difference of concentric figures") {
    // Squares of squared radii 1 and 2 (one rotated by 45 degrees): 4 (1 - 2).
    const WeightedSystem<Rational> a(pts<Rational>({{q(1), q(0)}, {q(0), q(1)}, {q(-1), q(0)}, {q(0), q(-1)}}),
                                     vec({q(1), q(1), q(1), q(1)}));
    const WeightedSystem<Rational> b(pts<Rational>({{q(1), q(1)}, {q(-1), q(1)}, {q(-1), q(-1)}, {q(1), q(-1)}}),
                                     vec({q(1), q(1), q(1), q(1)}));
    gen::Rng rng(15);
    std::vector<Vector<Rational>> probes;
    for (int k = 0; k < 6; ++k)
        probes.push_back(rng.rational_vector(2));
    CHECK(second_moment_difference_constant(a, b, probes) == -4);
    CHECK(second_moment_difference_constant(a, a, probes) == 0);

    // Rhombus (+-2, 0), (0, +-1): s1 - s2 + s3 - s4 = 2 (4 - 1) = 6.
    const WeightedSystem<Rational> long_axis(pts<Rational>({{q(2), q(0)}, {q(-2), q(0)}}), vec({q(1), q(1)}));
    const WeightedSystem<Rational> short_axis(pts<Rational>({{q(0), q(1)}, {q(0), q(-1)}}), vec({q(1), q(1)}));
    const WeightedSystem<Rational> rhombus(
        pts<Rational>({{q(2), q(0)}, {q(0), q(1)}, {q(-2), q(0)}, {q(0), q(-1)}}), vec({q(1), q(-1), q(1), q(-1)}));
    CHECK(second_moment(rhombus, vec({q(1), q(1)})) == 6);
    CHECK(second_moment_difference_constant(long_axis, short_axis, {vec({q(1), q(1)})}) == 6);

    const WeightedSystem<Rational> shifted(pts<Rational>({{q(1), q(1)}, {q(0), q(0)}}), vec({q(1), q(1)}));
    CHECK_THROWS_AS(second_moment_difference_constant(long_axis, shifted, probes), Error);
    const WeightedSystem<Rational> heavier(long_axis.configuration, vec({q(2), q(2)}));
    CHECK_THROWS_AS(second_moment_difference_constant(long_axis, heavier, probes), Error);
}

TEST_CASE("moment summary and lemma residual") {
    const WeightedSystem<Rational> ws(pts<Rational>({{q(0)}, {q(4)}}), vec({q(1), q(3)}));
    const auto s = summarize_moments(ws, {vec({q(0)}), vec({q(7, 3)})});
    CHECK(s.mu0 == 4);
    REQUIRE(s.barycenter.has_value());
    CHECK((*s.barycenter)(0) == 3);
    CHECK(s.lemma_residual() == 0.0);
}

TEST_CASE("inputs are validated") {
    CHECK_THROWS_AS(Configuration<double>(Matrix<double>(2, 0)), Error);
    Matrix<double> bad(1, 1);
    bad(0, 0) = std::nan("");
    CHECK_THROWS_AS(Configuration<double>{bad}, Error);
    CHECK_THROWS_AS(WeightedSystem<Rational>(th::unit_square<Rational>(), vec({q(1)})), Error);
}
