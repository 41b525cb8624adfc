#include <doctest.h>

#include <array>
#include <cmath>

#include "oracles.hpp"
#include "perma/errors.hpp"
#include "perma/sampler.hpp"
#include "perma/symmetrize.hpp"

using namespace perma;
using perma::tests::close_rel;

TEST_SUITE("symmetrize") {

TEST_CASE("geometric_symmetrize") {
    const SquareMatrix sym{{1, 2}, {2, 3}};
    CHECK(geometric_symmetrize(sym) == sym);

    const SquareMatrix B{{0, 1}, {2, 0}};
    const SquareMatrix S = geometric_symmetrize(B);
    CHECK(S(0, 1) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(S(1, 0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));

    const SquareMatrix oneside{{0, 3}, {0, 0}};
    CHECK(geometric_symmetrize(oneside).max_abs() == 0.0);

    CHECK_THROWS_AS(geometric_symmetrize(SquareMatrix{{0, -1}, {1, 0}}), NegativeEntry);
}

TEST_CASE("AM-GM bound: S(C) <= (C + C^T)/2 entrywise") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        Substream rng({seed, 61}, 0);
        const int n = 2 + static_cast<int>(rng.raw() % 4);
        const SquareMatrix C = perma::tests::random_dense(n, 0.0, 2.0, rng);
        const SquareMatrix S = geometric_symmetrize(C);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                CHECK(S(i, j) <= 0.5 * (C(i, j) + C(j, i)) + 1e-14);
    }
}

TEST_CASE("build_sym_pair on the cyclic 3x3 instance") {
    const auto model = build_model(SquareMatrix{{3, -1, 0}, {0, 3, -1}, {-1, 0, 3}}, 1.0);
    const auto pair = build_sym_pair(model);
    // every opposite off-diagonal pair contains a zero, so A_sym is diagonal
    CHECK(pair.symmetrized.A == SquareMatrix{{3, 0, 0}, {0, 3, 0}, {0, 0, 3}});
    CHECK(pair.ratio == doctest::Approx(26.0 / 27.0).epsilon(1e-13));

    const auto at_half = build_sym_pair(
        build_model(SquareMatrix{{3, -1, 0}, {0, 3, -1}, {-1, 0, 3}}, 0.5));
    CHECK(at_half.ratio == doctest::Approx(std::sqrt(26.0 / 27.0)).epsilon(1e-13));
}

TEST_CASE("build_sym_pair fixes symmetric input") {
    const auto model = build_model(SquareMatrix{{2, -1}, {-1, 2}}, 1.0);
    const auto pair = build_sym_pair(model);
    CHECK(pair.symmetrized.A == model.A);
    CHECK(pair.ratio == doctest::Approx(1.0));
}

TEST_CASE("n = 2 preserves the determinant") {
    const auto model = build_model(SquareMatrix{{3, -1}, {-2, 3}}, 1.0);
    const auto pair = build_sym_pair(model);
    CHECK(pair.symmetrized.A(0, 1) == doctest::Approx(-std::sqrt(2.0)).epsilon(1e-15));
    CHECK(determinant(pair.symmetrized.A) == doctest::Approx(7.0).epsilon(1e-13));
    CHECK(pair.ratio == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("determinant inequalities") {
    SUBCASE("strict on the cyclic instance: 27 versus 26") {
        const auto pair = build_sym_pair(
            build_model(SquareMatrix{{3, -1, 0}, {0, 3, -1}, {-1, 0, 3}}, 1.0));
        const auto reports = det_inequalities_check(pair);
        REQUIRE(reports.size() == 4);
        for (const auto& r : reports) CHECK(r.pass);
        CHECK(reports[0].lhs == doctest::Approx(27.0).epsilon(1e-13));
        CHECK(reports[0].rhs == doctest::Approx(26.0).epsilon(1e-13));
    }
    SUBCASE("equality for any 2x2") {
        const auto pair = build_sym_pair(build_model(SquareMatrix{{3, -1}, {-2, 3}}, 0.5));
        for (const auto& r : det_inequalities_check(pair)) CHECK(r.pass);
    }
    SUBCASE("diagonal input is a fixed point") {
        const auto pair = build_sym_pair(build_model(SquareMatrix{{2, 0}, {0, 3}}, 1.0));
        const auto reports = det_inequalities_check(pair);
        for (const auto& r : reports) CHECK(r.pass);
        CHECK(reports[0].lhs == doctest::Approx(reports[0].rhs));
        CHECK(reports[1].lhs == doctest::Approx(1.0));
    }
}

TEST_CASE("permanent inequality") {
    SUBCASE("symmetric C gives equality") {
        const SquareMatrix C{{1, 2}, {2, 1}};
        const auto reports = permanent_inequality_check(C, 1.0, {1, 1});
        for (const auto& r : reports) {
            CHECK(r.pass);
            CHECK(r.lhs == doctest::Approx(r.rhs).epsilon(1e-12));
        }
    }
    SUBCASE("cyclic 0/1 matrix is strict: 1 versus 0") {
        const SquareMatrix C{{0, 1, 0}, {0, 0, 1}, {1, 0, 0}};
        const auto reports = permanent_inequality_check(C, 1.0, {1, 1, 1});
        CHECK(reports[0].lhs == doctest::Approx(1.0));
        CHECK(reports[0].rhs == doctest::Approx(0.0));
        for (const auto& r : reports) CHECK(r.pass);
    }
    SUBCASE("random nonnegative matrices and expansions") {
        for (std::uint64_t seed = 0; seed < 60; ++seed) {
            Substream rng({seed, 62}, 0);
            const int n = 2 + static_cast<int>(rng.raw() % 4);  // up to 5
            const SquareMatrix C = perma::tests::random_dense(n, 0.0, 1.5, rng);
            MultiIndex k(static_cast<std::size_t>(n), 0);
            int budget = 7;
            for (int i = 0; i < n && budget > 0; ++i) {
                const int v = static_cast<int>(rng.raw() % 3);
                k[static_cast<std::size_t>(i)] = std::min(v, budget);
                budget -= k[static_cast<std::size_t>(i)];
            }
            for (double alpha : {0.5, 1.0, 2.0}) {
                for (const auto& r : permanent_inequality_check(C, alpha, k)) {
                    INFO(r.to_json());
                    CHECK(r.pass);
                }
            }
        }
    }
}

TEST_CASE("monotonicity in Bbar") {
    SUBCASE("2x2 with D = I") {
        const SquareMatrix A{{1, -0.5}, {-0.5, 1}};
        const SquareMatrix A_prime{{1, -0.6}, {-0.6, 1}};
        const auto reports = monotonicity_check(A, A_prime);
        REQUIRE(reports.size() == 2);
        for (const auto& r : reports) CHECK(r.pass);
    }
    SUBCASE("identical input gives equality") {
        const SquareMatrix A{{2, -1}, {-1, 2}};
        for (const auto& r : monotonicity_check(A, A)) {
            CHECK(r.pass);
            CHECK(std::abs(r.lhs) <= 1e-12);
        }
    }
    SUBCASE("random nonnegative perturbations") {
        for (std::uint64_t seed = 0; seed < 30; ++seed) {
            Substream rng({seed, 63}, 0);
            const int n = 2 + static_cast<int>(rng.raw() % 3);
            const SquareMatrix A = random_m_matrix(n, 0.5, {seed, 64});
            SquareMatrix A_prime = A;
            // grow the off-diagonal mass while keeping row dominance
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if (i != j) A_prime(i, j) = A(i, j) * (1.0 + 0.5 * rng.uniform());
            const auto reports = monotonicity_check(A, A_prime);
            for (const auto& r : reports) {
                INFO(r.to_json());
                CHECK(r.pass);
            }
        }
    }
    SUBCASE("hypothesis violation is detected") {
        const SquareMatrix A{{1, -0.5}, {-0.5, 1}};
        const SquareMatrix smaller{{1, -0.4}, {-0.4, 1}};
        CHECK_THROWS_AS(monotonicity_check(A, smaller), HypothesisViolated);
    }
}

TEST_CASE("random instances: sym pair always certifies, ratio at most 1") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Substream pick({seed, 65}, 0);
        const int n = 2 + static_cast<int>(pick.raw() % 5);  // up to 6
        const double rho = 0.1 + 0.8 * pick.uniform();
        const double alpha = std::array{0.5, 1.0, 2.0}[seed % 3];
        const auto model = build_model(random_m_matrix(n, rho, {seed, 66}), alpha);
        const auto pair = build_sym_pair(model);
        CHECK(pair.ratio <= 1.0 + 1e-12);
        CHECK(pair.ratio > 0.0);
        CHECK(pair.symmetrized.det_Abar >= model.det_Abar - 1e-12);
        CHECK(pair.symmetrized.A.is_symmetric(0.0));
    }
}

TEST_CASE("distribution bounds between X and its symmetrized sibling") {
    SUBCASE("symmetric input: ratio one, bounds tight") {
        const auto model = build_model(SquareMatrix{{2, -1}, {-1, 2}}, 1.0);
        const auto pair = build_sym_pair(model);
        CHECK(pair.ratio == doctest::Approx(1.0));
        const auto reports = distribution_bounds_check(pair, 60000, {71, 0}, 1);
        for (const auto& r : reports) {
            INFO(r.to_json());
            CHECK(r.pass);
        }
    }
    SUBCASE("cyclic instance with ratio 26/27") {
        const auto model = build_model(SquareMatrix{{3, -1, 0}, {0, 3, -1}, {-1, 0, 3}}, 1.0);
        const auto pair = build_sym_pair(model);
        const auto reports = distribution_bounds_check(pair, 60000, {71, 1}, 1);
        REQUIRE(reports.size() >= 9);  // 5 tail indicators + 2 norms + 2 band sides
        for (const auto& r : reports) {
            INFO(r.to_json());
            CHECK(r.pass);
        }
    }
    SUBCASE("constant test function reduces to 1 >= ratio") {
        const auto pair = build_sym_pair(
            build_model(SquareMatrix{{3, -1, 0}, {0, 3, -1}, {-1, 0, 3}}, 1.0));
        CHECK(1.0 >= pair.ratio);
    }
}

TEST_CASE("complement logic on the ratio-one case") {
    // with ratio 1 the two-sided band pins the laws together: when the
    // upper bound on P(g(X) in B^c) vanishes, so must P(g(X~) in B^c)
    const auto model = build_model(SquareMatrix{{2, -1}, {-1, 2}}, 1.0);
    const auto pair = build_sym_pair(model);
    const auto table = z_pmf_table(pair.original, 1e-8);
    const auto table_sym = z_pmf_table(pair.symmetrized, 1e-8);
    Substream rng({72, 0}, 0);
    std::size_t exceed_x = 0, exceed_y = 0;
    const std::size_t n = 20000;
    for (std::size_t i = 0; i < n; ++i) {
        const auto x = sample_x(pair.original, table, rng);
        const auto y = sample_x(pair.symmetrized, table_sym, rng);
        // B = [0, inf): complement is empty for nonnegative coordinates
        if (std::max(x[0], x[1]) < 0.0) ++exceed_x;
        if (std::max(y[0], y[1]) < 0.0) ++exceed_y;
    }
    CHECK(exceed_x == 0);
    CHECK(exceed_y == 0);
}

}  // TEST_SUITE
