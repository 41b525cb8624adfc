#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "perma/errors.hpp"
#include "perma/matrix.hpp"

using namespace perma;

TEST_SUITE("matrix") {

TEST_CASE("determinant of small matrices") {
    CHECK(determinant(SquareMatrix::identity(3)) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(determinant(SquareMatrix{{2, -1}, {-1, 2}}) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(determinant(SquareMatrix{{3, -1, 0}, {0, 3, -1}, {-1, 0, 3}}) ==
          doctest::Approx(26.0).epsilon(1e-14));
    CHECK(determinant(SquareMatrix{{1, 2}, {2, 4}}) == 0.0);  // singular
}

TEST_CASE("inverse") {
    const SquareMatrix I3 = SquareMatrix::identity(3);
    CHECK(inverse(I3) == I3);

    const SquareMatrix inv = inverse(SquareMatrix{{2, -1}, {-1, 2}});
    CHECK(inv(0, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(inv(0, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(inv(1, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(inv(1, 1) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));

    const SquareMatrix inv2 = inverse(SquareMatrix{{3, -1}, {-2, 3}});
    CHECK(inv2(0, 0) == doctest::Approx(3.0 / 7.0).epsilon(1e-14));
    CHECK(inv2(0, 1) == doctest::Approx(1.0 / 7.0).epsilon(1e-14));
    CHECK(inv2(1, 0) == doctest::Approx(2.0 / 7.0).epsilon(1e-14));
    CHECK(inv2(1, 1) == doctest::Approx(3.0 / 7.0).epsilon(1e-14));

    CHECK_THROWS_AS(inverse(SquareMatrix{{1, 2}, {2, 4}}), SingularMatrix);
}

TEST_CASE("certify_m_matrix accepts M-matrices with the right certificate") {
    const auto cert = certify_m_matrix(SquareMatrix{{2, -1}, {-1, 2}});
    CHECK(cert.offdiag_max == doctest::Approx(-1.0));
    CHECK(cert.inverse_min == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(cert.det == doctest::Approx(3.0).epsilon(1e-14));

    const auto cert3 = certify_m_matrix(SquareMatrix{{3, -1, 0}, {0, 3, -1}, {-1, 0, 3}});
    CHECK(cert3.inverse_min == doctest::Approx(1.0 / 26.0).epsilon(1e-13));
    CHECK(cert3.det == doctest::Approx(26.0).epsilon(1e-13));
}

TEST_CASE("certify_m_matrix rejects with the violated condition") {
    try {
        certify_m_matrix(SquareMatrix{{1, 1}, {0, 1}});
        FAIL("expected NotMMatrix");
    } catch (const NotMMatrix& e) {
        CHECK(e.reason == NotMMatrix::Reason::OffDiagPositive);
        CHECK(e.i == 0);
        CHECK(e.j == 1);
    }
    CHECK_THROWS_AS(certify_m_matrix(SquareMatrix{{1, -2}, {-2, 1}}), NotMMatrix);  // inverse < 0
    CHECK_THROWS_AS(certify_m_matrix(SquareMatrix{{1, -1}, {-1, 1}}), NotMMatrix);  // singular
}

TEST_CASE("decompose canonical 2x2") {
    const auto d = decompose(SquareMatrix{{2, -1}, {-1, 2}});
    CHECK(d.B == SquareMatrix{{0, 1}, {1, 0}});
    CHECK(d.Bbar(0, 1) == doctest::Approx(0.5));
    CHECK(d.Bbar(1, 0) == doctest::Approx(0.5));
    CHECK(d.Bbar(0, 0) == 0.0);
    CHECK(d.rho == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(d.Abar(0, 0) == 1.0);
    CHECK(d.Abar(0, 1) == doctest::Approx(-0.5));
}

TEST_CASE("decompose diagonal matrix") {
    const auto d = decompose(SquareMatrix{{2, 0}, {0, 5}});
    CHECK(d.B.max_abs() == 0.0);
    CHECK(d.Abar == SquareMatrix::identity(2));
    CHECK(d.rho == 0.0);
}

TEST_CASE("decompose asymmetric 2x2") {
    const auto d = decompose(SquareMatrix{{3, -1}, {-2, 3}});
    CHECK(d.Bbar(0, 1) == doctest::Approx(1.0 / 3.0));
    CHECK(d.Bbar(1, 0) == doctest::Approx(2.0 / 3.0));
    CHECK(d.rho == doctest::Approx(std::sqrt(2.0) / 3.0).epsilon(1e-12));
}

TEST_CASE("spectral_radius") {
    CHECK(spectral_radius(SquareMatrix(3)) == 0.0);
    CHECK(spectral_radius(SquareMatrix{{0, 0.5}, {0.5, 0}}) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(spectral_radius(SquareMatrix{{0, 1.0 / 3.0}, {2.0 / 3.0, 0}}) ==
          doctest::Approx(std::sqrt(2.0) / 3.0).epsilon(1e-12));
    // nilpotent: a plain power-iteration vector would stall here
    CHECK(spectral_radius(SquareMatrix{{0, 1}, {0, 0}}) == 0.0);
    CHECK(spectral_radius(SquareMatrix{{0, 5, 1}, {0, 0, 3}, {0, 0, 0}}) == 0.0);
    CHECK_THROWS_AS(spectral_radius(SquareMatrix{{-1}}), std::invalid_argument);
}

TEST_CASE("random_m_matrix always certifies") {
    SUBCASE("n = 1") {
        const SquareMatrix A = random_m_matrix(1, 0.5, {42, 0});
        CHECK(A(0, 0) >= 1.0);
        CHECK(A(0, 0) <= 3.0);
        CHECK_NOTHROW(certify_m_matrix(A));
    }
    SUBCASE("n = 5, rho bounded by target") {
        const SquareMatrix A = random_m_matrix(5, 0.8, {7, 0});
        CHECK_NOTHROW(certify_m_matrix(A));
        const auto d = decompose(A);
        CHECK(d.rho <= 0.8 + 1e-12);
    }
    SUBCASE("small rho keeps Abar near identity in row-sum norm") {
        const SquareMatrix A = random_m_matrix(3, 0.1, {11, 0});
        const auto d = decompose(A);
        SquareMatrix gap = d.Abar;
        for (int i = 0; i < 3; ++i) gap(i, i) -= 1.0;
        CHECK(gap.row_sum_norm() <= 0.1 + 1e-12);
    }
    SUBCASE("seed determinism") {
        const SquareMatrix A = random_m_matrix(4, 0.6, {123, 5});
        const SquareMatrix B = random_m_matrix(4, 0.6, {123, 5});
        CHECK(A == B);
    }
}

TEST_CASE("decomposition invariants on random instances") {
    int checked = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        Substream pick({seed, 77}, 0);
        const int n = 1 + static_cast<int>(pick.raw() % 8);
        const double rho_target = 0.05 + 0.9 * pick.uniform();
        const SquareMatrix A = random_m_matrix(n, rho_target, {seed, 78});
        const auto d = decompose(A);

        CHECK(d.rho < 1.0);
        // D * Abar == A entrywise
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                CHECK(std::abs(d.diag[static_cast<std::size_t>(i)] * d.Abar(i, j) - A(i, j)) <=
                      1e-12 * std::max(1.0, std::abs(A(i, j))));
        // B nonnegative, zero diagonal
        for (int i = 0; i < n; ++i) {
            CHECK(d.B(i, i) == 0.0);
            for (int j = 0; j < n; ++j) CHECK(d.B(i, j) >= 0.0);
        }
        // a_i R_ii >= 1
        const SquareMatrix R = inverse(A);
        for (int i = 0; i < n; ++i) CHECK(A(i, i) * R(i, i) >= 1.0 - 1e-10);
        ++checked;
    }
    CHECK(checked == 200);
}

TEST_CASE("inverse of inverse returns the original") {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        const SquareMatrix A = random_m_matrix(6, 0.7, {seed, 101});
        const SquareMatrix back = inverse(inverse(A));
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j)
                CHECK(std::abs(back(i, j) - A(i, j)) <= 1e-9 * std::max(1.0, std::abs(A(i, j))));
    }
}

TEST_CASE("construction rejects bad input") {
    CHECK_THROWS_AS(SquareMatrix(2, {1.0, 2.0, 3.0}), std::invalid_argument);
    CHECK_THROWS_AS(SquareMatrix(1, {std::nan("")}), std::invalid_argument);
    CHECK_THROWS_AS(SquareMatrix(1, {std::numeric_limits<double>::infinity()}),
                    std::invalid_argument);
}

}  // TEST_SUITE
