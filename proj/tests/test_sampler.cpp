#include <doctest.h>

#include <array>
#include <cmath>

#include "oracles.hpp"
#include "perma/errors.hpp"
#include "perma/moments.hpp"
#include "perma/sampler.hpp"

using namespace perma;

namespace {

PermanentalModel canonical(double alpha = 1.0) {
    return build_model(SquareMatrix{{2, -1}, {-1, 2}}, alpha);
}

struct MeanSe {
    double mean;
    double se;
};

template <typename Gen>
MeanSe draw_mean(std::size_t n, Gen&& gen) {
    double s = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = gen(i);
        s += v;
        s2 += v * v;
    }
    const double mean = s / static_cast<double>(n);
    const double var = (s2 - s * s / static_cast<double>(n)) / static_cast<double>(n - 1);
    return {mean, std::sqrt(std::max(0.0, var) / static_cast<double>(n))};
}

}  // namespace

TEST_SUITE("sampler") {

TEST_CASE("gamma moments at shape 2.5") {
    Substream rng({2024, 1}, 0);
    const auto est = draw_mean(400000, [&](std::size_t) { return rng.gamma(2.5, 1.0); });
    CHECK(std::abs(est.mean - 2.5) <= 3.0 * est.se);
}

TEST_CASE("gamma rate scaling: v X behaves like the unit-rate draw") {
    Substream rng({2024, 2}, 0);
    const double u = 1.7, v = 3.1;
    const auto scaled = draw_mean(200000, [&](std::size_t) { return v * rng.gamma(u, v); });
    Substream rng2({2024, 3}, 0);
    const auto unit = draw_mean(200000, [&](std::size_t) { return rng2.gamma(u, 1.0); });
    const double joint = std::sqrt(scaled.se * scaled.se + unit.se * unit.se);
    CHECK(std::abs(scaled.mean - unit.mean) <= 3.0 * joint);
    CHECK(std::abs(scaled.mean - u) <= 3.0 * scaled.se);
}

TEST_CASE("gamma power moments follow the gamma-function ratio") {
    // E(xi_{u,1}^p) = Gamma(p+u)/Gamma(u); u = 1.5, p = 2 gives 3.75
    Substream rng({2024, 4}, 0);
    const auto est = draw_mean(400000, [&](std::size_t) {
        const double x = rng.gamma(1.5, 1.0);
        return x * x;
    });
    CHECK(std::abs(est.mean - 3.75) <= 3.0 * est.se);
}

TEST_CASE("gamma shapes below one use the boost path correctly") {
    Substream rng({2024, 5}, 0);
    const double u = 0.3;
    const auto est = draw_mean(400000, [&](std::size_t) { return rng.gamma(u, 1.0); });
    CHECK(std::abs(est.mean - u) <= 3.0 * est.se);
    Substream rng2({2024, 6}, 0);
    const auto second = draw_mean(400000, [&](std::size_t) {
        const double x = rng2.gamma(u, 1.0);
        return x * x;
    });
    CHECK(std::abs(second.mean - u * (u + 1.0)) <= 3.0 * second.se);
    CHECK_THROWS_AS(rng.gamma(0.0, 1.0), std::invalid_argument);
}

TEST_CASE("sample_z on a diagonal model is identically zero") {
    const auto model = build_model(SquareMatrix{{2, 0}, {0, 5}}, 1.0);
    const auto table = z_pmf_table(model, 1e-9);
    Substream rng({7, 7}, 0);
    for (int i = 0; i < 100; ++i) {
        const MultiIndex z = sample_z(model, table, rng);
        CHECK(z == MultiIndex{0, 0});
    }
}

TEST_CASE("sample_z frequencies match the table") {
    const auto model = canonical();
    const auto table = z_pmf_table(model, 1e-9);
    const std::size_t n = 400000;
    std::size_t zero_count = 0;
    double l1_sum = 0.0;
    Substream rng({7, 8}, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const MultiIndex z = sample_z(model, table, rng);
        if (z[0] == 0 && z[1] == 0) ++zero_count;
        l1_sum += static_cast<double>(z[0] + z[1]);
    }
    const double freq = static_cast<double>(zero_count) / static_cast<double>(n);
    const double se = std::sqrt(0.75 * 0.25 / static_cast<double>(n));
    CHECK(std::abs(freq - 0.75) <= 3.0 * se);
    // E|Z|_1 = 2/3 for the canonical model
    const double mean_l1 = l1_sum / static_cast<double>(n);
    CHECK(std::abs(mean_l1 - 2.0 / 3.0) <= 4.0 * 1.1 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("empirical pmf stays inside a DKW-style band") {
    const auto model = canonical();
    const auto table = z_pmf_table(model, 1e-9);
    const std::size_t n = 200000;
    std::unordered_map<std::uint64_t, std::size_t> counts;
    Substream rng({7, 9}, 0);
    for (std::size_t i = 0; i < n; ++i) {
        ++counts[pack_multi_index(sample_z(model, table, rng))];
    }
    const double band = 3.0 * std::sqrt(std::log(2.0 / 1e-3) / (2.0 * static_cast<double>(n)));
    for (const auto& e : table.entries()) {
        const auto it = counts.find(pack_multi_index(e.k));
        const double freq =
            it == counts.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(n);
        CHECK(std::abs(freq - e.p) <= band);
    }
}

TEST_CASE("sample_x moments") {
    const auto model = canonical();
    const auto table = z_pmf_table(model, 1e-9);
    const std::size_t n = 400000;
    Substream rng({7, 10}, 0);
    double s0 = 0.0, s0sq = 0.0, cross = 0.0, cross_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto x = sample_x(model, table, rng);
        CHECK(x[0] >= 0.0);
        CHECK(x[1] >= 0.0);
        s0 += x[0];
        s0sq += x[0] * x[0];
        cross += x[0] * x[1];
        cross_sq += x[0] * x[1] * x[0] * x[1];
    }
    const double nd = static_cast<double>(n);
    const double mean0 = s0 / nd;
    const double se0 = std::sqrt((s0sq / nd - mean0 * mean0) / nd);
    CHECK(std::abs(mean0 - 2.0 / 3.0) <= 3.5 * se0);  // E X_i = alpha R_ii

    const double meanc = cross / nd;
    const double sec = std::sqrt((cross_sq / nd - meanc * meanc) / nd);
    CHECK(std::abs(meanc - mixed_moment_x(model, {1, 1})) <= 3.5 * sec);  // 5/9
}

TEST_CASE("sample batches are reproducible and worker-independent") {
    const auto model = canonical();
    const auto table = z_pmf_table(model, 1e-9);
    const RandomStream stream{99, 3};
    const auto a = sample_batch(model, table, 20000, stream, 1);
    const auto b = sample_batch(model, table, 20000, stream, 1);
    const auto c = sample_batch(model, table, 20000, stream, 4);
    CHECK(a.draws == b.draws);  // bit-for-bit
    CHECK(a.draws == c.draws);  // independent of worker count
    const auto d = sample_batch(model, table, 20000, {99, 4}, 1);
    CHECK(a.draws != d.draws);
}

TEST_CASE("mc_expectation") {
    const auto model = canonical();
    const auto table = z_pmf_table(model, 1e-9);
    SUBCASE("constant integrand is exact") {
        const auto est = mc_expectation([](const std::vector<double>&) { return 1.0; }, model,
                                        table, 2000, {5, 5}, 1);
        CHECK(est.mean == doctest::Approx(1.0));
        CHECK(est.stderr_ == doctest::Approx(0.0));
    }
    SUBCASE("weighted l1 norm has mean n alpha + E|Z|") {
        const auto est = mc_expectation(
            [&](const std::vector<double>& x) { return 2.0 * x[0] + 2.0 * x[1]; }, model, table,
            400000, {5, 6}, 1);
        CHECK(std::abs(est.mean - 8.0 / 3.0) <= 3.5 * est.stderr_);
    }
    SUBCASE("increasing integrands dominate the independent-gamma baseline") {
        const std::array<const char*, 3> names{"sum", "max", "softmax"};
        const std::array<std::function<double(const std::vector<double>&)>, 3> fams{
            [](const std::vector<double>& x) { return x[0] + x[1]; },
            [](const std::vector<double>& x) { return std::max(x[0], x[1]); },
            [](const std::vector<double>& x) {
                return std::log(std::exp(x[0]) + std::exp(x[1]));
            }};
        for (std::size_t fi = 0; fi < fams.size(); ++fi) {
            INFO("family member ", names[fi]);
            const auto permanental = mc_expectation(fams[fi], model, table, 200000, {5, 7}, 1);
            // independent gammas with the same marginal shape/rate
            Substream rng({5, 8}, 0);
            const auto indep = draw_mean(200000, [&](std::size_t) {
                std::vector<double> x{rng.gamma(1.0, 2.0), rng.gamma(1.0, 2.0)};
                return fams[fi](x);
            });
            const double joint =
                std::sqrt(permanental.stderr_ * permanental.stderr_ + indep.se * indep.se);
            CHECK(permanental.mean >= indep.mean - 3.0 * joint);
        }
    }
    SUBCASE("rejects tiny draw counts") {
        CHECK_THROWS_AS(mc_expectation([](const std::vector<double>&) { return 1.0; }, model,
                                       table, 10, {5, 9}, 1),
                        std::invalid_argument);
    }
}

TEST_CASE("empirical covariances match the formulas") {
    const auto model = canonical();
    const auto table = z_pmf_table(model, 1e-9);
    const std::size_t n = 400000;
    Substream rng({5, 10}, 0);
    double sz0 = 0, sz1 = 0, sz01 = 0, sx0 = 0, sx1 = 0, sx01 = 0;
    std::vector<std::array<double, 2>> zs(n), xs(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto x = sample_x(model, table, rng);
        // recover z is not possible from x; draw z separately for the Z check
        xs[i] = {x[0], x[1]};
        sx0 += x[0];
        sx1 += x[1];
        sx01 += x[0] * x[1];
    }
    Substream rng2({5, 11}, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto z = sample_z(model, table, rng2);
        zs[i] = {static_cast<double>(z[0]), static_cast<double>(z[1])};
        sz0 += zs[i][0];
        sz1 += zs[i][1];
        sz01 += zs[i][0] * zs[i][1];
    }
    const double nd = static_cast<double>(n);
    const double cov_z = sz01 / nd - (sz0 / nd) * (sz1 / nd);
    const double cov_x = 4.0 * (sx01 / nd - (sx0 / nd) * (sx1 / nd));  // a_1 a_2 = 4

    // plug-in standard errors for the covariance estimators
    const double mz0 = sz0 / nd, mz1 = sz1 / nd;
    double var_term_z = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double c = (zs[i][0] - mz0) * (zs[i][1] - mz1) - cov_z;
        var_term_z += c * c;
    }
    const double se_z = std::sqrt(var_term_z / nd / nd);
    const double mx0 = sx0 / nd, mx1 = sx1 / nd;
    double var_term_x = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double c = 4.0 * (xs[i][0] - mx0) * (xs[i][1] - mx1) - cov_x;
        var_term_x += c * c;
    }
    const double se_x = std::sqrt(var_term_x / nd / nd);

    const double formula = z_covariance(model, 0, 1);  // 4/9
    CHECK(std::abs(cov_z - formula) <= 4.0 * se_z);
    CHECK(std::abs(cov_x - formula) <= 4.0 * se_x);
}

TEST_CASE("l1 norm law") {
    SUBCASE("canonical model") {
        const auto model = canonical();
        const auto table = z_pmf_table(model, 1e-9);
        const auto reports = l1_norm_law_check(model, table, 400000, {31, 0}, 1);
        REQUIRE(reports.size() == 3);
        for (const auto& r : reports) {
            INFO(r.to_json());
            CHECK(r.pass);
        }
        // p = 1 analytic value is 8/3
        CHECK(reports[0].rhs == doctest::Approx(8.0 / 3.0).epsilon(1e-8));
    }
    SUBCASE("diagonal model: |Y|_1 is gamma(n alpha, 1) exactly") {
        const auto model = build_model(SquareMatrix{{3, 0}, {0, 5}}, 1.25);
        const auto table = z_pmf_table(model, 1e-9);
        const auto reports = l1_norm_law_check(model, table, 200000, {31, 1}, 1);
        for (const auto& r : reports) {
            INFO(r.to_json());
            CHECK(r.pass);
        }
        // table side must be the exact gamma moments: prod (n alpha + l)
        CHECK(reports[0].rhs == doctest::Approx(2.5).epsilon(1e-12));
        CHECK(reports[1].rhs == doctest::Approx(2.5 * 3.5).epsilon(1e-12));
        CHECK(reports[2].rhs == doctest::Approx(2.5 * 3.5 * 4.5).epsilon(1e-12));
    }
}

TEST_CASE("gaussian l2 law at alpha one half") {
    SUBCASE("canonical symmetric model") {
        const auto reports = gaussian_l2_check(SquareMatrix{{2, -1}, {-1, 2}}, 400000, {33, 0}, 1);
        REQUIRE(reports.size() == 3);
        for (const auto& r : reports) {
            INFO(r.to_json());
            CHECK(r.pass);
        }
        // E(W) = n/2 + E|Z| = 1 + 1/3
        CHECK(reports[0].rhs == doctest::Approx(4.0 / 3.0).epsilon(1e-7));
    }
    SUBCASE("n = 1: W is chi-square over 2, a gamma(1/2, 1) draw") {
        const auto reports = gaussian_l2_check(SquareMatrix{{2.5}}, 200000, {33, 1}, 1);
        for (const auto& r : reports) {
            INFO(r.to_json());
            CHECK(r.pass);
        }
        CHECK(reports[0].rhs == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("asymmetric input is rejected") {
        CHECK_THROWS_AS(gaussian_l2_check(SquareMatrix{{3, -1}, {-2, 3}}, 2000, {33, 2}, 1),
                        NotSymmetric);
    }
}

TEST_CASE("table and model must match") {
    const auto model = canonical();
    const auto other = canonical(2.0);
    const auto table = z_pmf_table(other, 1e-9);
    Substream rng({1, 1}, 0);
    CHECK_THROWS_AS(sample_z(model, table, rng), ModelMismatch);
}

}  // TEST_SUITE
