#include "perma/symmetrize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "perma/errors.hpp"
#include "perma/sampler.hpp"

namespace perma {

namespace {

VerificationReport lower_bound_report(std::string name, double lhs, double rhs, double tol) {
    VerificationReport r;
    r.name = std::move(name);
    r.anchor = "symmetrize";
    r.kind = VerificationReport::Kind::LowerBound;
    r.lhs = lhs;
    r.rhs = rhs;
    r.tolerance = tol;
    r.evaluate();
    return r;
}

}  // namespace

SquareMatrix geometric_symmetrize(const SquareMatrix& C) {
    const int n = C.dim();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (C(i, j) < 0.0) {
                throw NegativeEntry(i, j, "geometric_symmetrize: negative entry at (" +
                                              std::to_string(i) + "," + std::to_string(j) + ")");
            }
    SquareMatrix S(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) S(i, j) = std::sqrt(C(i, j) * C(j, i));
    return S;
}

SymmetrizationPair build_sym_pair(const PermanentalModel& model) {
    const int n = model.dim();
    const SquareMatrix S = geometric_symmetrize(model.decomp.B);
    SquareMatrix A_sym(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            A_sym(i, j) = (i == j) ? model.decomp.diag[static_cast<std::size_t>(i)] : -S(i, j);
        }
    }
    SymmetrizationPair pair;
    pair.original = model;
    try {
        pair.symmetrized = build_model(A_sym, model.alpha);
    } catch (const Error& e) {
        // Certification of A_sym must succeed for every nonsingular M-matrix
        // input; a failure here is an implementation bug, not a data error.
        throw CertificationFailed(std::string("build_sym_pair: symmetrized matrix failed "
                                              "certification: ") +
                                  e.what());
    }
    pair.ratio = std::pow(model.det_Abar / pair.symmetrized.det_Abar, model.alpha);
    return pair;
}

std::vector<VerificationReport> det_inequalities_check(const SymmetrizationPair& pair) {
    const double det_A = determinant(pair.original.A);
    const double det_A_sym = determinant(pair.symmetrized.A);
    const double scale = std::max(std::abs(det_A), std::abs(det_A_sym));
    std::vector<VerificationReport> reports;
    reports.push_back(
        lower_bound_report("sym/det-A", det_A_sym, det_A, 1e-10 * std::max(scale, 1.0)));
    reports.push_back(lower_bound_report("sym/det-Abar", pair.symmetrized.det_Abar,
                                         pair.original.det_Abar, 1e-10));
    reports.push_back(lower_bound_report("sym/det-Abar-below-1", 1.0 + 1e-12,
                                         pair.original.det_Abar, 0.0));
    reports.push_back(lower_bound_report("sym/det-Abar-sym-below-1", 1.0 + 1e-12,
                                         pair.symmetrized.det_Abar, 0.0));
    return reports;
}

std::vector<VerificationReport> permanent_inequality_check(const SquareMatrix& C, double alpha,
                                                           const MultiIndex& k) {
    const SquareMatrix S = geometric_symmetrize(C);
    const double perm_C = alpha_permanent(C, alpha);
    const double perm_S = alpha_permanent(S, alpha);
    const double perm_C_k = alpha_permanent(expand(C, k), alpha);
    const double perm_S_k = alpha_permanent(expand(S, k), alpha);

    std::vector<VerificationReport> reports;
    reports.push_back(lower_bound_report("sym/permanent-plain", perm_C, perm_S,
                                         1e-10 * std::max(1.0, std::abs(perm_C))));
    reports.push_back(lower_bound_report("sym/permanent-expanded", perm_C_k, perm_S_k,
                                         1e-10 * std::max(1.0, std::abs(perm_C_k))));
    return reports;
}

std::vector<VerificationReport> monotonicity_check(const SquareMatrix& A,
                                                   const SquareMatrix& A_prime) {
    const PermanentalModel base = build_model(A, 1.0);
    const PermanentalModel prime = build_model(A_prime, 1.0);
    const int n = A.dim();
    if (A_prime.dim() != n) throw LengthMismatch("monotonicity_check: dimension mismatch");
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (prime.decomp.Bbar(i, j) < base.decomp.Bbar(i, j) - 1e-12) {
                throw HypothesisViolated("monotonicity_check: Bbar' >= Bbar fails at (" +
                                         std::to_string(i) + "," + std::to_string(j) + ")");
            }

    // Abar' <= Abar entrywise
    double worst_gap = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            worst_gap = std::min(worst_gap,
                                 base.decomp.Abar(i, j) - prime.decomp.Abar(i, j));
    // (Abar)^{-1} <= (Abar')^{-1} entrywise
    const SquareMatrix inv_base = inverse(base.decomp.Abar);
    const SquareMatrix inv_prime = inverse(prime.decomp.Abar);
    double worst_inv_gap = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            worst_inv_gap = std::min(worst_inv_gap, inv_prime(i, j) - inv_base(i, j));

    std::vector<VerificationReport> reports;
    reports.push_back(lower_bound_report("sym/monotone-Abar", worst_gap, 0.0, 1e-10));
    reports.push_back(lower_bound_report("sym/monotone-inverse", worst_inv_gap, 0.0, 1e-10));
    return reports;
}

std::vector<VerificationReport> distribution_bounds_check(const SymmetrizationPair& pair,
                                                          std::size_t n, RandomStream stream,
                                                          int workers) {
    const double ratio = pair.ratio;
    const ZPmfTable table_x = z_pmf_table(pair.original, 1e-8);
    const ZPmfTable table_y = z_pmf_table(pair.symmetrized, 1e-8);

    RandomStream stream_x{stream.seed, stream.stream_id * 2 + 1};
    RandomStream stream_y{stream.seed, stream.stream_id * 2 + 2};

    // quantile grid for the max coordinate comes from the symmetrized sample
    const SampleBatch batch_y = sample_batch(pair.symmetrized, table_y, n, stream_y, workers);
    const SampleBatch batch_x = sample_batch(pair.original, table_x, n, stream_x, workers);
    const int dim = pair.original.dim();
    auto max_coord = [dim](const SampleBatch& b, std::size_t row) {
        double m = 0.0;
        for (int c = 0; c < dim; ++c) m = std::max(m, b.at(row, c));
        return m;
    };
    std::vector<double> maxima_y(n);
    for (std::size_t i = 0; i < n; ++i) maxima_y[i] = max_coord(batch_y, i);
    std::vector<double> sorted = maxima_y;
    std::sort(sorted.begin(), sorted.end());
    const double quantiles[] = {0.5, 0.75, 0.9, 0.95, 0.99};
    std::vector<double> grid;
    for (double q : quantiles) {
        grid.push_back(sorted[std::min(n - 1, static_cast<std::size_t>(q * static_cast<double>(n)))]);
    }

    std::vector<std::pair<std::string, std::function<double(const SampleBatch&, std::size_t)>>>
        family;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const double t = grid[g];
        family.emplace_back("max-tail-q" + std::to_string(g),
                            [t, max_coord](const SampleBatch& b, std::size_t row) {
                                return max_coord(b, row) > t ? 1.0 : 0.0;
                            });
    }
    family.emplace_back("l1-norm", [dim](const SampleBatch& b, std::size_t row) {
        double s = 0.0;
        for (int c = 0; c < dim; ++c) s += b.at(row, c);
        return s;
    });
    family.emplace_back("exp-neg-l1", [dim](const SampleBatch& b, std::size_t row) {
        double s = 0.0;
        for (int c = 0; c < dim; ++c) s += b.at(row, c);
        return std::exp(-s);
    });

    std::vector<VerificationReport> reports;
    auto estimate = [n](const SampleBatch& b,
                        const std::function<double(const SampleBatch&, std::size_t)>& f) {
        double s = 0.0, s2 = 0.0;
        for (std::size_t i = 0; i < b.n_draws; ++i) {
            const double v = f(b, i);
            s += v;
            s2 += v * v;
        }
        McEstimate est;
        est.n_draws = n;
        est.mean = s / static_cast<double>(n);
        const double var = std::max(
            0.0, (s2 - s * s / static_cast<double>(n)) / static_cast<double>(n - 1));
        est.stderr_ = std::sqrt(var / static_cast<double>(n));
        return est;
    };

    for (const auto& [fname, f] : family) {
        const McEstimate ex = estimate(batch_x, f);
        const McEstimate ey = estimate(batch_y, f);
        const double joint = std::sqrt(ex.stderr_ * ex.stderr_ +
                                       ratio * ratio * ey.stderr_ * ey.stderr_);
        reports.push_back(lower_bound_report("sym/domination-" + fname, ex.mean,
                                             ratio * ey.mean, 4.0 * joint));
    }

    // two-sided band for g = max coordinate, B = (t, inf) at the middle
    // grid point
    {
        const double t = grid[2];
        auto indicator = [t, max_coord](const SampleBatch& b, std::size_t row) {
            return max_coord(b, row) > t ? 1.0 : 0.0;
        };
        const McEstimate px = estimate(batch_x, indicator);
        const McEstimate py = estimate(batch_y, indicator);
        const double joint = std::sqrt(px.stderr_ * px.stderr_ + py.stderr_ * py.stderr_);
        reports.push_back(lower_bound_report("sym/band-lower", px.mean, ratio * py.mean,
                                             4.0 * joint));
        reports.push_back(lower_bound_report("sym/band-upper",
                                             (1.0 - ratio) + ratio * py.mean, px.mean,
                                             4.0 * joint));
    }
    return reports;
}

}  // namespace perma
