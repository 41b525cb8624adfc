#include "perma/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <span>
#include <string>
#include <thread>

#include "perma/errors.hpp"

namespace perma {

namespace {

constexpr std::size_t kBlockSize = 4096;
constexpr double kMaxSamplerDeficit = 1e-8;

void check_table(const PermanentalModel& model, const ZPmfTable& table) {
    if (table.model_fingerprint() != model.fingerprint) {
        throw ModelMismatch("sampler: table was built for a different model");
    }
    if (table.mass_deficit() > kMaxSamplerDeficit) {
        throw DeficitTooLarge("sampler: table deficit " + fmt17(table.mass_deficit()) +
                              " above sampling bound " + fmt17(kMaxSamplerDeficit));
    }
}

// Runs `body` for every draw index in [0, n), grouped into fixed blocks.
// Block b sees Substream(stream, b); per-block accumulator slices are
// reduced pairwise over block index afterwards, so the totals are identical
// for any worker count.
void run_blocks(std::size_t n, RandomStream stream, int workers, std::size_t n_acc,
                const std::function<void(std::size_t, Substream&, double*)>& body,
                std::vector<double>* totals) {
    const std::size_t n_blocks = (n + kBlockSize - 1) / kBlockSize;
    std::vector<double> partials(n_blocks * n_acc, 0.0);

    auto process_block = [&](std::size_t b) {
        Substream sub(stream, b);
        double* acc = partials.data() + b * n_acc;
        const std::size_t lo = b * kBlockSize;
        const std::size_t hi = std::min(n, lo + kBlockSize);
        for (std::size_t i = lo; i < hi; ++i) body(i, sub, acc);
    };

    if (workers <= 1 || n_blocks <= 1) {
        for (std::size_t b = 0; b < n_blocks; ++b) process_block(b);
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&]() {
            for (;;) {
                const std::size_t b = next.fetch_add(1);
                if (b >= n_blocks) return;
                process_block(b);
            }
        };
        std::vector<std::thread> pool;
        const int k = std::min<int>(workers, static_cast<int>(n_blocks));
        pool.reserve(static_cast<std::size_t>(k));
        for (int t = 0; t < k; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    if (!totals) return;
    totals->assign(n_acc, 0.0);
    for (std::size_t j = 0; j < n_acc; ++j) {
        // pairwise tree over block index
        std::vector<double> level(n_blocks);
        for (std::size_t b = 0; b < n_blocks; ++b) level[b] = partials[b * n_acc + j];
        while (level.size() > 1) {
            std::vector<double> up((level.size() + 1) / 2);
            for (std::size_t i = 0; i + 1 < level.size(); i += 2) up[i / 2] = level[i] + level[i + 1];
            if (level.size() % 2) up.back() = level.back();
            level = std::move(up);
        }
        (*totals)[j] = level[0];
    }
}

McEstimate moments_to_estimate(double sum, double sum_sq, std::size_t n) {
    McEstimate est;
    est.n_draws = n;
    est.mean = sum / static_cast<double>(n);
    const double var =
        std::max(0.0, (sum_sq - sum * sum / static_cast<double>(n)) / static_cast<double>(n - 1));
    est.stderr_ = std::sqrt(var / static_cast<double>(n));
    return est;
}

}  // namespace

double sample_gamma(double shape, double rate, Substream& rng) { return rng.gamma(shape, rate); }

MultiIndex sample_z(const PermanentalModel& model, const ZPmfTable& table, Substream& rng) {
    check_table(model, table);
    const auto& cdf = table.cumulative();
    const double target = rng.uniform() * cdf.back();  // renormalized truncation
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
    const std::size_t idx = std::min(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
    return table.entries()[idx].k;
}

std::vector<double> sample_x(const PermanentalModel& model, const ZPmfTable& table,
                             Substream& rng) {
    const MultiIndex z = sample_z(model, table, rng);
    const int n = model.dim();
    std::vector<double> x(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        x[static_cast<std::size_t>(i)] =
            rng.gamma(model.alpha + static_cast<double>(z[static_cast<std::size_t>(i)]),
                      model.decomp.diag[static_cast<std::size_t>(i)]);
    }
    return x;
}

SampleBatch sample_batch(const PermanentalModel& model, const ZPmfTable& table, std::size_t n,
                         RandomStream stream, int workers) {
    check_table(model, table);
    const int dim = model.dim();
    SampleBatch batch;
    batch.n_draws = n;
    batch.dim = dim;
    batch.model_fingerprint = model.fingerprint;
    batch.draws.assign(n * static_cast<std::size_t>(dim), 0.0);
    run_blocks(
        n, stream, workers, 0,
        [&](std::size_t i, Substream& sub, double*) {
            const std::vector<double> x = sample_x(model, table, sub);
            std::copy(x.begin(), x.end(),
                      batch.draws.begin() + static_cast<std::ptrdiff_t>(i * static_cast<std::size_t>(dim)));
        },
        nullptr);
    return batch;
}

McEstimate mc_expectation(const std::function<double(const std::vector<double>&)>& f,
                          const PermanentalModel& model, const ZPmfTable& table, std::size_t n,
                          RandomStream stream, int workers) {
    if (n < 1000) throw std::invalid_argument("mc_expectation: needs at least 1e3 draws");
    check_table(model, table);
    std::vector<double> totals;
    run_blocks(
        n, stream, workers, 2,
        [&](std::size_t, Substream& sub, double* acc) {
            const double v = f(sample_x(model, table, sub));
            acc[0] += v;
            acc[1] += v * v;
        },
        &totals);
    return moments_to_estimate(totals[0], totals[1], n);
}

std::vector<VerificationReport> l1_norm_law_check(const PermanentalModel& model,
                                                  const ZPmfTable& table, std::size_t n,
                                                  RandomStream stream, int workers) {
    if (n < 1000) throw std::invalid_argument("l1_norm_law_check: needs at least 1e3 draws");
    check_table(model, table);
    const int dim = model.dim();
    const double alpha = model.alpha;

    // empirical moments of |Y|_1 = sum_i a_i X_i, powers 1..3 (+ squares for
    // the standard errors)
    std::vector<double> totals;
    run_blocks(
        n, stream, workers, 6,
        [&](std::size_t, Substream& sub, double* acc) {
            const std::vector<double> x = sample_x(model, table, sub);
            double y = 0.0;
            for (int i = 0; i < dim; ++i)
                y += model.decomp.diag[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
            double pw = 1.0;
            for (int p = 0; p < 3; ++p) {
                pw *= y;
                acc[2 * p] += pw;
                acc[2 * p + 1] += pw * pw;
            }
        },
        &totals);

    // table side: E prod_{l<p} (|Z|_1 + n alpha + l)
    const std::vector<double> l1 = table.l1_pmf();
    std::vector<VerificationReport> reports;
    for (int p = 1; p <= 3; ++p) {
        double expect = 0.0;
        for (std::size_t j = 0; j < l1.size(); ++j) {
            double prod = 1.0;
            for (int l = 0; l < p; ++l) {
                prod *= static_cast<double>(j) + alpha * dim + static_cast<double>(l);
            }
            expect += l1[j] * prod;
        }
        const McEstimate est = moments_to_estimate(totals[2 * (p - 1)], totals[2 * (p - 1) + 1], n);
        VerificationReport r;
        r.name = "l1-law/moment-p" + std::to_string(p);
        r.anchor = "sampler";
        r.kind = VerificationReport::Kind::Equality;
        r.lhs = est.mean;
        r.rhs = expect;
        r.tolerance = 4.0 * est.stderr_;
        r.evaluate();
        reports.push_back(std::move(r));
    }
    return reports;
}

SquareMatrix cholesky(const SquareMatrix& S) {
    const int n = S.dim();
    if (!S.is_symmetric(1e-12)) throw NotSymmetric("cholesky: matrix is not symmetric");
    SquareMatrix L(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = S(i, j);
            for (int k = 0; k < j; ++k) s -= L(i, k) * L(j, k);
            if (i == j) {
                if (s <= 0.0) throw Error("cholesky: matrix is not positive definite");
                L(i, i) = std::sqrt(s);
            } else {
                L(i, j) = s / L(j, j);
            }
        }
    }
    return L;
}

std::vector<VerificationReport> gaussian_l2_check(const SquareMatrix& A, std::size_t n,
                                                  RandomStream stream, int workers) {
    if (n < 1000) throw std::invalid_argument("gaussian_l2_check: needs at least 1e3 draws");
    if (!A.is_symmetric(1e-12)) {
        throw NotSymmetric("gaussian_l2_check: requires a symmetric M-matrix");
    }
    const PermanentalModel model = build_model(A, 0.5);
    const ZPmfTable table = z_pmf_table(model, kMaxSamplerDeficit);
    const int dim = A.dim();

    // numerically symmetrized R, then its Cholesky factor
    SquareMatrix R(dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) R(i, j) = 0.5 * (model.R(i, j) + model.R(j, i));
    const SquareMatrix L = cholesky(R);

    // accumulators: sqrt(W), W, W^2, W^3, W^4
    std::vector<double> totals;
    run_blocks(
        n, stream, workers, 5,
        [&](std::size_t, Substream& sub, double* acc) {
            std::vector<double> g(static_cast<std::size_t>(dim));
            for (int i = 0; i < dim; ++i) g[static_cast<std::size_t>(i)] = sub.normal();
            double w = 0.0;
            for (int i = 0; i < dim; ++i) {
                double eta = 0.0;
                for (int j = 0; j <= i; ++j) eta += L(i, j) * g[static_cast<std::size_t>(j)];
                w += model.decomp.diag[static_cast<std::size_t>(i)] * eta * eta / 2.0;
            }
            acc[0] += std::sqrt(w);
            acc[1] += w;
            acc[2] += w * w;
            acc[3] += w * w * w;
            acc[4] += w * w * w * w;
        },
        &totals);

    const std::vector<double> l1 = table.l1_pmf();
    const double half_n = static_cast<double>(dim) / 2.0;
    auto table_sum = [&](const std::function<double(double)>& g) {
        double s = 0.0;
        for (std::size_t j = 0; j < l1.size(); ++j) s += l1[j] * g(static_cast<double>(j));
        return s;
    };

    std::vector<VerificationReport> reports;
    auto push = [&](const std::string& name, const McEstimate& est, double rhs) {
        VerificationReport r;
        r.name = name;
        r.anchor = "sampler/gaussian";
        r.kind = VerificationReport::Kind::Equality;
        r.lhs = est.mean;
        r.rhs = rhs;
        r.tolerance = 4.0 * est.stderr_;
        r.evaluate();
        reports.push_back(std::move(r));
    };

    push("gaussian-l2/moment-p1", moments_to_estimate(totals[1], totals[2], n),
         table_sum([&](double j) { return j + half_n; }));
    push("gaussian-l2/moment-p2", moments_to_estimate(totals[2], totals[4], n),
         table_sum([&](double j) { return (j + half_n) * (j + half_n + 1.0); }));
    push("gaussian-l2/moment-p-half", moments_to_estimate(totals[0], totals[1], n),
         table_sum([&](double j) {
             return std::exp(std::lgamma(j + half_n + 0.5) - std::lgamma(j + half_n));
         }));
    return reports;
}

}  // namespace perma
