#ifndef PERMA_SAMPLER_HPP
#define PERMA_SAMPLER_HPP

#include <functional>
#include <vector>

#include "perma/model.hpp"
#include "perma/random.hpp"
#include "perma/report.hpp"

namespace perma {

/// One gamma draw; thin wrapper over Substream::gamma for call sites that
/// hold a stream rather than a substream.
double sample_gamma(double shape, double rate, Substream& rng);

/// Draws Z from the renormalized truncated table by inverse CDF over the
/// deterministic enumeration order.  Requires deficit <= 1e-8.
MultiIndex sample_z(const PermanentalModel& model, const ZPmfTable& table, Substream& rng);

/// Draws X: first Z, then independent gammas with shapes alpha + Z_i and
/// rates a_i.
std::vector<double> sample_x(const PermanentalModel& model, const ZPmfTable& table,
                             Substream& rng);

/// N x n draws of X.  Blocks of draws map to substreams by draw index, so
/// the batch is identical for any worker count.
struct SampleBatch {
    std::vector<double> draws;  // row-major, N x n
    std::size_t n_draws = 0;
    int dim = 0;
    std::uint64_t model_fingerprint = 0;

    double at(std::size_t row, int col) const {
        return draws[row * static_cast<std::size_t>(dim) + static_cast<std::size_t>(col)];
    }
};

SampleBatch sample_batch(const PermanentalModel& model, const ZPmfTable& table, std::size_t n,
                         RandomStream stream, int workers = 1);

struct McEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::size_t n_draws = 0;
};

/// Monte Carlo mean and standard error of f over draws of X.  Deterministic
/// under fixed (stream, N): accumulation is per fixed-size block with a
/// pairwise tree reduction over block index, independent of worker count.
/// Requires N >= 1e3.
McEstimate mc_expectation(const std::function<double(const std::vector<double>&)>& f,
                          const PermanentalModel& model, const ZPmfTable& table, std::size_t n,
                          RandomStream stream, int workers = 1);

/// First three moments of |Y|_1 = sum_i a_i X_i against the gamma-ratio
/// formulas read off the pmf table; each within 4 standard errors.
std::vector<VerificationReport> l1_norm_law_check(const PermanentalModel& model,
                                                  const ZPmfTable& table, std::size_t n,
                                                  RandomStream stream, int workers = 1);

/// Gaussian check (symmetric A, internal alpha = 1/2): samples eta ~ N(0, R)
/// through the Cholesky factor of R, forms W = sum_i a_i eta_i^2 / 2 and
/// compares E(W), E(W^2) and E(sqrt(W)) against table formulas, each within
/// 4 standard errors.  Throws NotSymmetric for asymmetric input.
std::vector<VerificationReport> gaussian_l2_check(const SquareMatrix& A, std::size_t n,
                                                  RandomStream stream, int workers = 1);

/// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
SquareMatrix cholesky(const SquareMatrix& S);

}  // namespace perma

#endif
