#ifndef PERMA_MODEL_HPP
#define PERMA_MODEL_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

#include "perma/matrix.hpp"
#include "perma/multi_index.hpp"
#include "perma/permanent.hpp"
#include "perma/report.hpp"

namespace perma {

/// A certified M-matrix together with everything the distribution formulas
/// consume: R = A^{-1}, the decomposition A = D - B, alpha, det(Abar).
struct PermanentalModel {
    SquareMatrix A;
    SquareMatrix R;
    Decomposition decomp;
    double alpha = 1.0;
    double det_Abar = 1.0;     // in (0, 1]
    bool rho_warning = false;  // rho > 0.9: table growth impractical
    std::uint64_t fingerprint = 0;

    int dim() const { return A.dim(); }
};

PermanentalModel build_model(const SquareMatrix& A, double alpha);

/// P(Z = k) on the brute-force route: det_Abar^alpha * |Bbar(k)|_alpha / prod k_i!.
/// Subject to the permanent cap on |k|; tiny negative round-off clips to 0.
double z_pmf(const PermanentalModel& model, const MultiIndex& k);

/// Default ceiling on the table's total degree; reaching it before the mass
/// target signals rho too close to 1 for desk-scale truncation.
inline constexpr int kTableDegreeCap = 192;

/// Streams the pmf of Z one total degree at a time, in enumeration order
/// (increasing total degree, lexicographic within a degree).  Entries come
/// from the series expansion of det(I - T Bbar)^{-alpha}, which has no
/// permanent cap; the unit suite cross-checks it against the brute-force
/// route entry by entry.  Memory stays bounded: only the trailing window of
/// series coefficients needed by the recurrence is kept.
class ZPmfScanner {
public:
    explicit ZPmfScanner(const PermanentalModel& model);
    ~ZPmfScanner();
    ZPmfScanner(ZPmfScanner&&) noexcept;
    ZPmfScanner& operator=(ZPmfScanner&&) noexcept;

    /// Processes the next total degree, invoking fn(k, p) for each entry.
    /// Returns the degree just completed.
    int advance(const std::function<void(const MultiIndex&, double)>& fn);

    double cumulative_mass() const { return mass_; }
    double deficit() const { return deficit_; }
    int last_degree() const { return degree_; }
    int clipped_count() const { return clipped_; }
    int dim() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    double mass_ = 0.0;
    double mass_comp_ = 0.0;
    double deficit_ = 1.0;
    int degree_ = -1;
    int clipped_ = 0;
};

/// Truncated pmf of the latent count vector Z.  Entries are stored in
/// enumeration order; every multi-index with total degree <= K is present.
/// The deficit is directly measurable because the full series sums to 1.
class ZPmfTable {
public:
    struct Entry {
        MultiIndex k;
        double p;
    };

    const std::vector<Entry>& entries() const { return entries_; }
    int max_total_degree() const { return max_total_degree_; }
    double mass_deficit() const { return mass_deficit_; }
    int dim() const { return dim_; }
    std::uint64_t model_fingerprint() const { return fingerprint_; }

    /// pmf lookup; 0 for indices beyond the truncation.
    double probability(const MultiIndex& k) const;

    /// P(|Z|_1 = j) for j = 0..K.
    std::vector<double> l1_pmf() const;

    /// Running mass in enumeration order (the inverse-CDF sampling support);
    /// cumulative().back() == 1 - mass_deficit().
    const std::vector<double>& cumulative() const { return cumulative_; }

    /// Number of negative round-off values clipped to zero during the build.
    int clipped_count() const { return clipped_; }

private:
    friend ZPmfTable z_pmf_table(const PermanentalModel&, double, int);

    std::vector<Entry> entries_;
    std::vector<double> cumulative_;
    std::unordered_map<std::uint64_t, double> lookup_;
    int dim_ = 0;
    int max_total_degree_ = 0;
    double mass_deficit_ = 1.0;
    int clipped_ = 0;
    std::uint64_t fingerprint_ = 0;
};

/// Builds the table by enumerating total degrees until the cumulative mass
/// reaches 1 - epsilon.  Throws TruncationCapExceeded when the degree cap
/// is hit first.
ZPmfTable z_pmf_table(const PermanentalModel& model, double epsilon,
                      int degree_cap = kTableDegreeCap);

/// Laplace transform of Z, closed form: det_Abar^alpha / det(I - Bbar E(s))^alpha
/// with E(s) = diag(e^{-s_i}).  Requires s >= 0.
double z_laplace_closed(const PermanentalModel& model, std::span<const double> s);

/// Laplace transform of Z as the truncated series sum_k e^{-<s,k>} P(Z=k);
/// agrees with the closed form within epsilon + deficit.
double z_laplace_series(const PermanentalModel& model, std::span<const double> s,
                        double epsilon);

/// Infinite-divisibility check: the pmf table at alpha+beta against the
/// discrete convolution of the alpha and beta tables (same A).  Reports the
/// max absolute discrepancy; passes iff <= 10 * epsilon.
VerificationReport z_convolve_check(const PermanentalModel& model_a,
                                    const PermanentalModel& model_b, double epsilon);

/// Expectations of the given integrands against the pmf, streamed to
/// convergence: scanning stops once the deficit is below epsilon and every
/// accumulator has stagnated at machine precision (or the deficit reaches
/// ~1e-16).  Suited to polynomially growing integrands.
std::vector<double> z_table_expectations(
    const PermanentalModel& model,
    const std::vector<std::function<double(const MultiIndex&)>>& integrands,
    double epsilon, double* deficit_out = nullptr);

/// Expectation of f(k) against a stored table (no deficit correction).
template <typename Fn>
double table_expectation(const ZPmfTable& table, Fn&& f) {
    double sum = 0.0, comp = 0.0;
    for (const auto& e : table.entries()) {
        const double term = f(e.k) * e.p;
        const double y = term - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum;
}

}  // namespace perma

#endif
