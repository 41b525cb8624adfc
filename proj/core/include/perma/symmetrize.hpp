#ifndef PERMA_SYMMETRIZE_HPP
#define PERMA_SYMMETRIZE_HPP

#include <vector>

#include "perma/model.hpp"
#include "perma/random.hpp"
#include "perma/report.hpp"

namespace perma {

/// A model next to its symmetrized counterpart A_sym = D - S(B).
struct SymmetrizationPair {
    PermanentalModel original;
    PermanentalModel symmetrized;
    double ratio = 1.0;  // det(Abar)^alpha / det(Abar_sym)^alpha, in (0, 1]
};

/// S(C)_ij = sqrt(c_ij * c_ji) for C >= 0; symmetric, and bounded above by
/// (C + C^T)/2 entrywise.
SquareMatrix geometric_symmetrize(const SquareMatrix& C);

/// Builds A_sym = D - S(B), certifies it (failure would contradict one of
/// the verified statements and raises CertificationFailed loudly), and
/// models it at the same alpha.
SymmetrizationPair build_sym_pair(const PermanentalModel& model);

/// det(A_sym) >= det(A), det(Abar_sym) >= det(Abar), both det(Abar) <= 1.
std::vector<VerificationReport> det_inequalities_check(const SymmetrizationPair& pair);

/// |S(C)|_alpha <= |C|_alpha and |S(C)(k)|_alpha <= |C(k)|_alpha for C >= 0.
std::vector<VerificationReport> permanent_inequality_check(const SquareMatrix& C, double alpha,
                                                           const MultiIndex& k);

/// With Bbar' >= Bbar entrywise: Abar' <= Abar and Abar^{-1} <= Abar'^{-1},
/// both entrywise.  Throws HypothesisViolated when Bbar' >= Bbar fails.
std::vector<VerificationReport> monotonicity_check(const SquareMatrix& A,
                                                   const SquareMatrix& A_prime);

/// Monte Carlo bounds relating X (from A) and X~ (from A_sym):
/// E f(X) >= ratio * E f(X~) for the fixed positive test family
/// (tail indicators of the max coordinate on an empirical-quantile grid,
/// the l1 norm, exp(-l1)), and the two-sided band on P(max in B).
std::vector<VerificationReport> distribution_bounds_check(const SymmetrizationPair& pair,
                                                          std::size_t n, RandomStream stream,
                                                          int workers = 1);

}  // namespace perma

#endif
