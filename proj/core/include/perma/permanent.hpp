#ifndef PERMA_PERMANENT_HPP
#define PERMA_PERMANENT_HPP

#include <span>
#include <vector>

#include "perma/matrix.hpp"
#include "perma/multi_index.hpp"
#include "perma/rational.hpp"

namespace perma {

/// Number of disjoint cycles of a permutation of {0..m-1}, counting fixed
/// points.  Throws InvalidPermutation when the image has repeats.
int cycle_count(std::span<const int> perm);

/// sum_pi alpha^{c(pi)} prod_i M[i, pi(i)] by exhaustive enumeration in
/// lexicographic order with compensated summation.  The empty matrix gives 1.
/// Any real alpha is accepted (alpha = -1 recovers +-determinant).
/// Throws DimensionTooLarge above the cap of 11.
double alpha_permanent(const SquareMatrix& M, double alpha);

/// The |k| x |k| matrix that repeats row/column i of C exactly k_i times.
/// k = 0 yields the 0 x 0 matrix, whose alpha-permanent is 1.
SquareMatrix expand(const SquareMatrix& C, const MultiIndex& k);

/// prod_{l=0}^{m-1} (alpha + l): the alpha-permanent of the m x m all-ones
/// matrix.  m = 0 gives 1.
double constant_block_permanent(int m, double alpha);

/// Exact-rational alpha-permanent for matrices with rational entries,
/// m <= 7 (acceptance oracle; no floating tolerance).
Rational alpha_permanent_exact(int m, const std::vector<Rational>& entries_row_major,
                               const Rational& alpha);

/// Exact form of constant_block_permanent.
Rational constant_block_permanent_exact(int m, const Rational& alpha);

}  // namespace perma

#endif
