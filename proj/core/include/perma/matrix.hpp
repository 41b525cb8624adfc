#ifndef PERMA_MATRIX_HPP
#define PERMA_MATRIX_HPP

#include <initializer_list>
#include <vector>

#include "perma/random.hpp"

namespace perma {

/// Dense n x n real matrix, row-major.  Entries are validated finite at
/// construction; values are immutable after construction in the sense that
/// the library never mutates a matrix it handed out.
class SquareMatrix {
public:
    SquareMatrix() = default;
    explicit SquareMatrix(int n);
    SquareMatrix(int n, std::vector<double> entries);
    SquareMatrix(std::initializer_list<std::initializer_list<double>> rows);

    static SquareMatrix identity(int n);

    int dim() const { return n_; }

    double operator()(int i, int j) const { return entries_[static_cast<std::size_t>(i) * n_ + j]; }
    double& operator()(int i, int j) { return entries_[static_cast<std::size_t>(i) * n_ + j]; }

    const std::vector<double>& entries() const { return entries_; }

    SquareMatrix transpose() const;
    SquareMatrix operator*(const SquareMatrix& rhs) const;

    bool operator==(const SquareMatrix& rhs) const = default;

    /// Largest |entry|.
    double max_abs() const;
    /// Max row sum of |entries| (the operator infinity norm).
    double row_sum_norm() const;
    bool is_symmetric(double tol) const;

    /// Throws if any entry is NaN or infinite.
    void check_finite() const;

private:
    int n_ = 0;
    std::vector<double> entries_;
};

/// Witness that a matrix passed the two M-matrix conditions.
struct MMatrixCertificate {
    double offdiag_max;  // largest off-diagonal entry, <= 0
    double inverse_min;  // smallest entry of the inverse, >= -eps_cert
    double det;
};

/// A = D - B with D = diag(A), B >= 0 and zero diagonal, plus the row-scaled
/// pair Bbar = D^{-1} B and Abar = I - Bbar.
struct Decomposition {
    std::vector<double> diag;  // a_1,...,a_n
    SquareMatrix B;
    SquareMatrix Bbar;
    SquareMatrix Abar;
    double rho;  // spectral radius of Bbar, < 1 for a nonsingular M-matrix
};

/// Round-off slack accepted on inverse nonnegativity during certification.
inline constexpr double kCertifyTolerance = 1e-10;

/// Hard cap on brute-force permanent size (11! ~ 4e7 permutations).
inline constexpr int kPermanentCap = 11;

double determinant(const SquareMatrix& M);

/// Throws SingularMatrix when a pivot underflows.
SquareMatrix inverse(const SquareMatrix& M);

/// Checks off-diagonal nonpositivity and inverse nonnegativity; throws
/// NotMMatrix naming the violated condition and offending index.
MMatrixCertificate certify_m_matrix(const SquareMatrix& A);

/// Requires certify_m_matrix(A) to succeed and positive diagonal entries.
Decomposition decompose(const SquareMatrix& A);

/// Largest-modulus eigenvalue of an entrywise-nonnegative matrix, via
/// normalized matrix powers (relative tolerance 1e-12).
double spectral_radius(const SquareMatrix& M);

/// Draws a strictly diagonally dominant M-matrix: B >= 0 with zero diagonal
/// and row sums of D^{-1}B equal to rho_target, D uniform in [1,3].
/// Always passes certify_m_matrix.
SquareMatrix random_m_matrix(int n, double rho_target, RandomStream rng);

}  // namespace perma

#endif
