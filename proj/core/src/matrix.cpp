#include "perma/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>

#include "perma/errors.hpp"

namespace perma {

SquareMatrix::SquareMatrix(int n) : n_(n), entries_(static_cast<std::size_t>(n) * n, 0.0) {
    if (n < 0) throw std::invalid_argument("SquareMatrix: negative dimension");
}

SquareMatrix::SquareMatrix(int n, std::vector<double> entries)
    : n_(n), entries_(std::move(entries)) {
    if (n < 1) throw std::invalid_argument("SquareMatrix: dimension must be >= 1");
    if (entries_.size() != static_cast<std::size_t>(n) * n) {
        throw std::invalid_argument("SquareMatrix: entry count does not match dimension");
    }
    check_finite();
}

SquareMatrix::SquareMatrix(std::initializer_list<std::initializer_list<double>> rows) {
    n_ = static_cast<int>(rows.size());
    entries_.reserve(static_cast<std::size_t>(n_) * n_);
    for (const auto& row : rows) {
        if (static_cast<int>(row.size()) != n_) {
            throw std::invalid_argument("SquareMatrix: ragged initializer");
        }
        entries_.insert(entries_.end(), row.begin(), row.end());
    }
    check_finite();
}

SquareMatrix SquareMatrix::identity(int n) {
    SquareMatrix I(n);
    for (int i = 0; i < n; ++i) I(i, i) = 1.0;
    return I;
}

void SquareMatrix::check_finite() const {
    for (double v : entries_) {
        if (!std::isfinite(v)) throw std::invalid_argument("SquareMatrix: non-finite entry");
    }
}

SquareMatrix SquareMatrix::transpose() const {
    SquareMatrix T(n_);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) T(j, i) = (*this)(i, j);
    return T;
}

SquareMatrix SquareMatrix::operator*(const SquareMatrix& rhs) const {
    if (rhs.n_ != n_) throw LengthMismatch("matrix product: dimension mismatch");
    SquareMatrix out(n_);
    for (int i = 0; i < n_; ++i) {
        for (int k = 0; k < n_; ++k) {
            const double a = (*this)(i, k);
            if (a == 0.0) continue;
            for (int j = 0; j < n_; ++j) out(i, j) += a * rhs(k, j);
        }
    }
    return out;
}

double SquareMatrix::max_abs() const {
    double m = 0.0;
    for (double v : entries_) m = std::max(m, std::abs(v));
    return m;
}

double SquareMatrix::row_sum_norm() const {
    double m = 0.0;
    for (int i = 0; i < n_; ++i) {
        double s = 0.0;
        for (int j = 0; j < n_; ++j) s += std::abs((*this)(i, j));
        m = std::max(m, s);
    }
    return m;
}

bool SquareMatrix::is_symmetric(double tol) const {
    for (int i = 0; i < n_; ++i)
        for (int j = i + 1; j < n_; ++j)
            if (std::abs((*this)(i, j) - (*this)(j, i)) > tol) return false;
    return true;
}

namespace {

// LU with partial pivoting; returns false when a pivot underflows.
// perm_sign receives the permutation parity.
bool lu_factor(SquareMatrix& M, std::vector<int>& piv, double& perm_sign) {
    const int n = M.dim();
    piv.resize(static_cast<std::size_t>(n));
    perm_sign = 1.0;
    const double scale = M.max_abs();
    const double tiny = (scale > 0.0) ? scale * 1e-14 : 1e-300;
    for (int col = 0; col < n; ++col) {
        int best = col;
        double best_abs = std::abs(M(col, col));
        for (int r = col + 1; r < n; ++r) {
            const double a = std::abs(M(r, col));
            if (a > best_abs) {
                best_abs = a;
                best = r;
            }
        }
        piv[col] = best;
        if (best != col) {
            for (int j = 0; j < n; ++j) std::swap(M(col, j), M(best, j));
            perm_sign = -perm_sign;
        }
        const double pivot = M(col, col);
        if (std::abs(pivot) <= tiny) return false;
        for (int r = col + 1; r < n; ++r) {
            const double f = M(r, col) / pivot;
            M(r, col) = f;
            for (int j = col + 1; j < n; ++j) M(r, j) -= f * M(col, j);
        }
    }
    return true;
}

}  // namespace

double determinant(const SquareMatrix& M) {
    SquareMatrix lu = M;
    std::vector<int> piv;
    double sign;
    if (!lu_factor(lu, piv, sign)) return 0.0;
    double det = sign;
    for (int i = 0; i < lu.dim(); ++i) det *= lu(i, i);
    return det;
}

SquareMatrix inverse(const SquareMatrix& M) {
    const int n = M.dim();
    SquareMatrix lu = M;
    std::vector<int> piv;
    double sign;
    if (!lu_factor(lu, piv, sign)) {
        throw SingularMatrix("inverse: pivot underflow, matrix is singular");
    }
    SquareMatrix inv = SquareMatrix::identity(n);
    // Solve M X = I column by column using the factored form.
    for (int col = 0; col < n; ++col) {
        // apply row swaps
        for (int i = 0; i < n; ++i) {
            if (piv[i] != i) std::swap(inv(i, col), inv(piv[i], col));
        }
        // forward substitution (unit lower triangle)
        for (int i = 1; i < n; ++i) {
            double s = inv(i, col);
            for (int j = 0; j < i; ++j) s -= lu(i, j) * inv(j, col);
            inv(i, col) = s;
        }
        // back substitution
        for (int i = n - 1; i >= 0; --i) {
            double s = inv(i, col);
            for (int j = i + 1; j < n; ++j) s -= lu(i, j) * inv(j, col);
            inv(i, col) = s / lu(i, i);
        }
    }
    return inv;
}

MMatrixCertificate certify_m_matrix(const SquareMatrix& A) {
    const int n = A.dim();
    double offdiag_max = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            if (A(i, j) > 0.0) {
                throw NotMMatrix(NotMMatrix::Reason::OffDiagPositive, i, j,
                                 "not an M-matrix: positive off-diagonal entry at (" +
                                     std::to_string(i) + "," + std::to_string(j) + ")");
            }
            offdiag_max = std::max(offdiag_max, A(i, j));
        }
    }
    if (n == 1) offdiag_max = 0.0;

    SquareMatrix R;
    try {
        R = inverse(A);
    } catch (const SingularMatrix&) {
        throw NotMMatrix(NotMMatrix::Reason::Singular, -1, -1, "not an M-matrix: singular");
    }
    double inverse_min = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (R(i, j) < inverse_min) inverse_min = R(i, j);
            if (R(i, j) < -kCertifyTolerance) {
                throw NotMMatrix(NotMMatrix::Reason::InverseNegative, i, j,
                                 "not an M-matrix: inverse entry at (" + std::to_string(i) + "," +
                                     std::to_string(j) + ") is negative");
            }
        }
    }
    return MMatrixCertificate{offdiag_max, inverse_min, determinant(A)};
}

Decomposition decompose(const SquareMatrix& A) {
    certify_m_matrix(A);
    const int n = A.dim();
    Decomposition d;
    d.diag.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        d.diag[i] = A(i, i);
        if (!(A(i, i) > 0.0)) {
            throw NonPositiveDiagonal(i, "decompose: diagonal entry " + std::to_string(i) +
                                             " is not positive");
        }
    }
    d.B = SquareMatrix(n);
    d.Bbar = SquareMatrix(n);
    d.Abar = SquareMatrix(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double b = (i == j) ? 0.0 : -A(i, j);
            d.B(i, j) = b;
            d.Bbar(i, j) = b / d.diag[i];
            d.Abar(i, j) = (i == j ? 1.0 : 0.0) - d.Bbar(i, j);
        }
    }
    d.rho = spectral_radius(d.Bbar);
    return d;
}

double spectral_radius(const SquareMatrix& M) {
    const int n = M.dim();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (M(i, j) < 0.0) {
                throw std::invalid_argument("spectral_radius: negative entry");
            }
    if (M.max_abs() == 0.0) return 0.0;

    // Normalized matrix powers: rho = lim ||M^(2^j)||^(1/2^j).  Unlike a
    // single power-iteration vector, this converges for imprimitive and
    // reducible nonnegative matrices (eigenvalue ties on the circle, zero
    // blocks), which arise already for 2x2 antidiagonal inputs.
    SquareMatrix P = M;
    double log_scale = 0.0;  // log of the accumulated normalization, base e
    double weight = 1.0;     // current 1/2^j exponent
    double prev = -1.0;
    const int max_squarings = 200;
    for (int it = 0; it < max_squarings; ++it) {
        const double norm = P.row_sum_norm();
        if (norm == 0.0) return 0.0;  // nilpotent
        const double estimate = std::exp(log_scale + weight * std::log(norm));
        if (prev >= 0.0) {
            const double diff = std::abs(estimate - prev);
            if (diff <= 1e-13 * std::max(estimate, 1e-300)) return estimate;
        }
        prev = estimate;
        // normalize, square, halve the exponent
        SquareMatrix Q(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) Q(i, j) = P(i, j) / norm;
        log_scale += weight * std::log(norm);
        weight *= 0.5;
        P = Q * Q;
    }
    throw NoConvergence("spectral_radius: no convergence after iteration cap");
}

SquareMatrix random_m_matrix(int n, double rho_target, RandomStream rng) {
    if (n < 1) throw std::invalid_argument("random_m_matrix: n must be >= 1");
    if (!(rho_target > 0.0 && rho_target < 1.0)) {
        throw std::invalid_argument("random_m_matrix: rho_target must lie in (0,1)");
    }
    Substream sub(rng, 0);
    SquareMatrix A(n);
    for (int i = 0; i < n; ++i) {
        const double d = 1.0 + 2.0 * sub.uniform();
        std::vector<double> row(static_cast<std::size_t>(n), 0.0);
        double row_sum = 0.0;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            row[j] = sub.uniform();
            row_sum += row[j];
        }
        // scale so that sum_j Bbar_ij = rho_target exactly (strict diagonal
        // dominance of the scaled matrix guarantees M-matrix-hood)
        const double scale = (row_sum > 0.0) ? rho_target * d / row_sum : 0.0;
        A(i, i) = d;
        for (int j = 0; j < n; ++j) {
            if (j != i) A(i, j) = -row[j] * scale;
        }
    }
    return A;
}

}  // namespace perma
