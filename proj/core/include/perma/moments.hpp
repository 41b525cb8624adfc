#ifndef PERMA_MOMENTS_HPP
#define PERMA_MOMENTS_HPP

#include <utility>

#include "perma/model.hpp"
#include "perma/multi_index.hpp"
#include "perma/report.hpp"

namespace perma {

/// E(Z_p^m) as the signed sum over compositions j_0+...+j_l = m (all j_i >= 1,
/// l = 0..m-1) of (-1)^{l+m+1} alpha^{j_0} (alpha+1)^{j_1} ... (alpha+l)^{j_l}
/// * (R_pp A_pp)^l (R_pp A_pp - 1).  p is 0-based.
double z_moment_cumulative(const PermanentalModel& model, int p, int m);

/// E(Z_p^m) on the alternative index set: sum over l = 0..m and tuples with
/// j_i >= 1 for i < l, j_l >= 0, of (-1)^{l+m} alpha^{j_0} ... (alpha+l)^{j_l}
/// * (R_pp A_pp)^l.  Must agree with z_moment_cumulative everywhere.
double z_moment_jset(const PermanentalModel& model, int p, int m);

/// The two printed fourth-moment expansions, evaluated literally.
std::pair<double, double> z_moment_example_fourth(const PermanentalModel& model, int p);

/// E(prod_j X_j^{m_j}) = |R(m)|_alpha.
double mixed_moment_x(const PermanentalModel& model, const MultiIndex& m);

/// |Rbar(m)|_alpha (= |R(m)|_alpha * prod a_j^{m_j}) against the pmf-table
/// expectation of prod_j prod_{l<m_j} (alpha + Z_j + l).
VerificationReport factorial_moment_identity(const PermanentalModel& model, const MultiIndex& m,
                                             double epsilon);

/// Rbar_jj^m against the pmf-table expectation of
/// prod_{l<m} (alpha + Z_j + l)/(alpha + l).  j is 0-based.
VerificationReport power_identity(const PermanentalModel& model, int j, int m, double epsilon);

/// Cov(Z_i, Z_j) = alpha a_i a_j R_ij R_ji for i != j.  The diagonal case is
/// deliberately unsupported (route it through the pmf table instead); asking
/// for it throws DiagonalCovarianceUnsupported.
double z_covariance(const PermanentalModel& model, int i, int j);

/// E|Z|_1 = alpha (sum_i a_i R_ii - n).
double z_l1_mean(const PermanentalModel& model);

/// Pmf-table moment E(Z_p^m), streamed to machine-precision stagnation.
double z_moment_table(const PermanentalModel& model, int p, int m, double epsilon,
                      double* deficit_out = nullptr);

/// Pmf-table covariance of (Z_i, Z_j), streamed like z_moment_table.
double z_covariance_table(const PermanentalModel& model, int i, int j, double epsilon);

/// Composition tolerance used by the table-backed identity checks:
/// 1e-7 + |magnitude| * (deficit + 1e-12); truncation bias is first-order in
/// the deficit times the polynomial growth of the integrand.
double table_identity_tolerance(double magnitude, double deficit);

}  // namespace perma

#endif
