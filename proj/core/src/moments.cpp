#include "perma/moments.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "perma/errors.hpp"

namespace perma {

namespace {

constexpr int kCompositionCap = 12;

void check_index(const PermanentalModel& model, int p, const char* who) {
    if (p < 0 || p >= model.dim()) {
        throw IndexOutOfRange(std::string(who) + ": coordinate index out of range");
    }
}

void check_order(int m, const char* who) {
    if (m < 1) throw std::invalid_argument(std::string(who) + ": order must be >= 1");
    if (m > kCompositionCap) {
        throw DimensionTooLarge(m, std::string(who) + ": order above composition cap 12");
    }
}

double rbar_diag(const PermanentalModel& model, int p) {
    return model.R(p, p) * model.A(p, p);
}

// Visits compositions (j_0,...,j_l) of m in lexicographic order.  min_last
// distinguishes the two index sets: 1 requires every part >= 1, 0 allows the
// final part to vanish.
template <typename Fn>
void for_each_composition(int m, int l, int min_last, Fn&& fn) {
    std::vector<int> parts(static_cast<std::size_t>(l) + 1, 0);
    auto rec = [&](auto&& self, int pos, int remaining) -> void {
        if (pos == l) {
            if (remaining >= min_last) {
                parts[static_cast<std::size_t>(pos)] = remaining;
                fn(parts);
            }
            return;
        }
        // leave at least 1 for each middle slot and min_last for the tail
        const int max_v = remaining - (l - pos - 1) - min_last;
        for (int v = 1; v <= max_v; ++v) {
            parts[static_cast<std::size_t>(pos)] = v;
            self(self, pos + 1, remaining - v);
        }
    };
    rec(rec, 0, m);
}

double composition_product(const std::vector<int>& parts, double alpha) {
    double prod = 1.0;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        prod *= std::pow(alpha + static_cast<double>(i), parts[i]);
    }
    return prod;
}

}  // namespace

double z_moment_cumulative(const PermanentalModel& model, int p, int m) {
    check_index(model, p, "z_moment_cumulative");
    check_order(m, "z_moment_cumulative");
    const double x = rbar_diag(model, p);
    const double alpha = model.alpha;
    double sum = 0.0;
    for (int l = 0; l <= m - 1; ++l) {
        const double sign = ((l + m + 1) % 2 == 0) ? 1.0 : -1.0;
        double inner = 0.0;
        for_each_composition(m, l, 1, [&](const std::vector<int>& parts) {
            inner += composition_product(parts, alpha);
        });
        sum += sign * inner * std::pow(x, l);
    }
    return sum * (x - 1.0);
}

double z_moment_jset(const PermanentalModel& model, int p, int m) {
    check_index(model, p, "z_moment_jset");
    check_order(m, "z_moment_jset");
    const double x = rbar_diag(model, p);
    const double alpha = model.alpha;
    double sum = 0.0;
    for (int l = 0; l <= m; ++l) {
        const double sign = ((l + m) % 2 == 0) ? 1.0 : -1.0;
        double inner = 0.0;
        for_each_composition(m, l, 0, [&](const std::vector<int>& parts) {
            inner += composition_product(parts, alpha);
        });
        sum += sign * inner * std::pow(x, l);
    }
    return sum;
}

std::pair<double, double> z_moment_example_fourth(const PermanentalModel& model, int p) {
    check_index(model, p, "z_moment_example_fourth");
    const double x = rbar_diag(model, p);
    const double a0 = model.alpha;
    const double a1 = a0 + 1.0, a2 = a0 + 2.0, a3 = a0 + 3.0;

    const double lead = a0 * a1 * a2 * a3;
    const double mid3 = a0 * a0 * a1 * a2 + a0 * a1 * a1 * a2 + a0 * a1 * a2 * a2;
    const double mid1 = a0 * a0 * a0 * a1 + a0 * a0 * a1 * a1 + a0 * a1 * a1 * a1;
    const double a0_4 = a0 * a0 * a0 * a0;

    const double first = lead * std::pow(x, 4) - (mid3 + lead) * std::pow(x, 3) +
                         (mid3 + mid1) * x * x - (mid1 + a0_4) * x + a0_4;
    const double second = lead * std::pow(x, 3) * (x - 1.0) - mid3 * x * x * (x - 1.0) +
                          mid1 * x * (x - 1.0) - a0_4 * (x - 1.0);
    return {first, second};
}

double mixed_moment_x(const PermanentalModel& model, const MultiIndex& m) {
    if (static_cast<int>(m.size()) != model.dim()) {
        throw LengthMismatch("mixed_moment_x: order length does not match dimension");
    }
    return alpha_permanent(expand(model.R, m), model.alpha);
}

double table_identity_tolerance(double magnitude, double deficit) {
    return 1e-7 + std::abs(magnitude) * (deficit + 1e-12);
}

VerificationReport factorial_moment_identity(const PermanentalModel& model, const MultiIndex& m,
                                             double epsilon) {
    if (static_cast<int>(m.size()) != model.dim()) {
        throw LengthMismatch("factorial_moment_identity: order length mismatch");
    }
    const int n = model.dim();
    SquareMatrix Rbar(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) Rbar(i, j) = model.R(i, j) * model.A(j, j);
    const double lhs = alpha_permanent(expand(Rbar, m), model.alpha);

    const double alpha = model.alpha;
    double deficit = 0.0;
    const auto rhs = z_table_expectations(
        model,
        {[&](const MultiIndex& k) {
            double prod = 1.0;
            for (int j = 0; j < n; ++j) {
                for (int l = 0; l < m[static_cast<std::size_t>(j)]; ++l) {
                    prod *= alpha + static_cast<double>(k[static_cast<std::size_t>(j)] + l);
                }
            }
            return prod;
        }},
        epsilon, &deficit);

    VerificationReport report;
    report.name = "moments/factorial-identity";
    report.anchor = "moments";
    report.kind = VerificationReport::Kind::Equality;
    report.lhs = lhs;
    report.rhs = rhs[0];
    report.tolerance = table_identity_tolerance(lhs, deficit);
    report.evaluate();
    return report;
}

VerificationReport power_identity(const PermanentalModel& model, int j, int m, double epsilon) {
    check_index(model, j, "power_identity");
    if (m < 1) throw std::invalid_argument("power_identity: order must be >= 1");
    const double alpha = model.alpha;
    const double lhs = std::pow(rbar_diag(model, j), m);

    double deficit = 0.0;
    const auto rhs = z_table_expectations(
        model,
        {[&](const MultiIndex& k) {
            double prod = 1.0;
            for (int l = 0; l < m; ++l) {
                prod *= (alpha + static_cast<double>(k[static_cast<std::size_t>(j)] + l)) /
                        (alpha + static_cast<double>(l));
            }
            return prod;
        }},
        epsilon, &deficit);

    VerificationReport report;
    report.name = "moments/power-identity";
    report.anchor = "moments";
    report.kind = VerificationReport::Kind::Equality;
    report.lhs = lhs;
    report.rhs = rhs[0];
    report.tolerance = table_identity_tolerance(lhs, deficit);
    report.evaluate();
    return report;
}

double z_covariance(const PermanentalModel& model, int i, int j) {
    check_index(model, i, "z_covariance");
    check_index(model, j, "z_covariance");
    if (i == j) {
        throw DiagonalCovarianceUnsupported(
            i, "z_covariance: the i = j case is not backed by the product formula; "
               "use the pmf-table variance instead");
    }
    return model.alpha * model.A(i, i) * model.A(j, j) * model.R(i, j) * model.R(j, i);
}

double z_l1_mean(const PermanentalModel& model) {
    double sum = 0.0;
    for (int i = 0; i < model.dim(); ++i) sum += rbar_diag(model, i);
    return model.alpha * (sum - static_cast<double>(model.dim()));
}

double z_moment_table(const PermanentalModel& model, int p, int m, double epsilon,
                      double* deficit_out) {
    check_index(model, p, "z_moment_table");
    const auto vals = z_table_expectations(
        model,
        {[p, m](const MultiIndex& k) {
            return std::pow(static_cast<double>(k[static_cast<std::size_t>(p)]), m);
        }},
        epsilon, deficit_out);
    return vals[0];
}

double z_covariance_table(const PermanentalModel& model, int i, int j, double epsilon) {
    check_index(model, i, "z_covariance_table");
    check_index(model, j, "z_covariance_table");
    const auto vals = z_table_expectations(
        model,
        {[i, j](const MultiIndex& k) {
             return static_cast<double>(k[static_cast<std::size_t>(i)]) *
                    static_cast<double>(k[static_cast<std::size_t>(j)]);
         },
         [i](const MultiIndex& k) { return static_cast<double>(k[static_cast<std::size_t>(i)]); },
         [j](const MultiIndex& k) { return static_cast<double>(k[static_cast<std::size_t>(j)]); }},
        epsilon);
    return vals[0] - vals[1] * vals[2];
}

}  // namespace perma
