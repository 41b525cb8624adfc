#include "perma/model.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

#include "perma/errors.hpp"

namespace perma {

namespace {

double factorial(int m) {
    double f = 1.0;
    for (int i = 2; i <= m; ++i) f *= static_cast<double>(i);
    return f;
}

std::uint64_t fingerprint_bytes(const void* data, std::size_t size, std::uint64_t h) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < size; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;  // FNV-1a
    }
    return h;
}

std::uint64_t model_fingerprint(const SquareMatrix& A, double alpha) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    const int n = A.dim();
    h = fingerprint_bytes(&n, sizeof(n), h);
    h = fingerprint_bytes(A.entries().data(), A.entries().size() * sizeof(double), h);
    h = fingerprint_bytes(&alpha, sizeof(alpha), h);
    return h;
}

}  // namespace

PermanentalModel build_model(const SquareMatrix& A, double alpha) {
    if (!(alpha > 0.0)) throw NonPositiveAlpha("build_model: alpha must be positive");
    PermanentalModel model;
    model.A = A;
    model.decomp = decompose(A);  // certifies
    model.R = inverse(A);
    model.alpha = alpha;
    model.det_Abar = determinant(model.decomp.Abar);
    if (!(model.det_Abar > 0.0) || model.det_Abar > 1.0 + 1e-12) {
        throw Error("build_model: det(Abar) = " + fmt17(model.det_Abar) +
                    " outside (0, 1], input is not a usable M-matrix");
    }
    model.det_Abar = std::min(model.det_Abar, 1.0);
    model.rho_warning = model.decomp.rho > 0.9;
    model.fingerprint = model_fingerprint(A, alpha);

    // sanity: R really inverts A
    const SquareMatrix prod = model.R * A;
    double err = 0.0;
    for (int i = 0; i < A.dim(); ++i)
        for (int j = 0; j < A.dim(); ++j)
            err = std::max(err, std::abs(prod(i, j) - (i == j ? 1.0 : 0.0)));
    if (err > 1e-8) {
        throw SingularMatrix("build_model: inverse check failed, matrix too ill-conditioned");
    }
    return model;
}

double z_pmf(const PermanentalModel& model, const MultiIndex& k) {
    const int n = model.dim();
    if (static_cast<int>(k.size()) != n) {
        throw LengthMismatch("z_pmf: index length does not match model dimension");
    }
    const int total = total_degree(k);
    if (total > kPermanentCap) {
        throw DimensionTooLarge(total, "z_pmf: |k| above permanent cap");
    }
    const double perm = alpha_permanent(expand(model.decomp.Bbar, k), model.alpha);
    double denom = 1.0;
    for (int v : k) denom *= factorial(v);
    double p = std::pow(model.det_Abar, model.alpha) * perm / denom;
    if (p < 0.0) {
        if (p < -1e-14) {
            throw Error("z_pmf: negative probability " + fmt17(p));
        }
        p = 0.0;
    }
    return p;
}

// ----------------------------------------------------------------- scanner
//
// The probabilities are the coefficients of det(I - T Bbar)^{-alpha} with
// T = diag(t), scaled by det(Abar)^alpha.  det(I - T Bbar) is multilinear
// in t:  p(t) = sum_S p_S prod_{i in S} t_i  with
// p_S = (-1)^{|S|} det(Bbar[S,S]) over index subsets S, p_empty = 1.
// With the Euler operator theta = sum_i t_i d/dt_i, q = p^{-alpha} obeys
// p * theta(q) = -alpha * q * theta(p); matching coefficients of t^k:
//
//   |k| q_k = - sum_{S nonempty, S <= k} p_S ((|k|-|S|) + alpha |S|) q_{k-S}
//
// an O(2^n) recurrence per entry with q_0 = 1.  It reaches truncation
// depths the |k|!-cost permanent route cannot.

struct ZPmfScanner::Impl {
    int n = 0;
    double alpha = 1.0;
    double norm = 1.0;  // det(Abar)^alpha
    std::vector<double> minor_coeff;        // p_S by subset mask; [0] unused
    std::vector<int> subset_size;           // popcount per mask
    std::vector<std::uint64_t> subset_key;  // packed 0/1 multi-index per mask
    // trailing window of series coefficients, one map per retained degree
    std::deque<std::unordered_map<std::uint64_t, double>> window;

    double coefficient(const MultiIndex& k, int total) const {
        double sum = 0.0;
        const std::size_t masks = std::size_t{1} << n;
        const std::uint64_t key = pack_multi_index(k);
        for (std::size_t mask = 1; mask < masks; ++mask) {
            const double coeff = minor_coeff[mask];
            if (coeff == 0.0) continue;
            bool inside = true;
            for (int i = 0; i < n; ++i) {
                if ((mask & (std::size_t{1} << i)) && k[static_cast<std::size_t>(i)] < 1) {
                    inside = false;
                    break;
                }
            }
            if (!inside) continue;
            const int s = subset_size[mask];
            // the predecessor lives s degrees back in the window
            const auto& prev = window[window.size() - static_cast<std::size_t>(s)];
            const auto it = prev.find(key - subset_key[mask]);
            if (it == prev.end()) continue;
            sum -= coeff * (static_cast<double>(total - s) + alpha * s) * it->second;
        }
        return sum / static_cast<double>(total);
    }
};

ZPmfScanner::ZPmfScanner(const PermanentalModel& model) : impl_(std::make_unique<Impl>()) {
    const int n = model.dim();
    if (n > 8) {
        throw DimensionTooLarge(n, "ZPmfScanner: pmf enumeration supports n <= 8");
    }
    impl_->n = n;
    impl_->alpha = model.alpha;
    impl_->norm = std::pow(model.det_Abar, model.alpha);
    const SquareMatrix& Bbar = model.decomp.Bbar;
    const std::size_t masks = std::size_t{1} << n;
    impl_->minor_coeff.assign(masks, 0.0);
    impl_->subset_size.assign(masks, 0);
    impl_->subset_key.assign(masks, 0);
    for (std::size_t mask = 1; mask < masks; ++mask) {
        std::vector<int> members;
        std::uint64_t key = 0;
        for (int i = 0; i < n; ++i) {
            if (mask & (std::size_t{1} << i)) {
                members.push_back(i);
                key |= std::uint64_t{1} << (8 * i);
            }
        }
        const int s = static_cast<int>(members.size());
        impl_->subset_size[mask] = s;
        impl_->subset_key[mask] = key;
        SquareMatrix sub(s);
        for (int a = 0; a < s; ++a)
            for (int b = 0; b < s; ++b) sub(a, b) = Bbar(members[a], members[b]);
        impl_->minor_coeff[mask] = ((s % 2) ? -1.0 : 1.0) * determinant(sub);
    }
}

ZPmfScanner::~ZPmfScanner() = default;
ZPmfScanner::ZPmfScanner(ZPmfScanner&&) noexcept = default;
ZPmfScanner& ZPmfScanner::operator=(ZPmfScanner&&) noexcept = default;

int ZPmfScanner::dim() const { return impl_->n; }

int ZPmfScanner::advance(const std::function<void(const MultiIndex&, double)>& fn) {
    const int d = degree_ + 1;
    if (d > 255) {
        throw TruncationCapExceeded("ZPmfScanner: total degree above packed-key bound 255");
    }
    std::unordered_map<std::uint64_t, double> current;
    for_each_multi_index(impl_->n, d, [&](const MultiIndex& k) {
        const double qk = (d == 0) ? 1.0 : impl_->coefficient(k, d);
        current.emplace(pack_multi_index(k), qk);
        double p = impl_->norm * qk;
        if (p < 0.0) {
            ++clipped_;
            p = 0.0;
        }
        const double y = p - mass_comp_;
        const double t = mass_ + y;
        mass_comp_ = (t - mass_) - y;
        mass_ = t;
        fn(k, p);
    });
    impl_->window.push_back(std::move(current));
    if (static_cast<int>(impl_->window.size()) > impl_->n + 1) impl_->window.pop_front();
    degree_ = d;
    deficit_ = std::max(0.0, 1.0 - mass_);
    return d;
}

// ------------------------------------------------------------------- table

ZPmfTable z_pmf_table(const PermanentalModel& model, double epsilon, int degree_cap) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw std::invalid_argument("z_pmf_table: epsilon must lie in (0,1)");
    }
    ZPmfTable table;
    table.dim_ = model.dim();
    table.fingerprint_ = model.fingerprint;
    ZPmfScanner scanner(model);
    while (scanner.last_degree() < degree_cap) {
        const int d = scanner.advance([&](const MultiIndex& k, double p) {
            table.entries_.push_back({k, p});
            table.lookup_.emplace(pack_multi_index(k), p);
        });
        table.max_total_degree_ = d;
        table.mass_deficit_ = scanner.deficit();
        table.clipped_ = scanner.clipped_count();
        if (table.mass_deficit_ <= epsilon) {
            table.cumulative_.reserve(table.entries_.size());
            double running = 0.0;
            for (const auto& e : table.entries_) {
                running += e.p;
                table.cumulative_.push_back(running);
            }
            return table;
        }
    }
    throw TruncationCapExceeded(
        "z_pmf_table: degree cap " + std::to_string(degree_cap) + " reached at deficit " +
        fmt17(table.mass_deficit_) + " (rho = " + fmt17(model.decomp.rho) +
        " too high for mass target " + fmt17(epsilon) + ")");
}

double ZPmfTable::probability(const MultiIndex& k) const {
    if (static_cast<int>(k.size()) != dim_) {
        throw LengthMismatch("ZPmfTable: index length does not match table dimension");
    }
    for (int v : k) {
        if (v < 0) return 0.0;
    }
    if (!packable(k)) return 0.0;
    const auto it = lookup_.find(pack_multi_index(k));
    return it == lookup_.end() ? 0.0 : it->second;
}

std::vector<double> ZPmfTable::l1_pmf() const {
    std::vector<double> out(static_cast<std::size_t>(max_total_degree_) + 1, 0.0);
    for (const auto& e : entries_) out[static_cast<std::size_t>(total_degree(e.k))] += e.p;
    return out;
}

// ----------------------------------------------------------------- laplace

double z_laplace_closed(const PermanentalModel& model, std::span<const double> s) {
    const int n = model.dim();
    if (static_cast<int>(s.size()) != n) {
        throw LengthMismatch("z_laplace_closed: point length does not match dimension");
    }
    for (double v : s) {
        if (v < 0.0) throw std::invalid_argument("z_laplace_closed: s must be >= 0");
    }
    SquareMatrix M = SquareMatrix::identity(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            M(i, j) -= model.decomp.Bbar(i, j) * std::exp(-s[static_cast<std::size_t>(j)]);
    return std::pow(model.det_Abar, model.alpha) / std::pow(determinant(M), model.alpha);
}

double z_laplace_series(const PermanentalModel& model, std::span<const double> s,
                        double epsilon) {
    const int n = model.dim();
    if (static_cast<int>(s.size()) != n) {
        throw LengthMismatch("z_laplace_series: point length does not match dimension");
    }
    const ZPmfTable table = z_pmf_table(model, epsilon);
    return table_expectation(table, [&](const MultiIndex& k) {
        double dot = 0.0;
        for (int i = 0; i < n; ++i)
            dot += s[static_cast<std::size_t>(i)] * k[static_cast<std::size_t>(i)];
        return std::exp(-dot);
    });
}

VerificationReport z_convolve_check(const PermanentalModel& model_a,
                                    const PermanentalModel& model_b, double epsilon) {
    if (model_a.A != model_b.A) {
        throw ModelMismatch("z_convolve_check: models do not share the same matrix");
    }
    const PermanentalModel sum_model = build_model(model_a.A, model_a.alpha + model_b.alpha);
    const ZPmfTable ta = z_pmf_table(model_a, epsilon);
    const ZPmfTable tb = z_pmf_table(model_b, epsilon);
    const ZPmfTable tsum = z_pmf_table(sum_model, epsilon);

    const int K =
        std::min({ta.max_total_degree(), tb.max_total_degree(), tsum.max_total_degree()});
    const int n = model_a.dim();
    double max_diff = 0.0;
    // All j <= k have |j| <= |k| <= K, so the convolution below is exact.
    for (int d = 0; d <= K; ++d) {
        for_each_multi_index(n, d, [&](const MultiIndex& k) {
            double conv = 0.0;
            MultiIndex j(k.size(), 0), rem(k.size(), 0);
            auto rec = [&](auto&& self, int pos) -> void {
                if (pos == n) {
                    for (int i = 0; i < n; ++i)
                        rem[static_cast<std::size_t>(i)] =
                            k[static_cast<std::size_t>(i)] - j[static_cast<std::size_t>(i)];
                    conv += ta.probability(j) * tb.probability(rem);
                    return;
                }
                for (int c = 0; c <= k[static_cast<std::size_t>(pos)]; ++c) {
                    j[static_cast<std::size_t>(pos)] = c;
                    self(self, pos + 1);
                }
            };
            rec(rec, 0);
            max_diff = std::max(max_diff, std::abs(conv - tsum.probability(k)));
        });
    }

    VerificationReport report;
    report.name = "z/infinite-divisibility";
    report.anchor = "z-distribution";
    report.kind = VerificationReport::Kind::Equality;
    report.lhs = max_diff;
    report.rhs = 0.0;
    report.tolerance = 10.0 * epsilon;
    report.evaluate();
    return report;
}

std::vector<double> z_table_expectations(
    const PermanentalModel& model,
    const std::vector<std::function<double(const MultiIndex&)>>& integrands, double epsilon,
    double* deficit_out) {
    ZPmfScanner scanner(model);
    const std::size_t m = integrands.size();
    std::vector<double> acc(m, 0.0), comp(m, 0.0), increments(m, 0.0);
    int stagnant_run = 0;
    while (scanner.last_degree() < kTableDegreeCap) {
        std::fill(increments.begin(), increments.end(), 0.0);
        scanner.advance([&](const MultiIndex& k, double p) {
            if (p == 0.0) return;
            for (std::size_t i = 0; i < m; ++i) {
                const double term = integrands[i](k) * p;
                increments[i] += term;
                const double y = term - comp[i];
                const double t = acc[i] + y;
                comp[i] = (t - acc[i]) - y;
                acc[i] = t;
            }
        });
        if (scanner.deficit() <= 1e-16) break;
        bool stagnated = true;
        for (std::size_t i = 0; i < m; ++i) {
            if (std::abs(increments[i]) > 1e-15 * (std::abs(acc[i]) + 1e-300)) {
                stagnated = false;
                break;
            }
        }
        // degrees of one parity can be empty, so ask for a run of quiet
        // degrees before trusting the accumulators
        stagnant_run = stagnated ? stagnant_run + 1 : 0;
        if (scanner.deficit() <= epsilon && stagnant_run >= 3) break;
    }
    if (scanner.deficit() > epsilon) {
        throw TruncationCapExceeded("z_table_expectations: degree cap reached at deficit " +
                                    fmt17(scanner.deficit()));
    }
    if (deficit_out) *deficit_out = scanner.deficit();
    return acc;
}

}  // namespace perma
