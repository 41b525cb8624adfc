#include "perma/permanent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "perma/errors.hpp"

namespace perma {

// ---------------------------------------------------------------- Rational

Rational::Int Rational::checked_mul(Int a, Int b) {
    if (a == 0 || b == 0) return 0;
    Int r = a * b;
    if (r / b != a) throw std::overflow_error("Rational: multiplication overflow");
    return r;
}

Rational::Int Rational::checked_add(Int a, Int b) {
    constexpr Int kMax = static_cast<Rational::Int>((~static_cast<unsigned __int128>(0)) >> 1);
    if ((b > 0 && a > kMax - b) || (b < 0 && a < -kMax - 1 - b)) {
        throw std::overflow_error("Rational: addition overflow");
    }
    return a + b;
}

void Rational::normalize() {
    if (den_ < 0) {
        num_ = -num_;
        den_ = -den_;
    }
    Int a = num_ < 0 ? -num_ : num_;
    Int b = den_;
    while (b != 0) {
        Int t = a % b;
        a = b;
        b = t;
    }
    if (a > 1) {
        num_ /= a;
        den_ /= a;
    }
    if (num_ == 0) den_ = 1;
}

std::string Rational::to_string() const {
    auto int_str = [](Int v) {
        if (v == 0) return std::string("0");
        bool neg = v < 0;
        std::string s;
        while (v != 0) {
            int digit = static_cast<int>(neg ? -(v % 10) : v % 10);
            s.push_back(static_cast<char>('0' + digit));
            v /= 10;
        }
        if (neg) s.push_back('-');
        std::reverse(s.begin(), s.end());
        return s;
    };
    std::string s = int_str(num_);
    if (den_ != 1) s += "/" + int_str(den_);
    return s;
}

// ------------------------------------------------------------- enumeration

int cycle_count(std::span<const int> perm) {
    const int m = static_cast<int>(perm.size());
    std::vector<char> seen(static_cast<std::size_t>(m), 0);
    for (int v : perm) {
        if (v < 0 || v >= m || seen[static_cast<std::size_t>(v)]) {
            throw InvalidPermutation("cycle_count: not a permutation");
        }
        seen[static_cast<std::size_t>(v)] = 1;
    }
    std::fill(seen.begin(), seen.end(), 0);
    int cycles = 0;
    for (int start = 0; start < m; ++start) {
        if (seen[static_cast<std::size_t>(start)]) continue;
        ++cycles;
        int cur = start;
        while (!seen[static_cast<std::size_t>(cur)]) {
            seen[static_cast<std::size_t>(cur)] = 1;
            cur = perm[static_cast<std::size_t>(cur)];
        }
    }
    return cycles;
}

namespace {

// cycle count without validation, reusing a scratch mask
inline int cycles_unchecked(const std::vector<int>& perm, std::vector<char>& seen) {
    std::fill(seen.begin(), seen.end(), 0);
    int cycles = 0;
    const int m = static_cast<int>(perm.size());
    for (int start = 0; start < m; ++start) {
        if (seen[static_cast<std::size_t>(start)]) continue;
        ++cycles;
        int cur = start;
        while (!seen[static_cast<std::size_t>(cur)]) {
            seen[static_cast<std::size_t>(cur)] = 1;
            cur = perm[static_cast<std::size_t>(cur)];
        }
    }
    return cycles;
}

}  // namespace

double alpha_permanent(const SquareMatrix& M, double alpha) {
    const int m = M.dim();
    if (m == 0) return 1.0;
    if (m > kPermanentCap) {
        throw DimensionTooLarge(m, "alpha_permanent: dimension " + std::to_string(m) +
                                       " above brute-force cap " + std::to_string(kPermanentCap));
    }
    // powers of alpha up to m cycles
    std::vector<double> alpha_pow(static_cast<std::size_t>(m) + 1, 1.0);
    for (int c = 1; c <= m; ++c) alpha_pow[static_cast<std::size_t>(c)] = alpha_pow[c - 1] * alpha;

    std::vector<int> perm(static_cast<std::size_t>(m));
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<char> seen(static_cast<std::size_t>(m));

    double sum = 0.0, comp = 0.0;  // Kahan accumulator
    do {
        double prod = 1.0;
        for (int i = 0; i < m; ++i) {
            prod *= M(i, perm[static_cast<std::size_t>(i)]);
            if (prod == 0.0) break;
        }
        if (prod != 0.0) {
            const double term = alpha_pow[static_cast<std::size_t>(cycles_unchecked(perm, seen))] * prod;
            const double y = term - comp;
            const double t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return sum;
}

SquareMatrix expand(const SquareMatrix& C, const MultiIndex& k) {
    const int n = C.dim();
    if (static_cast<int>(k.size()) != n) {
        throw LengthMismatch("expand: index length does not match matrix dimension");
    }
    int total = 0;
    for (int v : k) {
        if (v < 0) throw LengthMismatch("expand: negative count");
        total += v;
    }
    if (total == 0) return SquareMatrix(0);
    // block index of each expanded row/column
    std::vector<int> owner(static_cast<std::size_t>(total));
    int pos = 0;
    for (int i = 0; i < n; ++i)
        for (int rep = 0; rep < k[static_cast<std::size_t>(i)]; ++rep) owner[static_cast<std::size_t>(pos++)] = i;
    SquareMatrix out(total);
    for (int p = 0; p < total; ++p)
        for (int q = 0; q < total; ++q)
            out(p, q) = C(owner[static_cast<std::size_t>(p)], owner[static_cast<std::size_t>(q)]);
    return out;
}

double constant_block_permanent(int m, double alpha) {
    if (m < 0) throw std::invalid_argument("constant_block_permanent: negative order");
    double prod = 1.0;
    for (int l = 0; l < m; ++l) prod *= alpha + static_cast<double>(l);
    return prod;
}

Rational alpha_permanent_exact(int m, const std::vector<Rational>& entries,
                               const Rational& alpha) {
    if (m == 0) return Rational(1);
    if (m > 7) {
        throw DimensionTooLarge(m, "alpha_permanent_exact: dimension above exact-path cap 7");
    }
    if (entries.size() != static_cast<std::size_t>(m) * static_cast<std::size_t>(m)) {
        throw LengthMismatch("alpha_permanent_exact: entry count mismatch");
    }
    std::vector<Rational> alpha_pow(static_cast<std::size_t>(m) + 1, Rational(1));
    for (int c = 1; c <= m; ++c) alpha_pow[static_cast<std::size_t>(c)] = alpha_pow[c - 1] * alpha;

    std::vector<int> perm(static_cast<std::size_t>(m));
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<char> seen(static_cast<std::size_t>(m));
    Rational sum(0);
    do {
        Rational prod(1);
        for (int i = 0; i < m; ++i) {
            prod *= entries[static_cast<std::size_t>(i) * m + perm[static_cast<std::size_t>(i)]];
        }
        sum += alpha_pow[static_cast<std::size_t>(cycles_unchecked(perm, seen))] * prod;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return sum;
}

Rational constant_block_permanent_exact(int m, const Rational& alpha) {
    Rational prod(1);
    for (int l = 0; l < m; ++l) prod *= alpha + Rational(l);
    return prod;
}

}  // namespace perma
