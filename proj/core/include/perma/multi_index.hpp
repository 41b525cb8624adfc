#ifndef PERMA_MULTI_INDEX_HPP
#define PERMA_MULTI_INDEX_HPP

#include <cstdint>
#include <functional>
#include <numeric>
#include <vector>

namespace perma {

/// Vector of nonnegative counts (k_1,...,k_n).  Indexes pmf entries and
/// mixed-moment orders.
using MultiIndex = std::vector<int>;

inline int total_degree(const MultiIndex& k) {
    return std::accumulate(k.begin(), k.end(), 0);
}

/// Visits every k >= 0 with length n and |k| = degree, in lexicographic
/// order (first coordinate most significant, ascending).
template <typename Fn>
void for_each_multi_index(int n, int degree, Fn&& fn) {
    MultiIndex k(static_cast<std::size_t>(n), 0);
    auto rec = [&](auto&& self, int pos, int remaining) -> void {
        if (pos == n - 1) {
            k[pos] = remaining;
            fn(const_cast<const MultiIndex&>(k));
            return;
        }
        for (int c = 0; c <= remaining; ++c) {
            k[pos] = c;
            self(self, pos + 1, remaining - c);
        }
    };
    if (n == 0) {
        if (degree == 0) fn(const_cast<const MultiIndex&>(k));
        return;
    }
    rec(rec, 0, degree);
}

/// Packs a multi-index into a 64-bit key (8 coordinates x 8 bits).  Table
/// construction rejects dimensions or degrees that do not fit.
inline std::uint64_t pack_multi_index(const MultiIndex& k) {
    std::uint64_t key = 0;
    for (std::size_t i = 0; i < k.size(); ++i) {
        key |= static_cast<std::uint64_t>(k[i] & 0xff) << (8 * i);
    }
    return key;
}

inline bool packable(const MultiIndex& k) {
    if (k.size() > 8) return false;
    for (int v : k) {
        if (v < 0 || v > 255) return false;
    }
    return true;
}

}  // namespace perma

#endif
