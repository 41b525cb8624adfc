#ifndef PERMA_RANDOM_HPP
#define PERMA_RANDOM_HPP

#include <cstdint>
#include <random>

namespace perma {

/// Identifies a reproducible random stream.  Identical (seed, stream_id)
/// reproduce identical draws bit-for-bit on one platform.  Monte Carlo
/// loops derive one Substream per fixed-size block of draw indices, so
/// results do not depend on thread scheduling or worker count.
struct RandomStream {
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;
};

/// A concrete generator for one block of draws.
class Substream {
public:
    Substream(RandomStream stream, std::uint64_t block);

    /// Uniform double in [0, 1).
    double uniform();

    /// Standard normal via the polar method.
    double normal();

    /// Gamma draw with the density v^u x^{u-1} e^{-vx} / Gamma(u).
    /// Valid for all shape > 0; shapes below 1 use the boost identity
    /// gamma(u) = gamma(u+1) * U^{1/u}.
    double gamma(double shape, double rate);

    std::uint64_t raw() { return engine_(); }

private:
    std::mt19937_64 engine_;
    double cached_normal_ = 0.0;
    bool has_cached_normal_ = false;
};

/// SplitMix64 step; used to decorrelate (seed, stream_id, block) triples.
std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace perma

#endif
