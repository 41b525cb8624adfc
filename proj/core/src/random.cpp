#include "perma/random.hpp"

#include <cmath>
#include <stdexcept>

namespace perma {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

namespace {

std::uint64_t mix_to_engine_seed(RandomStream stream, std::uint64_t block) {
    std::uint64_t s = stream.seed;
    std::uint64_t a = splitmix64(s);
    s ^= stream.stream_id * 0x9e3779b97f4a7c15ull;
    std::uint64_t b = splitmix64(s);
    s ^= block * 0xd1342543de82ef95ull;
    std::uint64_t c = splitmix64(s);
    return a ^ (b << 1) ^ c;
}

}  // namespace

Substream::Substream(RandomStream stream, std::uint64_t block)
    : engine_(mix_to_engine_seed(stream, block)) {}

double Substream::uniform() {
    // 53 random mantissa bits -> [0,1)
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Substream::normal() {
    if (has_cached_normal_) {
        has_cached_normal_ = false;
        return cached_normal_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    double scale = std::sqrt(-2.0 * std::log(s) / s);
    cached_normal_ = v * scale;
    has_cached_normal_ = true;
    return u * scale;
}

double Substream::gamma(double shape, double rate) {
    if (!(shape > 0.0) || !(rate > 0.0)) {
        throw std::invalid_argument("gamma: shape and rate must be positive");
    }
    if (shape < 1.0) {
        // gamma(u) = gamma(u+1) * U^{1/u}
        double boost = std::pow(uniform(), 1.0 / shape);
        return gamma(shape + 1.0, rate) * boost;
    }
    // Marsaglia-Tsang squeeze
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
        if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
            return d * v / rate;
        }
    }
}

}  // namespace perma
