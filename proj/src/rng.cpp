#include "battbayes/rng.hpp"

#include <cmath>

namespace battbayes {

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

RandomStream::RandomStream(std::uint64_t seed) : engine_(seed) {}

RandomStream RandomStream::substream(std::uint64_t master_seed, std::uint64_t stream_id) {
    // Mix the pair (master_seed, stream_id) down to one engine seed. Two
    // rounds of splitmix64 give well-separated seeds even for adjacent ids.
    std::uint64_t s = master_seed ^ (0xa0761d6478bd642fULL * (stream_id + 1));
    std::uint64_t first = splitmix64(s);
    std::uint64_t second = splitmix64(s);
    return RandomStream(first ^ (second << 1));
}

std::uint64_t RandomStream::next_u64() {
    return engine_();
}

std::uint64_t RandomStream::bounded(std::uint64_t bound) {
    if (bound <= 1) {
        return 0;
    }
    // Rejection below 2^64 mod bound keeps the result exactly uniform.
    const std::uint64_t reject_below = (0 - bound) % bound;
    std::uint64_t x = engine_();
    while (x < reject_below) {
        x = engine_();
    }
    return x % bound;
}

double RandomStream::u01() {
    // Top 53 bits -> double in [0, 1).
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomStream::u01_open() {
    double u = u01();
    while (u <= 0.0) {
        u = u01();
    }
    return u;
}

double RandomStream::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u, v, s;
    do {
        u = 2.0 * u01() - 1.0;
        v = 2.0 * u01() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    double scale = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * scale;
    have_spare_ = true;
    return u * scale;
}

}  // namespace battbayes
