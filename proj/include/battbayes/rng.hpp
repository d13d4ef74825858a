#pragma once

#include <cstdint>
#include <random>

namespace battbayes {

// splitmix64 step. Used to expand one master seed into decorrelated
// substream seeds; also a decent standalone mixer.
std::uint64_t splitmix64(std::uint64_t& state);

// Deterministic random stream. The engine is mt19937_64, whose output
// sequence is fixed by the C++ standard, and every variate transform here is
// written out explicitly, so results are bit-identical across platforms and
// standard library versions.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed);

    // Stream `stream_id` derived from `master_seed`. Streams with different
    // ids never share state, so e.g. proposal noise and accept/reject
    // uniforms can be consumed at independent rates.
    static RandomStream substream(std::uint64_t master_seed, std::uint64_t stream_id);

    std::uint64_t next_u64();

    // Uniform integer on [0, bound) without modulo bias; bound >= 1.
    std::uint64_t bounded(std::uint64_t bound);

    // Uniform on [0, 1) with 53-bit resolution.
    double u01();

    // Uniform on (0, 1): rejects exact zeros so callers may take logs.
    double u01_open();

    // Standard normal via the Marsaglia polar method.
    double normal();

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace battbayes
