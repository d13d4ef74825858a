#include <cmath>
#include <cstdint>
#include <vector>

#include <doctest.h>

#include "battbayes/rng.hpp"

using namespace battbayes;

TEST_SUITE("rng") {

TEST_CASE("splitmix64 matches the published reference sequence for seed 0") {
    std::uint64_t state = 0;
    CHECK(splitmix64(state) == 0xe220a8397b1dcdafULL);
    CHECK(splitmix64(state) == 0x6e789e6aa1b965f4ULL);
    CHECK(splitmix64(state) == 0x06c45d188009454fULL);
}

TEST_CASE("identical seeds replay identical sequences") {
    RandomStream a(12345), b(12345);
    for (int i = 0; i < 100; ++i) {
        CHECK(a.next_u64() == b.next_u64());
    }
    RandomStream c(12345), d(12345);
    for (int i = 0; i < 100; ++i) {
        CHECK(c.normal() == d.normal());
    }
}

TEST_CASE("substreams with different ids do not share state") {
    RandomStream a = RandomStream::substream(99, 0);
    RandomStream b = RandomStream::substream(99, 1);
    int same = 0;
    for (int i = 0; i < 64; ++i) {
        if (a.next_u64() == b.next_u64()) ++same;
    }
    CHECK(same == 0);
    // and the same id replays
    RandomStream c = RandomStream::substream(99, 0);
    RandomStream d = RandomStream::substream(99, 0);
    CHECK(c.next_u64() == d.next_u64());
}

TEST_CASE("u01 stays in [0,1) and u01_open in (0,1)") {
    RandomStream rng(7);
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.u01();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        const double v = rng.u01_open();
        CHECK(v > 0.0);
        CHECK(v < 1.0);
    }
}

TEST_CASE("bounded draws are uniform over small ranges") {
    RandomStream rng(31);
    const std::uint64_t bound = 5;
    const int n = 100000;
    std::vector<int> counts(bound, 0);
    for (int i = 0; i < n; ++i) {
        const std::uint64_t x = rng.bounded(bound);
        REQUIRE(x < bound);
        ++counts[static_cast<std::size_t>(x)];
    }
    // Each bin expects n/5 = 20000 with sd ~ sqrt(n*p*(1-p)) = 126.5;
    // allow 5 sigma.
    for (int c : counts) {
        CHECK(std::abs(c - n / 5) < 650);
    }
    CHECK(rng.bounded(1) == 0);
}

TEST_CASE("normal variates have standard moments") {
    RandomStream rng(2024);
    const int n = 200000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = rng.normal();
        sum += x;
        sq += x * x;
    }
    const double mean = sum / n;
    const double var = sq / n - mean * mean;
    CHECK(std::abs(mean) < 0.01);
    CHECK(std::abs(var - 1.0) < 0.02);
}

}  // TEST_SUITE
