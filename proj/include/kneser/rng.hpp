#pragma once

#include <cstdint>

namespace kneser {

/// splitmix64; fixed algorithm so seeded runs reproduce across platforms.
struct Rng {
    uint64_t state;

    explicit Rng(uint64_t seed) : state(seed) {}

    uint64_t next() {
        uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// uniform in [0, n), rejection sampling
    uint64_t below(uint64_t n) {
        uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t v;
        do {
            v = next();
        } while (v >= limit);
        return v % n;
    }

    /// independent stream for a worker chunk
    static Rng stream(uint64_t master, uint64_t chunk) {
        Rng r(master ^ (0x9e3779b97f4a7c15ull * (chunk + 1)));
        r.next();
        return r;
    }
};

} // namespace kneser
