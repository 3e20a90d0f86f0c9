#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace camo {

// SplitMix64. Deterministic across platforms and standard library versions,
// which std::mt19937 plus std::uniform_int_distribution is not (distribution
// output is implementation-defined). All randomized behavior in the toolchain
// draws from this generator so a seed fully pins the run.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, bound). Rejection sampling, no modulo bias.
    uint64_t next_below(uint64_t bound) {
        if (bound == 0) return 0;
        uint64_t threshold = (0ULL - bound) % bound;
        for (;;) {
            uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    bool next_bool() { return next_u64() >> 63; }

    // Uniform in [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Derive an independent stream; used to give subcomponents their own
    // generators without coupling their draw counts.
    Rng fork() { return Rng(next_u64() ^ 0xd6e8feb86659fd93ULL); }

    // Fisher-Yates.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    uint64_t state_;
};

// FNV-1a 64-bit. Used for content digests in run manifests and for deriving
// per-name seeds in the benchmark generator.
inline uint64_t fnv1a64(const void* data, size_t n) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    uint64_t h = 0xcbf29ce484222325ULL;
    for (size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline uint64_t fnv1a64(const std::string& s) {
    return fnv1a64(s.data(), s.size());
}

}  // namespace camo
