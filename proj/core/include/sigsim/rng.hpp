#pragma once

#include <cstdint>
#include <string_view>

namespace sigsim {

// Deterministic generator used by the synthetic-signal tooling. splitmix64
// stream; identical output on every platform, unlike the standard library
// distributions.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1), 53-bit resolution.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

    bool bernoulli(double p) { return next_unit() < p; }

    // lo..hi inclusive.
    int uniform_int(int lo, int hi) {
        return lo + static_cast<int>(next_u64() % static_cast<uint64_t>(hi - lo + 1));
    }

private:
    uint64_t state_;
};

// Stable 64-bit FNV-1a, used to derive per-ticker seeds and config hashes.
constexpr uint64_t fnv1a64(std::string_view text, uint64_t basis = 0xcbf29ce484222325ULL) {
    uint64_t h = basis;
    for (char c : text) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace sigsim
