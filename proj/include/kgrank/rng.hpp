#pragma once

#include <cstdint>
#include <string_view>

namespace kgrank {

// splitmix64. Small, fast, and stable across platforms, which is what the
// byte-identical-artifacts contract needs (std::uniform_real_distribution is
// implementation-defined).
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // uniform in [0, n), n > 0
    std::uint64_t next_below(std::uint64_t n) {
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next()) * n) >> 64);
    }

private:
    std::uint64_t state_;
};

std::uint64_t fnv1a64(std::string_view s);

// Stage seeds derive from the single top-level seed: the stage name is hashed
// (FNV-1a) and mixed into the seed through one splitmix64 step.
std::uint64_t derive_seed(std::uint64_t base, std::string_view stage);

// Per-stream seed for (stage seed, item, repeat), e.g. one stream per walk.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b);

}  // namespace kgrank
