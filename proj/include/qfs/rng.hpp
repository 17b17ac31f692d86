#pragma once

#include <cstdint>
#include <random>

namespace qfs {

/// SplitMix64 finalizer, used to derive independent substream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30U)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27U)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31U);
}

/// Stream tags keep unrelated consumers of one master seed apart.
enum class StreamTag : std::uint64_t {
    RandomLayers = 1,
    SpectrumWeights = 2,
    FidelityPairs = 3,
    GradientSamples = 4,
    ModelInit = 5,
    Shuffle = 6,
    LegendreNoise = 7,
    Generic = 8,
};

/// Engine for substream `index` of `tag` under `seed`. The result depends
/// only on the triple, never on call order or thread count.
inline std::mt19937_64 substream(std::uint64_t seed, StreamTag tag,
                                 std::uint64_t index) {
    std::uint64_t h = mix64(seed);
    h = mix64(h ^ static_cast<std::uint64_t>(tag));
    h = mix64(h ^ index);
    return std::mt19937_64{h};
}

/// Uniform double in [lo, hi) from 53 random bits.
template <class Engine>
double uniform(Engine &eng, double lo, double hi) {
    const double u =
        static_cast<double>(eng() >> 11U) * 0x1.0p-53; // [0, 1)
    return lo + (hi - lo) * u;
}

} // namespace qfs
