#pragma once

#include <complex>
#include <cstdint>
#include <cmath>
#include <string_view>

namespace stz {

// FNV-1a, used to derive stream ids from labels and to fingerprint configs.
inline std::uint64_t fnv1a64(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ull) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

// Keyed SplitMix64 counter generator. Output word i of stream (seed, stream)
// is mix(seed ^ mix(stream) ^ mix(i)), so any word is addressable without
// sequencing state. All randomness in the project flows from one seed
// through named streams of this generator.
class CounterRng {
  public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : key_(mix(seed ^ 0x9e3779b97f4a7c15ull) ^ mix(stream)) {}

    CounterRng(std::uint64_t seed, std::string_view stream_label)
        : CounterRng(seed, fnv1a64(stream_label)) {}

    std::uint64_t next_u64() { return mix(key_ ^ mix(counter_++)); }

    // Uniform on (0, 1]; never returns 0 so it is safe inside log().
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    double uniform_symmetric() { return 2.0 * uniform() - 1.0; }

    // Standard circularly-symmetric complex Gaussian, E|z|^2 = 1.
    std::complex<double> complex_gaussian() {
        const double mag = std::sqrt(-std::log(uniform()));
        const double ph = 2.0 * M_PI * uniform();
        return {mag * std::cos(ph), mag * std::sin(ph)};
    }

    double gaussian() {
        const double r = std::sqrt(-2.0 * std::log(uniform()));
        return r * std::cos(2.0 * M_PI * uniform());
    }

  private:
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace stz
