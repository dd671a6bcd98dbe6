#ifndef SEMVOX_RNG_HPP
#define SEMVOX_RNG_HPP

#include <cstdint>
#include <cstddef>

namespace semvox {

// Counter-based splitmix64 stream. Streams are derived from
// (seed, a, b) by finalizer mixing, so replicate (scale, rep) pairs get
// independent sequences and results do not depend on execution order.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t a = 0, std::uint64_t b = 0) {
        state_ = mix(mix(mix(seed ^ 0x6a09e667f3bcc909ull) ^ a) ^ b);
    }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        return mix(state_);
    }

    // Uniform in [0, n) via 128-bit multiply; identical on every platform.
    std::size_t uniform_index(std::size_t n) {
        return static_cast<std::size_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    // Uniform in the open interval (0, 1), 53-bit resolution.
    double uniform01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ull;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebull;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t state_ = 0;
};

} // namespace semvox

#endif
