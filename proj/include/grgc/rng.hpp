#pragma once

// Reproducible random streams.
//
// Every random quantity in the library is drawn from an RngStream identified by
// a StreamId {master seed, scenario tag, n, replication}. The 64-bit stream seed
// is derived as
//
//     h = mix64(master ^ 0x6772676300000000)      // "grgc"
//     h = mix64(h ^ fnv1a64(scenario))
//     h = mix64(h ^ n)
//     h = mix64(h ^ replication)
//
// where mix64 is the SplitMix64 output function applied to (z + 0x9E3779B97F4A7C15).
// The engine is xoshiro256** whose four state words are the first four outputs of
// a SplitMix64 generator started at h. Uniform doubles use the top 53 bits.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>

namespace grgc {

constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view s) noexcept
{
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ull;
    }
    return h;
}

struct StreamId {
    std::uint64_t master = 0;
    std::string scenario;
    std::uint64_t n = 0;
    std::uint64_t replication = 0;

    std::uint64_t seed() const noexcept
    {
        std::uint64_t h = mix64(master ^ 0x6772676300000000ull);
        h = mix64(h ^ fnv1a64(scenario));
        h = mix64(h ^ n);
        return mix64(h ^ replication);
    }

    bool operator==(const StreamId&) const = default;
};

/// xoshiro256** seeded through SplitMix64. Satisfies UniformRandomBitGenerator.
class RngStream {
  public:
    using result_type = std::uint64_t;

    explicit RngStream(std::uint64_t seed) noexcept { reseed(seed); }
    explicit RngStream(StreamId id) noexcept : id_(std::move(id)) { reseed(id_.seed()); }
    RngStream(std::uint64_t master, std::string scenario, std::uint64_t n, std::uint64_t rep)
        : RngStream(StreamId{master, std::move(scenario), n, rep})
    {
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept
    {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform in [0, 1).
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Uniform in (0, 1); safe to take logarithms of.
    double uniform_open() noexcept
    {
        return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
    }

    const StreamId& id() const noexcept { return id_; }

    /// Independent child stream keyed by `tag`; does not advance this stream.
    RngStream split(std::uint64_t tag) const noexcept
    {
        return RngStream(mix64(s_[0] ^ mix64(tag ^ s_[3])));
    }

  private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept
    {
        return (x << k) | (x >> (64 - k));
    }

    void reseed(std::uint64_t seed) noexcept
    {
        std::uint64_t z = seed;
        for (auto& w : s_) {
            w = mix64(z);
            z += 0x9E3779B97F4A7C15ull;
        }
    }

    std::array<std::uint64_t, 4> s_{};
    StreamId id_{};
};

}  // namespace grgc
