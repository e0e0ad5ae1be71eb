#pragma once

#include <cstdint>
#include <vector>

#include "ids/bits.hpp"

namespace ids::channel {

// SplitMix64: tiny splittable PRNG with bit-identical output on every
// platform, so recorded seeds reproduce experiments exactly.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform in [0,1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    std::uint8_t bit() { return static_cast<std::uint8_t>(next() >> 63); }

private:
    std::uint64_t state_;
};

// Stateless mixer (SplitMix64 output function); derives independent
// sub-seeds from a master seed and a stream key.
std::uint64_t mix_seed(std::uint64_t master, std::uint64_t key);

struct ChannelParams {
    double Pi = 0.0;  // insertion
    double Pd = 0.0;  // deletion
    double Ps = 0.0;  // substitution, applied on transmission
    double Pt() const { return 1.0 - Pi - Pd; }
    void validate() const;  // throws std::invalid_argument
};

struct ReceivedSet {
    std::vector<Bits> sequences;
    std::uint64_t seed = 0;
    int M() const { return static_cast<int>(sequences.size()); }
};

// One channel pass: for each pending input bit, with prob Pi emit a uniform
// random bit (bit stays pending), with prob Pd drop it, otherwise emit it,
// flipped with prob Ps.
Bits transmit(const ChannelParams& params, const Bits& x, SplitMix64& rng);

// M independent passes over the same input; copy j uses sub-seed
// mix_seed(seed, j).
ReceivedSet transmit_many(const ChannelParams& params, const Bits& x, int M, std::uint64_t seed);

// Deterministic pseudorandom bit sequence; XOR-applied to codewords before
// transmission and removed inside the decoders (both know the seed).
Bits offset_sequence(std::size_t length, std::uint64_t seed);
Bits apply_offset(const Bits& x, const Bits& offset);  // elementwise XOR

}  // namespace ids::channel
