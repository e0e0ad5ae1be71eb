#include "ids/channel.hpp"

#include <stdexcept>

namespace ids::channel {

std::uint64_t mix_seed(std::uint64_t master, std::uint64_t key) {
    std::uint64_t z = master + key * 0x9E3779B97F4A7C15ull + 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

void ChannelParams::validate() const {
    if (Pi < 0.0 || Pi > 1.0 || Pd < 0.0 || Pd > 1.0 || Ps < 0.0 || Ps > 1.0)
        throw std::invalid_argument("channel probabilities must lie in [0,1]");
    if (Pi + Pd > 1.0) throw std::invalid_argument("Pi + Pd must not exceed 1");
}

Bits transmit(const ChannelParams& params, const Bits& x, SplitMix64& rng) {
    params.validate();
    Bits y;
    y.reserve(x.size() + x.size() / 8 + 8);
    for (std::uint8_t bit : x) {
        for (;;) {
            const double u = rng.uniform();
            if (u < params.Pi) {
                y.push_back(rng.bit());  // insertion, bit stays pending
            } else if (u < params.Pi + params.Pd) {
                break;  // deletion
            } else {
                const bool flip = rng.uniform() < params.Ps;
                y.push_back(static_cast<std::uint8_t>(bit ^ (flip ? 1u : 0u)));
                break;
            }
        }
    }
    return y;
}

ReceivedSet transmit_many(const ChannelParams& params, const Bits& x, int M, std::uint64_t seed) {
    if (M < 1) throw std::invalid_argument("M must be >= 1");
    ReceivedSet rs;
    rs.seed = seed;
    rs.sequences.reserve(static_cast<std::size_t>(M));
    for (int j = 0; j < M; ++j) {
        SplitMix64 rng(mix_seed(seed, static_cast<std::uint64_t>(j)));
        rs.sequences.push_back(transmit(params, x, rng));
    }
    return rs;
}

Bits offset_sequence(std::size_t length, std::uint64_t seed) {
    SplitMix64 rng(seed);
    Bits b(length);
    for (auto& v : b) v = rng.bit();
    return b;
}

Bits apply_offset(const Bits& x, const Bits& offset) {
    if (x.size() != offset.size())
        throw std::invalid_argument("offset length must match sequence length");
    Bits y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] ^ offset[i];
    return y;
}

}  // namespace ids::channel
