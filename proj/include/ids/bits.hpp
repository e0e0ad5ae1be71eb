#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ids {

// Bit sequences are vectors of 0/1 bytes; index 0 is transmitted first.
using Bits = std::vector<std::uint8_t>;

inline Bits bits_from_string(const std::string& s) {
    Bits b;
    b.reserve(s.size());
    for (char ch : s) {
        if (ch == '0' || ch == '1')
            b.push_back(static_cast<std::uint8_t>(ch - '0'));
        else if (ch != ' ' && ch != '_')
            throw std::invalid_argument("bit string may contain only 0, 1, space, _");
    }
    return b;
}

inline std::string bits_to_string(const Bits& b) {
    std::string s;
    s.reserve(b.size());
    for (auto v : b) s.push_back(v ? '1' : '0');
    return s;
}

// Low `n` bits of `word`, LSB first (bit i of word becomes element i).
inline void append_word_bits(Bits& out, std::uint32_t word, int n) {
    for (int i = 0; i < n; ++i) out.push_back(static_cast<std::uint8_t>((word >> i) & 1u));
}

}  // namespace ids
