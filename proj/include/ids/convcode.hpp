#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ids/bits.hpp"

namespace ids::convcode {

// Binary convolutional code [c,b,m]: b input bits per block, c output bits
// per block, memory of m blocks. Generators are given in octal; tap word
// layout is (register << b) | input, i.e. the lowest-order generator bit
// taps the current input block and higher bits tap older blocks.
struct CodeSpec {
    std::string name;
    int c = 0;
    int b = 0;
    int m = 0;
    std::vector<std::uint32_t> generators;  // c entries, decoded from octal
    int d_free = 0;                         // metadata, 0 when unknown

    int state_bits() const { return b * m; }
    std::uint32_t num_states() const { return 1u << state_bits(); }
    void validate() const;  // throws std::invalid_argument on bad shape
};

// Encoder register: the last m input blocks, most recent block in the low
// b bits. Always < 2^(b*m).
struct EncoderState {
    std::uint32_t reg = 0;
};

struct BlockOutput {
    std::uint32_t out;  // c output bits, bit j from generator j
    EncoderState next;
};

BlockOutput encode_block(const CodeSpec& code, EncoderState state, std::uint32_t input);

// Encodes info (length divisible by b) followed by m all-zero tail blocks.
// Resulting codeword has c*(L+m) bits and leaves the encoder in state 0.
Bits encode_terminated(const CodeSpec& code, const Bits& info);

std::uint32_t parse_octal(const std::string& s);

// Benchmark codes: CC1=[3,1,1], CC2=[3,1,6], CC3=[3,1,10].
const std::vector<CodeSpec>& registry();
const CodeSpec& lookup(const std::string& name);  // throws on unknown name

}  // namespace ids::convcode
