#include "ids/convcode.hpp"

#include <bit>
#include <stdexcept>

namespace ids::convcode {

void CodeSpec::validate() const {
    if (c < 1 || b < 1 || m < 0)
        throw std::invalid_argument("code requires c >= 1, b >= 1, m >= 0");
    if (static_cast<int>(generators.size()) != c)
        throw std::invalid_argument("code requires exactly c generators");
    const int taps = b * (m + 1);
    if (taps > 31) throw std::invalid_argument("b*(m+1) must be <= 31");
    for (auto g : generators)
        if (g >= (1u << taps))
            throw std::invalid_argument("generator exceeds b*(m+1) taps");
}

BlockOutput encode_block(const CodeSpec& code, EncoderState state, std::uint32_t input) {
    const std::uint32_t w = (state.reg << code.b) | input;
    std::uint32_t out = 0;
    for (int j = 0; j < code.c; ++j)
        out |= static_cast<std::uint32_t>(std::popcount(w & code.generators[j]) & 1) << j;
    const std::uint32_t mask = (code.state_bits() == 0) ? 0u : ((1u << code.state_bits()) - 1u);
    return {out, EncoderState{w & mask}};
}

Bits encode_terminated(const CodeSpec& code, const Bits& info) {
    if (info.size() % static_cast<std::size_t>(code.b) != 0)
        throw std::invalid_argument("info length must be divisible by b");
    Bits out;
    const std::size_t L = info.size() / static_cast<std::size_t>(code.b);
    out.reserve(static_cast<std::size_t>(code.c) * (L + static_cast<std::size_t>(code.m)));
    EncoderState s;
    for (std::size_t t = 0; t < L + static_cast<std::size_t>(code.m); ++t) {
        std::uint32_t u = 0;
        if (t < L)
            for (int i = 0; i < code.b; ++i)
                u |= static_cast<std::uint32_t>(info[t * code.b + i]) << i;
        auto r = encode_block(code, s, u);
        append_word_bits(out, r.out, code.c);
        s = r.next;
    }
    if (s.reg != 0) throw std::logic_error("termination failed to reach state 0");
    return out;
}

std::uint32_t parse_octal(const std::string& s) {
    std::uint32_t v = 0;
    if (s.empty()) throw std::invalid_argument("empty octal literal");
    for (char ch : s) {
        if (ch < '0' || ch > '7') throw std::invalid_argument("bad octal digit");
        v = v * 8u + static_cast<std::uint32_t>(ch - '0');
    }
    return v;
}

const std::vector<CodeSpec>& registry() {
    static const std::vector<CodeSpec> codes = [] {
        std::vector<CodeSpec> v{
            {"CC1", 3, 1, 1, {parse_octal("1"), parse_octal("3"), parse_octal("3")}, 5},
            {"CC2", 3, 1, 6, {parse_octal("117"), parse_octal("127"), parse_octal("155")}, 15},
            {"CC3", 3, 1, 10, {parse_octal("3645"), parse_octal("2133"), parse_octal("3347")}, 21},
        };
        for (auto& cs : v) cs.validate();
        return v;
    }();
    return codes;
}

const CodeSpec& lookup(const std::string& name) {
    for (const auto& cs : registry())
        if (cs.name == name) return cs;
    throw std::invalid_argument("unknown code name: " + name);
}

}  // namespace ids::convcode
