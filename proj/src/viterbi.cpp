#include "ids/viterbi.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ids/lattice.hpp"

namespace ids::viterbi {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

TrellisDims trellis_dims(const convcode::CodeSpec& code,
                         const fano::DecoderConfig& cfg, int L, int N) {
    TrellisDims d;
    d.depth = L + code.m;
    d.states = 1 << code.state_bits();
    for (int t = 1; t <= d.depth; ++t) {
        const auto w = fano::drift_window(t, d.depth, code.c, N, cfg);
        if (!w.empty()) d.nodes += static_cast<long long>(d.states) * w.width();
    }
    return d;
}

long long trellis_node_count(const convcode::CodeSpec& code,
                             const fano::DecoderConfig& cfg, int L, int N) {
    const long long states = 1ll << code.state_bits();
    long long total = 0;
    for (int t = 1; t <= L; ++t) {
        const int lo = std::max(-cfg.drift_cap, -code.c * t);
        const int hi = std::min(cfg.drift_cap, N - code.c * t);
        if (hi >= lo) total += states * (hi - lo + 1);
    }
    return total;
}

long long trellis_node_count_multi(const convcode::CodeSpec& code,
                                   const fano::DecoderConfig& cfg, int L,
                                   std::span<const int> Ns) {
    const long long states = 1ll << code.state_bits();
    long long total = 0;
    for (int t = 1; t <= L; ++t) {
        long long combo = 1;
        for (const int N : Ns) {
            const int lo = std::max(-cfg.drift_cap, -code.c * t);
            const int hi = std::min(cfg.drift_cap, N - code.c * t);
            combo *= (hi >= lo) ? (hi - lo + 1) : 0;
        }
        total += states * combo;
    }
    return total;
}

fano::DecodeResult viterbi_decode(const convcode::CodeSpec& code,
                                  const fano::DecoderConfig& cfg,
                                  const channel::ChannelParams& params,
                                  std::span<const std::uint8_t> y,
                                  std::span<const std::uint8_t> offset,
                                  int L) {
    code.validate();
    cfg.validate();
    params.validate();
    const int c = code.c, b = code.b, m = code.m;
    const int Ltot = L + m;
    const int N = static_cast<int>(y.size());
    const int S = 1 << code.state_bits();
    if (L < 1) throw std::invalid_argument("viterbi_decode: L must be >= 1");
    if (static_cast<int>(offset.size()) != c * Ltot)
        throw std::invalid_argument("viterbi_decode: offset length mismatch");
    if (b > 4 || cfg.i_max + cfg.d_max > 15)
        throw std::invalid_argument(
            "viterbi_decode: parameters exceed packed-backpointer limits");

    fano::DecodeResult res;

    std::vector<fano::DriftWindow> win(static_cast<std::size_t>(Ltot) + 1);
    for (int t = 0; t <= Ltot; ++t) {
        win[t] = fano::drift_window(t, Ltot, c, N, cfg);
        if (win[t].empty()) return res;  // unreachable terminal drift
    }

    const std::uint32_t bmask = (1u << b) - 1u;
    std::vector<double> prevv(static_cast<std::size_t>(S) * win[0].width(),
                              kNegInf);
    std::vector<double> curv;
    std::vector<std::vector<std::uint8_t>> bp(
        static_cast<std::size_t>(Ltot) + 1);
    prevv[0 * win[0].width() + (0 - win[0].lo)] = 0.0;

    std::array<std::uint8_t, 32> x{};
    for (int t = 0; t < Ltot; ++t) {
        const auto& w0 = win[t];
        const auto& w1 = win[t + 1];
        curv.assign(static_cast<std::size_t>(S) * w1.width(), kNegInf);
        bp[t + 1].assign(static_cast<std::size_t>(S) * w1.width(), 0);
        const std::uint32_t num_inputs = (t < L) ? (1u << b) : 1u;

        for (int s = 0; s < S; ++s) {
            const std::uint8_t dropped =
                (m >= 1) ? static_cast<std::uint8_t>(
                               (static_cast<std::uint32_t>(s) >>
                                (b * (m - 1))) &
                               bmask)
                         : 0;
            for (int d = w0.lo; d <= w0.hi; ++d) {
                const double v =
                    prevv[static_cast<std::size_t>(s) * w0.width() +
                          (d - w0.lo)];
                if (v == kNegInf) continue;
                const int pos = c * t + d;
                for (std::uint32_t u = 0; u < num_inputs; ++u) {
                    const auto bo = convcode::encode_block(
                        code, {static_cast<std::uint32_t>(s)}, u);
                    for (int k = 0; k < c; ++k)
                        x[k] =
                            static_cast<std::uint8_t>((bo.out >> k) & 1u) ^
                            offset[static_cast<std::size_t>(c) * t + k];
                    const int d2lo = std::max(w1.lo, d - cfg.d_max);
                    const int d2hi = std::min(w1.hi, d + cfg.i_max);
                    for (int d2 = d2lo; d2 <= d2hi; ++d2) {
                        ++res.branch_evaluations;
                        const int pos2 = c * (t + 1) + d2;
                        const double p = lattice::segment_likelihood(
                            params,
                            std::span(x.data(), static_cast<std::size_t>(c)),
                            std::span(y).subspan(pos, pos2 - pos));
                        if (!(p > 0.0)) continue;
                        const double cand = v + std::log2(p);
                        const std::size_t idx =
                            static_cast<std::size_t>(bo.next.reg) *
                                w1.width() +
                            (d2 - w1.lo);
                        if (cand > curv[idx]) {
                            curv[idx] = cand;
                            // low 4 bits: drift change index; high bits:
                            // dropped register block (or the input when
                            // the code is memoryless).
                            const std::uint8_t field =
                                (m >= 1) ? dropped
                                         : static_cast<std::uint8_t>(u);
                            bp[t + 1][idx] = static_cast<std::uint8_t>(
                                (d2 - d + cfg.d_max) | (field << 4));
                        }
                    }
                }
            }
        }
        std::swap(prevv, curv);
    }

    const TrellisDims dims = trellis_dims(code, cfg, L, N);
    res.forward_steps = dims.nodes;

    const int d_term = N - c * Ltot;
    assert(win[Ltot].lo == d_term && win[Ltot].hi == d_term);
    const std::size_t term_idx =
        0 * win[Ltot].width() + (d_term - win[Ltot].lo);
    if (prevv[term_idx] == kNegInf) return res;  // no surviving path
    res.final_metric = prevv[term_idx];

    int state = 0, d = d_term;
    std::vector<std::uint32_t> inputs(static_cast<std::size_t>(Ltot) + 1, 0);
    for (int t = Ltot; t >= 1; --t) {
        const std::uint8_t byte =
            bp[t][static_cast<std::size_t>(state) * win[t].width() +
                  (d - win[t].lo)];
        const int didx = byte & 0xF;
        const std::uint8_t field = byte >> 4;
        inputs[t] = (m >= 1) ? (static_cast<std::uint32_t>(state) & bmask)
                             : field;
        state = (m >= 1) ? static_cast<int>(
                               (static_cast<std::uint32_t>(state) >> b) |
                               (static_cast<std::uint32_t>(field)
                                << (b * (m - 1))))
                         : 0;
        d -= didx - cfg.d_max;
    }
    assert(state == 0 && d == 0);

    for (int t = 1; t <= L; ++t) append_word_bits(res.decoded, inputs[t], b);
    res.completed = true;
    return res;
}

}  // namespace ids::viterbi
