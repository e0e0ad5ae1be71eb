#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ids/channel.hpp"
#include "ids/convcode.hpp"
#include "ids/fano.hpp"

namespace ids::viterbi {

// Size of the drift-expanded trellis: depth L+m, 2^(bm) encoder states,
// per-depth drift window from fano::drift_window.
struct TrellisDims {
    int depth = 0;
    int states = 0;
    long long nodes = 0;
};

TrellisDims trellis_dims(const convcode::CodeSpec& code,
                         const fano::DecoderConfig& cfg, int L, int N);

// Node count of the initial non-terminating trellis part (depths 1..L;
// the m termination depths are excluded): per depth, 2^(bm) states times
// the drift count |[-cap, cap] intersect [-ct, N-ct]|. This is the N_tot
// numerator of the complexity reduction factor.
long long trellis_node_count(const convcode::CodeSpec& code,
                             const fano::DecoderConfig& cfg, int L, int N);

// M received copies: per-depth drift combinations multiply.
long long trellis_node_count_multi(const convcode::CodeSpec& code,
                                   const fano::DecoderConfig& cfg, int L,
                                   std::span<const int> Ns);

// Exact max-likelihood sequence decoding over (encoder state, drift) with
// branch weight log2 segment_likelihood, the same per-branch caps as the
// Fano decoder, and traceback from (state 0, terminal drift). Ties keep
// the first candidate in (state asc, drift asc, input asc) scan order,
// i.e. the smallest input among same-predecessor ties. Backpointers are
// byte-packed, which requires b <= 4 and i_max + d_max <= 15.
fano::DecodeResult viterbi_decode(const convcode::CodeSpec& code,
                                  const fano::DecoderConfig& cfg,
                                  const channel::ChannelParams& params,
                                  std::span<const std::uint8_t> y,
                                  std::span<const std::uint8_t> offset,
                                  int L);

}  // namespace ids::viterbi
