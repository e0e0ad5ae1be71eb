#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ids/bits.hpp"
#include "ids/channel.hpp"
#include "ids/convcode.hpp"
#include "ids/lattice.hpp"

namespace ids::fano {

inline constexpr int kMaxCopies = 8;

enum class MetricMode {
    exact_tail,       // tau from precomputed backward tail tables
    asymptotic_bias,  // tau replaced by c*log2(q1) + (c+delta)*log2(z1)
};

struct DecoderConfig {
    double delta = 3.0;  // threshold quantum, log2 units
    int i_max = 3;       // max insertions per block per sequence
    int d_max = 3;       // max deletions per block per sequence
    int drift_cap = 30;
    long long step_cap = 100000;  // forward steps before giving up
    MetricMode metric_mode = MetricMode::asymptotic_bias;
    double metric_floor = -1e4;  // threshold below this aborts the search

    int lambda() const { return i_max + d_max + 1; }
    void validate() const;  // throws std::invalid_argument
};

struct DecodeResult {
    Bits decoded;  // L*b bits when completed, shorter prefix otherwise
    long long forward_steps = 0;
    long long branch_evaluations = 0;
    bool completed = false;
    double final_metric = 0.0;
};

// One hypothesis node in the joint code/channel tree: depth t blocks
// hypothesized, encoder state, and per-copy drift (received minus
// transmitted count). Exposed for tests; the decoder keeps its own
// path-stack representation.
struct SearchNode {
    int depth = 0;
    convcode::EncoderState state;
    std::vector<int> drifts;
    double metric = 0.0;
};

// Feasible drift values at depth t (blocks) for one received sequence of
// length N, total frame length Ltot blocks of c bits: cap, per-block
// accumulation limits, sequence boundaries, and reachability of the
// terminal drift N - c*Ltot.
struct DriftWindow {
    int lo = 0, hi = -1;
    bool empty() const { return lo > hi; }
    int width() const { return hi - lo + 1; }
};
DriftWindow drift_window(int t, int Ltot, int c, int N,
                         const DecoderConfig& cfg);

// Branch metric, exact-tail form: Z = -b + sum_j (pi_j + gamma_j + tau_j)
// where pi+gamma = log2 segment_likelihood of copy j's segment
// [pos_old_j, pos_new_j) against the c offset-scrambled code bits x, and
// tau_j = log2 tail(after) - log2 tail(before) from copy j's table.
// t is the node depth before extension. Returns -inf for impossible
// branches.
double branch_metric_exact(const channel::ChannelParams& params,
                           const channel::ReceivedSet& rx,
                           const std::vector<lattice::TailTable>& tails,
                           int b, int t, std::span<const std::uint8_t> x,
                           std::span<const int> pos_old,
                           std::span<const int> pos_new);

// Asymptotic form: tau_j approximated by its large-depth limit
// c*log2(q1) + (c + delta_j)*log2(z1) from the tail critical point.
double branch_metric_asymptotic(const channel::ChannelParams& params,
                                const channel::ReceivedSet& rx,
                                const lattice::CriticalPoint& cp, int b,
                                std::span<const std::uint8_t> x,
                                std::span<const int> pos_old,
                                std::span<const int> pos_new);

// Classical threshold-first-visit test: a node is treated as newly visited
// (threshold may be tightened) iff the preceding node's metric mu_p < T +
// delta. No visited-set storage.
bool first_visit_test(double mu_p, double T, double delta);

// Fano search over the joint tree. offset is the c*(L+m) scrambling
// sequence XORed onto the codeword before transmission; the decoder
// applies it to hypothesized branch labels. Terminal acceptance = depth
// L+m with zero tail inputs forced for the last m blocks and per-copy
// drift pinned to N_j - c*(L+m) by the drift windows.
DecodeResult fano_decode(const convcode::CodeSpec& code,
                         const DecoderConfig& cfg,
                         const channel::ChannelParams& params,
                         const channel::ReceivedSet& rx,
                         std::span<const std::uint8_t> offset, int L);

}  // namespace ids::fano
