#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ids/channel.hpp"

namespace ids::lattice {

// All computations run on the 2-D edit lattice: rows = transmitted bits
// consumed, columns = received bits produced. Horizontal edges are
// insertions, vertical edges deletions, diagonal edges transmissions.
// Horizontal edges are forbidden in the last row throughout: an insertion
// arriving after a block's final bit resolves belongs to the next block.
// With this rule the joint distribution P(y, delta | x) sums to exactly 1
// over all delta and y.

// P(y_seg, delta | x) with delta = |y_seg| - |x|, linear domain.
// Edge weights: horizontal Pi/2 (the specific observed bit), vertical Pd,
// diagonal Pt(1-Ps) on match else Pt*Ps.
double segment_likelihood(const channel::ChannelParams& params,
                          std::span<const std::uint8_t> x,
                          std::span<const std::uint8_t> y_seg);

// Interface variant taking the node drifts; validates |y_seg| = |x| +
// (delta_out - delta_in) and throws std::invalid_argument otherwise.
double segment_likelihood(const channel::ChannelParams& params,
                          std::span<const std::uint8_t> x,
                          std::span<const std::uint8_t> y_seg,
                          int delta_in, int delta_out);

// P(drift change = delta over c transmitted bits): same lattice with the
// received bits summed out (weights Pi, Pd, Pt). Equals
// sum_y segment_likelihood(x, y) for every x.
double drift_transition(const channel::ChannelParams& params, int delta, int c);

// Weighted Delannoy number d_{r,s}: d = alpha*d_{r,s-1} + beta*d_{r-1,s}
// + gamma*d_{r-1,s-1}, d_{0,0} = 1 (so d_{r,0} = beta^r, d_{0,s} = alpha^s).
double delannoy(int r, int s, double alpha, double beta, double gamma);
// Log-domain evaluation of the same recurrence (independent code path used
// to cross-check numerics); returns log2 d_{r,s}.
double delannoy_log2(int r, int s, double alpha, double beta, double gamma);

// P_R(y): probability that R further transmitted bits (uniform random)
// produce exactly y. Lattice weights Pi/2, Pd, Pt/2, last-row horizontal
// forbidden. Equals d_{R,N} - (Pi/2) d_{R,N-1} with those weights.
double tail_probability(const channel::ChannelParams& params, int R,
                        std::span<const std::uint8_t> y);          // linear
double tail_probability_log2(const channel::ChannelParams& params, int R,
                             std::span<const std::uint8_t> y);     // scaled DP

// Backward tail table over one received sequence: log2_tail(r, s) =
// log2 P_r(y[s..N)). Built once in O(R*N), O(1) lookups; immutable and
// shareable across threads afterwards.
class TailTable {
public:
    TailTable(const channel::ChannelParams& params, int R_total,
              std::span<const std::uint8_t> y);
    double log2_tail(int remaining, int suffix_start) const {
        return t_[static_cast<std::size_t>(remaining) * (N_ + 1) +
                  static_cast<std::size_t>(suffix_start)];
    }
    int total_rows() const { return R_; }
    int received_length() const { return N_; }

private:
    int R_, N_;
    std::vector<double> t_;
};

// Saddle point of the tail generating function D(q,z) = 1/(1-beta*q-
// alpha*z-gamma*q*z) along direction eta = rows/columns; governs the
// asymptotic decay of P_R and hence the metric bias terms.
struct CriticalPoint {
    double q1 = 1.0, z1 = 2.0;
    double omega = 0.0, rho = 0.0, eta = 1.0;
    double log2_q1 = 0.0, log2_z1 = 1.0;
};

// Expected drift direction: E|received|/|transmitted| = (1-Pd)/(1-Pi), so
// the transmitted/received ratio is (1-Pi)/(1-Pd).
double natural_eta(const channel::ChannelParams& params);

// Solves 1 - beta*q - alpha*z - gamma*q*z = 0 together with the direction
// condition eta*z*dH/dz = q*dH/dq, alpha = Pi/2, beta = Pd, gamma = Pt/2.
// Degenerate Pi=0 / Pd=0 handled by algebraic limit forms. Pi=Pd gives
// exactly (q1,z1) = (1,2) at eta = 1.
CriticalPoint critical_point(const channel::ChannelParams& params, double eta);

// lim P_{r+dr}(suffix longer by ds) / P_r = q1^(-dr) * z1^(-ds).
double tail_ratio_asymptotic(const CriticalPoint& cp, int dr, int ds);
// Same quantity in log2, the form the branch metric consumes.
double tail_ratio_asymptotic_log2(const CriticalPoint& cp, int dr, int ds);

}  // namespace ids::lattice
