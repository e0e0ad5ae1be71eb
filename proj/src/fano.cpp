#include "ids/fano.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ids::fano {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr int kMaxWidth = 64;  // per-branch drift choices (lambda) bound

struct Successor {
    double z;
    std::uint32_t input;
    std::uint32_t next_state;
    std::array<std::int16_t, kMaxCopies> pos;
};

struct PathNode {
    double metric = 0.0;
    int next_succ = 0;
    std::uint32_t state = 0;
    std::uint32_t input_from_parent = 0;
    std::array<std::int16_t, kMaxCopies> pos{};
    std::vector<Successor> succ;
};

}  // namespace

void DecoderConfig::validate() const {
    if (!(delta > 0.0))
        throw std::invalid_argument("DecoderConfig: delta must be > 0");
    if (i_max < 0 || d_max < 0)
        throw std::invalid_argument("DecoderConfig: negative per-block cap");
    if (i_max + d_max + 1 > kMaxWidth)
        throw std::invalid_argument("DecoderConfig: i_max + d_max too large");
    if (drift_cap < 0)
        throw std::invalid_argument("DecoderConfig: negative drift_cap");
    if (step_cap < 1)
        throw std::invalid_argument("DecoderConfig: step_cap must be >= 1");
}

DriftWindow drift_window(int t, int Ltot, int c, int N,
                         const DecoderConfig& cfg) {
    const int d_term = N - c * Ltot;
    DriftWindow w;
    w.lo = std::max({-cfg.drift_cap, -cfg.d_max * t, -c * t,
                     d_term - cfg.i_max * (Ltot - t)});
    w.hi = std::min({cfg.drift_cap, cfg.i_max * t, N - c * t,
                     d_term + cfg.d_max * (Ltot - t)});
    return w;
}

bool first_visit_test(double mu_p, double T, double delta) {
    return mu_p < T + delta;
}

double branch_metric_exact(const channel::ChannelParams& params,
                           const channel::ReceivedSet& rx,
                           const std::vector<lattice::TailTable>& tails,
                           int b, int t, std::span<const std::uint8_t> x,
                           std::span<const int> pos_old,
                           std::span<const int> pos_new) {
    const int c = static_cast<int>(x.size());
    double z = -static_cast<double>(b);
    for (int j = 0; j < rx.M(); ++j) {
        const auto& y = rx.sequences[j];
        const int a = pos_old[j], e = pos_new[j];
        if (a < 0 || e < a || e > static_cast<int>(y.size())) return kNegInf;
        const double p = lattice::segment_likelihood(
            params, x, std::span(y).subspan(a, e - a));
        if (!(p > 0.0)) return kNegInf;
        const int rows_before = tails[j].total_rows() - c * t;
        const double before = tails[j].log2_tail(rows_before, a);
        const double after = tails[j].log2_tail(rows_before - c, e);
        if (after == kNegInf) return kNegInf;
        assert(before != kNegInf);
        z += std::log2(p) + after - before;
    }
    return z;
}

double branch_metric_asymptotic(const channel::ChannelParams& params,
                                const channel::ReceivedSet& rx,
                                const lattice::CriticalPoint& cp, int b,
                                std::span<const std::uint8_t> x,
                                std::span<const int> pos_old,
                                std::span<const int> pos_new) {
    const int c = static_cast<int>(x.size());
    double z = -static_cast<double>(b);
    for (int j = 0; j < rx.M(); ++j) {
        const auto& y = rx.sequences[j];
        const int a = pos_old[j], e = pos_new[j];
        if (a < 0 || e < a || e > static_cast<int>(y.size())) return kNegInf;
        const double p = lattice::segment_likelihood(
            params, x, std::span(y).subspan(a, e - a));
        if (!(p > 0.0)) return kNegInf;
        const int delta_change = (e - a) - c;
        z += std::log2(p) + c * cp.log2_q1 +
             (c + delta_change) * cp.log2_z1;
    }
    return z;
}

DecodeResult fano_decode(const convcode::CodeSpec& code,
                         const DecoderConfig& cfg,
                         const channel::ChannelParams& params,
                         const channel::ReceivedSet& rx,
                         std::span<const std::uint8_t> offset, int L) {
    code.validate();
    cfg.validate();
    params.validate();
    const int c = code.c, b = code.b, m = code.m;
    const int Ltot = L + m;
    const int M = static_cast<int>(rx.M());
    if (L < 1) throw std::invalid_argument("fano_decode: L must be >= 1");
    if (M < 1 || M > kMaxCopies)
        throw std::invalid_argument("fano_decode: unsupported copy count");
    if (static_cast<int>(offset.size()) != c * Ltot)
        throw std::invalid_argument("fano_decode: offset length mismatch");
    for (const auto& y : rx.sequences)
        if (y.size() > 30000)
            throw std::invalid_argument("fano_decode: sequence too long");

    DecodeResult res;

    // A copy whose length is unreachable (terminal drift outside every
    // window) makes the whole frame undecodable.
    for (int j = 0; j < M; ++j) {
        const int N = static_cast<int>(rx.sequences[j].size());
        if (drift_window(Ltot, Ltot, c, N, cfg).empty() ||
            drift_window(0, Ltot, c, N, cfg).empty())
            return res;
    }

    std::vector<lattice::TailTable> tails;
    lattice::CriticalPoint cp;
    const bool exact = cfg.metric_mode == MetricMode::exact_tail;
    if (exact) {
        tails.reserve(M);
        for (int j = 0; j < M; ++j)
            tails.emplace_back(params, c * Ltot, rx.sequences[j]);
    } else {
        cp = lattice::critical_point(params, lattice::natural_eta(params));
    }

    std::vector<PathNode> path(static_cast<std::size_t>(Ltot) + 1);
    path[0] = PathNode{};

    // Builds the sorted successor list of path[t]. Order: metric
    // descending, then input ascending, then per copy smaller |delta|
    // first, negative before positive.
    auto gen_succ = [&](int t) {
        PathNode& nd = path[t];
        nd.succ.clear();
        if (t >= Ltot) return;
        const std::uint32_t num_inputs = (t < L) ? (1u << b) : 1u;

        std::array<int, kMaxCopies> plo{}, phi{};
        for (int j = 0; j < M; ++j) {
            const int N = static_cast<int>(rx.sequences[j].size());
            const DriftWindow w = drift_window(t + 1, Ltot, c, N, cfg);
            if (w.empty()) return;
            plo[j] = std::max(c * (t + 1) + w.lo, nd.pos[j] + c - cfg.d_max);
            phi[j] = std::min(c * (t + 1) + w.hi, nd.pos[j] + c + cfg.i_max);
            if (plo[j] > phi[j]) return;
        }

        std::array<std::uint8_t, 32> x{};
        std::array<std::array<double, kMaxWidth>, kMaxCopies> contrib;
        for (std::uint32_t u = 0; u < num_inputs; ++u) {
            const auto bo = convcode::encode_block(code, {nd.state}, u);
            for (int k = 0; k < c; ++k)
                x[k] = static_cast<std::uint8_t>((bo.out >> k) & 1u) ^
                       offset[static_cast<std::size_t>(c) * t + k];
            const std::span<const std::uint8_t> xs(x.data(),
                                                   static_cast<std::size_t>(c));

            for (int j = 0; j < M; ++j) {
                const auto& y = rx.sequences[j];
                for (int pos = plo[j]; pos <= phi[j]; ++pos) {
                    const double p = lattice::segment_likelihood(
                        params, xs,
                        std::span(y).subspan(nd.pos[j], pos - nd.pos[j]));
                    double v = (p > 0.0) ? std::log2(p) : kNegInf;
                    if (v != kNegInf) {
                        if (exact) {
                            const int rows = c * (Ltot - t);
                            const double before =
                                tails[j].log2_tail(rows, nd.pos[j]);
                            const double after =
                                tails[j].log2_tail(rows - c, pos);
                            v = (after == kNegInf) ? kNegInf
                                                   : v + after - before;
                        } else {
                            const int dc = (pos - nd.pos[j]) - c;
                            v += c * cp.log2_q1 + (c + dc) * cp.log2_z1;
                        }
                    }
                    contrib[j][pos - plo[j]] = v;
                }
            }

            std::array<int, kMaxCopies> idx{};
            for (;;) {
                double z = -static_cast<double>(b);
                for (int j = 0; j < M; ++j) z += contrib[j][idx[j]];
                ++res.branch_evaluations;
                if (z != kNegInf) {
                    Successor s;
                    s.z = z;
                    s.input = u;
                    s.next_state = bo.next.reg;
                    for (int j = 0; j < M; ++j)
                        s.pos[j] = static_cast<std::int16_t>(plo[j] + idx[j]);
                    nd.succ.push_back(s);
                }
                int j = 0;
                while (j < M && ++idx[j] > phi[j] - plo[j]) idx[j++] = 0;
                if (j == M) break;
            }
        }

        std::sort(nd.succ.begin(), nd.succ.end(),
                  [&](const Successor& a, const Successor& bb) {
                      if (a.z != bb.z) return a.z > bb.z;
                      if (a.input != bb.input) return a.input < bb.input;
                      for (int j = 0; j < M; ++j) {
                          const int da = a.pos[j] - (nd.pos[j] + c);
                          const int db = bb.pos[j] - (nd.pos[j] + c);
                          if (std::abs(da) != std::abs(db))
                              return std::abs(da) < std::abs(db);
                          if (da != db) return da < db;
                      }
                      return false;
                  });
    };

    int best_depth = 0;
    Bits best_bits;
    auto record_best = [&](int depth) {
        best_depth = depth;
        best_bits.clear();
        const int blocks = std::min(depth, L);
        for (int k = 1; k <= blocks; ++k)
            append_word_bits(best_bits, path[k].input_from_parent, b);
    };

    double T = 0.0;
    int t = 0;
    gen_succ(0);
    bool success = false;

    for (;;) {
        PathNode& nd = path[t];
        if (nd.next_succ < static_cast<int>(nd.succ.size())) {
            const Successor& s = nd.succ[nd.next_succ];
            const double mu_s = nd.metric + s.z;
            if (mu_s >= T) {
                ++res.forward_steps;
                const double mu_old = nd.metric;
                PathNode& child = path[t + 1];
                child.metric = mu_s;
                child.state = s.next_state;
                child.input_from_parent = s.input;
                child.pos = s.pos;
                child.next_succ = 0;
                ++t;
                if (t > best_depth) record_best(t);
                if (t == Ltot) {
                    success = true;
                    break;
                }
                if (res.forward_steps >= cfg.step_cap) break;
                gen_succ(t);
                if (first_visit_test(mu_old, T, cfg.delta))
                    T = cfg.delta * std::floor(child.metric / cfg.delta);
                continue;
            }
        }
        // No acceptable successor: back up if the parent tolerates the
        // threshold, otherwise lower it and rescan from the best branch.
        if (t > 0 && path[t - 1].metric >= T) {
            --t;
            ++path[t].next_succ;
        } else {
            T -= cfg.delta;
            if (T < cfg.metric_floor) break;
            path[t].next_succ = 0;
        }
    }

    if (success) {
        res.completed = true;
        res.final_metric = path[Ltot].metric;
        res.decoded.clear();
        for (int k = 1; k <= L; ++k)
            append_word_bits(res.decoded, path[k].input_from_parent, b);
    } else {
        res.completed = false;
        res.final_metric = path[t].metric;
        res.decoded = best_bits;
    }
    return res;
}

}  // namespace ids::fano
