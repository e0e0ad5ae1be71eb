#include "ids/lattice.hpp"

#include <array>
#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace ids::lattice {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Extended-range float: value = m * 2^e with m normalized into [0.5, 1) by
// frexp. Keeps lattice DPs exact-shaped for thousands of rows where plain
// doubles underflow.
struct XF {
    double m = 0.0;
    int e = 0;
};

inline XF xf_make(double m, int e) {
    if (m == 0.0) return {0.0, 0};
    int k;
    m = std::frexp(m, &k);
    return {m, e + k};
}

inline XF xf_scale(XF a, double w) { return xf_make(a.m * w, a.e); }

inline XF xf_add(XF a, XF b) {
    if (a.m == 0.0) return b;
    if (b.m == 0.0) return a;
    if (a.e < b.e) std::swap(a, b);
    int d = b.e - a.e;  // <= 0
    if (d < -1100) return a;
    return xf_make(a.m + std::ldexp(b.m, d), a.e);
}

inline double xf_log2(XF a) {
    if (a.m == 0.0) return kNegInf;
    return std::log2(a.m) + a.e;
}

double log2_sum_exp2(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    if (a < b) std::swap(a, b);
    return a + std::log2(1.0 + std::exp2(b - a));
}

// Shared forward DP over the edit lattice. Template on the cell type so the
// linear-double and extended-float paths share one correctness surface.
// alpha/beta are the horizontal/vertical weights; diag(a, b) the diagonal
// weight. Horizontal edges skipped when r == R.
template <typename Cell, typename Diag>
Cell lattice_forward_buf(std::span<const std::uint8_t> x,
                         std::span<const std::uint8_t> y, double alpha,
                         double beta, Diag diag, Cell one, Cell zero,
                         Cell* prev, Cell* cur) {
    const int R = static_cast<int>(x.size());
    const int S = static_cast<int>(y.size());

    cur[0] = one;
    if (R > 0)  // row 0 is not the last row, horizontal allowed
        for (int s = 1; s <= S; ++s) cur[s] = cur[s - 1] * alpha;
    else
        for (int s = 1; s <= S; ++s) cur[s] = zero;

    for (int r = 1; r <= R; ++r) {
        std::swap(prev, cur);
        const bool last = (r == R);
        cur[0] = prev[0] * beta;
        for (int s = 1; s <= S; ++s) {
            Cell v = prev[s] * beta + prev[s - 1] * diag(x[r - 1], y[s - 1]);
            if (!last) v = v + cur[s - 1] * alpha;
            cur[s] = v;
        }
    }
    return cur[S];
}

// Decoder segments are short (|y| <= c + i_max), so keep those on the
// stack; long inputs fall back to heap rows.
template <typename Cell, typename Diag>
Cell lattice_forward(std::span<const std::uint8_t> x,
                     std::span<const std::uint8_t> y, double alpha,
                     double beta, Diag diag, Cell one, Cell zero) {
    const std::size_t S = y.size();
    if (S < 40) {
        std::array<Cell, 40> prev, cur;
        return lattice_forward_buf(x, y, alpha, beta, diag, one, zero,
                                   prev.data(), cur.data());
    }
    std::vector<Cell> prev(S + 1), cur(S + 1);
    return lattice_forward_buf(x, y, alpha, beta, diag, one, zero,
                               prev.data(), cur.data());
}

struct LinCell {
    double v;
    LinCell operator*(double w) const { return {v * w}; }
    LinCell operator+(LinCell o) const { return {v + o.v}; }
};

struct XFCell {
    XF v;
    XFCell operator*(double w) const { return {xf_scale(v, w)}; }
    XFCell operator+(XFCell o) const { return {xf_add(v, o.v)}; }
};

// Uniform-tail diagonal weight: transmitted bit is random, so the observed
// bit matches with probability 1/2 regardless of substitution noise.
struct TailDiag {
    double w;
    double operator()(std::uint8_t, std::uint8_t) const { return w; }
};

struct MatchDiag {
    double match, mismatch;
    double operator()(std::uint8_t a, std::uint8_t b) const {
        return a == b ? match : mismatch;
    }
};

std::vector<std::uint8_t> zeros(int n) {
    return std::vector<std::uint8_t>(static_cast<std::size_t>(n), 0);
}

}  // namespace

double segment_likelihood(const channel::ChannelParams& params,
                          std::span<const std::uint8_t> x,
                          std::span<const std::uint8_t> y_seg) {
    const double pt = params.Pt();
    MatchDiag diag{pt * (1.0 - params.Ps), pt * params.Ps};
    return lattice_forward<LinCell>(x, y_seg, params.Pi / 2.0, params.Pd,
                                    diag, LinCell{1.0}, LinCell{0.0})
        .v;
}

double segment_likelihood(const channel::ChannelParams& params,
                          std::span<const std::uint8_t> x,
                          std::span<const std::uint8_t> y_seg, int delta_in,
                          int delta_out) {
    const int expect = static_cast<int>(x.size()) + delta_out - delta_in;
    if (static_cast<int>(y_seg.size()) != expect)
        throw std::invalid_argument(
            "segment_likelihood: |y_seg| inconsistent with drift pair");
    return segment_likelihood(params, x, y_seg);
}

double drift_transition(const channel::ChannelParams& params, int delta,
                        int c) {
    if (c < 0 || delta < -c) return 0.0;
    auto x = zeros(c);
    auto y = zeros(c + delta);
    TailDiag diag{params.Pt()};
    return lattice_forward<LinCell>(x, y, params.Pi, params.Pd, diag,
                                    LinCell{1.0}, LinCell{0.0})
        .v;
}

double delannoy(int r, int s, double alpha, double beta, double gamma) {
    if (r < 0 || s < 0) return 0.0;
    std::vector<double> prev(static_cast<std::size_t>(s) + 1);
    std::vector<double> cur(static_cast<std::size_t>(s) + 1);
    cur[0] = 1.0;
    for (int j = 1; j <= s; ++j) cur[j] = cur[j - 1] * alpha;
    for (int i = 1; i <= r; ++i) {
        std::swap(prev, cur);
        cur[0] = prev[0] * beta;
        for (int j = 1; j <= s; ++j)
            cur[j] = cur[j - 1] * alpha + prev[j] * beta + prev[j - 1] * gamma;
    }
    return cur[s];
}

double delannoy_log2(int r, int s, double alpha, double beta, double gamma) {
    if (r < 0 || s < 0) return kNegInf;
    const double la = std::log2(alpha), lb = std::log2(beta),
                 lg = std::log2(gamma);
    std::vector<double> prev(static_cast<std::size_t>(s) + 1, kNegInf);
    std::vector<double> cur(static_cast<std::size_t>(s) + 1, kNegInf);
    cur[0] = 0.0;
    for (int j = 1; j <= s; ++j) cur[j] = cur[j - 1] + la;
    for (int i = 1; i <= r; ++i) {
        std::swap(prev, cur);
        cur[0] = prev[0] + lb;
        for (int j = 1; j <= s; ++j)
            cur[j] = log2_sum_exp2(cur[j - 1] + la,
                                   log2_sum_exp2(prev[j] + lb,
                                                 prev[j - 1] + lg));
    }
    return cur[s];
}

double tail_probability(const channel::ChannelParams& params, int R,
                        std::span<const std::uint8_t> y) {
    if (R < 0) return 0.0;
    auto x = zeros(R);
    TailDiag diag{params.Pt() / 2.0};
    return lattice_forward<LinCell>(x, y, params.Pi / 2.0, params.Pd, diag,
                                    LinCell{1.0}, LinCell{0.0})
        .v;
}

double tail_probability_log2(const channel::ChannelParams& params, int R,
                             std::span<const std::uint8_t> y) {
    if (R < 0) return kNegInf;
    auto x = zeros(R);
    TailDiag diag{params.Pt() / 2.0};
    XFCell out = lattice_forward<XFCell>(x, y, params.Pi / 2.0, params.Pd,
                                         diag, XFCell{{1.0, 0}},
                                         XFCell{{0.0, 0}});
    return xf_log2(out.v);
}

TailTable::TailTable(const channel::ChannelParams& params, int R_total,
                     std::span<const std::uint8_t> y)
    : R_(R_total), N_(static_cast<int>(y.size())) {
    if (R_ < 0) throw std::invalid_argument("TailTable: negative row count");
    const double alpha = params.Pi / 2.0;
    const double beta = params.Pd;
    const double gamma = params.Pt() / 2.0;
    t_.assign(static_cast<std::size_t>(R_ + 1) * (N_ + 1), kNegInf);

    // Backward recurrence on suffixes: B[r][s] = beta*B[r-1][s]
    // + gamma*B[r-1][s+1] + alpha*B[r][s+1], B[0][N] = 1. The horizontal
    // term appears only for r >= 1, which is the same last-row exclusion
    // as the forward DP (row r = 0 has no pending transmitted bits).
    // The uniform-input weights make the observed suffix bits irrelevant,
    // only positions matter.
    std::vector<XF> prev(static_cast<std::size_t>(N_) + 1);
    std::vector<XF> cur(static_cast<std::size_t>(N_) + 1);
    cur[N_] = {0.5, 1};  // 1.0
    t_[static_cast<std::size_t>(0) * (N_ + 1) + N_] = 0.0;
    for (int r = 1; r <= R_; ++r) {
        std::swap(prev, cur);
        cur[N_] = xf_scale(prev[N_], beta);
        for (int s = N_ - 1; s >= 0; --s) {
            XF v = xf_add(xf_scale(prev[s], beta),
                          xf_scale(prev[s + 1], gamma));
            v = xf_add(v, xf_scale(cur[s + 1], alpha));
            cur[s] = v;
        }
        double* row = &t_[static_cast<std::size_t>(r) * (N_ + 1)];
        for (int s = 0; s <= N_; ++s) row[s] = xf_log2(cur[s]);
    }
}

double natural_eta(const channel::ChannelParams& params) {
    return (1.0 - params.Pi) / (1.0 - params.Pd);
}

CriticalPoint critical_point(const channel::ChannelParams& params,
                             double eta) {
    const double alpha = params.Pi / 2.0;
    const double beta = params.Pd;
    const double gamma = params.Pt() / 2.0;
    if (eta <= 0.0 || !std::isfinite(eta))
        throw std::invalid_argument("critical_point: eta must be positive");

    CriticalPoint cp;
    cp.eta = eta;
    cp.omega = gamma / (alpha * beta + gamma);

    if (alpha == 0.0 && beta == 0.0) {
        cp.q1 = 1.0;
        cp.z1 = 2.0;
        cp.rho = 0.0;
    } else if (beta == 0.0) {
        // No deletions: direction condition gives q1 directly, then the
        // singularity equation 1 = z(alpha + gamma q) fixes z1. Needs
        // eta < 1, which the natural direction (1-Pi)/1 satisfies.
        if (eta >= 1.0)
            throw std::invalid_argument(
                "critical_point: Pd=0 requires eta < 1");
        cp.q1 = eta * alpha / (gamma * (1.0 - eta));
        cp.z1 = 1.0 / (alpha + gamma * cp.q1);
        cp.rho = 0.0;
    } else if (alpha == 0.0) {
        // No insertions: mirror case, needs eta > 1.
        if (eta <= 1.0)
            throw std::invalid_argument(
                "critical_point: Pi=0 requires eta > 1");
        cp.z1 = beta / (gamma * (eta - 1.0));
        cp.q1 = 1.0 / (beta + gamma * cp.z1);
        cp.rho = 0.0;
    } else {
        const double w = cp.omega;
        // s = 1 - omega computed without cancellation; rho^2 rearranged as
        // (eta-1)^2 + 4 eta s. The raw numerators 2w-1-1/eta+rho/eta and
        // 2w-1-eta+rho cancel catastrophically when alpha*beta is tiny, so
        // rationalize via rho^2-u^2 = 4 eta^2 s w and rho^2-v^2 = 4 s w
        // whenever the linear part is negative.
        const double s = alpha * beta / (alpha * beta + gamma);
        const double rho =
            std::sqrt((eta - 1.0) * (eta - 1.0) + 4.0 * eta * s);
        cp.rho = rho;
        const double u = (eta - 1.0) - 2.0 * eta * s;
        const double nq =
            u >= 0.0 ? u + rho : 4.0 * eta * eta * s * w / (rho - u);
        cp.q1 = nq / (2.0 * w * beta * eta);
        const double v = (1.0 - eta) - 2.0 * s;
        const double nz = v >= 0.0 ? v + rho : 4.0 * s * w / (rho - v);
        cp.z1 = nz / (2.0 * w * alpha);
    }

    if (!(cp.q1 > 0.0) || !(cp.z1 > 0.0) || !std::isfinite(cp.q1) ||
        !std::isfinite(cp.z1))
        throw std::domain_error("critical_point: no valid saddle point");
    const double residual =
        1.0 - beta * cp.q1 - alpha * cp.z1 - gamma * cp.q1 * cp.z1;
    if (std::fabs(residual) > 1e-12)
        throw std::logic_error(
            "critical_point: singularity equation residual exceeds 1e-12");

    cp.log2_q1 = std::log2(cp.q1);
    cp.log2_z1 = std::log2(cp.z1);
    return cp;
}

double tail_ratio_asymptotic(const CriticalPoint& cp, int dr, int ds) {
    return std::exp2(tail_ratio_asymptotic_log2(cp, dr, ds));
}

double tail_ratio_asymptotic_log2(const CriticalPoint& cp, int dr, int ds) {
    return -dr * cp.log2_q1 - ds * cp.log2_z1;
}

}  // namespace ids::lattice
