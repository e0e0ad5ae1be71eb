#include "ids/cutoff.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "ids/bits.hpp"
#include "ids/lattice.hpp"

namespace ids::cutoff {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNegInf = -kInf;

double g_single(const MetricDistribution& d, double sigma) {
    if (sigma == 0.0) return d.mass();
    double acc = 0.0;
    for (const auto& e : d.support) acc += e.p * std::exp2(sigma * e.z);
    return acc;
}

}  // namespace

double MetricDistribution::g(double sigma) const {
    const double base = g_single(*this, sigma);
    if (M == 1) return base;
    return std::exp2(sigma * b * (M - 1)) * std::pow(base, M);
}

double MetricDistribution::mass() const {
    double acc = 0.0;
    for (const auto& e : support) acc += e.p;
    return acc;
}

double MetricDistribution::mean() const {
    double acc = 0.0;
    for (const auto& e : support)
        if (e.z != kNegInf) acc += e.p * e.z;
    return acc;
}

double MetricDistribution::min_finite_z() const {
    double zmin = kInf;
    for (const auto& e : support)
        if (e.z != kNegInf && e.p > 1e-300 && e.z < zmin) zmin = e.z;
    return zmin;
}

std::pair<MetricDistribution, MetricDistribution> build_distributions(
    int c, int b, const channel::ChannelParams& params, int i_max,
    int d_max, int M) {
    params.validate();
    if (c < 1 || c > 6)
        throw std::invalid_argument(
            "build_distributions: c outside enumerable range");
    if (i_max < 0 || d_max < 0 || M < 1)
        throw std::invalid_argument("build_distributions: bad caps");
    const int lambda = i_max + d_max + 1;
    const auto cp =
        lattice::critical_point(params, lattice::natural_eta(params));

    MetricDistribution correct, incorrect;
    correct.kind = MetricDistribution::Kind::correct_path;
    incorrect.kind = MetricDistribution::Kind::incorrect_path;
    for (auto* d : {&correct, &incorrect}) {
        d->c = c;
        d->b = b;
        d->lambda = lambda;
        d->M = M;
    }

    Bits x(static_cast<std::size_t>(c));
    Bits y;
    for (int delta = -d_max; delta <= i_max; ++delta) {
        if (c + delta < 0) continue;
        y.assign(static_cast<std::size_t>(c + delta), 0);
        const double p_inc =
            std::exp2(-delta - 2.0 * c) / static_cast<double>(lambda);
        for (std::uint32_t xv = 0; xv < (1u << c); ++xv) {
            for (int k = 0; k < c; ++k) x[k] = (xv >> k) & 1u;
            for (std::uint32_t yv = 0; yv < (1u << (c + delta)); ++yv) {
                for (int k = 0; k < c + delta; ++k) y[k] = (yv >> k) & 1u;
                const double pj = lattice::segment_likelihood(params, x, y);
                const double z =
                    (pj > 0.0)
                        ? std::log2(pj) - b + c * cp.log2_q1 +
                              (c + delta) * cp.log2_z1
                        : kNegInf;
                if (pj > 0.0)
                    correct.support.push_back(
                        {z, std::exp2(static_cast<double>(-c)) * pj, delta});
                incorrect.support.push_back({z, p_inc, delta});
            }
        }
    }
    return {correct, incorrect};
}

double solve_sigma0(const MetricDistribution& correct) {
    double lo = -1.0;
    while (correct.g(lo) <= 1.0) {
        lo *= 2.0;
        if (lo < -80.0)
            throw std::domain_error(
                "solve_sigma0: g0 never exceeds 1; noise below analyzable "
                "regime");
    }
    double hi = -1e-12;
    if (correct.g(hi) >= 1.0)
        throw std::domain_error("solve_sigma0: no sign change in bracket");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (correct.g(mid) > 1.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double solve_sigma1(const MetricDistribution& incorrect) {
    const double target =
        std::exp2(-static_cast<double>(incorrect.b)) /
        std::pow(static_cast<double>(incorrect.lambda), incorrect.M);
    // Convex MGF: locate the minimum by golden section, then take the
    // first crossing on the decreasing side.
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = 1e-9, bnd = 40.0;
    double x1 = bnd - gr * (bnd - a), x2 = a + gr * (bnd - a);
    double f1 = incorrect.g(x1), f2 = incorrect.g(x2);
    for (int it = 0; it < 160; ++it) {
        if (f1 < f2) {
            bnd = x2;
            x2 = x1;
            f2 = f1;
            x1 = bnd - gr * (bnd - a);
            f1 = incorrect.g(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (bnd - a);
            f2 = incorrect.g(x2);
        }
    }
    const double smin = 0.5 * (a + bnd);
    if (incorrect.g(smin) > target)
        throw std::domain_error(
            "solve_sigma1: MGF never reaches the 2^(-b') target");
    double lo = 1e-12, hi = smin;
    if (incorrect.g(lo) <= target)
        throw std::domain_error("solve_sigma1: no sign change in bracket");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (incorrect.g(mid) > target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

namespace {

struct SigmaEval {
    bool ok = false;        // both roots found
    bool decodable = false;  // sigma0 + sigma1 <= 0
    double s0 = 0.0, s1 = 0.0;
};

SigmaEval eval_point(int c, int b, int i_max, int d_max, double alpha,
                     PsMode ps, int M, double p) {
    channel::ChannelParams params{p, alpha * p,
                                  ps.fixed ? ps.value : ps.value * p};
    auto [correct, incorrect] =
        build_distributions(c, b, params, i_max, d_max, M);
    SigmaEval ev;
    bool s0_ok = true, s1_ok = true;
    try {
        ev.s0 = solve_sigma0(correct);
    } catch (const std::domain_error&) {
        s0_ok = false;
    }
    try {
        ev.s1 = solve_sigma1(incorrect);
    } catch (const std::domain_error&) {
        s1_ok = false;
    }
    ev.ok = s0_ok && s1_ok;
    if (ev.ok)
        ev.decodable = ev.s0 + ev.s1 <= 0.0;
    else
        // A failed sigma0 bracket means noise below the analyzable floor
        // (trivially decodable); a missing sigma1 root means the
        // incorrect-path effort cannot be tamed at any exponent.
        ev.decodable = !s0_ok;
    return ev;
}

}  // namespace

CutoffReport find_cutoff_probability(int c, int b, int i_max, int d_max,
                                     double alpha, PsMode ps, int M,
                                     double eps) {
    if (!(eps > 0.0))
        throw std::invalid_argument("find_cutoff_probability: eps <= 0");
    double lo = 1e-4, hi = 0.2;
    while (!eval_point(c, b, i_max, d_max, alpha, ps, M, lo).decodable) {
        lo /= 4.0;
        if (lo < 1e-9)
            throw std::domain_error(
                "find_cutoff_probability: no decodable lower bracket");
    }
    while (eval_point(c, b, i_max, d_max, alpha, ps, M, hi).decodable) {
        hi *= 1.5;
        if (hi > 0.45)
            throw std::domain_error(
                "find_cutoff_probability: no undecodable upper bracket");
    }

    CutoffReport rep;
    for (int it = 1; it <= 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const SigmaEval ev =
            eval_point(c, b, i_max, d_max, alpha, ps, M, mid);
        rep.p = mid;
        rep.iterations = it;
        if (ev.ok) {
            rep.sigma0 = ev.s0;
            rep.sigma1 = ev.s1;
            rep.residual = std::fabs(ev.s0 + ev.s1);
            if (rep.residual <= eps) {
                rep.converged = true;
                return rep;
            }
        }
        (ev.decodable ? lo : hi) = mid;
    }
    return rep;
}

CutoffReport shortcut_cutoff_pi_eq_pd(int c, int b, int i_max, int d_max,
                                      double alpha, PsMode ps, int M,
                                      double eps) {
    if (!(eps > 0.0))
        throw std::invalid_argument("shortcut_cutoff_pi_eq_pd: eps <= 0");
    auto g0_half = [&](double p) {
        channel::ChannelParams params{p, alpha * p,
                                      ps.fixed ? ps.value : ps.value * p};
        auto [correct, incorrect] =
            build_distributions(c, b, params, i_max, d_max, M);
        (void)incorrect;
        return correct.g(-0.5);
    };
    double lo = 1e-4, hi = 0.2;
    while (g0_half(lo) > 1.0) {
        lo /= 4.0;
        if (lo < 1e-9)
            throw std::domain_error(
                "shortcut_cutoff_pi_eq_pd: no decodable lower bracket");
    }
    while (g0_half(hi) <= 1.0) {
        hi *= 1.5;
        if (hi > 0.45)
            throw std::domain_error(
                "shortcut_cutoff_pi_eq_pd: no undecodable upper bracket");
    }
    CutoffReport rep;
    rep.sigma0 = -0.5;
    rep.sigma1 = 0.5;
    int it = 0;
    while (hi - lo > eps && it < 200) {
        ++it;
        const double mid = 0.5 * (lo + hi);
        (g0_half(mid) <= 1.0 ? lo : hi) = mid;
    }
    rep.p = 0.5 * (lo + hi);
    rep.iterations = it;
    rep.residual = std::fabs(g0_half(rep.p) - 1.0);
    rep.converged = hi - lo <= eps;
    return rep;
}

ComplexityReport complexity_bound(int c, int b,
                                  const channel::ChannelParams& params,
                                  int i_max, int d_max, double delta) {
    if (!(delta > 0.0))
        throw std::invalid_argument("complexity_bound: delta <= 0");
    auto [correct, incorrect] =
        build_distributions(c, b, params, i_max, d_max, 1);

    ComplexityReport rep;
    rep.sigma0 = solve_sigma0(correct);
    rep.sigma1 = solve_sigma1(incorrect);
    rep.e_zeta_incorrect = incorrect.mean();
    rep.z_min_correct = correct.min_finite_z();
    rep.z_min_incorrect = incorrect.min_finite_z();
    const int lambda = i_max + d_max + 1;
    rep.b_prime = b + std::log2(static_cast<double>(lambda));

    const double s0 = rep.sigma0, s1 = rep.sigma1;
    if (s0 + s1 >= 0.0) {
        rep.bounded = false;
        rep.cav_bound = kInf;
        return rep;
    }

    const double tb = std::exp2(-rep.b_prime);  // 2^(-b')
    // Coefficient of 2^(-sigma1*y) in the incorrect-subtree visit bound;
    // the 2^(-sigma1*z'_min) tilt comes from re-anchoring the threshold
    // sum at the worst single branch drop.
    rep.c1_prime =
        std::exp2(-s1 * rep.z_min_incorrect) *
        (tb / (1.0 - tb) -
         (rep.e_zeta_incorrect / delta) * tb / ((1.0 - tb) * (1.0 - tb)));

    // Drift-conditional correct-path MGF sum at sigma1.
    double g0d_sum = 0.0;
    for (int d = -d_max; d <= i_max; ++d) {
        const double pd = lattice::drift_transition(params, d, c);
        if (!(pd > 0.0)) continue;
        double acc = 0.0;
        for (const auto& e : correct.support)
            if (e.delta == d) acc += e.p * std::exp2(s1 * e.z);
        g0d_sum += acc / pd;
    }

    const double zstar = std::exp2(s1 * rep.z_min_correct);
    rep.c1 = (1.0 - std::exp2(static_cast<double>(-b)) + g0d_sum - zstar) *
             rep.c1_prime;
    rep.c2 = rep.c1_prime * zstar;
    rep.c3 = (std::exp2(static_cast<double>(-b)) - tb) / (1.0 - tb);

    const double D = delta;
    rep.cav_bound =
        rep.c1 * (1.0 - std::exp2(-s1 * D)) * std::exp2(-s0 * D) /
            (1.0 - std::exp2((s0 + s1) * D)) +
        rep.c1 * std::exp2(-s1 * D) +
        rep.c3 * std::exp2(-s0 * D) / (1.0 - std::exp2(s0 * D)) +
        rep.c2 * (1.0 - std::exp2(-(s0 + s1) * D)) * std::exp2(-s0 * D) /
            (1.0 - std::exp2((s1 + 2.0 * s0) * D)) +
        rep.c2 * std::exp2(-(s0 + s1) * D);
    rep.bounded = true;
    return rep;
}

}  // namespace ids::cutoff
