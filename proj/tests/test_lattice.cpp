#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "ids/channel.hpp"
#include "ids/lattice.hpp"

using namespace ids;
using namespace ids::lattice;
using channel::ChannelParams;
using channel::SplitMix64;

namespace {

Bits random_bits(std::size_t n, std::uint64_t seed) {
    SplitMix64 rng(seed);
    Bits b(n);
    for (auto& v : b) v = rng.bit();
    return b;
}

// Every received word of a given length, c + delta bits.
std::vector<Bits> all_words(int len) {
    std::vector<Bits> out;
    for (std::uint32_t w = 0; w < (1u << len); ++w) {
        Bits b;
        append_word_bits(b, w, len);
        out.push_back(b);
    }
    return out;
}

}  // namespace

TEST_CASE("single-bit segment likelihoods enumerate by hand") {
    ChannelParams p{0.1, 0.2, 0.05};
    const double Pt = p.Pt();
    Bits x0 = bits_from_string("0");
    // One deletion.
    CHECK(segment_likelihood(p, x0, Bits{}) == doctest::Approx(p.Pd).epsilon(1e-12));
    // {transmit correct} or {insert the observed 0, then delete}.
    CHECK(segment_likelihood(p, x0, bits_from_string("0")) ==
          doctest::Approx(Pt * (1 - p.Ps) + (p.Pi / 2) * p.Pd).epsilon(1e-12));
    // {substitute} or {insert 1, delete}.
    CHECK(segment_likelihood(p, x0, bits_from_string("1")) ==
          doctest::Approx(Pt * p.Ps + (p.Pi / 2) * p.Pd).epsilon(1e-12));
    // Complement symmetry.
    Bits x1 = bits_from_string("1");
    CHECK(segment_likelihood(p, x1, bits_from_string("1")) ==
          doctest::Approx(Pt * (1 - p.Ps) + (p.Pi / 2) * p.Pd).epsilon(1e-12));
    CHECK(segment_likelihood(p, x1, bits_from_string("0")) ==
          doctest::Approx(Pt * p.Ps + (p.Pi / 2) * p.Pd).epsilon(1e-12));
}

TEST_CASE("drift-validated overload checks segment lengths") {
    ChannelParams p{0.1, 0.1, 0.0};
    Bits x = bits_from_string("010");
    Bits y = bits_from_string("0100");
    CHECK(segment_likelihood(p, x, y, 2, 3) == segment_likelihood(p, x, y));
    CHECK_THROWS_AS(segment_likelihood(p, x, y, 0, 0), std::invalid_argument);
}

TEST_CASE("drift transition basics") {
    CHECK(drift_transition(ChannelParams{0, 0, 0}, 0, 1) == doctest::Approx(1.0));
    ChannelParams p{0.07, 0.21, 0.3};
    CHECK(drift_transition(p, -1, 1) == doctest::Approx(p.Pd).epsilon(1e-12));
}

TEST_CASE("segment likelihoods marginalize to the drift transition") {
    ChannelParams p{0.08, 0.05, 0.03};
    const int c = 3;
    for (Bits x : {bits_from_string("000"), bits_from_string("101"),
                   bits_from_string("110")}) {
        for (int delta = -c; delta <= 9; ++delta) {
            double sum = 0.0;
            for (const Bits& y : all_words(c + delta)) sum += segment_likelihood(p, x, y);
            CHECK(sum == doctest::Approx(drift_transition(p, delta, c)).epsilon(1e-11));
        }
    }
}

TEST_CASE("block distribution is normalized up to truncation") {
    // Drift below -c is impossible, so the only truncation loss of the
    // window [-c, 4c] is upward leakage, which needs more than 4c
    // insertions: P(k insertions over a c-block) <= C(k+c-1, c-1) Pi^k.
    for (ChannelParams p : {ChannelParams{0.1, 0.1, 0.0}, ChannelParams{0.05, 0.12, 0.08},
                            ChannelParams{0.0, 0.2, 0.0}, ChannelParams{0.2, 0.0, 0.5}}) {
        for (int c = 1; c <= 3; ++c) {
            double sum = 0.0;
            for (int delta = -c; delta <= 4 * c; ++delta)
                sum += drift_transition(p, delta, c);
            double wide = sum;
            for (int delta = 4 * c + 1; delta <= 12 * c + 40; ++delta)
                wide += drift_transition(p, delta, c);
            CHECK(wide <= 1.0 + 1e-12);
            CHECK(wide == doctest::Approx(1.0).epsilon(1e-9));
            double loss = 0.0;
            for (int k = 4 * c + 1; k <= 12 * c + 40; ++k) {
                double comb = 1.0;
                for (int i = 1; i < c; ++i) comb *= double(k + i) / i;
                loss += comb * std::pow(p.Pi, k);
            }
            CHECK(sum >= wide - loss - 1e-12);
        }
    }
}

TEST_CASE("weighted Delannoy numbers") {
    CHECK(delannoy(2, 2, 1, 1, 1) == doctest::Approx(13.0));  // central Delannoy
    CHECK(delannoy(3, 0, 0.3, 0.2, 0.5) == doctest::Approx(0.008).epsilon(1e-12));
    CHECK(delannoy(0, 4, 0.3, 0.2, 0.5) == doctest::Approx(std::pow(0.3, 4)).epsilon(1e-12));
    CHECK(delannoy(0, 0, 0.3, 0.2, 0.5) == doctest::Approx(1.0));
    // Diagonal-only paths.
    for (int r = 0; r <= 5; ++r)
        for (int s = 0; s <= 5; ++s)
            CHECK(delannoy(r, s, 0, 0, 1) == doctest::Approx(r == s ? 1.0 : 0.0));
}

TEST_CASE("log-domain Delannoy matches linear within 1e-10") {
    const double a = 0.3, b = 0.25, g = 0.45;
    for (int r = 0; r <= 30; ++r) {
        for (int s = 0; s <= 30; ++s) {
            const double lin = delannoy(r, s, a, b, g);
            const double lg = delannoy_log2(r, s, a, b, g);
            CHECK(std::fabs(std::exp2(lg) / lin - 1.0) < 1e-10);
        }
    }
}

TEST_CASE("tail probability closed cases") {
    ChannelParams p{0.1, 0.3, 0.0};
    CHECK(tail_probability(p, 5, Bits{}) ==
          doctest::Approx(std::pow(0.3, 5)).epsilon(1e-12));
    CHECK(tail_probability(p, 0, Bits{}) == doctest::Approx(1.0));
    // Two uniform transmitted bits producing the single bit "0" with
    // Pi=Pd=0.1: restricted DP gives 0.081.
    ChannelParams q{0.1, 0.1, 0.0};
    CHECK(tail_probability(q, 2, bits_from_string("0")) ==
          doctest::Approx(0.081).epsilon(1e-12));
    // Uniform transmitted weights: the value depends only on |y|.
    CHECK(tail_probability(q, 2, bits_from_string("1")) ==
          doctest::Approx(0.081).epsilon(1e-12));
}

TEST_CASE("tail equals the Delannoy difference d_{R,N} - (Pi/2) d_{R,N-1}") {
    // The restricted DP drops the horizontal term in the last row, which
    // telescopes to a last-column reduction of the unrestricted table.
    ChannelParams p{0.07, 0.13, 0.0};
    const double a = p.Pi / 2, b = p.Pd, g = p.Pt() / 2;
    Bits y = random_bits(20, 11);
    for (int R = 0; R <= 20; ++R) {
        for (int N = 0; N <= 20; ++N) {
            const double direct =
                tail_probability(p, R, std::span<const std::uint8_t>(y.data(), N));
            const double viaD =
                delannoy(R, N, a, b, g) - (N >= 1 ? a * delannoy(R, N - 1, a, b, g) : 0.0);
            CHECK(direct == doctest::Approx(viaD).epsilon(1e-12));
        }
    }
}

TEST_CASE("tail log form matches linear and the backward table") {
    ChannelParams p{0.04, 0.09, 0.0};
    Bits y = random_bits(40, 5);
    for (int R : {0, 1, 5, 17, 30}) {
        for (int s : {0, 3, 25, 40}) {
            std::span<const std::uint8_t> suffix(y.data() + s, y.size() - s);
            const double lin = tail_probability(p, R, suffix);
            const double lg = tail_probability_log2(p, R, suffix);
            if (lin > 0) CHECK(std::fabs(std::exp2(lg) / lin - 1.0) < 1e-10);
        }
    }
    TailTable table(p, 30, y);
    CHECK(table.total_rows() == 30);
    CHECK(table.received_length() == 40);
    for (int R : {0, 1, 5, 17, 30})
        for (int s : {0, 3, 25, 40}) {
            std::span<const std::uint8_t> suffix(y.data() + s, y.size() - s);
            const double ref = tail_probability_log2(p, R, suffix);
            const double got = table.log2_tail(R, s);
            if (std::isinf(ref))
                CHECK(std::isinf(got));
            else
                CHECK(got == doctest::Approx(ref).epsilon(1e-10));
        }
}

TEST_CASE("balanced channels sit at the (1,2) critical point") {
    for (double pr : {0.0, 0.02, 0.05, 0.1}) {
        ChannelParams p{pr, pr, 0.0};
        CriticalPoint cp = critical_point(p, natural_eta(p));
        CHECK(natural_eta(p) == doctest::Approx(1.0));
        CHECK(cp.q1 == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(cp.z1 == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(cp.log2_q1 == doctest::Approx(0.0));
        CHECK(cp.log2_z1 == doctest::Approx(1.0));
        if (pr > 0) {
            CHECK(cp.omega ==
                  doctest::Approx((1 - 2 * pr) / ((1 - pr) * (1 - pr))).epsilon(1e-12));
            CHECK(cp.rho == doctest::Approx(2 * pr / (1 - pr)).epsilon(1e-12));
        }
    }
}

TEST_CASE("critical point satisfies the defining system") {
    for (ChannelParams p : {ChannelParams{0.04, 0.09, 0.0}, ChannelParams{0.12, 0.03, 0.0},
                            ChannelParams{0.01, 0.18, 0.0}}) {
        const double a = p.Pi / 2, b = p.Pd, g = p.Pt() / 2;
        const double eta = natural_eta(p);
        CriticalPoint cp = critical_point(p, eta);
        CHECK(cp.q1 > 0);
        CHECK(cp.z1 > 0);
        // Singularity: 1 - b q - a z - g q z = 0.
        CHECK(std::fabs(1 - b * cp.q1 - a * cp.z1 - g * cp.q1 * cp.z1) < 1e-12);
        // Direction: eta * z * dH/dz = q * dH/dq with H as above.
        const double Hq = -b - g * cp.z1;
        const double Hz = -a - g * cp.q1;
        CHECK(eta * cp.z1 * Hz == doctest::Approx(cp.q1 * Hq).epsilon(1e-10));
    }
}

TEST_CASE("degenerate channels use the algebraic limit forms") {
    // Insertion-only and deletion-only channels still satisfy the system,
    // and the limits agree with a nearby non-degenerate channel.
    ChannelParams del_only{0.0, 0.1, 0.0};
    CriticalPoint cd = critical_point(del_only, natural_eta(del_only));
    const double bd = del_only.Pd, gd = del_only.Pt() / 2;
    CHECK(std::fabs(1 - bd * cd.q1 - gd * cd.q1 * cd.z1) < 1e-12);
    CriticalPoint cd_eps =
        critical_point(ChannelParams{1e-9, 0.1, 0.0}, natural_eta(ChannelParams{1e-9, 0.1, 0.0}));
    CHECK(cd.q1 == doctest::Approx(cd_eps.q1).epsilon(1e-5));
    CHECK(cd.z1 == doctest::Approx(cd_eps.z1).epsilon(1e-5));

    ChannelParams ins_only{0.1, 0.0, 0.0};
    CriticalPoint ci = critical_point(ins_only, natural_eta(ins_only));
    const double ai = ins_only.Pi / 2, gi = ins_only.Pt() / 2;
    CHECK(std::fabs(1 - ai * ci.z1 - gi * ci.q1 * ci.z1) < 1e-12);
    CriticalPoint ci_eps =
        critical_point(ChannelParams{0.1, 1e-9, 0.0}, natural_eta(ChannelParams{0.1, 1e-9, 0.0}));
    CHECK(ci.q1 == doctest::Approx(ci_eps.q1).epsilon(1e-5));
    CHECK(ci.z1 == doctest::Approx(ci_eps.z1).epsilon(1e-5));

    CriticalPoint noiseless = critical_point(ChannelParams{0, 0, 0}, 1.0);
    CHECK(noiseless.q1 == doctest::Approx(1.0));
    CHECK(noiseless.z1 == doctest::Approx(2.0));
}

TEST_CASE("asymptotic tail ratio") {
    ChannelParams p{0.05, 0.05, 0.0};
    CriticalPoint cp = critical_point(p, 1.0);
    CHECK(tail_ratio_asymptotic(cp, 0, 0) == doctest::Approx(1.0));
    CHECK(tail_ratio_asymptotic(cp, 1, 1) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(tail_ratio_asymptotic_log2(cp, 1, 1) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(tail_ratio_asymptotic_log2(cp, -1, -1) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("exact tail ratios approach the critical-point formula") {
    // Peeling one transmitted and one received bit multiplies the tail by
    // q1*z1 in the limit; at Pi=Pd that is 2. Deep in a 600-bit sequence
    // the DP ratio must sit within 5%.
    ChannelParams p{0.02, 0.02, 0.0};
    CriticalPoint cp = critical_point(p, natural_eta(p));
    const double want = tail_ratio_asymptotic(cp, -1, -1);  // = q1*z1
    Bits y = random_bits(600, 21);
    TailTable table(p, 600, y);
    SplitMix64 rng(99);
    for (int k = 0; k < 20; ++k) {
        const int s = static_cast<int>(rng.next() % 200);  // stay far from the end
        const int R = 600 - s;
        const double ratio = std::exp2(table.log2_tail(R - 1, s + 1) - table.log2_tail(R, s));
        CHECK(std::fabs(ratio / want - 1.0) < 0.05);
    }
}
