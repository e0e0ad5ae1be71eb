#pragma once

#include <utility>
#include <vector>

#include "ids/channel.hpp"

namespace ids::cutoff {

// Branch-metric distribution under the asymptotic metric, enumerated over
// all (drift change, transmitted block, received segment) outcomes.
// correct_path weights each outcome by 2^(-c) P(y,delta|x); incorrect_path
// by lambda^(-1) 2^(-2c) 2^(-delta) (received segment independent of the
// hypothesized block). For M received copies the MGF uses the power/shift
// form g^(M)(s) = 2^(s*b*(M-1)) * g(s)^M; the support itself stays
// single-sequence.
struct MetricDistribution {
    enum class Kind { correct_path, incorrect_path };
    struct Entry {
        double z;  // metric value; -inf marks zero-likelihood outcomes
        double p;
        int delta;
    };

    Kind kind = Kind::correct_path;
    std::vector<Entry> support;
    int c = 0, b = 0;
    int lambda = 0;  // i_max + d_max + 1
    int M = 1;

    double g(double sigma) const;  // M-sequence moment generating function
    double mass() const;           // sum p (single sequence)
    double mean() const;           // sum p*z over finite-z entries
    double min_finite_z() const;   // min z over finite-z entries
};

std::pair<MetricDistribution, MetricDistribution> build_distributions(
    int c, int b, const channel::ChannelParams& params, int i_max,
    int d_max, int M);

// g0(sigma0) = 1, sigma0 < 0. Throws std::domain_error when no root exists
// in (-80, 0) (channel noise below the analyzable regime).
double solve_sigma0(const MetricDistribution& correct);

// Smallest sigma1 > 0 with g1(sigma1) = 2^(-b) lambda^(-M) (target
// 2^(-b') with b' = b + M log2 lambda). Throws std::domain_error when the
// MGF never reaches the target.
double solve_sigma1(const MetricDistribution& incorrect);

struct CutoffReport {
    double p = 0.0;
    double sigma0 = 0.0, sigma1 = 0.0;
    int iterations = 0;
    double residual = 0.0;  // |sigma0 + sigma1| (or shortcut |g0(-1/2)-1|)
    bool converged = false;
};

// Ps either fixed or proportional to the bisected p.
struct PsMode {
    bool fixed = false;
    double value = 0.0;
    static PsMode fixed_at(double v) { return {true, v}; }
    static PsMode ratio(double beta) { return {false, beta}; }
};

// Bisection on p with Pi = p, Pd = alpha*p: finds the largest p whose
// exponents satisfy sigma0 + sigma1 <= 0 (mean decoding effort per block
// stays bounded), i.e. |sigma0 + sigma1| <= eps at the returned p.
CutoffReport find_cutoff_probability(int c, int b, int i_max, int d_max,
                                     double alpha, PsMode ps, int M,
                                     double eps);

// Same boundary via the single condition g0^(M)(-1/2) = 1, valid when the
// shifted MGF identity links g1 to g0 (Pi = Pd, or one of them zero, at
// the natural drift direction).
CutoffReport shortcut_cutoff_pi_eq_pd(int c, int b, int i_max, int d_max,
                                      double alpha, PsMode ps, int M,
                                      double eps);

struct ComplexityReport {
    double sigma0 = 0.0, sigma1 = 0.0;
    double e_zeta_incorrect = 0.0;  // mean incorrect-branch metric
    double z_min_correct = 0.0;     // minimum correct-path metric value
    double z_min_incorrect = 0.0;
    double b_prime = 0.0;
    double c1_prime = 0.0, c1 = 0.0, c2 = 0.0, c3 = 0.0;
    double cav_bound = 0.0;  // +inf when sigma0 + sigma1 >= 0
    bool bounded = false;
};

// Mean-computation bound per block for the single-sequence decoder with
// threshold quantum delta.
ComplexityReport complexity_bound(int c, int b,
                                  const channel::ChannelParams& params,
                                  int i_max, int d_max, double delta);

}  // namespace ids::cutoff
