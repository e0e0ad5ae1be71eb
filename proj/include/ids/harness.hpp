#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ids/channel.hpp"
#include "ids/convcode.hpp"
#include "ids/fano.hpp"

namespace ids::harness {

struct ExperimentConfig {
    std::string code_name = "CC1";
    int L = 300;
    std::vector<channel::ChannelParams> points;
    int M = 1;
    fano::DecoderConfig decoder;
    std::string decoder_kind = "fano";  // fano | viterbi
    // 0 = adaptive: run frame batches until >= 100 bit errors, between 50
    // and 10000 frames; > 0 = exactly this many frames.
    long long frames = 0;
    std::uint64_t seed = 1;
    int threads = 0;  // 0 = IDS_THREADS env var, else hardware count
};

struct PointResult {
    channel::ChannelParams point;
    int M = 1;
    long long frames = 0;
    long long bits = 0;
    long long bit_errors = 0;
    long long timeouts = 0;  // frames the decoder did not complete
    long long timeout_bit_errors = 0;  // share of bit_errors from those frames
    double ber = 0.0, ci_lo = 0.0, ci_hi = 0.0;
    double f_av = 0.0;   // mean forward steps per frame
    long long n_tot = 0;  // trellis size at the nominal received length
    double nu = 0.0;      // n_tot / f_av
    double wall_seconds = 0.0;
    std::uint64_t seed = 0;
};

struct Interval {
    double lo = 0.0, hi = 0.0;
};
// Wilson score interval at 95% confidence for errors/total.
Interval wilson_interval(long long errors, long long total);

int resolve_threads(int requested);

// Simulates one channel point: random frames, encode, scramble, transmit
// M copies, decode, count bit errors (bits missing from partial outputs
// count as errors). Frame draws depend only on (point_seed, frame index),
// so results are independent of thread schedule and batch boundaries.
PointResult run_point(const ExperimentConfig& cfg,
                      const channel::ChannelParams& point,
                      std::uint64_t point_seed);

std::string csv_header();
std::string csv_row(const std::string& code_name,
                    const fano::DecoderConfig& dec, const PointResult& r);

// Runs every grid point with per-point sub-seeds; when out is non-null,
// writes header plus one row per point, flushing after each row.
std::vector<PointResult> run_grid(const ExperimentConfig& cfg,
                                  std::ostream* out);

struct ComparePair {
    PointResult fano;
    PointResult viterbi;
};
// Both decoders on identical frames and noise (same sub-seeds); M = 1.
std::vector<ComparePair> compare_decoders(const ExperimentConfig& cfg,
                                          std::ostream* out);

}  // namespace ids::harness
