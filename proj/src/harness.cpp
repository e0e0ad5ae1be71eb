#include "ids/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "ids/viterbi.hpp"

namespace ids::harness {

namespace {

std::uint64_t frame_key(long long frame, int stream) {
    return static_cast<std::uint64_t>(frame) * 4u +
           static_cast<std::uint64_t>(stream);
}

struct FrameOutcome {
    long long bit_errors = 0;
    long long forward_steps = 0;
    bool timeout = false;
};

FrameOutcome run_frame(const convcode::CodeSpec& code,
                       const ExperimentConfig& cfg,
                       const channel::ChannelParams& point,
                       std::uint64_t point_seed, long long frame) {
    const int L = cfg.L;
    const int b = code.b;
    const int frame_bits = L * b;

    Bits info(static_cast<std::size_t>(frame_bits));
    channel::SplitMix64 rng(channel::mix_seed(point_seed, frame_key(frame, 0)));
    for (auto& bit : info) bit = rng.bit();

    const Bits encoded = convcode::encode_terminated(code, info);
    const Bits offset = channel::offset_sequence(
        encoded.size(), channel::mix_seed(point_seed, frame_key(frame, 1)));
    const Bits tx = channel::apply_offset(encoded, offset);

    const channel::ReceivedSet rx = channel::transmit_many(
        point, tx, cfg.M, channel::mix_seed(point_seed, frame_key(frame, 2)));

    fano::DecodeResult dec;
    if (cfg.decoder_kind == "viterbi") {
        if (cfg.M != 1)
            throw std::invalid_argument(
                "run_point: viterbi supports a single received sequence");
        dec = viterbi::viterbi_decode(code, cfg.decoder, point,
                                      rx.sequences[0], offset, L);
    } else {
        dec = fano::fano_decode(code, cfg.decoder, point, rx, offset, L);
    }

    FrameOutcome out;
    out.forward_steps = dec.forward_steps;
    out.timeout = !dec.completed;
    for (int k = 0; k < frame_bits; ++k) {
        if (k >= static_cast<int>(dec.decoded.size()))
            ++out.bit_errors;  // absent bits count as errors
        else if (dec.decoded[k] != info[k])
            ++out.bit_errors;
    }
    return out;
}

}  // namespace

Interval wilson_interval(long long errors, long long total) {
    if (total <= 0) return {0.0, 0.0};
    const double z = 1.959963984540054;  // 97.5% normal quantile
    const double n = static_cast<double>(total);
    const double phat = static_cast<double>(errors) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (phat + z2 / (2.0 * n)) / denom;
    const double half =
        z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("IDS_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

PointResult run_point(const ExperimentConfig& cfg,
                      const channel::ChannelParams& point,
                      std::uint64_t point_seed) {
    point.validate();
    cfg.decoder.validate();
    const convcode::CodeSpec code = convcode::lookup(cfg.code_name);
    if (cfg.L < 1) throw std::invalid_argument("run_point: L must be >= 1");
    if (cfg.M < 1) throw std::invalid_argument("run_point: M must be >= 1");

    const auto t0 = std::chrono::steady_clock::now();
    const int threads = resolve_threads(cfg.threads);

    const bool adaptive = cfg.frames == 0;
    const long long max_frames = adaptive ? 10000 : cfg.frames;
    const long long min_frames = adaptive ? 50 : cfg.frames;
    const long long target_errors = 100;

    PointResult res;
    res.point = point;
    res.M = cfg.M;
    res.seed = point_seed;

    std::mutex merge_mu;
    std::exception_ptr first_error;

    long long done = 0;
    while (done < max_frames) {
        // Fixed-size rounds keep the adaptive stopping rule a pure
        // function of aggregate counts at round boundaries, so the frame
        // set depends on neither thread timing nor thread count.
        const long long round_end =
            std::min(max_frames, done + (adaptive ? 50 : max_frames));
        std::atomic<long long> next(done);
        auto worker = [&]() {
            long long errs = 0, steps = 0, touts = 0, terrs = 0;
            try {
                for (;;) {
                    const long long f = next.fetch_add(1);
                    if (f >= round_end) break;
                    const FrameOutcome o =
                        run_frame(code, cfg, point, point_seed, f);
                    errs += o.bit_errors;
                    steps += o.forward_steps;
                    if (o.timeout) {
                        ++touts;
                        terrs += o.bit_errors;
                    }
                }
            } catch (...) {
                std::lock_guard<std::mutex> lk(merge_mu);
                if (!first_error) first_error = std::current_exception();
            }
            std::lock_guard<std::mutex> lk(merge_mu);
            res.bit_errors += errs;
            res.f_av += static_cast<double>(steps);
            res.timeouts += touts;
            res.timeout_bit_errors += terrs;
        };
        if (threads == 1) {
            worker();
        } else {
            std::vector<std::thread> pool;
            pool.reserve(static_cast<std::size_t>(threads));
            for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
            for (auto& th : pool) th.join();
        }
        if (first_error) std::rethrow_exception(first_error);
        done = round_end;
        if (adaptive && done >= min_frames && res.bit_errors >= target_errors)
            break;
    }

    res.frames = done;
    res.bits = done * static_cast<long long>(cfg.L) * code.b;
    res.ber = res.bits > 0
                  ? static_cast<double>(res.bit_errors) /
                        static_cast<double>(res.bits)
                  : 0.0;
    const Interval ci = wilson_interval(res.bit_errors, res.bits);
    res.ci_lo = ci.lo;
    res.ci_hi = ci.hi;
    res.f_av = done > 0 ? res.f_av / static_cast<double>(done) : 0.0;

    const int Ltot = cfg.L + code.m;
    const long long n_nom = std::llround(
        code.c * Ltot * (1.0 - point.Pd) / (1.0 - point.Pi));
    if (cfg.M == 1) {
        res.n_tot = viterbi::trellis_node_count(code, cfg.decoder, cfg.L,
                                                static_cast<int>(n_nom));
    } else {
        std::vector<int> Ns(static_cast<std::size_t>(cfg.M),
                            static_cast<int>(n_nom));
        res.n_tot =
            viterbi::trellis_node_count_multi(code, cfg.decoder, cfg.L, Ns);
    }
    res.nu = res.f_av > 0.0 ? static_cast<double>(res.n_tot) / res.f_av : 0.0;

    res.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    return res;
}

std::string csv_header() {
    return "code,Pi,Pd,Ps,M,delta,frames,bits,bit_errors,BER,ci_lo,ci_hi,"
           "F_av,N_tot,nu,timeouts,seed";
}

namespace {
std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}
}  // namespace

std::string csv_row(const std::string& code_name,
                    const fano::DecoderConfig& dec, const PointResult& r) {
    std::string row;
    row += code_name;
    row += ',' + fmt_double(r.point.Pi);
    row += ',' + fmt_double(r.point.Pd);
    row += ',' + fmt_double(r.point.Ps);
    row += ',' + std::to_string(r.M);
    row += ',' + fmt_double(dec.delta);
    row += ',' + std::to_string(r.frames);
    row += ',' + std::to_string(r.bits);
    row += ',' + std::to_string(r.bit_errors);
    row += ',' + fmt_double(r.ber);
    row += ',' + fmt_double(r.ci_lo);
    row += ',' + fmt_double(r.ci_hi);
    row += ',' + fmt_double(r.f_av);
    row += ',' + std::to_string(r.n_tot);
    row += ',' + fmt_double(r.nu);
    row += ',' + std::to_string(r.timeouts);
    row += ',' + std::to_string(r.seed);
    return row;
}

std::vector<PointResult> run_grid(const ExperimentConfig& cfg,
                                  std::ostream* out) {
    std::vector<PointResult> results;
    if (out) *out << csv_header() << '\n' << std::flush;
    for (std::size_t i = 0; i < cfg.points.size(); ++i) {
        const std::uint64_t ps =
            channel::mix_seed(cfg.seed, static_cast<std::uint64_t>(i) + 1);
        results.push_back(run_point(cfg, cfg.points[i], ps));
        if (out)
            *out << csv_row(cfg.code_name, cfg.decoder, results.back())
                 << '\n'
                 << std::flush;
    }
    return results;
}

std::vector<ComparePair> compare_decoders(const ExperimentConfig& cfg,
                                          std::ostream* out) {
    if (cfg.M != 1)
        throw std::invalid_argument("compare_decoders: requires M = 1");
    std::vector<ComparePair> pairs;
    if (out) *out << csv_header() << '\n' << std::flush;
    for (std::size_t i = 0; i < cfg.points.size(); ++i) {
        const std::uint64_t ps =
            channel::mix_seed(cfg.seed, static_cast<std::uint64_t>(i) + 1);
        ExperimentConfig fano_cfg = cfg;
        fano_cfg.decoder_kind = "fano";
        ExperimentConfig vit_cfg = cfg;
        vit_cfg.decoder_kind = "viterbi";
        ComparePair pair{run_point(fano_cfg, cfg.points[i], ps),
                         run_point(vit_cfg, cfg.points[i], ps)};
        if (out) {
            *out << "# decoder=fano\n"
                 << csv_row(cfg.code_name, cfg.decoder, pair.fano) << '\n'
                 << "# decoder=viterbi\n"
                 << csv_row(cfg.code_name, cfg.decoder, pair.viterbi) << '\n'
                 << std::flush;
        }
        pairs.push_back(std::move(pair));
    }
    return pairs;
}

}  // namespace ids::harness
