// Command-line front end: encoding, channel simulation, decoding, BER and
// complexity experiments, cutoff computation, and figure-reproduction
// recipes. Every experiment emits the flat CSV schema of the harness.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ids/channel.hpp"
#include "ids/convcode.hpp"
#include "ids/cutoff.hpp"
#include "ids/fano.hpp"
#include "ids/harness.hpp"
#include "ids/lattice.hpp"
#include "ids/viterbi.hpp"

using namespace ids;

namespace {

struct DecoderFlags {
    double delta = 3.0;
    int i_max = 3;
    int d_max = 3;
    int drift_cap = 30;
    long long step_cap = 100000;
    std::string metric_mode = "asymptotic";

    void attach(CLI::App* cmd) {
        cmd->add_option("--delta", delta, "threshold quantum (log2 units)");
        cmd->add_option("--imax", i_max, "max insertions per block per copy");
        cmd->add_option("--dmax", d_max, "max deletions per block per copy");
        cmd->add_option("--drift-cap", drift_cap, "absolute drift bound");
        cmd->add_option("--step-cap", step_cap, "forward steps before giving up");
        cmd->add_option("--metric-mode", metric_mode,
                        "branch metric tail handling")
            ->check(CLI::IsMember({"asymptotic", "exact"}));
    }

    fano::DecoderConfig build() const {
        fano::DecoderConfig cfg;
        cfg.delta = delta;
        cfg.i_max = i_max;
        cfg.d_max = d_max;
        cfg.drift_cap = drift_cap;
        cfg.step_cap = step_cap;
        cfg.metric_mode = metric_mode == "exact"
                              ? fano::MetricMode::exact_tail
                              : fano::MetricMode::asymptotic_bias;
        return cfg;
    }
};

channel::ChannelParams make_point(double p, const std::string& mode,
                                  double ps) {
    if (mode == "matched") return {p, p, ps};
    if (mode == "del-only") return {0.0, p, ps};
    if (mode == "ins-only") return {p, 0.0, ps};
    throw CLI::ValidationError("--mode", "unknown channel mode " + mode);
}

std::unique_ptr<std::ostream> open_out(const std::string& path,
                                       std::ostream*& out) {
    if (path.empty() || path == "-") {
        out = &std::cout;
        return nullptr;
    }
    auto f = std::make_unique<std::ofstream>(path);
    if (!*f) throw CLI::ValidationError("--out", "cannot open " + path);
    out = f.get();
    return f;
}

Bits read_bits_arg(const std::string& arg) {
    if (arg != "-") return bits_from_string(arg);
    std::string line, all;
    while (std::getline(std::cin, line)) all += line;
    return bits_from_string(all);
}

cutoff::PsMode parse_ps_mode(const std::string& s) {
    const auto colon = s.find(':');
    const std::string kind = s.substr(0, colon);
    const double v = colon == std::string::npos
                         ? 0.0
                         : std::stod(s.substr(colon + 1));
    if (kind == "fixed") return cutoff::PsMode::fixed_at(v);
    if (kind == "ratio") return cutoff::PsMode::ratio(v);
    throw CLI::ValidationError("--ps-mode",
                               "expected fixed:<v> or ratio:<v>, got " + s);
}

struct RecipeEntry {
    const char* series;
    const char* code;
    const char* kind;  // fano | viterbi
    int M;
    channel::ChannelParams point;
    double ref;        // published value this row should land near
    long long frames;  // 0 = adaptive on bit errors
    bool heavy;        // skipped unless --full
};

int run_recipe(const std::vector<RecipeEntry>& entries, bool full,
               const DecoderFlags& dec, long long step_cap_ber, int L,
               std::uint64_t seed, int threads, std::ostream& out) {
    out << harness::csv_header() << '\n';
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const RecipeEntry& e = entries[i];
        if (e.heavy && !full) {
            out << "# series=" << e.series << " Pi=" << e.point.Pi << " Pd="
                << e.point.Pd << " skipped (rerun with --full)\n";
            continue;
        }
        harness::ExperimentConfig cfg;
        cfg.code_name = e.code;
        cfg.L = L;
        cfg.M = e.M;
        cfg.decoder_kind = e.kind;
        cfg.decoder = dec.build();
        if (e.frames == 0) cfg.decoder.step_cap = step_cap_ber;
        cfg.frames = e.frames;
        cfg.threads = threads;
        const std::uint64_t ps = channel::mix_seed(seed, i + 1);
        const harness::PointResult r = harness::run_point(cfg, e.point, ps);
        char ref[64];
        std::snprintf(ref, sizeof(ref), "%.6g", e.ref);
        out << "# series=" << e.series << " ref=" << ref << '\n'
            << harness::csv_row(cfg.code_name, cfg.decoder, r) << '\n'
            << std::flush;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"convolutional coding over insertion/deletion/substitution "
                 "channels: sequential and trellis decoding, cutoff analysis, "
                 "Monte-Carlo experiments"};
    app.set_config("--config", "", "key = value config file");
    app.require_subcommand(1);

    // ---- encode ------------------------------------------------------------
    std::string enc_code = "CC1", enc_info, enc_out;
    std::uint64_t enc_offset_seed = 0;
    bool enc_scramble = false;
    auto* enc = app.add_subcommand("encode", "terminated encoding of info bits");
    enc->add_option("--code", enc_code, "code name (CC1|CC2|CC3)");
    enc->add_option("--info", enc_info, "info bits, or - for stdin")->required();
    enc->add_flag("--scramble", enc_scramble, "apply the pseudorandom offset");
    enc->add_option("--offset-seed", enc_offset_seed, "offset sequence seed");

    // ---- channel -----------------------------------------------------------
    double ch_pi = 0.0, ch_pd = 0.0, ch_ps = 0.0;
    int ch_copies = 1;
    std::uint64_t ch_seed = 1;
    std::string ch_input;
    auto* ch = app.add_subcommand("channel", "transmit bits through the channel");
    ch->add_option("--pi", ch_pi, "insertion probability");
    ch->add_option("--pd", ch_pd, "deletion probability");
    ch->add_option("--ps", ch_ps, "substitution probability");
    ch->add_option("--copies", ch_copies, "independent received copies");
    ch->add_option("--seed", ch_seed, "channel seed");
    ch->add_option("--input", ch_input, "bits to transmit, or - for stdin")
        ->required();

    // ---- decode ------------------------------------------------------------
    std::string dc_code = "CC1", dc_kind = "fano";
    std::vector<std::string> dc_rx;
    int dc_L = 0;
    double dc_pi = 0.0, dc_pd = 0.0, dc_ps = 0.0;
    std::uint64_t dc_offset_seed = 0;
    bool dc_scrambled = false;
    DecoderFlags dc_dec;
    auto* dc = app.add_subcommand("decode", "decode received sequences");
    dc->add_option("--code", dc_code, "code name");
    dc->add_option("--decoder", dc_kind, "fano | viterbi")
        ->check(CLI::IsMember({"fano", "viterbi"}));
    dc->add_option("--received", dc_rx,
                   "received bit sequence (repeat for extra copies)")
        ->required();
    dc->add_option("--L", dc_L, "info blocks")->required();
    dc->add_option("--pi", dc_pi, "insertion probability");
    dc->add_option("--pd", dc_pd, "deletion probability");
    dc->add_option("--ps", dc_ps, "substitution probability");
    dc->add_flag("--scrambled", dc_scrambled,
                 "input was offset-scrambled before transmission");
    dc->add_option("--offset-seed", dc_offset_seed, "offset sequence seed");
    dc_dec.attach(dc);

    // ---- ber ----------------------------------------------------------------
    std::string ber_code = "CC1", ber_mode = "matched", ber_kind = "fano",
                ber_out;
    std::vector<double> ber_p;
    double ber_ps = 0.0;
    int ber_L = 300, ber_M = 1, ber_threads = 0;
    long long ber_frames = 0;
    std::uint64_t ber_seed = 1;
    DecoderFlags ber_dec;
    auto* ber = app.add_subcommand("ber", "Monte-Carlo bit error rate");
    ber->add_option("--code", ber_code, "code name");
    ber->add_option("--p", ber_p, "channel error probabilities (grid)")
        ->required()
        ->delimiter(',');
    ber->add_option("--mode", ber_mode, "matched | del-only | ins-only")
        ->check(CLI::IsMember({"matched", "del-only", "ins-only"}));
    ber->add_option("--ps", ber_ps, "substitution probability");
    ber->add_option("--copies", ber_M, "received copies per frame");
    ber->add_option("--decoder", ber_kind, "fano | viterbi")
        ->check(CLI::IsMember({"fano", "viterbi"}));
    ber->add_option("--L", ber_L, "info blocks per frame");
    ber->add_option("--frames", ber_frames,
                    "frames per point (0 = adaptive to 100 bit errors)");
    ber->add_option("--seed", ber_seed, "master seed");
    ber->add_option("--threads", ber_threads, "worker threads (0 = auto)");
    ber->add_option("--out", ber_out, "CSV path (default stdout)");
    ber_dec.attach(ber);

    // ---- nu -----------------------------------------------------------------
    std::string nu_code = "CC1", nu_mode = "matched", nu_out;
    std::vector<double> nu_p;
    double nu_ps = 0.0;
    int nu_L = 300, nu_M = 1, nu_threads = 0;
    long long nu_frames = 200;
    std::uint64_t nu_seed = 1;
    DecoderFlags nu_dec;
    auto* nu = app.add_subcommand(
        "nu", "complexity reduction factor (trellis nodes / mean Fano steps)");
    nu->add_option("--code", nu_code, "code name");
    nu->add_option("--p", nu_p, "channel error probabilities (grid)")
        ->required()
        ->delimiter(',');
    nu->add_option("--mode", nu_mode, "matched | del-only | ins-only")
        ->check(CLI::IsMember({"matched", "del-only", "ins-only"}));
    nu->add_option("--ps", nu_ps, "substitution probability");
    nu->add_option("--copies", nu_M, "received copies per frame");
    nu->add_option("--L", nu_L, "info blocks per frame");
    nu->add_option("--frames", nu_frames, "frames per point");
    nu->add_option("--seed", nu_seed, "master seed");
    nu->add_option("--threads", nu_threads, "worker threads (0 = auto)");
    nu->add_option("--out", nu_out, "CSV path (default stdout)");
    nu_dec.attach(nu);

    // ---- cutoff ---------------------------------------------------------------
    int co_c = 3, co_b = 1, co_imax = 3, co_dmax = 3, co_M = 1;
    double co_alpha = 1.0, co_eps = 1e-6, co_cav_delta = 0.0;
    std::string co_ps_mode = "fixed:0", co_method = "full", co_out;
    auto* co = app.add_subcommand(
        "cutoff", "largest channel probability with bounded mean decoding effort");
    co->add_option("-c,--c", co_c, "code output bits per block");
    co->add_option("-b,--b", co_b, "code input bits per block");
    co->add_option("--imax", co_imax, "max insertions per block");
    co->add_option("--dmax", co_dmax, "max deletions per block");
    co->add_option("--alpha", co_alpha, "Pd = alpha * Pi along the search path");
    co->add_option("--ps-mode", co_ps_mode, "fixed:<v> or ratio:<v>");
    co->add_option("--copies", co_M, "received copies");
    co->add_option("--eps", co_eps, "convergence tolerance");
    co->add_option("--method", co_method, "full | shortcut")
        ->check(CLI::IsMember({"full", "shortcut"}));
    co->add_option("--complexity-delta", co_cav_delta,
                   "also print the mean-computation bound for this threshold "
                   "quantum (0 = off)");
    co->add_option("--out", co_out, "CSV path (default stdout)");

    // ---- reproduce --------------------------------------------------------------
    std::string rp_fig, rp_out;
    bool rp_full = false;
    int rp_L = 300, rp_threads = 0;
    long long rp_step_cap = 2000000;
    std::uint64_t rp_seed = 20260815;
    DecoderFlags rp_dec;
    auto* rp = app.add_subcommand("reproduce",
                                  "published-figure reproduction recipes");
    rp->add_option("figure", rp_fig, "fig5 | fig6 | fig7 | fig8 | fig9")
        ->required()
        ->check(CLI::IsMember({"fig5", "fig6", "fig7", "fig8", "fig9"}));
    rp->add_flag("--full", rp_full,
                 "include series that need hours of compute");
    rp->add_option("--L", rp_L, "info blocks per frame");
    rp->add_option("--seed", rp_seed, "master seed");
    rp->add_option("--threads", rp_threads, "worker threads (0 = auto)");
    rp->add_option("--ber-step-cap", rp_step_cap,
                   "step cap for adaptive BER series");
    rp->add_option("--out", rp_out, "CSV path (default stdout)");
    rp_dec.attach(rp);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*enc) {
            const auto& code = convcode::lookup(enc_code);
            Bits info = read_bits_arg(enc_info);
            Bits cw = convcode::encode_terminated(code, info);
            if (enc_scramble)
                cw = channel::apply_offset(
                    cw, channel::offset_sequence(cw.size(), enc_offset_seed));
            std::cout << bits_to_string(cw) << '\n';
            return 0;
        }

        if (*ch) {
            channel::ChannelParams p{ch_pi, ch_pd, ch_ps};
            const Bits x = read_bits_arg(ch_input);
            const channel::ReceivedSet rx =
                channel::transmit_many(p, x, ch_copies, ch_seed);
            for (const auto& y : rx.sequences)
                std::cout << bits_to_string(y) << '\n';
            return 0;
        }

        if (*dc) {
            const auto& code = convcode::lookup(dc_code);
            const channel::ChannelParams p{dc_pi, dc_pd, dc_ps};
            const fano::DecoderConfig cfg = dc_dec.build();
            channel::ReceivedSet rx;
            for (const auto& s : dc_rx)
                rx.sequences.push_back(bits_from_string(s));
            const std::size_t off_len =
                static_cast<std::size_t>(code.c) * (dc_L + code.m);
            const Bits offset =
                dc_scrambled ? channel::offset_sequence(off_len, dc_offset_seed)
                             : Bits(off_len, 0);
            fano::DecodeResult r;
            if (dc_kind == "viterbi") {
                if (rx.sequences.size() != 1)
                    throw std::invalid_argument(
                        "decode: the trellis decoder takes exactly one copy");
                r = viterbi::viterbi_decode(code, cfg, p, rx.sequences[0],
                                            offset, dc_L);
            } else {
                r = fano::fano_decode(code, cfg, p, rx, offset, dc_L);
            }
            std::cout << bits_to_string(r.decoded) << '\n';
            std::cerr << "completed=" << (r.completed ? 1 : 0)
                      << " forward_steps=" << r.forward_steps
                      << " branch_evaluations=" << r.branch_evaluations
                      << " metric=" << r.final_metric << '\n';
            return r.completed ? 0 : 3;
        }

        if (*ber || *nu) {
            const bool is_ber = static_cast<bool>(*ber);
            harness::ExperimentConfig cfg;
            cfg.code_name = is_ber ? ber_code : nu_code;
            cfg.L = is_ber ? ber_L : nu_L;
            cfg.M = is_ber ? ber_M : nu_M;
            cfg.decoder_kind = is_ber ? ber_kind : "fano";
            cfg.decoder = (is_ber ? ber_dec : nu_dec).build();
            cfg.frames = is_ber ? ber_frames : nu_frames;
            cfg.seed = is_ber ? ber_seed : nu_seed;
            cfg.threads = is_ber ? ber_threads : nu_threads;
            const auto& ps = is_ber ? ber_ps : nu_ps;
            const auto& mode = is_ber ? ber_mode : nu_mode;
            for (double p : (is_ber ? ber_p : nu_p))
                cfg.points.push_back(make_point(p, mode, ps));
            std::ostream* out = nullptr;
            auto file = open_out(is_ber ? ber_out : nu_out, out);
            harness::run_grid(cfg, out);
            return 0;
        }

        if (*co) {
            std::ostream* out = nullptr;
            auto file = open_out(co_out, out);
            const cutoff::PsMode mode = parse_ps_mode(co_ps_mode);
            const cutoff::CutoffReport r =
                co_method == "shortcut"
                    ? cutoff::shortcut_cutoff_pi_eq_pd(co_c, co_b, co_imax,
                                                       co_dmax, co_alpha, mode,
                                                       co_M, co_eps)
                    : cutoff::find_cutoff_probability(co_c, co_b, co_imax,
                                                      co_dmax, co_alpha, mode,
                                                      co_M, co_eps);
            *out << "p,sigma0,sigma1,iterations,residual,converged\n";
            char row[256];
            std::snprintf(row, sizeof(row), "%.10g,%.10g,%.10g,%d,%.3g,%d\n",
                          r.p, r.sigma0, r.sigma1, r.iterations, r.residual,
                          r.converged ? 1 : 0);
            *out << row;
            if (co_cav_delta > 0.0) {
                const channel::ChannelParams at{r.p, co_alpha * r.p,
                                                mode.fixed ? mode.value
                                                           : mode.value * r.p};
                // The bound diverges at the cutoff itself; report it a
                // notch below instead.
                const channel::ChannelParams inside{0.5 * at.Pi, 0.5 * at.Pd,
                                                    at.Ps};
                const cutoff::ComplexityReport cb = cutoff::complexity_bound(
                    co_c, co_b, inside, co_imax, co_dmax, co_cav_delta);
                std::snprintf(row, sizeof(row),
                              "# Cav(p/2=%.6g, delta=%.3g) <= %.6g\n",
                              inside.Pi, co_cav_delta, cb.cav_bound);
                *out << row;
            }
            return r.converged ? 0 : 4;
        }

        if (*rp) {
            std::ostream* out = nullptr;
            auto file = open_out(rp_out, out);
            std::vector<RecipeEntry> entries;
            if (rp_fig == "fig5") {
                entries = {
                    {"CC1-fano", "CC1", "fano", 1, {3e-3, 3e-3, 0}, 4.58e-4, 0, false},
                    {"CC1-fano", "CC1", "fano", 1, {5e-3, 5e-3, 0}, 8.48e-4, 0, false},
                    {"CC1-fano", "CC1", "fano", 1, {1e-2, 1e-2, 0}, 2.46333e-3, 0, false},
                    {"CC1-fano", "CC1", "fano", 1, {2e-2, 2e-2, 0}, 8.132e-3, 0, false},
                    {"CC1-fano", "CC1", "fano", 1, {4e-2, 4e-2, 0}, 3.044561e-2, 0, false},
                    {"CC1-viterbi", "CC1", "viterbi", 1, {3e-3, 3e-3, 0}, 3.5667e-4, 0, true},
                    {"CC1-viterbi", "CC1", "viterbi", 1, {5e-3, 5e-3, 0}, 6.42e-4, 0, true},
                    {"CC1-viterbi", "CC1", "viterbi", 1, {1e-2, 1e-2, 0}, 1.71133e-3, 0, false},
                    {"CC1-viterbi", "CC1", "viterbi", 1, {2e-2, 2e-2, 0}, 5.46733e-3, 0, false},
                    {"CC1-viterbi", "CC1", "viterbi", 1, {4e-2, 4e-2, 0}, 2.1534e-2, 0, false},
                    {"CC2-fano-ps0.02", "CC2", "fano", 1, {1e-2, 1e-2, 0.02}, 2.76e-4, 0, false},
                    {"CC2-fano-ps0.02", "CC2", "fano", 1, {2e-2, 2e-2, 0.02}, 1.6079e-3, 0, true},
                    {"CC2-fano", "CC2", "fano", 1, {2e-2, 2e-2, 0}, 8.2e-5, 0, false},
                    {"CC2-fano", "CC2", "fano", 1, {4e-2, 4e-2, 0}, 1.85989e-3, 0, true},
                    {"CC2-viterbi", "CC2", "viterbi", 1, {4e-2, 4e-2, 0}, 1.278e-3, 0, true},
                    {"CC3-fano", "CC3", "fano", 1, {3e-2, 3e-2, 0}, 3.37778e-5, 0, true},
                    {"CC3-fano", "CC3", "fano", 1, {4e-2, 4e-2, 0}, 1.3765e-4, 0, true},
                };
            } else if (rp_fig == "fig6") {
                entries = {
                    {"CC1-M2", "CC1", "fano", 2, {1e-2, 1e-2, 0}, 3.436667e-4, 0, false},
                    {"CC1-M3", "CC1", "fano", 3, {1e-2, 1e-2, 0}, 8.067e-5, 0, false},
                    {"CC2-M2", "CC2", "fano", 2, {3e-2, 3e-2, 0}, 2.833e-5, 0, true},
                    {"CC2-M2", "CC2", "fano", 2, {4e-2, 4e-2, 0}, 7.56667e-5, 0, true},
                    {"CC2-M2", "CC2", "fano", 2, {6e-2, 6e-2, 0}, 3.1247e-4, 0, true},
                    {"CC2-M3", "CC2", "fano", 3, {3.5e-2, 3.5e-2, 0}, 1.853e-5, 0, true},
                };
            } else if (rp_fig == "fig7") {
                entries = {
                    {"CC1-del-only", "CC1", "fano", 1, {0, 1e-2, 0}, 1.10067e-3, 0, false},
                    {"CC1-ins-only", "CC1", "fano", 1, {1e-2, 0, 0}, 5.42e-4, 0, false},
                    {"CC1-M2-del-only", "CC1", "fano", 2, {0, 2e-2, 0}, 1.08e-4, 0, true},
                    {"CC1-M2-del-only", "CC1", "fano", 2, {0, 4e-2, 0}, 5.58e-4, 0, true},
                    {"CC2-del-only", "CC2", "fano", 1, {0, 4e-2, 0}, 3.733e-5, 0, true},
                    {"CC2-del-only", "CC2", "fano", 1, {0, 6e-2, 0}, 2.7733e-4, 0, true},
                };
            } else if (rp_fig == "fig8") {
                entries = {
                    {"CC1-nu", "CC1", "fano", 1, {3e-3, 3e-3, 0}, 104.8786, 200, false},
                    {"CC1-nu", "CC1", "fano", 1, {5e-3, 5e-3, 0}, 102.9429, 200, false},
                    {"CC1-nu", "CC1", "fano", 1, {1e-2, 1e-2, 0}, 93.6214, 200, false},
                    {"CC1-nu", "CC1", "fano", 1, {2e-2, 2e-2, 0}, 55.8714, 200, false},
                    {"CC1-nu", "CC1", "fano", 1, {4e-2, 4e-2, 0}, 6.3786, 200, true},
                    {"CC2-nu", "CC2", "fano", 1, {1e-2, 1e-2, 0}, 2702.0, 200, false},
                    {"CC2-nu-ps0.02", "CC2", "fano", 1, {1e-2, 1e-2, 0.02}, 795.7143, 200, false},
                    {"CC3-nu", "CC3", "fano", 1, {1e-2, 1e-2, 0}, 4.5109e4, 200, false},
                };
            } else {  // fig9
                entries = {
                    {"CC1-M2-nu", "CC1", "fano", 2, {1e-2, 1e-2, 0}, 5764.2, 200, false},
                    {"CC1-M2-nu", "CC1", "fano", 2, {2e-2, 2e-2, 0}, 3428.9, 200, false},
                    {"CC2-M2-nu", "CC2", "fano", 2, {1e-2, 1e-2, 0}, 1.6432e5, 200, true},
                };
            }
            const int rc = run_recipe(entries, rp_full, rp_dec, rp_step_cap,
                                      rp_L, rp_seed, rp_threads, *out);
            if (rp_fig == "fig8")
                *out << "# cutoff ticks: Ps=0 -> 0.0192, fixed Ps=0.02 -> 0.0057\n";
            if (rp_fig == "fig9")
                *out << "# cutoff tick: M=2, Ps=0 -> 0.0326\n";
            return rc;
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return 2;
    }
    return 0;
}
