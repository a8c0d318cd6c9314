// Command-line front end: saddlepoint factors, correction-factor sweeps,
// pairwise-error-probability evaluation, and coded BER simulation.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "llrcorr/channel.hpp"
#include "llrcorr/correction.hpp"
#include "llrcorr/csv.hpp"
#include "llrcorr/experiments.hpp"
#include "llrcorr/pep.hpp"
#include "llrcorr/saddlepoint.hpp"

namespace {

void write_output(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file: " + out_path);
    f << text;
}

const std::map<std::string, llrcorr::CorrectionMethod> kMethodNames = {
    {"saddlepoint", llrcorr::CorrectionMethod::saddlepoint},
    {"gmi", llrcorr::CorrectionMethod::gmi},
    {"wlsf", llrcorr::CorrectionMethod::wlsf},
    {"gauss_moment", llrcorr::CorrectionMethod::gauss_moment},
    {"low_snr", llrcorr::CorrectionMethod::low_snr},
    {"high_snr", llrcorr::CorrectionMethod::high_snr},
};

const std::map<std::string, llrcorr::LlrMode> kModeNames = {
    {"uncorrected", llrcorr::LlrMode::uncorrected},
    {"saddlepoint", llrcorr::LlrMode::saddlepoint},
    {"gmi_table", llrcorr::LlrMode::gmi_table},
    {"gauss0", llrcorr::LlrMode::gauss0},
    {"true", llrcorr::LlrMode::true_llr},
};

const std::map<std::string, llrcorr::InterferenceMode> kInterferenceNames = {
    {"proportional", llrcorr::InterferenceMode::proportional},
    {"fixed", llrcorr::InterferenceMode::fixed_gain},
    {"rayleigh", llrcorr::InterferenceMode::rayleigh},
};

}  // namespace

int main(int argc, char** argv) {
    using namespace llrcorr;

    CLI::App app{"Mismatched L-value correction toolbox"};
    app.require_subcommand(1);
    app.fallthrough();  // --out and --config may follow the subcommand
    app.set_config("--config", "", "Read options from an INI/TOML file");

    std::string out_path;
    app.add_option("--out", out_path, "Write CSV here instead of stdout")->capture_default_str();

    // ---- saddlepoint
    auto* sp = app.add_subcommand("saddlepoint",
                                  "Saddlepoint and correction factors for one channel");
    double sp_snr = 10.0, sp_sir = 6.0, sp_h = 1.0;
    sp->add_option("--snr-db", sp_snr, "SNR h^2/N0 in dB")->required();
    sp->add_option("--sir-db", sp_sir, "SIR h^2/g^2 in dB")->required();
    sp->add_option("--gain", sp_h, "channel gain h")->capture_default_str();

    // ---- alpha-sweep
    auto* sw = app.add_subcommand("alpha-sweep", "Correction factors over an (SNR, SIR) grid");
    std::vector<double> sw_snr, sw_sir;
    std::vector<std::string> sw_methods = {"saddlepoint", "gmi", "wlsf"};
    int sw_order = 64;
    uint64_t sw_seed = 0;
    sw->add_option("--snr-db", sw_snr, "SNR grid points in dB")->required()->expected(-1);
    sw->add_option("--sir-db", sw_sir, "SIR grid points in dB")->required()->expected(-1);
    sw->add_option("--methods", sw_methods, "estimators to run")
        ->transform(CLI::IsMember([] {
            std::vector<std::string> names;
            for (const auto& [k, v] : kMethodNames) names.push_back(k);
            return names;
        }()))
        ->capture_default_str()
        ->expected(-1);
    sw->add_option("--quad-order", sw_order, "Gauss-Hermite order")->capture_default_str();
    sw->add_option("--seed", sw_seed, "seed (reserved for sample-based estimators)")
        ->capture_default_str();

    // ---- pep
    auto* pp = app.add_subcommand("pep", "PEP of a two-state error event, all methods");
    int pp_d1 = 4, pp_d2 = 4;
    double pp_alpha = 1.0, pp_snr = 10.0, pp_sir = 6.0;
    long long pp_samples = 1000000;
    uint64_t pp_seed = 0;
    int pp_threads = 0;
    pp->add_option("--d1", pp_d1, "mismatched L-values in the event")->required();
    pp->add_option("--d2", pp_d2, "matched L-values in the event")->required();
    pp->add_option("--alpha", pp_alpha, "correction factor on the mismatched ones")->required();
    pp->add_option("--snr-db", pp_snr, "SNR in dB")->required();
    pp->add_option("--sir-db", pp_sir, "SIR in dB")->required();
    pp->add_option("--seed", pp_seed, "Monte-Carlo seed")->required();
    pp->add_option("--mc-samples", pp_samples, "Monte-Carlo trials")->capture_default_str();
    pp->add_option("--threads", pp_threads, "worker threads (0 = hardware)")
        ->capture_default_str();

    // ---- ber
    auto* br = app.add_subcommand("ber", "Coded BER over Rayleigh fading with interference");
    std::vector<double> br_snr;
    std::vector<std::string> br_modes = {"uncorrected", "saddlepoint", "true"};
    double br_sir = 6.0;
    int br_info = 1000;
    long long br_min_err = 200, br_max_blocks = 100000;
    uint64_t br_seed = 0;
    int br_threads = 0;
    std::string br_imode = "fixed";
    br->add_option("--snr-db", br_snr, "average SNR grid in dB")->required()->expected(-1);
    br->add_option("--sir-db", br_sir, "SIR in dB")->capture_default_str();
    br->add_option("--modes", br_modes, "llr modes to simulate")
        ->transform(CLI::IsMember([] {
            std::vector<std::string> names;
            for (const auto& [k, v] : kModeNames) names.push_back(k);
            return names;
        }()))
        ->capture_default_str()
        ->expected(-1);
    br->add_option("--block-info-bits", br_info, "information bits per block")
        ->capture_default_str();
    br->add_option("--min-errors", br_min_err, "bit errors to stop a point")
        ->capture_default_str();
    br->add_option("--max-blocks", br_max_blocks, "block cap per point")->capture_default_str();
    br->add_option("--seed", br_seed, "simulation seed")->required();
    br->add_option("--threads", br_threads, "worker threads (0 = hardware)")
        ->capture_default_str();
    br->add_option("--interference-mode", br_imode, "proportional|fixed|rayleigh")
        ->transform(CLI::IsMember({"proportional", "fixed", "rayleigh"}))
        ->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    const auto pick_threads = [](int requested) {
        if (requested > 0) return requested;
        const unsigned hw = std::thread::hardware_concurrency();
        return hw > 0 ? static_cast<int>(hw) : 1;
    };

    try {
        if (sp->parsed()) {
            const ChannelParams p = ChannelParams::from_db(sp_snr, sp_sir, sp_h);
            const SaddlepointResult r = solve_channel_saddlepoint(p);
            std::string csv = "snr_db,sir_db,s_hat,alpha,alpha0,alpha_inf\n";
            csv += fmt_g10(sp_snr) + "," + fmt_g10(sp_sir) + "," + fmt_g10(r.s_hat) + "," +
                   fmt_g10(p.sigma2_z * r.s_hat / p.h) + "," + fmt_g10(alpha_low_snr(p).alpha) +
                   "," + fmt_g10(alpha_high_snr(p).alpha) + "\n";
            write_output(csv, out_path);
        } else if (sw->parsed()) {
            SweepConfig cfg;
            cfg.snr_db_grid = sw_snr;
            cfg.sir_db_grid = sw_sir;
            for (const auto& name : sw_methods) cfg.methods.push_back(kMethodNames.at(name));
            cfg.quad_order = sw_order;
            cfg.seed = sw_seed;
            write_output(sweep_csv(run_alpha_sweep(cfg)), out_path);
        } else if (pp->parsed()) {
            const ChannelParams p = ChannelParams::from_db(pp_snr, pp_sir);
            const PepQuery q{pp_d1, pp_d2, pp_alpha};
            const auto terms = two_state_cgf_terms(q, p);
            std::string csv = "method,value,stderr\n";
            const auto add = [&csv](const PepEstimate& e) {
                csv += std::string(to_string(e.method)) + "," + fmt_g10(e.value) + "," +
                       fmt_g10(e.std_error) + "\n";
            };
            add(pep_exact_2sm(q, p));
            add(pep_bhattacharyya(terms));
            add(pep_spa(terms));
            add(pep_mc_oracle(q, p, pp_samples, pp_seed, pick_threads(pp_threads)));
            write_output(csv, out_path);
        } else if (br->parsed()) {
            BerConfig cfg;
            cfg.block_info_bits = br_info;
            cfg.sir_db = br_sir;
            cfg.snr_db_grid = br_snr;
            for (const auto& name : br_modes) cfg.modes.push_back(kModeNames.at(name));
            cfg.min_errors = br_min_err;
            cfg.max_blocks = br_max_blocks;
            cfg.seed = br_seed;
            cfg.threads = pick_threads(br_threads);
            cfg.interference = kInterferenceNames.at(br_imode);
            write_output(ber_csv(run_ber(cfg)), out_path);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
