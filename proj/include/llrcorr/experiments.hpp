#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "llrcorr/channel.hpp"
#include "llrcorr/conv_code.hpp"
#include "llrcorr/correction.hpp"
#include "llrcorr/csv.hpp"
#include "llrcorr/gmi_table.hpp"
#include "llrcorr/rng.hpp"
#include "llrcorr/saddlepoint.hpp"

namespace llrcorr {

// ------------------------------------------------------------------ sweeps

struct SweepConfig {
    std::vector<double> snr_db_grid;
    std::vector<double> sir_db_grid;
    std::vector<CorrectionMethod> methods;
    int quad_order = 64;
    uint64_t seed = 0;  // reserved for sample-based estimators

    void validate() const {
        if (snr_db_grid.empty() || sir_db_grid.empty())
            throw std::invalid_argument("SweepConfig: empty grid");
        if (methods.empty()) throw std::invalid_argument("SweepConfig: no methods");
        for (CorrectionMethod m : methods)
            if (m == CorrectionMethod::gmi_mc || m == CorrectionMethod::grid_2sm)
                throw std::invalid_argument(
                    "SweepConfig: sweep supports closed-form/quadrature methods only");
    }
};

struct SweepRow {
    double snr_db = 0.0;
    double sir_db = 0.0;
    CorrectionMethod method = CorrectionMethod::saddlepoint;
    double alpha = std::numeric_limits<double>::quiet_NaN();
    std::string flag = "ok";
};

// One row per (grid point, method); estimator failures are recorded in the
// flag column so a sweep never aborts half way.
inline std::vector<SweepRow> run_alpha_sweep(const SweepConfig& cfg) {
    cfg.validate();
    std::vector<SweepRow> rows;
    rows.reserve(cfg.snr_db_grid.size() * cfg.sir_db_grid.size() * cfg.methods.size());
    for (double snr_db : cfg.snr_db_grid)
        for (double sir_db : cfg.sir_db_grid) {
            const ChannelParams p = ChannelParams::from_db(snr_db, sir_db);
            const MixturePdf pdf = mismatched_llr_pdf(p);
            for (CorrectionMethod m : cfg.methods) {
                SweepRow row;
                row.snr_db = snr_db;
                row.sir_db = sir_db;
                row.method = m;
                try {
                    switch (m) {
                        case CorrectionMethod::saddlepoint:
                            row.alpha = alpha_saddlepoint_channel(p).alpha;
                            break;
                        case CorrectionMethod::gmi:
                            row.alpha = alpha_gmi(pdf, cfg.quad_order).alpha;
                            break;
                        case CorrectionMethod::wlsf:
                            row.alpha = alpha_wlsf(pdf, cfg.quad_order).alpha;
                            break;
                        case CorrectionMethod::gauss_moment:
                            row.alpha = alpha_gauss_moment(pdf).alpha;
                            break;
                        case CorrectionMethod::low_snr:
                            row.alpha = alpha_low_snr(p).alpha;
                            break;
                        case CorrectionMethod::high_snr:
                            row.alpha = alpha_high_snr(p).alpha;
                            break;
                        default:
                            row.flag = "error";
                    }
                } catch (const std::exception&) {
                    row.flag = "error";
                }
                rows.push_back(std::move(row));
            }
        }
    return rows;
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out = "snr_db,sir_db,method,alpha,flag\n";
    for (const auto& r : rows) {
        out += fmt_g10(r.snr_db);
        out += ',';
        out += fmt_g10(r.sir_db);
        out += ',';
        out += to_string(r.method);
        out += ',';
        out += fmt_g10(r.alpha);
        out += ',';
        out += r.flag;
        out += '\n';
    }
    return out;
}

// --------------------------------------------------------------- coded BER

enum class LlrMode { uncorrected, saddlepoint, gmi_table, gauss0, true_llr };

inline const char* to_string(LlrMode m) {
    switch (m) {
        case LlrMode::uncorrected: return "uncorrected";
        case LlrMode::saddlepoint: return "saddlepoint";
        case LlrMode::gmi_table: return "gmi_table";
        case LlrMode::gauss0: return "gauss0";
        case LlrMode::true_llr: return "true";
    }
    return "?";
}

// How the interference gain tracks the fading signal gain. fixed_gain is
// the default: the interferer does not fade with the signal, so deep signal
// fades are interference-dominated and correction has something to fix.
//   proportional: g_n = h_n * 10^{-SIR/20}, instantaneous SIR pinned
//   fixed_gain:   g_n = 10^{-SIR/20}, average SIR pinned (E[h^2] = 1)
//   rayleigh:     g_n an independent Rayleigh with E[g^2] = 10^{-SIR/10}
enum class InterferenceMode { proportional, fixed_gain, rayleigh };

inline const char* to_string(InterferenceMode m) {
    switch (m) {
        case InterferenceMode::proportional: return "proportional";
        case InterferenceMode::fixed_gain: return "fixed";
        case InterferenceMode::rayleigh: return "rayleigh";
    }
    return "?";
}

struct BerConfig {
    ConvCodeSpec code = cc_15_17();
    int block_info_bits = 1000;
    double sir_db = 6.0;
    std::vector<double> snr_db_grid;
    std::vector<LlrMode> modes;
    long long min_errors = 200;
    long long max_blocks = 100000;
    uint64_t seed = 0;
    int threads = 1;
    InterferenceMode interference = InterferenceMode::fixed_gain;
    int gmi_quad_order = 64;
    double gmi_snr_step_db = 0.5;

    void validate() const {
        code.validate();
        if (block_info_bits < 1) throw std::invalid_argument("BerConfig: block_info_bits < 1");
        if (snr_db_grid.empty()) throw std::invalid_argument("BerConfig: empty SNR grid");
        if (modes.empty()) throw std::invalid_argument("BerConfig: no llr modes");
        if (min_errors < 1 || max_blocks < 1)
            throw std::invalid_argument("BerConfig: bad stopping rule");
        if (threads < 1) throw std::invalid_argument("BerConfig: threads < 1");
        if (modes.size() > 8) throw std::invalid_argument("BerConfig: more than 8 llr modes");
        if (!(sir_db > 0.0)) throw std::invalid_argument("BerConfig: need SIR > 0 dB");
    }
};

struct BerRow {
    double snr_db = 0.0;
    LlrMode mode = LlrMode::uncorrected;
    long long blocks = 0;
    long long bit_errors = 0;
    double ber = 0.0;
    double std_error = 0.0;
};

struct BerResult {
    std::vector<BerRow> rows;
};

namespace detail {

struct SymbolState {
    double h, g, y;
};

// channel realization for one block; the draw order is fixed so every llr
// mode sees the identical transmission
inline void draw_block(Rng& rng, const BerConfig& cfg, const std::vector<uint8_t>& cw,
                       double sigma2_z, std::vector<SymbolState>& sym) {
    const double gl = std::pow(10.0, -cfg.sir_db / 20.0);
    const double sd = std::sqrt(sigma2_z);
    sym.resize(cw.size());
    for (std::size_t i = 0; i < cw.size(); ++i) {
        const double h = rng.rayleigh_unit();
        double g;
        switch (cfg.interference) {
            case InterferenceMode::proportional: g = h * gl; break;
            case InterferenceMode::fixed_gain: g = gl; break;
            default: g = rng.rayleigh_unit() * gl; break;
        }
        const double d = rng.sign();
        const double z = rng.gaussian() * sd;
        const double x = cw[i] ? 1.0 : -1.0;
        sym[i] = {h, g, h * x + z + g * d};
    }
}

inline double corrected_llr(const SymbolState& s, double sigma2_z, LlrMode mode,
                            const GmiTable* table) {
    const ChannelParams p{s.h, s.g, sigma2_z};
    const double lm = 2.0 * s.h * s.y / sigma2_z;
    switch (mode) {
        case LlrMode::uncorrected:
            return lm;
        case LlrMode::saddlepoint:
            return alpha_saddlepoint_channel(p).alpha * lm;
        case LlrMode::gmi_table:
            return table->query(p) * lm;
        case LlrMode::gauss0:
            return sigma2_z / (sigma2_z + s.g * s.g) * lm;
        case LlrMode::true_llr:
            return true_llr(s.y, p);
    }
    return lm;
}

}  // namespace detail

// Block-fading coded BER. Every block draws a message, encodes it, sends it
// over per-symbol Rayleigh fading with BPSK interference, and decodes once
// per llr mode from the same received sequence. Each SNR point stops a mode
// at min_errors accumulated bit errors or max_blocks, scanning blocks in
// index order; block RNG streams are derived from (seed, snr index, block),
// so results are byte-identical for any thread count.
inline BerResult run_ber(const BerConfig& cfg) {
    cfg.validate();

    std::unique_ptr<GmiTable> table;
    for (LlrMode m : cfg.modes)
        if (m == LlrMode::gmi_table && !table) {
            GmiTableSpec spec;
            double lo = cfg.snr_db_grid[0];
            for (double s : cfg.snr_db_grid) lo = std::min(lo, s);
            spec.snr_db_lo = lo - 40.0;
            spec.snr_db_hi = spec.snr_cap_db;
            spec.snr_db_step = cfg.gmi_snr_step_db;
            spec.quad_order = cfg.gmi_quad_order;
            if (cfg.interference == InterferenceMode::proportional) {
                spec.sir_db_nodes = {cfg.sir_db};
            } else {
                spec.sir_db_nodes.clear();
                for (double s = cfg.sir_db - 30.0; s <= cfg.sir_db + 20.0 + 1e-9; s += 1.0)
                    spec.sir_db_nodes.push_back(s);
            }
            table = std::make_unique<GmiTable>(spec);
        }

    const int n_modes = static_cast<int>(cfg.modes.size());
    constexpr int kBatch = 128;
    BerResult result;

    for (std::size_t si = 0; si < cfg.snr_db_grid.size(); ++si) {
        const double snr_db = cfg.snr_db_grid[si];
        const double sigma2_z = std::pow(10.0, -snr_db / 10.0) / 2.0;  // E[h^2] = 1
        const uint64_t point_seed = derive_seed(cfg.seed, si);

        std::vector<long long> errors(n_modes, 0), blocks_used(n_modes, 0);
        std::vector<bool> stopped(n_modes, false);
        long long processed = 0;

        while (processed < cfg.max_blocks) {
            bool any_running = false;
            for (int m = 0; m < n_modes; ++m) any_running |= !stopped[m];
            if (!any_running) break;
            const long long batch_n = std::min<long long>(kBatch, cfg.max_blocks - processed);
            std::vector<std::array<long long, 8>> batch_err(batch_n);
            const std::vector<bool> skip = stopped;  // modes stopped before this batch

            for_each_block(static_cast<std::size_t>(batch_n), cfg.threads, [&](std::size_t b) {
                const long long block = processed + static_cast<long long>(b);
                Rng rng(derive_seed(point_seed, static_cast<uint64_t>(block)));
                std::vector<uint8_t> msg(cfg.block_info_bits);
                for (auto& bit : msg) bit = rng.bernoulli_half() ? 1 : 0;
                const std::vector<uint8_t> cw = conv_encode(msg, cfg.code);
                std::vector<detail::SymbolState> sym;
                detail::draw_block(rng, cfg, cw, sigma2_z, sym);
                std::vector<double> llrs(sym.size());
                batch_err[b].fill(0);
                for (int m = 0; m < n_modes; ++m) {
                    if (skip[m]) continue;
                    for (std::size_t i = 0; i < sym.size(); ++i)
                        llrs[i] =
                            detail::corrected_llr(sym[i], sigma2_z, cfg.modes[m], table.get());
                    const TrellisPath path = viterbi_soft(llrs, cfg.code);
                    long long e = 0;
                    for (int i = 0; i < cfg.block_info_bits; ++i)
                        e += path.decoded[i] != msg[i];
                    batch_err[b][m] = e;
                }
            });

            for (long long b = 0; b < batch_n; ++b)
                for (int m = 0; m < n_modes; ++m) {
                    if (stopped[m]) continue;
                    errors[m] += batch_err[b][m];
                    blocks_used[m] = processed + b + 1;
                    if (errors[m] >= cfg.min_errors) stopped[m] = true;
                }
            processed += batch_n;
        }

        for (int m = 0; m < n_modes; ++m) {
            BerRow row;
            row.snr_db = snr_db;
            row.mode = cfg.modes[m];
            row.blocks = blocks_used[m];
            row.bit_errors = errors[m];
            const double nbits =
                static_cast<double>(row.blocks) * static_cast<double>(cfg.block_info_bits);
            row.ber = nbits > 0.0 ? static_cast<double>(row.bit_errors) / nbits : 0.0;
            row.std_error = nbits > 0.0 ? std::sqrt(std::max(row.ber * (1.0 - row.ber), 0.0) / nbits)
                                        : 0.0;
            result.rows.push_back(row);
        }
    }
    return result;
}

inline std::string ber_csv(const BerResult& res) {
    std::string out = "snr_db,mode,blocks,bit_errors,ber,stderr\n";
    for (const auto& r : res.rows) {
        out += fmt_g10(r.snr_db);
        out += ',';
        out += to_string(r.mode);
        out += ',';
        out += std::to_string(r.blocks);
        out += ',';
        out += std::to_string(r.bit_errors);
        out += ',';
        out += fmt_g10(r.ber);
        out += ',';
        out += fmt_g10(r.std_error);
        out += '\n';
    }
    return out;
}

}  // namespace llrcorr
