#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "llrcorr/channel.hpp"
#include "llrcorr/correction.hpp"

namespace llrcorr {

struct GmiTableSpec {
    double snr_db_lo = -30.0;
    double snr_db_hi = 15.0;
    double snr_db_step = 0.5;
    std::vector<double> sir_db_nodes = {6.0};
    int quad_order = 64;
    double snr_cap_db = 15.0;  // beyond this the saddlepoint factor substitutes

    void validate() const {
        if (!(snr_db_step > 0.0) || !(snr_db_hi >= snr_db_lo))
            throw std::invalid_argument("GmiTableSpec: bad SNR grid");
        if (sir_db_nodes.empty()) throw std::invalid_argument("GmiTableSpec: no SIR nodes");
        for (std::size_t i = 1; i < sir_db_nodes.size(); ++i)
            if (!(sir_db_nodes[i] > sir_db_nodes[i - 1]))
                throw std::invalid_argument("GmiTableSpec: SIR nodes must increase");
    }
};

// Precomputed GMI correction factors on a (SNR dB, SIR dB) grid with
// bilinear interpolation between nodes. Nodes where the GMI stationarity
// root cannot be bracketed fall back to the saddlepoint factor and are
// counted. Queries above the SNR cap bypass the table entirely.
class GmiTable {
public:
    explicit GmiTable(GmiTableSpec spec) : spec_(std::move(spec)) {
        spec_.validate();
        n_snr_ = static_cast<int>(
                     std::floor((spec_.snr_db_hi - spec_.snr_db_lo) / spec_.snr_db_step + 1e-9)) +
                 1;
        n_sir_ = static_cast<int>(spec_.sir_db_nodes.size());
        values_.resize(static_cast<std::size_t>(n_snr_) * n_sir_);
        for (int j = 0; j < n_sir_; ++j)
            for (int i = 0; i < n_snr_; ++i) {
                // built directly: fixed-interference fading sweeps take the
                // SIR nodes below 0 dB, outside from_db's validated range
                ChannelParams p;
                p.sigma2_z = std::pow(10.0, -snr_node(i) / 10.0) / 2.0;
                p.g = std::pow(10.0, -spec_.sir_db_nodes[j] / 20.0);
                double a;
                try {
                    a = alpha_gmi(mismatched_llr_pdf(p), spec_.quad_order).alpha;
                } catch (const std::runtime_error&) {
                    a = alpha_saddlepoint_channel(p).alpha;
                    ++flagged_;
                }
                values_[idx(i, j)] = a;
            }
    }

    double snr_node(int i) const { return spec_.snr_db_lo + i * spec_.snr_db_step; }
    double sir_node(int j) const { return spec_.sir_db_nodes[j]; }
    int n_snr() const { return n_snr_; }
    int n_sir() const { return n_sir_; }
    double node_value(int i, int j) const { return values_[idx(i, j)]; }
    int flagged_nodes() const { return flagged_; }
    const GmiTableSpec& spec() const { return spec_; }

    // correction factor for the instantaneous channel state
    double query(const ChannelParams& p) const {
        if (p.g == 0.0) return 1.0;
        if (p.snr_db() > spec_.snr_cap_db) return alpha_saddlepoint_channel(p).alpha;
        return interpolate(p.snr_db(), p.sir_db());
    }

    // clamped bilinear interpolation in (snr_db, sir_db)
    double interpolate(double snr_db, double sir_db) const {
        const double fi = std::clamp((snr_db - spec_.snr_db_lo) / spec_.snr_db_step, 0.0,
                                     static_cast<double>(n_snr_ - 1));
        const int i0 = std::min(static_cast<int>(fi), n_snr_ - 2 >= 0 ? n_snr_ - 2 : 0);
        const double ti = n_snr_ > 1 ? fi - i0 : 0.0;
        int j0 = 0;
        double tj = 0.0;
        if (n_sir_ > 1) {
            const auto& nodes = spec_.sir_db_nodes;
            const double s = std::clamp(sir_db, nodes.front(), nodes.back());
            j0 = static_cast<int>(std::upper_bound(nodes.begin(), nodes.end(), s) -
                                  nodes.begin()) -
                 1;
            j0 = std::clamp(j0, 0, n_sir_ - 2);
            tj = (s - nodes[j0]) / (nodes[j0 + 1] - nodes[j0]);
        }
        const double v00 = values_[idx(i0, j0)];
        const double v10 = values_[idx(std::min(i0 + 1, n_snr_ - 1), j0)];
        const double v01 = values_[idx(i0, std::min(j0 + 1, n_sir_ - 1))];
        const double v11 =
            values_[idx(std::min(i0 + 1, n_snr_ - 1), std::min(j0 + 1, n_sir_ - 1))];
        return (1.0 - ti) * (1.0 - tj) * v00 + ti * (1.0 - tj) * v10 + (1.0 - ti) * tj * v01 +
               ti * tj * v11;
    }

private:
    std::size_t idx(int i, int j) const { return static_cast<std::size_t>(j) * n_snr_ + i; }

    GmiTableSpec spec_;
    int n_snr_ = 0, n_sir_ = 0;
    int flagged_ = 0;
    std::vector<double> values_;
};

}  // namespace llrcorr
