// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Heavier Monte-Carlo settings than the unit tests; expect a run
// time in the tens of minutes.

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "llrcorr/channel.hpp"
#include "llrcorr/correction.hpp"
#include "llrcorr/experiments.hpp"
#include "llrcorr/pep.hpp"
#include "llrcorr/saddlepoint.hpp"
#include "test_util.hpp"

using namespace llrcorr;

namespace {

struct Check {
    bool ok = true;
    std::ostringstream log;

    void expect(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            log << "    FAILED: " << what << "\n";
        }
    }
};

// 1. closed-form saddlepoint identities
bool criterion1(Check& c) {
    Rng rng(101);
    for (int i = 0; i < 10; ++i) {
        const double gamma = 0.3 + 3.5 * rng.uniform();
        const auto r = find_saddlepoint(matched_llr_pdf_bpsk(gamma).cgf(), 0.2, 1e-12);
        c.expect(r.converged && std::fabs(r.s_hat - 0.5) <= 1e-10,
                 "matched CGF saddlepoint != 1/2 at gamma " + std::to_string(gamma));
    }
    for (int i = 0; i < 10; ++i) {
        const double gamma = 0.3 + 3.0 * rng.uniform();
        const double gamma_tilde = 0.3 + 3.0 * rng.uniform();
        const auto est = alpha_saddlepoint(mismatched_llr_pdf_bpsk(gamma, gamma_tilde).cgf(),
                                           0.5, 1e-13);
        c.expect(std::fabs(est.alpha - gamma / gamma_tilde) <= 1e-9,
                 "alpha != gamma/gamma_tilde at (" + std::to_string(gamma) + "," +
                     std::to_string(gamma_tilde) + ")");
    }
    return c.ok;
}

// 2. asymptote convergence of the channel correction factor
bool criterion2(Check& c) {
    for (double sir_db : {3.0, 6.0, 10.0, 12.0}) {
        const ChannelParams hi = ChannelParams::from_db(40.0, sir_db);
        const double a_hi = alpha_saddlepoint_channel(hi).alpha;
        const double a_inf = 1.0 - std::pow(10.0, -sir_db / 20.0);
        c.expect(std::fabs(a_hi - a_inf) / a_inf < 0.01,
                 "high-SNR asymptote miss at SIR " + std::to_string(sir_db));
        const ChannelParams lo = ChannelParams::from_db(-20.0, sir_db);
        const double a_lo = alpha_saddlepoint_channel(lo).alpha;
        const double a0 = saddle_seed_low_snr(lo) * lo.sigma2_z / lo.h;
        c.expect(std::fabs(a_lo - a0) / a0 < 0.01,
                 "low-SNR asymptote miss at SIR " + std::to_string(sir_db));
    }
    const double a = alpha_saddlepoint_channel(ChannelParams::from_db(30.0, 6.0)).alpha;
    c.expect(std::fabs(a - 0.50) <= 0.01, "alpha at (30 dB, 6 dB) = " + std::to_string(a));
    return c.ok;
}

// 3. exact coincidence of the Gaussian-moment and low-SNR factors
bool criterion3(Check& c) {
    for (int i = 0; i < 20; ++i)
        for (int j = 0; j < 20; ++j) {
            const ChannelParams p =
                ChannelParams::from_db(-5.0 + 30.0 * i / 19.0, 1.0 + 19.0 * j / 19.0);
            const double am = alpha_gauss_moment(mismatched_llr_pdf(p)).alpha;
            const double a0 = alpha_low_snr(p).alpha;
            const double closed = p.sigma2_z / (p.sigma2_z + p.g * p.g);
            c.expect(std::fabs(am - a0) <= 1e-12 * a0, "gauss_moment != low_snr");
            c.expect(std::fabs(a0 - closed) <= 1e-14 * closed, "low_snr closed form");
        }
    return c.ok;
}

// 4. method agreement on the all-Gaussian mismatch
bool criterion4(Check& c) {
    const std::pair<double, double> cases[] = {{1.7, 0.9}, {0.8, 1.1}, {2.0, 1.6}, {1.0, 2.2}};
    for (const auto& [gamma, gamma_tilde] : cases) {
        const MixturePdf pdf = mismatched_llr_pdf_bpsk(gamma, gamma_tilde);
        const double want = gamma / gamma_tilde;
        const double sp = alpha_saddlepoint(pdf.cgf(), 0.5, 1e-13).alpha;
        const double gmi = alpha_gmi(pdf, 128).alpha;  // 1e-6 agreement needs the finer rule
        const double wlsf = alpha_wlsf(pdf).alpha;
        const double gauss = alpha_gauss_moment(pdf).alpha;
        std::ostringstream tag;
        tag << "(" << gamma << "," << gamma_tilde << ")";
        c.expect(std::fabs(sp - want) <= 1e-6, "saddlepoint off at " + tag.str());
        c.expect(std::fabs(gmi - want) <= 1e-6, "gmi off at " + tag.str());
        c.expect(std::fabs(wlsf - want) <= 1e-6, "wlsf off at " + tag.str());
        c.expect(std::fabs(gauss - want) <= 1e-6, "gauss_moment off at " + tag.str());
    }
    return c.ok;
}

// 5. closed-form 2SM PEP vs the Monte-Carlo oracle; bound and SPA sanity
bool criterion5(Check& c) {
    struct Cfg {
        int d1, d2;
        double alpha, snr_db, sir_db;
    };
    const Cfg cfgs[] = {
        {1, 1, 1.0, 0.0, 6.0},  {2, 2, 0.8, 0.0, 6.0},   {4, 4, 0.6, 0.0, 6.0},
        {2, 6, 1.0, -2.0, 6.0}, {4, 4, 1.0, 2.0, 3.0},   {8, 2, 0.7, 0.0, 3.0},
        {3, 3, 0.9, 2.0, 10.0}, {4, 0, 1.0, 3.0, 6.0},   {0, 4, 1.0, 2.0, 6.0},
        {6, 6, 0.75, -2.0, 10.0}, {2, 2, 1.2, 3.0, 12.0}, {5, 3, 0.65, 0.0, 6.0},
    };
    const long long n = 10000000;
    uint64_t seed = 500;
    for (const auto& k : cfgs) {
        const ChannelParams p = ChannelParams::from_db(k.snr_db, k.sir_db);
        const PepQuery q{k.d1, k.d2, k.alpha};
        const auto exact = pep_exact_2sm(q, p);
        const auto mc = pep_mc_oracle(q, p, n, seed++, 2);
        std::ostringstream tag;
        tag << "(d1=" << k.d1 << ",d2=" << k.d2 << ",a=" << k.alpha << ",snr=" << k.snr_db
            << ",sir=" << k.sir_db << ")";
        c.log << "    " << tag.str() << " exact=" << exact.value << " mc=" << mc.value
              << " se=" << mc.std_error << "\n";
        c.expect(mc.value >= 1e-5, "oracle PEP below 1e-5 at " + tag.str());
        c.expect(std::fabs(exact.value - mc.value) <= 3.0 * mc.std_error,
                 "exact-2SM vs oracle beyond 3 SE at " + tag.str());
        const auto terms = two_state_cgf_terms(q, p);
        const auto ub = pep_bhattacharyya(terms);
        c.expect(ub.value >= mc.value, "Bhattacharyya below oracle at " + tag.str());
        const auto spa = pep_spa(terms);
        c.expect(spa.value <= 2.0 * mc.value && spa.value >= 0.5 * mc.value,
                 "SPA beyond factor 2 of oracle at " + tag.str());
    }
    return c.ok;
}

// 6. minimizing the Bhattacharyya bound over alpha recovers s1/s2
bool criterion6(Check& c) {
    const ChannelParams p = ChannelParams::from_db(10.0, 6.0);
    const double s1 = find_saddlepoint(cgf_mismatched_llr(p), 0.3, 1e-13).s_hat;
    const double s2 = 0.5;  // matched Gaussian saddlepoint
    const double want = s1 / s2;
    const Cgf mis = cgf_mismatched_llr(p);
    const double mu0 = 2.0 * p.h * p.h / p.sigma2_z;
    const Cgf mat = cgf_gaussian(-mu0, 2.0 * mu0);
    for (int d1 : {2, 4, 8})
        for (int d2 : {2, 4, 8}) {
            double best = 1e300, best_a = 0.0;
            for (double a = 1e-3; a <= 1.5 + 5e-4; a += 1e-3) {
                const std::vector<CgfTerm> terms = {{mis, static_cast<double>(d1), a},
                                                    {mat, static_cast<double>(d2), 1.0}};
                const auto ub = pep_bhattacharyya(terms, 0.5, 1e-11);
                if (ub.value < best) {
                    best = ub.value;
                    best_a = a;
                }
            }
            c.expect(std::fabs(best_a - want) <= 1e-3 + 1e-9,
                     "bound argmin misses 2*s_hat at d1=" + std::to_string(d1) +
                         " d2=" + std::to_string(d2));
        }
    c.log << "    target alpha = " << want << "\n";
    return c.ok;
}

// 7. grid-minimized 2SM factor stays within 10% of the saddlepoint factor
bool criterion7(Check& c) {
    double worst = 0.0;
    for (double snr_db : {5.0, 10.0, 15.0})
        for (double sir_db : {3.0, 6.0, 10.0, 12.0}) {
            const ChannelParams p = ChannelParams::from_db(snr_db, sir_db);
            const double a_hat = alpha_saddlepoint_channel(p).alpha;
            for (int d1 = 2; d1 <= 8; ++d1)
                for (int d2 = 2; d2 <= 8; ++d2) {
                    const double a = alpha_grid_2sm(p, d1, d2).alpha;
                    const double rel = std::fabs(a - a_hat) / a_hat;
                    worst = std::max(worst, rel);
                    if (rel >= 0.10) {
                        std::ostringstream tag;
                        tag << "snr=" << snr_db << " sir=" << sir_db << " d1=" << d1
                            << " d2=" << d2 << " a2sm=" << a << " a_hat=" << a_hat;
                        c.expect(false, "2SM minimizer beyond 10%: " + tag.str());
                    }
                }
        }
    c.log << "    worst relative deviation " << worst << "\n";
    return c.ok;
}

// 8. Viterbi equals exhaustive ML; decisions invariant to common scaling
bool criterion8(Check& c) {
    const ConvCodeSpec cc = cc_15_17();
    Rng rng(808);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<uint8_t> msg(20);
        for (auto& b : msg) b = rng.bernoulli_half() ? 1 : 0;
        const auto cw = conv_encode(msg, cc);
        std::vector<double> llrs(cw.size());
        for (std::size_t i = 0; i < cw.size(); ++i)
            llrs[i] = (cw[i] ? 1.0 : -1.0) + 1.8 * rng.gaussian();
        const auto fast = viterbi_soft(llrs, cc);
        const auto brute = test::brute_force_ml(llrs, cc);
        c.expect(fast.decoded == brute.bits, "Viterbi != exhaustive ML decision");
        c.expect(std::fabs(fast.metric - brute.metric) <=
                     1e-12 * (1.0 + std::fabs(brute.metric)),
                 "Viterbi metric != exhaustive ML metric");
        for (double lambda : {0.01, 100.0}) {
            std::vector<double> scaled(llrs.size());
            for (std::size_t i = 0; i < llrs.size(); ++i) scaled[i] = lambda * llrs[i];
            c.expect(viterbi_soft(scaled, cc).decoded == fast.decoded,
                     "decision changed under common scaling");
        }
    }
    return c.ok;
}

// 9. coded BER over fading: ordering, separation, GMI-table agreement
bool criterion9(Check& c) {
    BerConfig cfg;
    cfg.block_info_bits = 1000;
    cfg.sir_db = 6.0;
    cfg.snr_db_grid = {10.0, 12.0, 14.0, 16.0, 18.0, 20.0};
    cfg.modes = {LlrMode::true_llr, LlrMode::saddlepoint, LlrMode::gmi_table,
                 LlrMode::uncorrected};
    cfg.min_errors = 200;
    cfg.max_blocks = 150000;
    cfg.seed = 909;
    cfg.threads = 2;
    const BerResult res = run_ber(cfg);
    c.log << ber_csv(res);

    const auto row = [&](double snr, LlrMode m) {
        for (const auto& r : res.rows)
            if (r.snr_db == snr && r.mode == m) return r;
        throw std::logic_error("missing row");
    };
    for (double snr : cfg.snr_db_grid) {
        const auto s = row(snr, LlrMode::saddlepoint);
        const auto g = row(snr, LlrMode::gmi_table);
        const double se = std::sqrt(s.std_error * s.std_error + g.std_error * g.std_error);
        c.expect(std::fabs(g.ber - s.ber) <= 2.0 * se,
                 "gmi_table vs saddlepoint beyond 2 SE at snr " + std::to_string(snr));
    }
    for (double snr : {18.0, 20.0}) {
        const auto t = row(snr, LlrMode::true_llr);
        const auto s = row(snr, LlrMode::saddlepoint);
        const auto u = row(snr, LlrMode::uncorrected);
        c.expect(t.ber <= s.ber && s.ber <= u.ber,
                 "ordering true <= saddlepoint <= uncorrected broken at snr " +
                     std::to_string(snr));
        const double se = std::sqrt(t.std_error * t.std_error + u.std_error * u.std_error);
        c.expect(u.ber - t.ber >= 3.0 * se,
                 "true vs uncorrected not 3-sigma separated at snr " + std::to_string(snr));
    }
    // BER non-increasing in SNR per mode (1-sigma slack at adjacent points)
    for (LlrMode m : cfg.modes)
        for (std::size_t i = 1; i < cfg.snr_db_grid.size(); ++i) {
            const auto lo = row(cfg.snr_db_grid[i - 1], m);
            const auto hi = row(cfg.snr_db_grid[i], m);
            const double se =
                std::sqrt(lo.std_error * lo.std_error + hi.std_error * hi.std_error);
            c.expect(hi.ber <= lo.ber + se, std::string("BER not monotone for mode ") +
                                                to_string(m) + " at snr " +
                                                std::to_string(cfg.snr_db_grid[i]));
        }
    // at the top point both outer inequalities of the mode ordering separate
    {
        const auto t = row(20.0, LlrMode::true_llr);
        const auto s = row(20.0, LlrMode::saddlepoint);
        const auto u = row(20.0, LlrMode::uncorrected);
        const double se_ts = std::sqrt(t.std_error * t.std_error + s.std_error * s.std_error);
        const double se_su = std::sqrt(s.std_error * s.std_error + u.std_error * u.std_error);
        c.expect(s.ber - t.ber >= 3.0 * se_ts, "true vs saddlepoint not 3-sigma at 20 dB");
        c.expect(u.ber - s.ber >= 3.0 * se_su,
                 "saddlepoint vs uncorrected not 3-sigma at 20 dB");
    }
    return c.ok;
}

// 10. byte-identical reruns across invocations and worker counts
bool criterion10(Check& c) {
    const ChannelParams p = ChannelParams::from_db(0.0, 6.0);
    const PepQuery q{4, 4, 0.6};
    const auto mc1 = pep_mc_oracle(q, p, 1000000, 42, 1);
    const auto mc2 = pep_mc_oracle(q, p, 1000000, 42, 2);
    const auto mc3 = pep_mc_oracle(q, p, 1000000, 42, 3);
    c.expect(mc1.value == mc2.value && mc2.value == mc3.value,
             "pep_mc_oracle differs across thread counts");

    const auto b1 = sample_llrs(p, LValueKind::matched, 300000, 7, 1.0, 1);
    const auto b2 = sample_llrs(p, LValueKind::matched, 300000, 7, 1.0, 3);
    c.expect(b1.samples == b2.samples, "sample_llrs differs across thread counts");

    BerConfig cfg;
    cfg.block_info_bits = 200;
    cfg.snr_db_grid = {8.0, 12.0};
    cfg.modes = {LlrMode::uncorrected, LlrMode::saddlepoint, LlrMode::true_llr};
    cfg.min_errors = 60;
    cfg.max_blocks = 500;
    cfg.seed = 4242;
    cfg.threads = 1;
    const std::string ber1 = ber_csv(run_ber(cfg));
    const std::string ber1b = ber_csv(run_ber(cfg));
    cfg.threads = 3;
    const std::string ber3 = ber_csv(run_ber(cfg));
    c.expect(ber1 == ber1b, "ber csv differs across repeated runs");
    c.expect(ber1 == ber3, "ber csv differs across thread counts");

    SweepConfig sw;
    sw.snr_db_grid = {0.0, 10.0};
    sw.sir_db_grid = {6.0};
    sw.methods = {CorrectionMethod::saddlepoint, CorrectionMethod::gmi,
                  CorrectionMethod::wlsf};
    c.expect(sweep_csv(run_alpha_sweep(sw)) == sweep_csv(run_alpha_sweep(sw)),
             "sweep csv differs across repeated runs");
    return c.ok;
}

}  // namespace

int main() {
    struct Entry {
        const char* name;
        std::function<bool(Check&)> fn;
    };
    const Entry entries[] = {
        {"closed-form saddlepoint identities (s=1/2 matched, alpha=g/g~ mismatched)",
         criterion1},
        {"asymptote convergence of alpha_hat at SNR extremes; alpha(30,6)=0.50", criterion2},
        {"alpha_gauss == alpha_low_snr == s2/(s2+g^2) to round-off on 20x20 grid",
         criterion3},
        {"saddlepoint/GMI/WLSF/Gauss agree to 1e-6 on the Gaussian mismatch", criterion4},
        {"exact-2SM vs 1e7-sample oracle (3 SE), bound above, SPA within 2x", criterion5},
        {"Bhattacharyya-bound argmin over alpha equals s1/s2 for d1,d2 in {2,4,8}^2",
         criterion6},
        {"alpha_2SM within 10% of alpha_hat over {2..8}^2 x {5,10,15} x {3,6,10,12}",
         criterion7},
        {"Viterbi equals exhaustive ML on 100 random 20-bit messages; scale invariant",
         criterion8},
        {"coded BER: true <= saddlepoint <= uncorrected, 3-sigma outer separation",
         criterion9},
        {"byte-identical stochastic reruns across invocations and worker counts",
         criterion10},
    };
    int failures = 0;
    int idx = 0;
    for (const auto& e : entries) {
        ++idx;
        Check c;
        const auto t0 = std::chrono::steady_clock::now();
        bool ok = false;
        try {
            ok = e.fn(c);
        } catch (const std::exception& ex) {
            c.log << "    EXCEPTION: " << ex.what() << "\n";
            ok = false;
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s  criterion %d: %s  [%.1fs]\n", ok ? "PASS" : "FAIL", idx, e.name,
                    secs);
        const std::string detail = c.log.str();
        if (!detail.empty()) std::fputs(detail.c_str(), stdout);
        std::fflush(stdout);
        if (!ok) ++failures;
    }
    if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
