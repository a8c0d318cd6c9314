#pragma once

#include <bit>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace llrcorr {

// Feed-forward convolutional code. Generators are K-bit masks, MSB tapping
// the newest input bit, so the usual octal notation reads off directly
// (e.g. {015, 017} with constraint length 4 is the rate-1/2 {15,17}_8 code).
struct ConvCodeSpec {
    std::vector<unsigned> generators;
    int constraint_length = 0;

    void validate() const {
        if (generators.empty()) throw std::invalid_argument("ConvCodeSpec: no generators");
        if (constraint_length < 1 || constraint_length > 16)
            throw std::invalid_argument("ConvCodeSpec: bad constraint length");
        for (unsigned gen : generators) {
            if (gen == 0) throw std::invalid_argument("ConvCodeSpec: zero generator");
            if (gen >> constraint_length)
                throw std::invalid_argument("ConvCodeSpec: generator exceeds constraint length");
        }
    }

    int n_out() const { return static_cast<int>(generators.size()); }
    int memory() const { return constraint_length - 1; }
    int num_states() const { return 1 << memory(); }
};

inline ConvCodeSpec cc_15_17() { return ConvCodeSpec{{015, 017}, 4}; }

// Encodes one block; terminated mode appends memory() zero tail bits so the
// trellis ends in the zero state. Output bits are interleaved per step in
// generator order.
inline std::vector<uint8_t> conv_encode(std::span<const uint8_t> bits, const ConvCodeSpec& spec,
                                        bool terminated = true) {
    spec.validate();
    const int m = spec.memory();
    const std::size_t steps = bits.size() + (terminated ? m : 0);
    std::vector<uint8_t> out;
    out.reserve(steps * spec.generators.size());
    unsigned state = 0;
    for (std::size_t t = 0; t < steps; ++t) {
        const unsigned u = t < bits.size() ? (bits[t] & 1u) : 0u;
        const unsigned reg = (u << m) | state;
        for (unsigned gen : spec.generators)
            out.push_back(static_cast<uint8_t>(std::popcount(reg & gen) & 1));
        state = reg >> 1;
    }
    return out;
}

struct TrellisPath {
    std::vector<uint8_t> decoded;  // information bits (tail stripped)
    double metric = 0.0;           // sum l_n c_n over the winning codeword
};

// Exact ML sequence decoding of the metric sum(l_n c_n) over the code
// trellis. Terminated mode forces zero inputs over the tail steps and traces
// back from the zero state. Equal path metrics keep the lower predecessor
// state.
inline TrellisPath viterbi_soft(std::span<const double> llrs, const ConvCodeSpec& spec,
                                bool terminated = true) {
    spec.validate();
    const int nc = spec.n_out();
    const int m = spec.memory();
    const int ns = spec.num_states();
    if (llrs.size() % nc != 0)
        throw std::invalid_argument("viterbi_soft: llr count not divisible by n_out");
    const std::size_t steps = llrs.size() / nc;
    if (terminated && steps <= static_cast<std::size_t>(m))
        throw std::invalid_argument("viterbi_soft: block shorter than the tail");
    const std::size_t n_info = terminated ? steps - m : steps;

    const double kNegInf = -std::numeric_limits<double>::infinity();
    std::vector<double> pm(ns, kNegInf), pm_next(ns);
    pm[0] = 0.0;
    std::vector<uint32_t> decision(steps * ns);

    // per-(state,input) coded bits, precomputed
    std::vector<uint8_t> emit(static_cast<std::size_t>(ns) * 2 * nc);
    for (int s = 0; s < ns; ++s)
        for (unsigned u = 0; u < 2; ++u) {
            const unsigned reg = (u << m) | static_cast<unsigned>(s);
            for (int j = 0; j < nc; ++j)
                emit[(static_cast<std::size_t>(s) * 2 + u) * nc + j] =
                    static_cast<uint8_t>(std::popcount(reg & spec.generators[j]) & 1);
        }

    for (std::size_t t = 0; t < steps; ++t) {
        const double* l = llrs.data() + t * nc;
        const unsigned max_u = (terminated && t >= n_info) ? 1 : 2;
        std::fill(pm_next.begin(), pm_next.end(), kNegInf);
        for (int s = 0; s < ns; ++s) {
            if (pm[s] == kNegInf) continue;
            for (unsigned u = 0; u < max_u; ++u) {
                const unsigned reg = (u << m) | static_cast<unsigned>(s);
                const uint8_t* bitsv = &emit[(static_cast<std::size_t>(s) * 2 + u) * nc];
                double bm = 0.0;
                for (int j = 0; j < nc; ++j)
                    if (bitsv[j]) bm += l[j];
                const unsigned nxt = reg >> 1;
                const double cand = pm[s] + bm;
                if (cand > pm_next[nxt]) {  // strict: ties keep lower predecessor
                    pm_next[nxt] = cand;
                    decision[t * ns + nxt] = u | (static_cast<unsigned>(s) << 1);
                }
            }
        }
        pm.swap(pm_next);
    }

    unsigned state = 0;
    if (!terminated) {
        double best = kNegInf;
        for (int s = 0; s < ns; ++s)
            if (pm[s] > best) {
                best = pm[s];
                state = static_cast<unsigned>(s);
            }
    }
    TrellisPath path;
    path.metric = pm[state];
    std::vector<uint8_t> bits(steps);
    for (std::size_t t = steps; t-- > 0;) {
        const uint32_t d = decision[t * ns + state];
        bits[t] = d & 1;
        state = d >> 1;
    }
    bits.resize(n_info);
    path.decoded = std::move(bits);
    return path;
}

}  // namespace llrcorr
