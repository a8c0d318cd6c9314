#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

#include "llrcorr/math_util.hpp"

namespace llrcorr {

// splitmix64 finalizer
inline uint64_t mix64(uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Counter-derived per-block seed: results are a pure function of
// (master, index), so parallel block layouts reproduce bit-identically.
inline uint64_t derive_seed(uint64_t master, uint64_t index) {
    uint64_t z = mix64(master + 0x9E3779B97F4A7C15ULL * (index + 1));
    return mix64(z ^ master);
}

// Self-contained generator with an explicit algorithm (no reliance on
// implementation-defined std distributions) so every platform and thread
// count produces identical streams.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // uniform on [0,1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool bernoulli_half() { return (next_u64() >> 63) != 0; }

    // +1 or -1 equiprobably
    double sign() { return bernoulli_half() ? 1.0 : -1.0; }

    // standard normal via Box-Muller (pair cached)
    double gaussian() {
        if (have_cache_) {
            have_cache_ = false;
            return cache_;
        }
        // u1 in (0,1] keeps the log finite
        const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double th = kTwoPi * u2;
        cache_ = r * std::sin(th);
        have_cache_ = true;
        return r * std::cos(th);
    }

    // Rayleigh with E[h^2] = 1 (magnitude of a unit-variance complex Gaussian)
    double rayleigh_unit() {
        const double a = gaussian();
        const double b = gaussian();
        return std::sqrt(0.5 * (a * a + b * b));
    }

private:
    uint64_t state_;
    double cache_ = 0.0;
    bool have_cache_ = false;
};

// Runs fn(block_index) for block_index in [0, n_blocks) on up to `threads`
// workers. fn must write only to per-block state; the visible result is then
// independent of the worker count.
inline void for_each_block(std::size_t n_blocks, int threads,
                           const std::function<void(std::size_t)>& fn) {
    if (threads <= 1 || n_blocks <= 1) {
        for (std::size_t b = 0; b < n_blocks; ++b) fn(b);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t b = next.fetch_add(1);
            if (b >= n_blocks) return;
            fn(b);
        }
    };
    const int n_workers = static_cast<int>(
        std::min<std::size_t>(static_cast<std::size_t>(threads), n_blocks));
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
}

}  // namespace llrcorr
