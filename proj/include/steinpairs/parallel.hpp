#pragma once

#include <cstdint>
#include <thread>
#include <vector>

#include "steinpairs/rng.hpp"

namespace steinpairs {

// Monte Carlo loops are split into a fixed number of strips, each driven by
// its own substream, and the per-strip results are reduced in strip order.
// Output therefore depends only on the seed, never on the thread count.
inline constexpr int kMonteCarloStrips = 64;

inline int default_threads() { return 4; }

// Runs body(strip_index, begin, count, rng) over all strips on `threads`
// threads. Strip s covers indices [begin, begin+count) of the total range.
template <typename Body>
void for_each_strip(std::int64_t total, std::uint64_t seed, int threads, Body&& body) {
    const int strips = kMonteCarloStrips;
    const std::int64_t base = total / strips;
    const std::int64_t extra = total % strips;

    auto run_strip = [&](int s) {
        const std::int64_t count = base + (s < extra ? 1 : 0);
        const std::int64_t begin = s * base + std::min<std::int64_t>(s, extra);
        RngStream rng(seed, static_cast<std::uint64_t>(s));
        body(s, begin, count, rng);
    };

    if (threads <= 1) {
        for (int s = 0; s < strips; ++s) run_strip(s);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&, t]() {
            for (int s = t; s < strips; s += threads) run_strip(s);
        });
    }
    for (auto& th : pool) th.join();
}

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
    std::int64_t samples = 0;
};

// Sample mean and standard error of fn(rng) over `total` draws.
template <typename Fn>
MeanSe mc_mean_se(std::int64_t total, std::uint64_t seed, int threads, Fn&& fn) {
    std::vector<double> sums(kMonteCarloStrips, 0.0);
    std::vector<double> sq_sums(kMonteCarloStrips, 0.0);
    for_each_strip(total, seed, threads, [&](int s, std::int64_t, std::int64_t count, RngStream& rng) {
        double acc = 0.0, acc2 = 0.0;
        for (std::int64_t i = 0; i < count; ++i) {
            const double v = fn(rng);
            acc += v;
            acc2 += v * v;
        }
        sums[s] = acc;
        sq_sums[s] = acc2;
    });
    double sum = 0.0, sq = 0.0;
    for (int s = 0; s < kMonteCarloStrips; ++s) {
        sum += sums[s];
        sq += sq_sums[s];
    }
    MeanSe out;
    out.samples = total;
    out.mean = sum / static_cast<double>(total);
    if (total > 1) {
        const double var = (sq - static_cast<double>(total) * out.mean * out.mean) /
                           static_cast<double>(total - 1);
        out.se = std::sqrt(std::max(var, 0.0) / static_cast<double>(total));
    }
    return out;
}

}  // namespace steinpairs
