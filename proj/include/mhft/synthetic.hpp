#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "mhft/market_data.hpp"
#include "mhft/rng.hpp"

namespace mhft {

// Synthetic minute-bar generator: sine trend + noise on top of regime
// switches (alternating drift/volatility segments). The book snapshot is
// taken at bar close, mirroring how the loader interprets real data.
struct SynthConfig {
    std::int64_t start_ts = 28'000'000;  // epoch minutes
    std::size_t minutes = 43'200;        // 30 days
    std::uint64_t seed = 7;
    double base_price = 100.0;
    double sine_amplitude = 0.01;     // log-price units
    double sine_period = 1440.0;      // one day
    double noise_vol = 2e-4;          // per-minute log-return noise
    std::size_t regime_length = 2880;  // minutes per regime segment
    double drift_scale = 4e-5;        // per-minute log drift of trending regimes
    double vol_scale = 3.0;           // noise multiplier of volatile regimes
    double half_spread = 2e-4;        // fraction of close
    double level_step = 1e-4;         // fraction of close between book levels
};

namespace detail {

inline MarketFrame make_frame(std::int64_t ts, double open, double close, double bar_range,
                              double volume, double half_spread, double level_step,
                              const std::array<double, 2 * kBookLevels>& qtys) {
    MarketFrame f;
    f.ts = ts;
    f.open = open;
    f.close = close;
    f.high = std::max(open, close) * (1.0 + bar_range);
    f.low = std::min(open, close) * (1.0 - bar_range);
    f.volume = volume;
    const double bid1 = close * (1.0 - half_spread);
    const double ask1 = close * (1.0 + half_spread);
    for (int i = 0; i < kBookLevels; ++i) {
        f.bids[i].price = bid1 * (1.0 - level_step * i);
        f.asks[i].price = ask1 * (1.0 + level_step * i);
        f.bids[i].qty = qtys[i];
        f.asks[i].qty = qtys[kBookLevels + i];
    }
    return f;
}

}  // namespace detail

inline MarketSeries generate_synthetic(const SynthConfig& cfg) {
    Rng rng(cfg.seed);
    MarketSeries series;
    series.frames.reserve(cfg.minutes);

    // Regime cycle: flat/low-vol, bull/low-vol, flat/high-vol, bear/mid-vol.
    struct Regime {
        double drift_mult;
        double vol_mult;
    };
    const Regime cycle[4] = {{0.0, 1.0}, {1.0, 1.0}, {0.0, 3.0}, {-1.0, 2.0}};

    double log_price = std::log(cfg.base_price);
    double prev_close = cfg.base_price;
    for (std::size_t t = 0; t < cfg.minutes; ++t) {
        const Regime& regime = cycle[(t / cfg.regime_length) % 4];
        const double sine = cfg.sine_amplitude *
                            std::sin(2.0 * 3.14159265358979323846 * double(t) / cfg.sine_period);
        const double drift = regime.drift_mult * cfg.drift_scale;
        const double noise =
            rng.normal() * cfg.noise_vol * (1.0 + (regime.vol_mult - 1.0) * cfg.vol_scale / 3.0);
        log_price += drift + noise;
        const double close = std::exp(log_price + sine);
        const double open = prev_close;
        const double bar_range = std::abs(rng.normal()) * 1e-4;
        std::array<double, 2 * kBookLevels> qtys{};
        for (auto& q : qtys) q = std::exp(rng.normal(0.0, 0.5));
        const double volume = std::exp(rng.normal(3.0, 0.5));
        series.frames.push_back(detail::make_frame(cfg.start_ts + std::int64_t(t), open, close,
                                                   bar_range, volume, cfg.half_spread,
                                                   cfg.level_step, qtys));
        prev_close = close;
    }
    return series;
}

// Deterministic triangle wave: `half_period` minutes up, `half_period` down,
// with `amplitude` fractional swing around `base_price`. Zero noise, so the
// optimal policy is exactly computable by dynamic programming.
inline MarketSeries generate_sawtooth(std::int64_t start_ts, std::size_t minutes,
                                      double base_price, double amplitude,
                                      std::size_t half_period, std::uint64_t seed = 1) {
    Rng rng(seed);  // book quantities only; the price path is deterministic
    MarketSeries series;
    series.frames.reserve(minutes);
    double prev_close = base_price;
    for (std::size_t t = 0; t < minutes; ++t) {
        const std::size_t phase = t % (2 * half_period);
        const double frac = phase < half_period
                                ? double(phase) / double(half_period)
                                : 2.0 - double(phase) / double(half_period);
        const double close = base_price * (1.0 + amplitude * (frac - 0.5));
        std::array<double, 2 * kBookLevels> qtys{};
        for (auto& q : qtys) q = 1.0 + 0.1 * rng.uniform();
        series.frames.push_back(detail::make_frame(start_ts + std::int64_t(t), prev_close, close,
                                                   0.0, 10.0, 2e-4, 1e-4, qtys));
        prev_close = close;
    }
    return series;
}

// Two alternating deterministic regimes: blocks of steady up-drift and
// steady down-drift, each `block` minutes long. A trend ripple keeps bars
// non-degenerate inside blocks.
inline MarketSeries generate_two_regime(std::int64_t start_ts, std::size_t minutes,
                                        double base_price, double up_drift, double down_drift,
                                        std::size_t block, std::uint64_t seed = 1) {
    Rng rng(seed);
    MarketSeries series;
    series.frames.reserve(minutes);
    double price = base_price;
    double prev_close = base_price;
    for (std::size_t t = 0; t < minutes; ++t) {
        const bool up = (t / block) % 2 == 0;
        const double drift = up ? up_drift : down_drift;
        const double ripple = 0.1 * drift * std::sin(2.0 * 3.14159265358979323846 *
                                                     double(t % 30) / 30.0);
        price *= 1.0 + drift + ripple;
        std::array<double, 2 * kBookLevels> qtys{};
        for (auto& q : qtys) q = 1.0 + 0.1 * rng.uniform();
        series.frames.push_back(detail::make_frame(start_ts + std::int64_t(t), prev_close, price,
                                                   0.0, 10.0, 2e-4, 1e-4, qtys));
        prev_close = price;
    }
    return series;
}

}  // namespace mhft
