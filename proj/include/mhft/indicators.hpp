#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "mhft/errors.hpp"
#include "mhft/market_data.hpp"

namespace mhft {

// Feature layout. Single-frame features are computed from the current bar
// and book only; context features need a 60-minute backward window.
inline constexpr std::size_t kSingleCount = 33;
inline constexpr std::size_t kContextCount = 17;
inline constexpr std::size_t kFeatureCount = kSingleCount + kContextCount;
inline constexpr std::size_t kContextWindow = 60;

// Columns that get z-scored with training statistics: all single-frame
// features plus the 6 log returns. Trend features are already normalized by
// construction and pass through.
inline constexpr std::size_t kZScoredCount = kSingleCount + 6;

inline constexpr double kStdFloor = 1e-8;

namespace feat {
// Indices into SingleFeatures::v.
enum Single : int {
    kMaxOc = 0,
    kMinOc,
    kKmid,
    kKmid2,
    kKlen,
    kKup,
    kKup2,
    kKlow,
    kKlow2,
    kKsft,
    kKsft2,
    kVolume,  // total book size, both sides
    kBidSize1,
    kBidSize2,
    kBidSize3,
    kBidSize4,
    kBidSize5,
    kAskSize1,
    kAskSize2,
    kAskSize3,
    kAskSize4,
    kAskSize5,
    kWap1,
    kWap2,
    kWapBalance,
    kBuySpread,
    kSellSpread,
    kBuyVolume,
    kSellVolume,
    kVolumeImbalance,
    kPriceSpread,
    kSellVwap,
    kBuyVwap,
};

// Indices into ContextFeatures::v.
enum Context : int {
    kLogRetBid1 = 0,
    kLogRetBid2,
    kLogRetAsk1,
    kLogRetAsk2,
    kLogRetWap1,
    kLogRetWap2,
    kTrendAsk1,
    kTrendAsk2,
    kTrendBid1,
    kTrendBid2,
    kTrendBuySpread,
    kTrendSellSpread,
    kTrendWap1,
    kTrendWap2,
    kTrendSellVwap,
    kTrendBuyVwap,
    kTrendVolume,
};
}  // namespace feat

struct SingleFeatures {
    std::array<double, kSingleCount> v{};
};

struct ContextFeatures {
    std::array<double, kContextCount> v{};
};

inline const std::vector<std::string>& single_feature_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n = {"max_oc", "min_oc", "kmid", "kmid2", "klen", "kup",
                                      "kup2",   "klow",   "klow2", "ksft", "ksft2", "volume"};
        for (int i = 1; i <= kBookLevels; ++i) n.push_back("bid_" + std::to_string(i) + "_size_n");
        for (int i = 1; i <= kBookLevels; ++i) n.push_back("ask_" + std::to_string(i) + "_size_n");
        for (const char* s : {"wap1", "wap2", "wap_balance", "buy_spread", "sell_spread",
                              "buy_volume", "sell_volume", "volume_imbalance", "price_spread",
                              "sell_vwap", "buy_vwap"})
            n.emplace_back(s);
        return n;
    }();
    return names;
}

inline const std::vector<std::string>& context_feature_names() {
    static const std::vector<std::string> names = {
        "log_return_bid_1_price", "log_return_bid_2_price", "log_return_ask_1_price",
        "log_return_ask_2_price", "log_return_wap1",        "log_return_wap2",
        "trend_ask_1_price",      "trend_ask_2_price",      "trend_bid_1_price",
        "trend_bid_2_price",      "trend_buy_spread",       "trend_sell_spread",
        "trend_wap1",             "trend_wap2",             "trend_sell_vwap",
        "trend_buy_vwap",         "trend_volume"};
    return names;
}

inline std::vector<std::string> all_feature_names() {
    std::vector<std::string> n = single_feature_names();
    const auto& c = context_feature_names();
    n.insert(n.end(), c.begin(), c.end());
    return n;
}

namespace detail {
// Ratio indicators on a degenerate bar (high == low) take the value 0; the
// numerators vanish there as well.
inline double ratio_or_zero(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

inline double wap(const BookLevel& bid, const BookLevel& ask) {
    const double den = ask.qty + bid.qty;
    if (den == 0.0) return 0.5 * (bid.price + ask.price);  // symmetric limit
    return (ask.qty * bid.price + bid.qty * ask.price) / den;
}

inline double log_return(double now, double before) {
    if (now <= 0.0 || before <= 0.0) return 0.0;
    return std::log(now / before);
}
}  // namespace detail

inline SingleFeatures single_features(const MarketFrame& f) {
    SingleFeatures out;
    auto& v = out.v;
    const double max_oc = std::max(f.open, f.close);
    const double min_oc = std::min(f.open, f.close);
    const double range = f.high - f.low;

    v[feat::kMaxOc] = max_oc;
    v[feat::kMinOc] = min_oc;
    v[feat::kKmid] = f.close - f.open;
    v[feat::kKmid2] = detail::ratio_or_zero(f.close - f.open, range);
    v[feat::kKlen] = range;
    v[feat::kKup] = f.high - max_oc;
    v[feat::kKup2] = detail::ratio_or_zero(f.high - max_oc, range);
    v[feat::kKlow] = detail::ratio_or_zero(min_oc - f.low, range);
    v[feat::kKlow2] = detail::ratio_or_zero(min_oc - f.low, range);
    v[feat::kKsft] = 2.0 * f.close - f.high - f.low;
    v[feat::kKsft2] = detail::ratio_or_zero(2.0 * f.close - f.high - f.low, range);

    double book_volume = 0.0;
    double buy_volume = 0.0;
    double sell_volume = 0.0;
    for (int i = 0; i < kBookLevels; ++i) {
        buy_volume += f.bids[i].qty;
        sell_volume += f.asks[i].qty;
    }
    book_volume = buy_volume + sell_volume;
    v[feat::kVolume] = book_volume;
    for (int i = 0; i < kBookLevels; ++i) {
        v[feat::kBidSize1 + i] = detail::ratio_or_zero(f.bids[i].qty, book_volume);
        v[feat::kAskSize1 + i] = detail::ratio_or_zero(f.asks[i].qty, book_volume);
    }

    v[feat::kWap1] = detail::wap(f.bids[0], f.asks[0]);
    v[feat::kWap2] = detail::wap(f.bids[1], f.asks[1]);
    v[feat::kWapBalance] = std::abs(v[feat::kWap1] - v[feat::kWap2]);
    v[feat::kBuySpread] = std::abs(f.bids[0].price - f.bids[4].price);
    v[feat::kSellSpread] = std::abs(f.asks[0].price - f.asks[4].price);
    v[feat::kBuyVolume] = buy_volume;
    v[feat::kSellVolume] = sell_volume;
    v[feat::kVolumeImbalance] =
        detail::ratio_or_zero(buy_volume - sell_volume, buy_volume + sell_volume);
    v[feat::kPriceSpread] = 2.0 * (f.asks[0].price - f.bids[0].price) /
                            (f.asks[0].price + f.bids[0].price);

    double sell_vwap = 0.0;
    double buy_vwap = 0.0;
    for (int i = 0; i < kBookLevels; ++i) {
        sell_vwap += v[feat::kAskSize1 + i] * f.asks[i].price;
        buy_vwap += v[feat::kBidSize1 + i] * f.bids[i].price;
    }
    v[feat::kSellVwap] = sell_vwap;
    v[feat::kBuyVwap] = buy_vwap;
    return out;
}

// (value - mean) / std over the window, population std floored at kStdFloor.
inline double rolling_trend(const std::vector<double>& values) {
    const auto n = static_cast<double>(values.size());
    double mean = 0.0;
    for (double y : values) mean += y;
    mean /= n;
    double var = 0.0;
    for (double y : values) var += (y - mean) * (y - mean);
    var /= n;
    const double sd = std::max(std::sqrt(var), kStdFloor);
    return (values.back() - mean) / sd;
}

// Context features at the last frame of a window of exactly kContextWindow
// minutes. Log returns use the last two frames; trend features use the full
// window of the per-frame base series.
inline ContextFeatures context_features(const MarketSeries& win) {
    if (win.size() != kContextWindow)
        throw InsufficientHistory("context window must have exactly " +
                                  std::to_string(kContextWindow) + " frames, got " +
                                  std::to_string(win.size()));
    ContextFeatures out;
    auto& v = out.v;

    const MarketFrame& last = win.frames[kContextWindow - 1];
    const MarketFrame& prev = win.frames[kContextWindow - 2];

    v[feat::kLogRetBid1] = detail::log_return(last.bids[0].price, prev.bids[0].price);
    v[feat::kLogRetBid2] = detail::log_return(last.bids[1].price, prev.bids[1].price);
    v[feat::kLogRetAsk1] = detail::log_return(last.asks[0].price, prev.asks[0].price);
    v[feat::kLogRetAsk2] = detail::log_return(last.asks[1].price, prev.asks[1].price);
    v[feat::kLogRetWap1] = detail::log_return(detail::wap(last.bids[0], last.asks[0]),
                                              detail::wap(prev.bids[0], prev.asks[0]));
    v[feat::kLogRetWap2] = detail::log_return(detail::wap(last.bids[1], last.asks[1]),
                                              detail::wap(prev.bids[1], prev.asks[1]));

    // Per-frame base series for the 11 trend features.
    constexpr int kTrendSources = 11;
    std::array<std::vector<double>, kTrendSources> base;
    for (auto& b : base) b.resize(kContextWindow);
    for (std::size_t t = 0; t < kContextWindow; ++t) {
        const MarketFrame& f = win.frames[t];
        const SingleFeatures sf = single_features(f);
        base[0][t] = f.asks[0].price;
        base[1][t] = f.asks[1].price;
        base[2][t] = f.bids[0].price;
        base[3][t] = f.bids[1].price;
        base[4][t] = sf.v[feat::kBuySpread];
        base[5][t] = sf.v[feat::kSellSpread];
        base[6][t] = sf.v[feat::kWap1];
        base[7][t] = sf.v[feat::kWap2];
        base[8][t] = sf.v[feat::kSellVwap];
        base[9][t] = sf.v[feat::kBuyVwap];
        base[10][t] = sf.v[feat::kVolume];
    }
    const int trend_slot[kTrendSources] = {
        feat::kTrendAsk1,      feat::kTrendAsk2,       feat::kTrendBid1,
        feat::kTrendBid2,      feat::kTrendBuySpread,  feat::kTrendSellSpread,
        feat::kTrendWap1,      feat::kTrendWap2,       feat::kTrendSellVwap,
        feat::kTrendBuyVwap,   feat::kTrendVolume};
    for (int i = 0; i < kTrendSources; ++i) v[trend_slot[i]] = rolling_trend(base[i]);
    return out;
}

// ============================================================================
// Normalizer: per-feature affine standardization fit on the training split.
// ============================================================================
class Normalizer {
public:
    Normalizer() = default;
    Normalizer(std::vector<double> mean, std::vector<double> sd)
        : mean_(std::move(mean)), std_(std::move(sd)) {
        if (mean_.size() != std_.size()) throw ShapeMismatch("normalizer mean/std size mismatch");
    }

    // Population mean/std per column; std floored at kStdFloor so constant
    // features normalize to 0.
    static Normalizer fit(const std::vector<std::vector<double>>& rows) {
        if (rows.size() < 2) throw EmptyTraining("normalizer needs at least 2 training rows");
        const std::size_t cols = rows.front().size();
        std::vector<double> mean(cols, 0.0), sd(cols, 0.0);
        for (const auto& r : rows) {
            if (r.size() != cols) throw ShapeMismatch("ragged feature rows");
            for (std::size_t c = 0; c < cols; ++c) mean[c] += r[c];
        }
        const double n = static_cast<double>(rows.size());
        for (auto& m : mean) m /= n;
        for (const auto& r : rows)
            for (std::size_t c = 0; c < cols; ++c) {
                const double d = r[c] - mean[c];
                sd[c] += d * d;
            }
        for (auto& s : sd) s = std::max(std::sqrt(s / n), kStdFloor);
        return Normalizer(std::move(mean), std::move(sd));
    }

    std::size_t size() const { return mean_.size(); }
    double mean(std::size_t c) const { return mean_[c]; }
    double stddev(std::size_t c) const { return std_[c]; }

    void apply_inplace(double* row) const {
        for (std::size_t c = 0; c < mean_.size(); ++c) row[c] = (row[c] - mean_[c]) / std_[c];
    }

    std::vector<double> apply(std::vector<double> row) const {
        if (row.size() != mean_.size()) throw ShapeMismatch("normalizer dimension mismatch");
        apply_inplace(row.data());
        return row;
    }

    std::vector<double> invert(std::vector<double> row) const {
        if (row.size() != mean_.size()) throw ShapeMismatch("normalizer dimension mismatch");
        for (std::size_t c = 0; c < row.size(); ++c) row[c] = row[c] * std_[c] + mean_[c];
        return row;
    }

private:
    std::vector<double> mean_;
    std::vector<double> std_;
};

// ============================================================================
// FeatureTable: per-minute feature rows for a whole series. Rows before
// first_valid lack the context window and are all-zero.
// ============================================================================
struct FeatureTable {
    std::size_t rows = 0;
    std::size_t first_valid = 0;
    std::vector<double> data;  // rows x kFeatureCount, row-major

    const double* row(std::size_t t) const { return data.data() + t * kFeatureCount; }
    double* row(std::size_t t) { return data.data() + t * kFeatureCount; }

    const double* single(std::size_t t) const { return row(t); }
    const double* context(std::size_t t) const { return row(t) + kSingleCount; }
};

inline FeatureTable build_feature_table(const MarketSeries& series) {
    FeatureTable table;
    table.rows = series.size();
    table.first_valid = kContextWindow - 1;
    table.data.assign(table.rows * kFeatureCount, 0.0);
    if (series.size() < kContextWindow)
        throw InsufficientHistory("series shorter than the context window");
    for (std::size_t t = table.first_valid; t < series.size(); ++t) {
        const SingleFeatures sf = single_features(series[t]);
        const ContextFeatures cf = context_features(window(series, t, kContextWindow));
        double* r = table.row(t);
        for (std::size_t i = 0; i < kSingleCount; ++i) r[i] = sf.v[i];
        for (std::size_t i = 0; i < kContextCount; ++i) r[kSingleCount + i] = cf.v[i];
    }
    return table;
}

// Fits statistics for the z-scored columns over [begin, end); trend columns
// are pinned to identity so the stored normalizer covers every column.
inline Normalizer fit_feature_normalizer(const FeatureTable& table, std::size_t begin,
                                         std::size_t end) {
    begin = std::max(begin, table.first_valid);
    if (end > table.rows || begin + 2 > end)
        throw EmptyTraining("not enough feature rows to fit a normalizer");
    std::vector<std::vector<double>> rows;
    rows.reserve(end - begin);
    for (std::size_t t = begin; t < end; ++t)
        rows.emplace_back(table.row(t), table.row(t) + kFeatureCount);
    Normalizer full = Normalizer::fit(rows);
    std::vector<double> mean(kFeatureCount, 0.0), sd(kFeatureCount, 1.0);
    for (std::size_t c = 0; c < kZScoredCount; ++c) {
        mean[c] = full.mean(c);
        sd[c] = full.stddev(c);
    }
    return Normalizer(std::move(mean), std::move(sd));
}

inline void normalize_feature_table(FeatureTable& table, const Normalizer& norm) {
    if (norm.size() != kFeatureCount) throw ShapeMismatch("feature normalizer dimension mismatch");
    for (std::size_t t = table.first_valid; t < table.rows; ++t) norm.apply_inplace(table.row(t));
}

}  // namespace mhft
