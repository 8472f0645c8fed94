#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "mhft/csv.hpp"
#include "mhft/errors.hpp"
#include "mhft/market_data.hpp"

namespace mhft {

// Half-open index range into a MarketSeries, exactly l_chunk minutes long.
struct Chunk {
    std::size_t start = 0;
    std::size_t end = 0;

    std::size_t length() const { return end - start; }
};

enum class TrendClass { Bear = 0, Medium = 1, Bull = 2 };
enum class VolClass { Stable = 0, Medium = 1, Volatile = 2 };

inline const char* to_string(TrendClass c) {
    switch (c) {
        case TrendClass::Bear: return "bear";
        case TrendClass::Medium: return "medium";
        case TrendClass::Bull: return "bull";
    }
    return "?";
}

inline const char* to_string(VolClass c) {
    switch (c) {
        case VolClass::Stable: return "stable";
        case VolClass::Medium: return "medium";
        case VolClass::Volatile: return "volatile";
    }
    return "?";
}

struct ChunkLabel {
    double slope = 0.0;       // per minute, prices normalized by the first close
    double volatility = 0.0;  // per-minute simple-return std
    TrendClass trend_class = TrendClass::Medium;
    VolClass vol_class = VolClass::Medium;
};

struct TercileThresholds {
    double slope_q33 = 0.0;
    double slope_q66 = 0.0;
    double vol_q33 = 0.0;
    double vol_q66 = 0.0;
};

// The six training subsets: one per trend tercile and one per volatility
// tercile; every chunk belongs to exactly one of each.
enum class SubsetId {
    Bear = 0,
    MediumTrend = 1,
    Bull = 2,
    Stable = 3,
    MediumVol = 4,
    Volatile = 5,
};
inline constexpr int kNumSubsets = 6;

inline const char* to_string(SubsetId s) {
    static const char* names[kNumSubsets] = {"bear",   "medium_trend", "bull",
                                             "stable", "medium_vol",   "volatile"};
    return names[static_cast<int>(s)];
}

inline SubsetId subset_from_string(const std::string& name) {
    for (int i = 0; i < kNumSubsets; ++i)
        if (name == to_string(static_cast<SubsetId>(i))) return static_cast<SubsetId>(i);
    throw ConfigInvalid("unknown subset name: " + name);
}

inline std::vector<Chunk> chunk_series(const MarketSeries& series, std::size_t l_chunk) {
    if (l_chunk < 2) throw SeriesTooShort("chunk length must be at least 2");
    if (series.size() < l_chunk)
        throw SeriesTooShort("series of " + std::to_string(series.size()) +
                             " frames is shorter than one chunk of " + std::to_string(l_chunk));
    const std::size_t count = series.size() / l_chunk;  // trailing partial chunk discarded
    std::vector<Chunk> chunks(count);
    for (std::size_t i = 0; i < count; ++i) chunks[i] = {i * l_chunk, (i + 1) * l_chunk};
    return chunks;
}

// Zero-phase smoothing: a shrinking-window causal moving average applied
// forward and then backward, which cancels the phase lag in the interior.
// window == 0 picks max(5, n / 20).
inline std::vector<double> lowpass(const std::vector<double>& values, std::size_t window = 0) {
    if (values.empty()) throw SeriesTooShort("lowpass needs a non-empty vector");
    const std::size_t n = values.size();
    if (window == 0) window = std::max<std::size_t>(5, n / 20);

    auto causal_sma = [window](const std::vector<double>& in) {
        std::vector<double> out(in.size());
        double running = 0.0;
        for (std::size_t i = 0; i < in.size(); ++i) {
            running += in[i];
            if (i >= window) running -= in[i - window];
            const std::size_t count = std::min<std::size_t>(i + 1, window);
            out[i] = running / static_cast<double>(count);
        }
        return out;
    };

    std::vector<double> fwd = causal_sma(values);
    std::reverse(fwd.begin(), fwd.end());
    std::vector<double> bwd = causal_sma(fwd);
    std::reverse(bwd.begin(), bwd.end());
    return bwd;
}

// OLS slope of (values / values[0]) against the minute index. Scale free:
// multiplying all prices by k > 0 leaves the slope unchanged.
inline double slope(const std::vector<double>& smoothed) {
    if (smoothed.size() < 2) throw SeriesTooShort("slope needs at least 2 points");
    const double n = static_cast<double>(smoothed.size());
    const double y0 = smoothed.front();
    const double x_mean = (n - 1.0) / 2.0;
    double y_mean = 0.0;
    for (double y : smoothed) y_mean += y / y0;
    y_mean /= n;
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < smoothed.size(); ++i) {
        const double dx = static_cast<double>(i) - x_mean;
        sxy += dx * (smoothed[i] / y0 - y_mean);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

// Population std of one-minute simple returns of the unfiltered closes.
inline double chunk_volatility(const std::vector<double>& closes) {
    if (closes.size() < 2) throw SeriesTooShort("volatility needs at least 2 points");
    std::vector<double> returns(closes.size() - 1);
    for (std::size_t i = 0; i + 1 < closes.size(); ++i)
        returns[i] = closes[i + 1] / closes[i] - 1.0;
    double mean = 0.0;
    for (double r : returns) mean += r;
    mean /= static_cast<double>(returns.size());
    double var = 0.0;
    for (double r : returns) var += (r - mean) * (r - mean);
    var /= static_cast<double>(returns.size());
    return std::sqrt(var);
}

// Slope on the smoothed chunk, volatility on the original one.
inline ChunkLabel label_chunk(const std::vector<double>& closes, std::size_t filter_window = 0) {
    ChunkLabel label;
    label.slope = slope(lowpass(closes, filter_window));
    label.volatility = chunk_volatility(closes);
    return label;
}

inline std::vector<ChunkLabel> label_chunks(const MarketSeries& series,
                                            const std::vector<Chunk>& chunks,
                                            std::size_t filter_window = 0) {
    std::vector<ChunkLabel> labels;
    labels.reserve(chunks.size());
    for (const Chunk& c : chunks) {
        std::vector<double> raw(c.length());
        for (std::size_t i = 0; i < c.length(); ++i) raw[i] = series[c.start + i].close;
        labels.push_back(label_chunk(raw, filter_window));
    }
    return labels;
}

// Linear interpolation between order statistics.
inline double quantile(std::vector<double> values, double p) {
    std::sort(values.begin(), values.end());
    const double idx = p * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(idx);
    const double frac = idx - static_cast<double>(lo);
    if (lo + 1 >= values.size()) return values.back();
    return values[lo] + frac * (values[lo + 1] - values[lo]);
}

inline TercileThresholds fit_thresholds(const std::vector<ChunkLabel>& train_labels) {
    if (train_labels.size() < 3)
        throw TooFewChunks("threshold fit needs at least 3 training chunks, got " +
                           std::to_string(train_labels.size()));
    std::vector<double> slopes, vols;
    slopes.reserve(train_labels.size());
    vols.reserve(train_labels.size());
    for (const auto& l : train_labels) {
        slopes.push_back(l.slope);
        vols.push_back(l.volatility);
    }
    TercileThresholds t;
    t.slope_q33 = quantile(slopes, 1.0 / 3.0);
    t.slope_q66 = quantile(slopes, 2.0 / 3.0);
    t.vol_q33 = quantile(vols, 1.0 / 3.0);
    t.vol_q66 = quantile(vols, 2.0 / 3.0);
    return t;
}

namespace detail {
// Boundary values go to the lower class; if both cut points coincide the
// whole dimension collapses to the middle class.
inline int tercile_of(double value, double q33, double q66) {
    if (value <= q33 && q33 < q66) return 0;
    if (value <= q66) return 1;
    return 2;
}
}  // namespace detail

inline ChunkLabel assign(ChunkLabel label, const TercileThresholds& t) {
    label.trend_class =
        static_cast<TrendClass>(detail::tercile_of(label.slope, t.slope_q33, t.slope_q66));
    label.vol_class =
        static_cast<VolClass>(detail::tercile_of(label.volatility, t.vol_q33, t.vol_q66));
    return label;
}

inline std::vector<ChunkLabel> assign_all(std::vector<ChunkLabel> labels,
                                          const TercileThresholds& t) {
    for (auto& l : labels) l = assign(l, t);
    return labels;
}

struct SubsetPartition {
    // Chunk indices per subset; a chunk appears in exactly one trend subset
    // and exactly one volatility subset.
    std::array<std::vector<std::size_t>, kNumSubsets> members;
    std::vector<SubsetId> empty_subsets;  // warning-level, training skips these

    const std::vector<std::size_t>& of(SubsetId id) const {
        return members[static_cast<int>(id)];
    }
};

inline SubsetPartition build_subsets(const std::vector<ChunkLabel>& labels) {
    SubsetPartition part;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        part.members[static_cast<int>(labels[i].trend_class)].push_back(i);
        part.members[3 + static_cast<int>(labels[i].vol_class)].push_back(i);
    }
    for (int s = 0; s < kNumSubsets; ++s)
        if (part.members[s].empty()) part.empty_subsets.push_back(static_cast<SubsetId>(s));
    return part;
}

inline void write_labels_csv(const std::vector<Chunk>& chunks,
                             const std::vector<ChunkLabel>& labels, const std::string& path) {
    csv::Writer w(path);
    w.row({"chunk_start", "chunk_end", "slope", "volatility", "trend_class", "vol_class"});
    for (std::size_t i = 0; i < chunks.size(); ++i) {
        w.row({std::to_string(chunks[i].start), std::to_string(chunks[i].end),
               csv::format_double(labels[i].slope), csv::format_double(labels[i].volatility),
               to_string(labels[i].trend_class), to_string(labels[i].vol_class)});
    }
}

}  // namespace mhft
