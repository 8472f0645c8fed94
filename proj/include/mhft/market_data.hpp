#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "mhft/csv.hpp"
#include "mhft/errors.hpp"

namespace mhft {

inline constexpr int kBookLevels = 5;

struct BookLevel {
    double price = 0.0;
    double qty = 0.0;
};

// One minute of OHLCV plus a 5-level order-book snapshot taken at bar close.
struct MarketFrame {
    std::int64_t ts = 0;  // epoch minutes
    double open = 0.0;
    double high = 0.0;
    double low = 0.0;
    double close = 0.0;
    double volume = 0.0;
    std::array<BookLevel, kBookLevels> bids{};  // prices strictly decreasing
    std::array<BookLevel, kBookLevels> asks{};  // prices strictly increasing

    bool operator==(const MarketFrame& o) const {
        if (ts != o.ts || open != o.open || high != o.high || low != o.low ||
            close != o.close || volume != o.volume)
            return false;
        for (int i = 0; i < kBookLevels; ++i) {
            if (bids[i].price != o.bids[i].price || bids[i].qty != o.bids[i].qty) return false;
            if (asks[i].price != o.asks[i].price || asks[i].qty != o.asks[i].qty) return false;
        }
        return true;
    }
};

// Throws InvalidFrame naming the violated invariant. `row` is for messages only.
inline void validate_frame(const MarketFrame& f, std::size_t row) {
    const std::string at = " at row " + std::to_string(row);
    if (!(f.open > 0 && f.high > 0 && f.low > 0 && f.close > 0))
        throw InvalidFrame("non-positive price" + at);
    if (f.volume < 0) throw InvalidFrame("negative volume" + at);
    if (f.low > std::min(f.open, f.close))
        throw InvalidFrame("low above min(open, close)" + at);
    if (f.high < std::max(f.open, f.close))
        throw InvalidFrame("high below max(open, close)" + at);
    for (int i = 0; i < kBookLevels; ++i) {
        if (f.bids[i].price <= 0 || f.asks[i].price <= 0)
            throw InvalidFrame("non-positive book price" + at);
        if (f.bids[i].qty < 0 || f.asks[i].qty < 0)
            throw InvalidFrame("negative book quantity" + at);
    }
    for (int i = 1; i < kBookLevels; ++i) {
        if (f.bids[i].price >= f.bids[i - 1].price)
            throw InvalidFrame("bid prices not strictly decreasing" + at);
        if (f.asks[i].price <= f.asks[i - 1].price)
            throw InvalidFrame("ask prices not strictly increasing" + at);
    }
    if (f.asks[0].price < f.bids[0].price) throw InvalidFrame("crossed book" + at);
}

// Time-ordered minute bars with no gaps. Immutable after load.
struct MarketSeries {
    std::vector<MarketFrame> frames;

    std::size_t size() const { return frames.size(); }
    bool empty() const { return frames.empty(); }
    const MarketFrame& operator[](std::size_t i) const { return frames[i]; }

    double close(std::size_t i) const { return frames[i].close; }

    std::vector<double> closes() const {
        std::vector<double> out(frames.size());
        for (std::size_t i = 0; i < frames.size(); ++i) out[i] = frames[i].close;
        return out;
    }

    // Index of the frame with the given timestamp, or -1.
    std::ptrdiff_t index_of(std::int64_t ts) const {
        if (frames.empty()) return -1;
        const std::int64_t first = frames.front().ts;
        if (ts < first || ts > frames.back().ts) return -1;
        return static_cast<std::ptrdiff_t>(ts - first);
    }
};

// Half-open [begin, end) timestamp ranges in epoch minutes.
struct TimeRange {
    std::int64_t begin = 0;
    std::int64_t end = 0;
};

struct SplitSpec {
    TimeRange train;
    TimeRange validation;
    TimeRange test;
};

inline const std::vector<std::string>& csv_header() {
    static const std::vector<std::string> h = [] {
        std::vector<std::string> v = {"ts", "open", "high", "low", "close", "volume"};
        for (int i = 1; i <= kBookLevels; ++i) v.push_back("bid_px_" + std::to_string(i));
        for (int i = 1; i <= kBookLevels; ++i) v.push_back("bid_qty_" + std::to_string(i));
        for (int i = 1; i <= kBookLevels; ++i) v.push_back("ask_px_" + std::to_string(i));
        for (int i = 1; i <= kBookLevels; ++i) v.push_back("ask_qty_" + std::to_string(i));
        return v;
    }();
    return h;
}

// Loads and fully validates a minute series. Rows are sorted by timestamp;
// duplicates and gaps are hard errors.
inline MarketSeries load_csv(const std::string& path) {
    const csv::Table table = csv::read_file(path);

    std::vector<int> col;
    for (const auto& name : csv_header()) {
        const int c = table.column(name);
        if (c < 0) throw MissingColumn("missing column '" + name + "' in " + path);
        col.push_back(c);
    }

    MarketSeries series;
    series.frames.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const std::string where = path + " row " + std::to_string(r + 1);
        if (row.size() < table.header.size())
            throw InvalidFrame("short row in " + where);
        auto field = [&](int k) -> const std::string& { return row[col[k]]; };
        MarketFrame f;
        f.ts = csv::parse_int(field(0), where);
        f.open = csv::parse_double(field(1), where);
        f.high = csv::parse_double(field(2), where);
        f.low = csv::parse_double(field(3), where);
        f.close = csv::parse_double(field(4), where);
        f.volume = csv::parse_double(field(5), where);
        for (int i = 0; i < kBookLevels; ++i) {
            f.bids[i].price = csv::parse_double(field(6 + i), where);
            f.bids[i].qty = csv::parse_double(field(11 + i), where);
            f.asks[i].price = csv::parse_double(field(16 + i), where);
            f.asks[i].qty = csv::parse_double(field(21 + i), where);
        }
        series.frames.push_back(f);
    }

    std::stable_sort(series.frames.begin(), series.frames.end(),
                     [](const MarketFrame& a, const MarketFrame& b) { return a.ts < b.ts; });

    for (std::size_t i = 0; i < series.frames.size(); ++i)
        validate_frame(series.frames[i], i + 1);

    for (std::size_t i = 1; i < series.frames.size(); ++i) {
        const std::int64_t prev = series.frames[i - 1].ts;
        const std::int64_t cur = series.frames[i].ts;
        if (cur == prev)
            throw NonMonotonicTimestamps("duplicate timestamp " + std::to_string(cur) +
                                         " in " + path);
        if (cur != prev + 1)
            throw GapInSeries("missing minute " + std::to_string(prev + 1) + " in " + path);
    }
    return series;
}

inline void write_csv(const MarketSeries& series, const std::string& path) {
    csv::Writer w(path);
    w.row(csv_header());
    std::vector<std::string> fields;
    for (const auto& f : series.frames) {
        fields.clear();
        fields.push_back(std::to_string(f.ts));
        fields.push_back(csv::format_double(f.open));
        fields.push_back(csv::format_double(f.high));
        fields.push_back(csv::format_double(f.low));
        fields.push_back(csv::format_double(f.close));
        fields.push_back(csv::format_double(f.volume));
        for (int i = 0; i < kBookLevels; ++i) fields.push_back(csv::format_double(f.bids[i].price));
        for (int i = 0; i < kBookLevels; ++i) fields.push_back(csv::format_double(f.bids[i].qty));
        for (int i = 0; i < kBookLevels; ++i) fields.push_back(csv::format_double(f.asks[i].price));
        for (int i = 0; i < kBookLevels; ++i) fields.push_back(csv::format_double(f.asks[i].qty));
        w.row(fields);
    }
}

// Sub-series covering [range.begin, range.end). An empty range is legal.
inline MarketSeries slice_by_time(const MarketSeries& series, const TimeRange& range) {
    MarketSeries out;
    if (range.begin >= range.end) return out;
    if (series.empty())
        throw RangeOutOfBounds("cannot slice an empty series");
    const std::int64_t first = series.frames.front().ts;
    const std::int64_t last = series.frames.back().ts;
    if (range.begin < first || range.end > last + 1)
        throw RangeOutOfBounds("range [" + std::to_string(range.begin) + ", " +
                               std::to_string(range.end) + ") outside series extent [" +
                               std::to_string(first) + ", " + std::to_string(last + 1) + ")");
    const auto b = static_cast<std::size_t>(range.begin - first);
    const auto e = static_cast<std::size_t>(range.end - first);
    out.frames.assign(series.frames.begin() + b, series.frames.begin() + e);
    return out;
}

struct SplitResult {
    MarketSeries train;
    MarketSeries validation;
    MarketSeries test;
};

inline SplitResult split(const MarketSeries& series, const SplitSpec& spec) {
    auto check_order = [](const TimeRange& a, const TimeRange& b) {
        return a.end <= b.begin || a.begin >= a.end || b.begin >= b.end;
    };
    if (!check_order(spec.train, spec.validation) || !check_order(spec.validation, spec.test) ||
        !check_order(spec.train, spec.test))
        throw RangeOutOfBounds("split ranges must be ordered and non-overlapping");
    SplitResult r;
    r.train = slice_by_time(series, spec.train);
    r.validation = slice_by_time(series, spec.validation);
    r.test = slice_by_time(series, spec.test);
    return r;
}

// Frames [end_index - length + 1, end_index], inclusive.
inline MarketSeries window(const MarketSeries& series, std::size_t end_index,
                           std::size_t length) {
    if (length == 0) throw InsufficientHistory("window length must be positive");
    if (end_index >= series.size())
        throw RangeOutOfBounds("window end index " + std::to_string(end_index) +
                               " outside series of length " + std::to_string(series.size()));
    if (end_index + 1 < length)
        throw InsufficientHistory("window of length " + std::to_string(length) +
                                  " ending at index " + std::to_string(end_index));
    MarketSeries out;
    const auto begin = series.frames.begin() + static_cast<std::ptrdiff_t>(end_index + 1 - length);
    out.frames.assign(begin, begin + static_cast<std::ptrdiff_t>(length));
    return out;
}

}  // namespace mhft
