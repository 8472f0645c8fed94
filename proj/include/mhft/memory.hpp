#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mhft/csv.hpp"
#include "mhft/errors.hpp"

namespace mhft {

// One episodic experience: retrieval key (encoder hidden state), the
// state-action pair it came from, and its one-step Q estimate.
struct MemoryEntry {
    std::vector<double> key;
    std::vector<double> state;
    int action = 0;
    double value = 0.0;
    std::uint64_t seq = 0;  // insertion order, assigned by the store
};

struct MemoryConfig {
    std::size_t capacity = 4096;
    std::size_t m_neighbors = 8;
    double epsilon = 1e-3;  // added to every squared distance
    // Attention kernel over retrieved neighbors: `paper` weighs by the
    // distance itself, `inverse` by its reciprocal.
    enum class Kernel { Paper, Inverse };
    Kernel kernel = Kernel::Paper;
};

struct RetrievedEntry {
    double distance = 0.0;  // ||k - k_i||^2 + epsilon
    int action = 0;
    double value = 0.0;
    std::uint64_t seq = 0;
};

// FIFO-bounded key/experience/value store with exact linear-scan retrieval.
// Single-writer; not thread safe.
class EpisodicMemory {
public:
    explicit EpisodicMemory(MemoryConfig cfg) : cfg_(cfg) {
        if (cfg_.capacity < cfg_.m_neighbors || cfg_.m_neighbors < 1 || cfg_.epsilon <= 0.0)
            throw ConfigInvalid("memory config requires capacity >= m >= 1 and epsilon > 0");
    }

    const MemoryConfig& config() const { return cfg_; }
    std::size_t size() const { return entries_.size(); }
    std::uint64_t inserted_total() const { return next_seq_; }

    void add(std::vector<double> key, std::vector<double> state, int action, double value) {
        if (!entries_.empty() && key.size() != entries_.front().key.size())
            throw KeyDimMismatch("memory key dimension changed from " +
                                 std::to_string(entries_.front().key.size()) + " to " +
                                 std::to_string(key.size()));
        MemoryEntry e;
        e.key = std::move(key);
        e.state = std::move(state);
        e.action = action;
        e.value = value;
        e.seq = next_seq_++;
        if (entries_.size() == cfg_.capacity) {
            entries_[head_] = std::move(e);  // overwrite the oldest slot
            head_ = (head_ + 1) % cfg_.capacity;
        } else {
            entries_.push_back(std::move(e));
        }
    }

    // Top-m nearest entries over the whole store by squared L2 distance
    // plus epsilon; action masking happens in aggregate(). Ties break on
    // insertion order so retrieval is deterministic.
    std::vector<RetrievedEntry> lookup(const std::vector<double>& key) const {
        if (entries_.empty()) throw EmptyMemory("lookup on an empty memory");
        if (key.size() != entries_.front().key.size())
            throw KeyDimMismatch("query key dimension mismatch");
        std::vector<RetrievedEntry> all;
        all.reserve(entries_.size());
        for (const MemoryEntry& e : entries_) {
            double d = cfg_.epsilon;
            for (std::size_t i = 0; i < key.size(); ++i) {
                const double diff = key[i] - e.key[i];
                d += diff * diff;
            }
            all.push_back({d, e.action, e.value, e.seq});
        }
        const std::size_t m = std::min<std::size_t>(cfg_.m_neighbors, all.size());
        auto cmp = [](const RetrievedEntry& a, const RetrievedEntry& b) {
            if (a.distance != b.distance) return a.distance < b.distance;
            return a.seq < b.seq;
        };
        std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(m), all.end(),
                          cmp);
        all.resize(m);
        return all;
    }

    // Attention-weighted value over the retrieved entries whose action
    // matches; nullopt when none does.
    std::optional<double> aggregate(const std::vector<RetrievedEntry>& retrieved,
                                    int action) const {
        double weight_sum = 0.0;
        double value_sum = 0.0;
        for (const RetrievedEntry& e : retrieved) {
            if (e.action != action) continue;
            const double w = cfg_.kernel == MemoryConfig::Kernel::Paper ? e.distance
                                                                        : 1.0 / e.distance;
            weight_sum += w;
            value_sum += w * e.value;
        }
        if (weight_sum == 0.0) return std::nullopt;
        return value_sum / weight_sum;
    }

    std::optional<double> query(const std::vector<double>& key, int action) const {
        if (entries_.empty()) return std::nullopt;
        return aggregate(lookup(key), action);
    }

    // All live entries in insertion order. head_ stays 0 until the ring fills.
    std::vector<const MemoryEntry*> entries_in_order() const {
        std::vector<const MemoryEntry*> out;
        const std::size_t n = entries_.size();
        out.reserve(n);
        for (std::size_t i = 0; i < n; ++i) out.push_back(&entries_[(head_ + i) % n]);
        return out;
    }

    void dump_csv(const std::string& path, const std::vector<double>& last_query) const {
        csv::Writer w(path);
        w.row({"seq", "action", "value", "distance_to_last_query"});
        for (const MemoryEntry* e : entries_in_order()) {
            double d = cfg_.epsilon;
            for (std::size_t i = 0; i < last_query.size() && i < e->key.size(); ++i) {
                const double diff = last_query[i] - e->key[i];
                d += diff * diff;
            }
            w.row({std::to_string(e->seq), std::to_string(e->action),
                   csv::format_double(e->value), csv::format_double(d)});
        }
    }

private:
    MemoryConfig cfg_;
    std::vector<MemoryEntry> entries_;
    std::size_t head_ = 0;  // oldest slot once the ring is full
    std::uint64_t next_seq_ = 0;
};

}  // namespace mhft
