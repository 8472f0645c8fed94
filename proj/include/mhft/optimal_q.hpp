#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mhft/env.hpp"
#include "mhft/errors.hpp"
#include "mhft/sha256.hpp"

namespace mhft {

// Action values Q*[t][p][a] over the decision steps of a price segment.
// A segment of T closes has T-1 decision steps; the terminal step earns its
// immediate reward with no continuation (no forced liquidation).
struct OptimalQTable {
    std::size_t steps = 0;
    std::vector<double> q;  // steps x 2 positions x 2 actions

    OptimalQTable() = default;
    explicit OptimalQTable(std::size_t s) : steps(s), q(s * 4, 0.0) {}

    double at(std::size_t t, int p, int a) const { return q[t * 4 + p * 2 + a]; }
    double& at(std::size_t t, int p, int a) { return q[t * 4 + p * 2 + a]; }

    std::array<double, 2> action_values(std::size_t t, int p) const {
        return {at(t, p, 0), at(t, p, 1)};
    }

    // Ties resolve to action 0 (hold cash).
    int greedy_action(std::size_t t, int p) const { return at(t, p, 1) > at(t, p, 0) ? 1 : 0; }
};

// Backward induction: Q*[t][p][a] = r(t,p,a) + gamma * max_a' Q*[t+1][a][a'].
inline OptimalQTable dp_optimal_q(const std::vector<double>& closes, const EnvConfig& cfg) {
    if (closes.size() < 2) throw SegmentTooShort("optimal-Q needs at least 2 closes");
    const std::size_t steps = closes.size() - 1;
    OptimalQTable table(steps);
    for (int p = 0; p < 2; ++p)
        for (int a = 0; a < 2; ++a)
            table.at(steps - 1, p, a) = step_reward(closes[steps - 1], closes[steps], p, a, cfg);
    for (std::size_t t = steps - 1; t-- > 0;) {
        for (int p = 0; p < 2; ++p) {
            for (int a = 0; a < 2; ++a) {
                const double cont = std::max(table.at(t + 1, a, 0), table.at(t + 1, a, 1));
                table.at(t, p, a) =
                    step_reward(closes[t], closes[t + 1], p, a, cfg) + cfg.gamma * cont;
            }
        }
    }
    return table;
}

// Exhaustive enumeration over all action sequences; the independent oracle
// for dp_optimal_q. Exponential, so the segment is capped at 14 closes.
inline OptimalQTable brute_force_q(const std::vector<double>& closes, const EnvConfig& cfg) {
    if (closes.size() < 2) throw SegmentTooShort("optimal-Q needs at least 2 closes");
    if (closes.size() > 14)
        throw SegmentTooLong("brute-force enumeration capped at 14 closes, got " +
                             std::to_string(closes.size()));
    const std::size_t steps = closes.size() - 1;
    OptimalQTable table(steps);
    for (std::size_t t = 0; t < steps; ++t) {
        const std::size_t tail = steps - 1 - t;  // free actions after the forced first one
        for (int p = 0; p < 2; ++p) {
            for (int a = 0; a < 2; ++a) {
                double best = -1e300;
                for (std::uint64_t mask = 0; mask < (1ULL << tail); ++mask) {
                    double total = step_reward(closes[t], closes[t + 1], p, a, cfg);
                    double discount = 1.0;
                    int pos = a;
                    for (std::size_t k = 0; k < tail; ++k) {
                        const int act = static_cast<int>((mask >> k) & 1ULL);
                        discount *= cfg.gamma;
                        total += discount * step_reward(closes[t + 1 + k], closes[t + 2 + k],
                                                        pos, act, cfg);
                        pos = act;
                    }
                    best = std::max(best, total);
                }
                table.at(t, p, a) = best;
            }
        }
    }
    return table;
}

// Supervisor target: softmax of the optimal action values at temperature tau.
inline std::array<double, 2> supervisor_distribution(const OptimalQTable& table, std::size_t t,
                                                     int position, double tau = 1.0) {
    const auto qv = table.action_values(t, position);
    const std::vector<double> p = softmax({qv[0], qv[1]}, tau);
    return {p[0], p[1]};
}

// ============================================================================
// Disk cache: one .bin (raw doubles) + one .json sidecar per
// (chunk id, fee, gamma, m_size, closes hash) key. Reused across epochs.
// ============================================================================
class OptimalQCache {
public:
    explicit OptimalQCache(std::string dir) : dir_(std::move(dir)) {
        std::filesystem::create_directories(dir_);
    }

    OptimalQTable get_or_compute(const std::string& chunk_id, const std::vector<double>& closes,
                                 const EnvConfig& cfg) {
        Sha256 h;
        h.update(closes.data(), closes.size() * sizeof(double));
        nlohmann::json key = {{"chunk_id", chunk_id},
                              {"fee_rate", cfg.fee_rate},
                              {"gamma", cfg.gamma},
                              {"m_size", cfg.m_size},
                              {"closes_sha256", h.hex_digest()},
                              {"steps", closes.size() - 1}};
        const std::string stem = dir_ + "/qstar_" + sha256_hex(key.dump()).substr(0, 16);
        const std::string bin_path = stem + ".bin";
        const std::string json_path = stem + ".json";

        if (std::filesystem::exists(bin_path) && std::filesystem::exists(json_path)) {
            std::ifstream jin(json_path);
            nlohmann::json stored = nlohmann::json::parse(jin, nullptr, false);
            if (stored == key) {
                OptimalQTable table(closes.size() - 1);
                std::ifstream bin(bin_path, std::ios::binary);
                bin.read(reinterpret_cast<char*>(table.q.data()),
                         static_cast<std::streamsize>(table.q.size() * sizeof(double)));
                if (bin.gcount() ==
                    static_cast<std::streamsize>(table.q.size() * sizeof(double)))
                    return table;
            }
        }

        OptimalQTable table = dp_optimal_q(closes, cfg);
        {
            std::ofstream bin(bin_path, std::ios::binary);
            bin.write(reinterpret_cast<const char*>(table.q.data()),
                      static_cast<std::streamsize>(table.q.size() * sizeof(double)));
            std::ofstream jout(json_path);
            jout << key.dump(2) << '\n';
        }
        return table;
    }

private:
    std::string dir_;
};

}  // namespace mhft
