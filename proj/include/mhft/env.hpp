#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "mhft/decomposition.hpp"
#include "mhft/errors.hpp"
#include "mhft/indicators.hpp"
#include "mhft/market_data.hpp"

namespace mhft {

struct EnvConfig {
    double fee_rate = 0.0002;  // fraction of traded notional, charged per position change
    double m_size = 1.0;       // holding size in base-currency units
    double gamma = 0.99;       // discount factor
};

// Reward for holding/target position `action` from close_t to close_next,
// starting from `position`. Shared by the environment, the dynamic-programming
// supervisor, and both MDP levels.
inline double step_reward(double close_t, double close_next, int position, int action,
                          const EnvConfig& cfg) {
    const double fee = cfg.fee_rate * close_t;
    return (action * (close_next - close_t) - fee * std::abs(action - position)) * cfg.m_size;
}

struct EnvState {
    std::size_t t = 0;    // current frame index into the series
    int position = 0;     // P_t, 0 or 1 lots
    double cash = 0.0;
    double net_value = 0.0;
    bool done = false;
};

struct Transition {
    std::size_t t = 0;  // index of the state frame
    int position = 0;   // position before acting
    int action = 0;
    double reward = 0.0;
    bool done = false;  // next state is terminal
};

// Long-only {0,1}-position simulator over a contiguous segment of a series.
// One episode per chunk; the last frame yields no transition.
class Env {
public:
    Env(const MarketSeries& series, EnvConfig cfg) : series_(&series), cfg_(cfg) {}

    const EnvConfig& config() const { return cfg_; }

    EnvState reset(std::size_t start, std::size_t end, int initial_position = 0) {
        if (start + 1 < kContextWindow)
            throw InsufficientHistory("episode start " + std::to_string(start) +
                                      " lacks the context window");
        if (end > series_->size() || start + 2 > end)
            throw RangeOutOfBounds("episode range [" + std::to_string(start) + ", " +
                                   std::to_string(end) + ") invalid");
        end_ = end;
        state_.t = start;
        state_.position = initial_position;
        state_.cash = 10.0 * cfg_.m_size * series_->close(start);
        state_.net_value =
            state_.cash + state_.position * cfg_.m_size * series_->close(start);
        state_.done = false;
        return state_;
    }

    const EnvState& state() const { return state_; }

    // Applies the target position, charges the fee at the current close, and
    // advances one minute. Returns the realized reward.
    double step(int action) {
        if (state_.done) throw SteppedAfterDone("step() after the episode ended");
        const double price_now = series_->close(state_.t);
        const double price_next = series_->close(state_.t + 1);
        const double reward = step_reward(price_now, price_next, state_.position, action, cfg_);

        if (action != state_.position) {
            const double fee = cfg_.fee_rate * price_now * cfg_.m_size;
            if (action > state_.position)
                state_.cash -= price_now * cfg_.m_size + fee;  // buy
            else
                state_.cash += price_now * cfg_.m_size - fee;  // sell
            state_.position = action;
        }
        state_.t += 1;
        state_.net_value = state_.cash + state_.position * cfg_.m_size * series_->close(state_.t);
        state_.done = state_.t + 1 >= end_;
        return reward;
    }

private:
    const MarketSeries* series_;
    EnvConfig cfg_;
    EnvState state_{};
    std::size_t end_ = 0;
};

// Action chosen from the frame index and current position; feature lookup is
// the policy's own business.
using Policy = std::function<int(std::size_t t, int position)>;

struct EpisodeResult {
    std::vector<Transition> transitions;
    double initial_net_value = 0.0;
    double final_net_value = 0.0;

    double total_reward() const {
        double sum = 0.0;
        for (const auto& tr : transitions) sum += tr.reward;
        return sum;
    }
};

// Rolls a policy over [start, end). Episodes starting before the context
// window becomes available are clipped to the first valid minute.
inline EpisodeResult run_episode(const MarketSeries& series, std::size_t start, std::size_t end,
                                 const Policy& policy, const EnvConfig& cfg,
                                 int initial_position = 0) {
    Env env(series, cfg);
    const std::size_t first = std::max<std::size_t>(start, kContextWindow - 1);
    EpisodeResult result;
    EnvState s = env.reset(first, end, initial_position);
    result.initial_net_value = s.net_value;
    while (!env.state().done) {
        Transition tr;
        tr.t = env.state().t;
        tr.position = env.state().position;
        tr.action = policy(tr.t, tr.position);
        tr.reward = env.step(tr.action);
        tr.done = env.state().done;
        result.transitions.push_back(tr);
    }
    result.final_net_value = env.state().net_value;
    return result;
}

inline EpisodeResult run_episode(const MarketSeries& series, const Chunk& chunk,
                                 const Policy& policy, const EnvConfig& cfg,
                                 int initial_position = 0) {
    return run_episode(series, chunk.start, chunk.end, policy, cfg, initial_position);
}

}  // namespace mhft
