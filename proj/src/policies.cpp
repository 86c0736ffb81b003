#include "greenflag/policies.hpp"

#include <fmt/format.h>

#include "greenflag/errors.hpp"

namespace greenflag {

ActionVector bes_action(std::span<const WorkerProfile> fleet, double bandwidth_max) {
    ActionVector a(fleet.size());
    const double share = fleet.empty() ? 0.0 : bandwidth_max / static_cast<double>(fleet.size());
    for (std::size_t w = 0; w < fleet.size(); ++w) {
        a.cpu_hz[w] = fleet[w].f_max;
        a.power_w[w] = fleet[w].p_max;
        a.bandwidth_hz[w] = share;
    }
    return a;
}

ActionVector rss_action(std::span<const WorkerProfile> fleet, double bandwidth_max, Rng& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    ActionVector a(fleet.size());
    for (std::size_t w = 0; w < fleet.size(); ++w) {
        a.cpu_hz[w] = unit(rng) * fleet[w].f_max;
        a.power_w[w] = unit(rng) * fleet[w].p_max;
        a.bandwidth_hz[w] = unit(rng) * bandwidth_max;
    }
    return a;
}

std::pair<ActionVector, GssMemory> gss_action(GssMemory memory,
                                              std::span<const WorkerProfile> fleet,
                                              double bandwidth_max, const RoundOutcome* last,
                                              Rng& rng) {
    if (last != nullptr) {
        const double energy = last->total_energy();
        if (!memory.best_round_energy || energy < *memory.best_round_energy) {
            memory.best_round_energy = energy;
            ActionVector played(last->workers.size());
            for (std::size_t w = 0; w < last->workers.size(); ++w) {
                played.cpu_hz[w] = last->workers[w].cpu_hz;
                played.power_w[w] = last->workers[w].power_w;
                played.bandwidth_hz[w] = last->workers[w].bandwidth_hz;
            }
            memory.best_action = std::move(played);
            memory.best_bandwidth_max = last->bandwidth_max;
        }
    }

    // Both branches draw the same amount of randomness, so the replay/explore
    // decision never shifts later draws.
    const bool explore = std::uniform_real_distribution<double>(0.0, 1.0)(rng) <
                         memory.exploration_rate;
    ActionVector fresh = rss_action(fleet, bandwidth_max, rng);
    if (!memory.best_round_energy || explore || memory.best_action.size() != fleet.size()) {
        return {std::move(fresh), std::move(memory)};
    }

    ActionVector replay = memory.best_action;
    const double scale =
        memory.best_bandwidth_max > 0.0 ? bandwidth_max / memory.best_bandwidth_max : 0.0;
    for (auto& b : replay.bandwidth_hz) b *= scale;
    return {std::move(replay), std::move(memory)};
}

ActionVector BestEffortPolicy::act(const RoundView& view) {
    return bes_action(view.fleet, view.context.bandwidth_max);
}

void RandomPolicy::begin_episode(std::uint64_t seed) { rng_ = make_rng(seed, streams::policy); }

ActionVector RandomPolicy::act(const RoundView& view) {
    return rss_action(view.fleet, view.context.bandwidth_max, rng_);
}

void GreedyPolicy::begin_episode(std::uint64_t seed) {
    rng_ = make_rng(seed, streams::policy);
    memory_ = GssMemory{};
    memory_.exploration_rate = exploration_rate_;
    last_.reset();
}

ActionVector GreedyPolicy::act(const RoundView& view) {
    auto [action, memory] = gss_action(std::move(memory_), view.fleet, view.context.bandwidth_max,
                                       last_ ? &*last_ : nullptr, rng_);
    memory_ = std::move(memory);
    return action;
}

void GreedyPolicy::observe(const RoundOutcome& outcome) { last_ = outcome; }

std::unique_ptr<ActionSource> make_policy(const std::string& name, const ScenarioConfig& config) {
    if (name == "bes") return std::make_unique<BestEffortPolicy>();
    if (name == "rss" || name == "random") return std::make_unique<RandomPolicy>();
    if (name == "gss") return std::make_unique<GreedyPolicy>(config.gss_exploration_rate);
    throw ConfigError(fmt::format("unknown policy '{}' (expected bes, rss, random or gss)", name));
}

}  // namespace greenflag
