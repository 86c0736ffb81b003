#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>

#include "greenflag/flsim.hpp"

namespace greenflag {

/// Every worker at full CPU and power; the channel split evenly so all
/// uploads run at once.
ActionVector bes_action(std::span<const WorkerProfile> fleet, double bandwidth_max);

/// Each component uniform in [0, its maximum].
ActionVector rss_action(std::span<const WorkerProfile> fleet, double bandwidth_max, Rng& rng);

struct GssMemory {
    std::optional<double> best_round_energy;
    ActionVector best_action;
    double best_bandwidth_max = 0.0;
    double exploration_rate = 0.1;
};

/// Adopts `last` into memory when its total energy beats the best so far,
/// then replays the best allocation with probability 1 - exploration_rate or
/// explores with a fresh random one. A replay keeps each worker's share of
/// the channel when the capacity changes between rounds.
std::pair<ActionVector, GssMemory> gss_action(GssMemory memory,
                                              std::span<const WorkerProfile> fleet,
                                              double bandwidth_max, const RoundOutcome* last,
                                              Rng& rng);

class BestEffortPolicy final : public ActionSource {
public:
    std::string name() const override { return "bes"; }
    ActionVector act(const RoundView& view) override;
};

class RandomPolicy final : public ActionSource {
public:
    std::string name() const override { return "rss"; }
    void begin_episode(std::uint64_t seed) override;
    ActionVector act(const RoundView& view) override;

private:
    Rng rng_;
};

class GreedyPolicy final : public ActionSource {
public:
    explicit GreedyPolicy(double exploration_rate = 0.1) : exploration_rate_(exploration_rate) {}

    std::string name() const override { return "gss"; }
    void begin_episode(std::uint64_t seed) override;
    ActionVector act(const RoundView& view) override;
    void observe(const RoundOutcome& outcome) override;

    const GssMemory& memory() const noexcept { return memory_; }

private:
    double exploration_rate_;
    GssMemory memory_;
    std::optional<RoundOutcome> last_;
    Rng rng_;
};

/// "bes", "rss" (alias "random") or "gss". Throws ConfigError otherwise.
std::unique_ptr<ActionSource> make_policy(const std::string& name, const ScenarioConfig& config);

}  // namespace greenflag
