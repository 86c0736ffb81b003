#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "greenflag/flsim.hpp"

namespace greenflag {

/// Observation layout, field-major. For K workers the vector holds eight
/// per-worker blocks of K entries followed by two globals:
///
///   [0K, 1K)  local iterations of the last round      / local_iterations_max
///   [1K, 2K)  wasted energy of the last round         / running max
///   [2K, 3K)  f_max                                   min-max over both classes
///   [3K, 4K)  p_max                                   min-max over both classes
///   [4K, 5K)  dataset size                            min-max over samples range
///   [5K, 6K)  harvest of the last round               / running max
///   [6K, 7K)  battery capacity                        min-max over capacity range
///   [7K, 8K)  stored battery energy                   / battery capacity
///   8K        global error                            as is, in [0, 1]
///   8K + 1    channel capacity of the last round      min-max over capacity range
///
/// Running maxima start at 1 J and grow within an episode.
struct StateVector {
    std::vector<double> values;
};

enum class StateField : std::size_t {
    local_iterations = 0,
    wasted_energy,
    f_max,
    p_max,
    dataset_size,
    harvest,
    battery_capacity,
    battery,
};

inline constexpr std::size_t kPerWorkerFields = 8;
inline constexpr std::size_t state_size(std::size_t workers) {
    return kPerWorkerFields * workers + 2;
}
inline constexpr std::size_t state_index(StateField field, std::size_t worker,
                                         std::size_t workers) {
    return static_cast<std::size_t>(field) * workers + worker;
}

class StateBuilder {
public:
    /// Round-0 observation: no history, error 1, capabilities and stored
    /// energy as they are before the first round.
    StateVector initial(const Episode& episode);

    /// Observation after `outcome`, the round just played.
    StateVector build(const RoundOutcome& outcome, const Episode& episode);

private:
    double wasted_scale_ = 1.0;
    double harvest_scale_ = 1.0;
};

struct ActionBounds {
    std::vector<double> f_max;
    std::vector<double> p_max;
    double b_max = 0.0;

    static ActionBounds from(std::span<const WorkerProfile> fleet, double bandwidth_max);
};

/// Affine map of agent outputs in [-1, 1] to [0, max] per component, laid out
/// as K CPU values, then K powers, then K bandwidths. Values outside [-1, 1]
/// are clipped first. Throws std::invalid_argument for a length other than 3K.
ActionVector clamp_action(std::span<const double> raw, const ActionBounds& bounds);

/// Inverse of clamp_action for in-bounds actions.
std::vector<double> normalize_action(const ActionVector& action, const ActionBounds& bounds);

/// Projects an allocation onto the box [0, max].
ActionVector clip_to_bounds(const ActionVector& action, const ActionBounds& bounds);

struct PenaltyWeights {
    double deadline = 0.3;   // mu1
    double idle = 0.4;       // mu2
    double admission = 0.3;  // mu3

    static PenaltyWeights from(const ScenarioConfig& config);
};

struct PenaltyIndicators {
    std::vector<int> deadline;   // P1 per worker
    int idle = 0;                // P2
    std::vector<int> admission;  // P3 per worker
};

PenaltyIndicators penalty_indicators(const RoundOutcome& outcome);

struct RewardBreakdown {
    double grid_demand = 0.0;        // sum Omega (E^C + E^T - (E^R + E^B))_+
    double wasted = 0.0;             // sum E^W
    double deadline_penalty = 0.0;   // mu1 sum P1
    double idle_penalty = 0.0;       // mu2 P2
    double admission_penalty = 0.0;  // mu3 sum P3 P1
    double total = 0.0;              // negative of the sum

    double penalty() const noexcept {
        return wasted + deadline_penalty + idle_penalty + admission_penalty;
    }
};

/// Energy terms are divided by energy_scale; the weighted indicators are not.
RewardBreakdown compute_reward(const RoundOutcome& outcome, const PenaltyWeights& weights,
                               double energy_scale = 1.0);

class EnvironmentError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

struct StepResult {
    StateVector state;
    RewardBreakdown reward;
    bool done = false;
    RoundOutcome outcome;
    EpisodeMetrics metrics;
};

/// Reset/step view of an Episode for RL agents.
class Environment {
public:
    Environment(ScenarioConfig config, std::span<const WeatherRecord> weather);

    StateVector reset(std::uint64_t seed, std::optional<ScenarioKind> kind = std::nullopt);
    StepResult step(std::span<const double> raw_action);

    bool active() const noexcept { return episode_.has_value() && !episode_->done(); }
    const Episode& episode() const;
    std::size_t action_size() const noexcept { return 3 * workers(); }
    std::size_t workers() const noexcept;
    const ScenarioConfig& config() const noexcept { return config_; }

private:
    ScenarioConfig config_;
    std::span<const WeatherRecord> weather_;
    std::optional<Episode> episode_;
    StateBuilder states_;
};

}  // namespace greenflag
