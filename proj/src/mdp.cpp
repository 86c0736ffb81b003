#include "greenflag/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace greenflag {

namespace {

double min_max(double x, double lo, double hi) { return hi > lo ? (x - lo) / (hi - lo) : 0.0; }

struct Scales {
    double f_lo, f_hi, p_lo, p_hi;

    explicit Scales(const ScenarioConfig& c)
        : f_lo(std::min(c.low_end_f_min_hz, c.high_end_f_min_hz)),
          f_hi(std::max(c.low_end_f_max_hz, c.high_end_f_max_hz)),
          p_lo(dbm_to_watts(std::min(c.low_end_p_min_dbm, c.high_end_p_min_dbm))),
          p_hi(dbm_to_watts(std::max(c.low_end_p_max_dbm, c.high_end_p_max_dbm))) {}
};

// Capability fields shared by the initial and the per-round observation.
void fill_static(std::vector<double>& v, const Episode& episode) {
    const auto& c = episode.config();
    const auto& fleet = episode.fleet();
    const std::size_t k = fleet.size();
    const Scales s(c);
    for (std::size_t w = 0; w < k; ++w) {
        v[state_index(StateField::f_max, w, k)] = min_max(fleet[w].f_max, s.f_lo, s.f_hi);
        v[state_index(StateField::p_max, w, k)] = min_max(fleet[w].p_max, s.p_lo, s.p_hi);
        v[state_index(StateField::dataset_size, w, k)] =
            min_max(episode.upcoming().states[w].dataset_size, c.samples_min, c.samples_max);
        v[state_index(StateField::battery_capacity, w, k)] =
            min_max(fleet[w].battery_capacity, c.battery_min_j, c.battery_max_j);
    }
}

}  // namespace

StateVector StateBuilder::initial(const Episode& episode) {
    wasted_scale_ = 1.0;
    harvest_scale_ = 1.0;
    const auto& c = episode.config();
    const auto& fleet = episode.fleet();
    const std::size_t k = fleet.size();
    const auto& ctx = episode.upcoming();

    StateVector s;
    s.values.assign(state_size(k), 0.0);
    fill_static(s.values, episode);
    for (std::size_t w = 0; w < k; ++w) {
        s.values[state_index(StateField::battery, w, k)] =
            ctx.states[w].battery / fleet[w].battery_capacity;
    }
    s.values[8 * k] = episode.global_error();
    s.values[8 * k + 1] = min_max(ctx.bandwidth_max, c.bandwidth_min_hz, c.bandwidth_max_hz);
    return s;
}

StateVector StateBuilder::build(const RoundOutcome& outcome, const Episode& episode) {
    const auto& c = episode.config();
    const auto& fleet = episode.fleet();
    const std::size_t k = fleet.size();

    for (const auto& r : outcome.workers) {
        wasted_scale_ = std::max(wasted_scale_, r.energy.wasted);
        harvest_scale_ = std::max(harvest_scale_, r.harvest);
    }

    StateVector s;
    s.values.assign(state_size(k), 0.0);
    fill_static(s.values, episode);
    for (std::size_t w = 0; w < k; ++w) {
        const auto& r = outcome.workers[w];
        const double iterations = r.participating ? r.local_iterations : 0.0;
        s.values[state_index(StateField::local_iterations, w, k)] =
            iterations / c.local_iterations_max;
        s.values[state_index(StateField::wasted_energy, w, k)] = r.energy.wasted / wasted_scale_;
        s.values[state_index(StateField::harvest, w, k)] = r.harvest / harvest_scale_;
        s.values[state_index(StateField::battery, w, k)] =
            r.energy.battery_after / fleet[w].battery_capacity;
    }
    s.values[8 * k] = episode.global_error();
    s.values[8 * k + 1] = min_max(outcome.bandwidth_max, c.bandwidth_min_hz, c.bandwidth_max_hz);
    return s;
}

ActionBounds ActionBounds::from(std::span<const WorkerProfile> fleet, double bandwidth_max) {
    ActionBounds b;
    b.b_max = bandwidth_max;
    for (const auto& p : fleet) {
        b.f_max.push_back(p.f_max);
        b.p_max.push_back(p.p_max);
    }
    return b;
}

ActionVector clamp_action(std::span<const double> raw, const ActionBounds& bounds) {
    const std::size_t k = bounds.f_max.size();
    if (raw.size() != 3 * k) {
        throw std::invalid_argument(
            fmt::format("action has {} entries, expected {} (3 x {} workers)", raw.size(), 3 * k, k));
    }
    auto map = [](double x, double max) {
        if (std::isnan(x)) throw std::invalid_argument("action contains NaN");
        return (std::clamp(x, -1.0, 1.0) + 1.0) * 0.5 * max;
    };
    ActionVector a(k);
    for (std::size_t w = 0; w < k; ++w) {
        a.cpu_hz[w] = map(raw[w], bounds.f_max[w]);
        a.power_w[w] = map(raw[k + w], bounds.p_max[w]);
        a.bandwidth_hz[w] = map(raw[2 * k + w], bounds.b_max);
    }
    return a;
}

std::vector<double> normalize_action(const ActionVector& action, const ActionBounds& bounds) {
    const std::size_t k = action.size();
    auto unmap = [](double v, double max) { return max > 0.0 ? 2.0 * v / max - 1.0 : -1.0; };
    std::vector<double> raw(3 * k);
    for (std::size_t w = 0; w < k; ++w) {
        raw[w] = unmap(action.cpu_hz[w], bounds.f_max[w]);
        raw[k + w] = unmap(action.power_w[w], bounds.p_max[w]);
        raw[2 * k + w] = unmap(action.bandwidth_hz[w], bounds.b_max);
    }
    return raw;
}

ActionVector clip_to_bounds(const ActionVector& action, const ActionBounds& bounds) {
    ActionVector a = action;
    for (std::size_t w = 0; w < a.size(); ++w) {
        a.cpu_hz[w] = std::clamp(a.cpu_hz[w], 0.0, bounds.f_max[w]);
        a.power_w[w] = std::clamp(a.power_w[w], 0.0, bounds.p_max[w]);
        a.bandwidth_hz[w] = std::clamp(a.bandwidth_hz[w], 0.0, bounds.b_max);
    }
    return a;
}

PenaltyWeights PenaltyWeights::from(const ScenarioConfig& config) {
    return PenaltyWeights{config.mu_deadline, config.mu_idle, config.mu_admission};
}

PenaltyIndicators penalty_indicators(const RoundOutcome& outcome) {
    PenaltyIndicators p;
    p.idle = outcome.all_idle ? 1 : 0;
    for (const auto& r : outcome.workers) {
        p.deadline.push_back(r.participating && r.deadline_violation ? 1 : 0);
        p.admission.push_back(r.participating && r.admission_failure ? 1 : 0);
    }
    return p;
}

RewardBreakdown compute_reward(const RoundOutcome& outcome, const PenaltyWeights& weights,
                               double energy_scale) {
    const auto p = penalty_indicators(outcome);
    RewardBreakdown r;
    for (std::size_t w = 0; w < outcome.workers.size(); ++w) {
        const auto& worker = outcome.workers[w];
        if (worker.participating) {
            const double supply = worker.harvest + worker.energy.battery_before;
            r.grid_demand += std::max(0.0, worker.energy.demand() - supply);
        }
        r.wasted += worker.energy.wasted;
        r.deadline_penalty += weights.deadline * p.deadline[w];
        r.admission_penalty += weights.admission * p.admission[w] * p.deadline[w];
    }
    r.grid_demand /= energy_scale;
    r.wasted /= energy_scale;
    r.idle_penalty = weights.idle * p.idle;
    r.total = 0.0 - (r.grid_demand + r.penalty());
    return r;
}

Environment::Environment(ScenarioConfig config, std::span<const WeatherRecord> weather)
    : config_(std::move(config)), weather_(weather) {
    config_.validate();
}

std::size_t Environment::workers() const noexcept {
    return episode_ ? episode_->fleet().size() : static_cast<std::size_t>(config_.worker_count);
}

const Episode& Environment::episode() const {
    if (!episode_) throw EnvironmentError("environment has not been reset");
    return *episode_;
}

StateVector Environment::reset(std::uint64_t seed, std::optional<ScenarioKind> kind) {
    ScenarioConfig config = config_;
    if (kind) config.scenario_kind = *kind;
    episode_.emplace(std::move(config), weather_, seed);
    states_ = StateBuilder{};
    return states_.initial(*episode_);
}

StepResult Environment::step(std::span<const double> raw_action) {
    if (!episode_) throw EnvironmentError("step before reset");
    if (episode_->done()) throw EnvironmentError("episode is done; reset first");

    const auto bounds = ActionBounds::from(episode_->fleet(), episode_->upcoming().bandwidth_max);
    const ActionVector action = clamp_action(raw_action, bounds);

    StepResult result;
    result.outcome = episode_->step(action);
    const auto& c = episode_->config();
    result.reward = compute_reward(result.outcome, PenaltyWeights::from(c), c.reward_energy_scale);
    result.state = states_.build(result.outcome, *episode_);
    result.done = episode_->done();
    result.metrics = episode_->metrics();
    return result;
}

}  // namespace greenflag
