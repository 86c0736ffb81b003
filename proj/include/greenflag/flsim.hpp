#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "greenflag/channel.hpp"
#include "greenflag/energy.hpp"
#include "greenflag/rng.hpp"
#include "greenflag/scenario.hpp"
#include "greenflag/weather.hpp"

namespace greenflag {

/// Physical resource allocation for one round, one entry per worker.
struct ActionVector {
    std::vector<double> cpu_hz;
    std::vector<double> power_w;
    std::vector<double> bandwidth_hz;

    ActionVector() = default;
    explicit ActionVector(std::size_t workers)
        : cpu_hz(workers, 0.0), power_w(workers, 0.0), bandwidth_hz(workers, 0.0) {}

    std::size_t size() const noexcept { return cpu_hz.size(); }
    bool operator==(const ActionVector&) const = default;
};

/// Environment values fixed before the policy acts in round `round`.
struct RoundContext {
    std::size_t round = 1;         // 1-based
    double bandwidth_max = 0.0;    // Hz
    std::vector<WorkerState> states;
};

struct WorkerRoundResult {
    double cpu_hz = 0.0;
    double power_w = 0.0;
    double bandwidth_hz = 0.0;
    bool participating = false;     // Omega
    int local_iterations = 0;
    double harvest = 0.0;           // E^R available this round
    double compute_time = 0.0;      // tau, kNever when idle
    double transmit_time = 0.0;     // tr if served, kNever when idle
    ScheduleOutcome schedule{};
    double completion_time = kNever;  // tau + tq + tr, kNever if never admitted
    bool deadline_violation = false;  // P1
    bool admission_failure = false;   // P3
    bool on_time = false;
    EnergyBreakdown energy{};
};

struct RoundOutcome {
    std::size_t round = 0;
    double bandwidth_max = 0.0;
    double deadline = 0.0;
    std::vector<WorkerRoundResult> workers;
    bool all_idle = false;          // P2
    double duration = 0.0;          // s, <= deadline
    double participation = 0.0;     // sample-weighted on-time fraction
    ChannelTimeline timeline;

    double total_energy() const;
    double grid_energy() const;
    double green_energy() const;
    double wasted_energy() const;
    int deadline_violations() const;
    int admission_failures() const;
};

struct EpisodeMetrics {
    double total_energy = 0.0;
    double grid_energy = 0.0;
    double green_energy = 0.0;
    double wasted_energy = 0.0;
    double mean_round_duration = 0.0;
    double violations_per_worker = 0.0;
    int global_iterations = 0;
    double discounted_grid = 0.0;
    double final_error = 1.0;
    bool converged = false;
    bool truncated = false;
};

struct RoundRecord {
    std::size_t round = 0;
    double global_error = 1.0;
    double participation = 0.0;
    double duration = 0.0;
    double bandwidth_max = 0.0;
    double total_energy = 0.0;
    double grid_energy = 0.0;
    double green_energy = 0.0;
    double wasted_energy = 0.0;
    int deadline_violations = 0;
    int admission_failures = 0;
    int idle_workers = 0;
    bool all_idle = false;
};

std::vector<WorkerProfile> sample_worker_fleet(const ScenarioConfig& config, std::uint64_t seed);

/// Number of low-end workers: normal(mean K, std K) truncated to [0, cap K],
/// rounded.
int sample_low_end_count(const ScenarioConfig& config, Rng& rng);

struct OutagePlan {
    std::vector<bool> affected;                 // per worker
    std::vector<std::vector<bool>> no_harvest;  // [worker][round - 1]
    std::vector<double> initial_battery_fraction;
    std::size_t window_begin = 0;               // scenario 2, 0-based round
    std::size_t window_end = 0;                 // exclusive
    bool permanent = false;                     // scenario 3: blocked every round

    bool harvest_blocked(std::size_t worker, std::size_t round) const;
};

OutagePlan sample_outages(const ScenarioConfig& config, std::uint64_t seed,
                          std::size_t iterations);

int sample_local_iterations(const ScenarioConfig& config, std::size_t worker, std::size_t round,
                            std::uint64_t seed);

/// e_prev * rho^u with rho = target^(1 / calibration_rounds).
double surrogate_update(double e_prev, double participation, const ScenarioConfig& config);

/// True once the error has reached the target, allowing for the rounding of
/// rho^R against the target itself.
bool reached_target(double error, const ScenarioConfig& config);

/// One global iteration: computation, FCFS upload scheduling, deadline
/// accounting and hierarchical energy settlement. CPU and power must already
/// lie inside the worker bounds; bandwidth may exceed the channel, which makes
/// the request inadmissible.
RoundOutcome run_round(std::span<const WorkerProfile> fleet, const RoundContext& context,
                       const ActionVector& action, const ScenarioConfig& config);

struct RoundView {
    std::span<const WorkerProfile> fleet;
    const RoundContext& context;
    const ScenarioConfig& config;
};

/// Anything that can choose an allocation each round.
class ActionSource {
public:
    virtual ~ActionSource() = default;
    virtual std::string name() const = 0;
    virtual void begin_episode(std::uint64_t /*seed*/) {}
    virtual ActionVector act(const RoundView& view) = 0;
    virtual void observe(const RoundOutcome& /*outcome*/) {}
};

/// Sequential state of one FL process: fleet, batteries, harvest, surrogate
/// error and accumulated metrics.
class Episode {
public:
    Episode(ScenarioConfig config, std::span<const WeatherRecord> weather, std::uint64_t seed);

    const ScenarioConfig& config() const noexcept { return config_; }
    std::uint64_t seed() const noexcept { return seed_; }
    const std::vector<WorkerProfile>& fleet() const noexcept { return fleet_; }
    const OutagePlan& outages() const noexcept { return outages_; }
    const HarvestSeries& harvest() const noexcept { return harvest_; }

    /// Context of the round the next step() will run.
    const RoundContext& upcoming() const noexcept { return upcoming_; }
    RoundView view() const { return RoundView{fleet_, upcoming_, config_}; }

    RoundOutcome step(const ActionVector& action);

    bool done() const noexcept { return converged_ || truncated_; }
    bool converged() const noexcept { return converged_; }
    bool truncated() const noexcept { return truncated_; }
    double global_error() const noexcept { return error_; }
    std::size_t rounds_completed() const noexcept { return trace_.size(); }

    EpisodeMetrics metrics() const;
    const std::vector<RoundRecord>& trace() const noexcept { return trace_; }

private:
    RoundContext make_context(std::size_t round) const;

    ScenarioConfig config_;
    std::uint64_t seed_;
    std::vector<WorkerProfile> fleet_;
    std::vector<double> dataset_sizes_;
    std::vector<double> batteries_;
    OutagePlan outages_;
    HarvestSeries harvest_;
    RoundContext upcoming_;
    double error_ = 1.0;
    bool converged_ = false;
    bool truncated_ = false;
    std::vector<RoundRecord> trace_;
    std::vector<double> grid_per_round_;
    std::vector<int> violations_per_worker_;
    double total_energy_ = 0.0;
    double grid_energy_ = 0.0;
    double green_energy_ = 0.0;
    double wasted_energy_ = 0.0;
    double duration_sum_ = 0.0;
};

struct EpisodeResult {
    std::uint64_t seed = 0;
    EpisodeMetrics metrics;
    std::vector<RoundRecord> trace;
};

EpisodeResult run_episode(const ScenarioConfig& config, std::span<const WeatherRecord> weather,
                          ActionSource& policy, std::uint64_t seed);

void write_trace_header(std::ostream& out);
void write_trace_rows(std::ostream& out, const std::string& policy, std::size_t episode,
                      const EpisodeResult& result);

}  // namespace greenflag
