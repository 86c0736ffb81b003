#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "greenflag/channel.hpp"
#include "greenflag/weather.hpp"

namespace greenflag {

/// Scenario 1: every worker harvests and starts full.
/// Scenario 2: an affected subset loses harvest for one contiguous window of
/// rounds and starts full; the rest start at a random charge.
/// Scenario 3: the affected subset never harvests and has an empty battery.
enum class ScenarioKind { ideal = 1, sporadic_outages = 2, grid_dependent = 3 };

struct ScenarioConfig {
    ScenarioKind scenario_kind = ScenarioKind::ideal;
    std::uint64_t seed = 0;

    // Fleet.
    int worker_count = 20;
    double low_end_fraction_cap = 0.6;
    double low_end_mean_fraction = 0.3;
    double low_end_std_fraction = 0.1;
    double low_end_f_min_hz = 1.0e9;
    double low_end_f_max_hz = 3.0e9;
    double low_end_p_min_dbm = 23.0;
    double low_end_p_max_dbm = 28.0;
    double low_end_flops_per_cycle = 4.0;
    double high_end_f_min_hz = 3.2e9;
    double high_end_f_max_hz = 5.0e9;
    double high_end_p_min_dbm = 29.0;
    double high_end_p_max_dbm = 33.0;
    double high_end_flops_per_cycle = 2.0;
    double switched_capacitance = 1e-28;
    double battery_min_j = 15.0;
    double battery_max_j = 50.0;
    int samples_min = 200;
    int samples_max = 800;

    // Channel.
    double distance_min_m = 10.0;
    double distance_max_m = 500.0;
    double bandwidth_min_hz = 50e6;
    double bandwidth_max_hz = 100e6;
    double noise_density_dbm_hz = -158.0;
    QueueDiscipline queue_discipline = QueueDiscipline::head_of_line;

    // Federated learning.
    double model_size_mb = 2.51;
    double model_complexity_flops = 1.8e6;
    double local_target = 0.5;
    double target_error = 0.04;
    double deadline_s = 20.0;
    double gamma = 0.99;
    int local_iterations_min = 5;
    int local_iterations_max = 15;
    int calibration_rounds = 11;
    int truncation_rounds = 50;
    double participation_fraction = 0.01;

    // Energy sources.
    HarvestParams harvest{};
    double harvest_efficiency_min = 1.0;
    double harvest_efficiency_max = 1.0;
    double outage_fraction_cap = 0.6;
    double initial_battery_min_fraction = 0.5;
    double initial_battery_max_fraction = 1.0;

    // Reward.
    double mu_deadline = 0.3;
    double mu_idle = 0.4;
    double mu_admission = 0.3;
    double reward_energy_scale = 1.0;

    // Baselines.
    double gss_exploration_rate = 0.1;

    double model_size_bits() const;
    double noise_density_w_hz() const;
    double low_end_cap() const;  // floor(cap * K)

    /// Throws ConfigError naming the first bad field.
    void validate() const;
};

ScenarioConfig default_scenario(ScenarioKind kind);
ScenarioKind scenario_kind_from_int(int value);

void to_json(nlohmann::json& j, const ScenarioConfig& config);

/// Keys absent from `j` keep their values in `config`; unknown keys are a
/// ConfigError.
void merge_json(const nlohmann::json& j, ScenarioConfig& config);

ScenarioConfig load_scenario_config(const std::filesystem::path& path);

}  // namespace greenflag
