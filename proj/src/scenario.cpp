#include "greenflag/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <string_view>

#include <fmt/format.h>

#include "greenflag/energy.hpp"
#include "greenflag/errors.hpp"

namespace greenflag {

namespace {

// Every plain numeric field with its JSON key.
template <class Config, class Visitor>
void visit_fields(Config& c, Visitor&& v) {
    v("seed", c.seed);
    v("worker_count", c.worker_count);
    v("low_end_fraction_cap", c.low_end_fraction_cap);
    v("low_end_mean_fraction", c.low_end_mean_fraction);
    v("low_end_std_fraction", c.low_end_std_fraction);
    v("low_end_f_min_hz", c.low_end_f_min_hz);
    v("low_end_f_max_hz", c.low_end_f_max_hz);
    v("low_end_p_min_dbm", c.low_end_p_min_dbm);
    v("low_end_p_max_dbm", c.low_end_p_max_dbm);
    v("low_end_flops_per_cycle", c.low_end_flops_per_cycle);
    v("high_end_f_min_hz", c.high_end_f_min_hz);
    v("high_end_f_max_hz", c.high_end_f_max_hz);
    v("high_end_p_min_dbm", c.high_end_p_min_dbm);
    v("high_end_p_max_dbm", c.high_end_p_max_dbm);
    v("high_end_flops_per_cycle", c.high_end_flops_per_cycle);
    v("switched_capacitance", c.switched_capacitance);
    v("battery_min_j", c.battery_min_j);
    v("battery_max_j", c.battery_max_j);
    v("samples_min", c.samples_min);
    v("samples_max", c.samples_max);
    v("distance_min_m", c.distance_min_m);
    v("distance_max_m", c.distance_max_m);
    v("bandwidth_min_hz", c.bandwidth_min_hz);
    v("bandwidth_max_hz", c.bandwidth_max_hz);
    v("noise_density_dbm_hz", c.noise_density_dbm_hz);
    v("model_size_mb", c.model_size_mb);
    v("model_complexity_flops", c.model_complexity_flops);
    v("local_target", c.local_target);
    v("target_error", c.target_error);
    v("deadline_s", c.deadline_s);
    v("gamma", c.gamma);
    v("local_iterations_min", c.local_iterations_min);
    v("local_iterations_max", c.local_iterations_max);
    v("calibration_rounds", c.calibration_rounds);
    v("truncation_rounds", c.truncation_rounds);
    v("participation_fraction", c.participation_fraction);
    v("panel_area_m2", c.harvest.panel_area);
    v("air_density", c.harvest.air_density);
    v("sweep_area_m2", c.harvest.sweep_area);
    v("weibull_shape", c.harvest.weibull_shape);
    v("harvest_efficiency_min", c.harvest_efficiency_min);
    v("harvest_efficiency_max", c.harvest_efficiency_max);
    v("outage_fraction_cap", c.outage_fraction_cap);
    v("initial_battery_min_fraction", c.initial_battery_min_fraction);
    v("initial_battery_max_fraction", c.initial_battery_max_fraction);
    v("mu_deadline", c.mu_deadline);
    v("mu_idle", c.mu_idle);
    v("mu_admission", c.mu_admission);
    v("reward_energy_scale", c.reward_energy_scale);
    v("gss_exploration_rate", c.gss_exploration_rate);
}

void require(bool ok, std::string_view field, std::string_view rule) {
    if (!ok) throw ConfigError(fmt::format("invalid scenario config: {} {}", field, rule));
}

}  // namespace

double ScenarioConfig::model_size_bits() const { return megabytes_to_bits(model_size_mb); }

double ScenarioConfig::noise_density_w_hz() const { return dbm_to_watts(noise_density_dbm_hz); }

double ScenarioConfig::low_end_cap() const {
    return std::floor(low_end_fraction_cap * worker_count + 1e-9);
}

void ScenarioConfig::validate() const {
    require(worker_count >= 1, "worker_count", "must be >= 1");
    require(low_end_fraction_cap >= 0.0 && low_end_fraction_cap <= 1.0, "low_end_fraction_cap",
            "must lie in [0, 1]");
    require(low_end_std_fraction >= 0.0, "low_end_std_fraction", "must be >= 0");
    require(low_end_f_min_hz > 0.0 && low_end_f_min_hz <= low_end_f_max_hz, "low_end_f_*_hz",
            "must satisfy 0 < min <= max");
    require(high_end_f_min_hz > 0.0 && high_end_f_min_hz <= high_end_f_max_hz, "high_end_f_*_hz",
            "must satisfy 0 < min <= max");
    require(low_end_p_min_dbm <= low_end_p_max_dbm, "low_end_p_*_dbm", "must satisfy min <= max");
    require(high_end_p_min_dbm <= high_end_p_max_dbm, "high_end_p_*_dbm",
            "must satisfy min <= max");
    require(low_end_flops_per_cycle > 0.0 && high_end_flops_per_cycle > 0.0, "flops_per_cycle",
            "must be > 0");
    require(switched_capacitance > 0.0, "switched_capacitance", "must be > 0");
    require(battery_min_j > 0.0 && battery_min_j <= battery_max_j, "battery_*_j",
            "must satisfy 0 < min <= max");
    require(samples_min >= 1 && samples_min <= samples_max, "samples_*",
            "must satisfy 1 <= min <= max");
    require(distance_min_m >= 10.0 && distance_min_m <= distance_max_m && distance_max_m <= 500.0,
            "distance_*_m", "must satisfy 10 <= min <= max <= 500");
    require(bandwidth_min_hz > 0.0 && bandwidth_min_hz <= bandwidth_max_hz, "bandwidth_*_hz",
            "must satisfy 0 < min <= max");
    require(model_size_mb > 0.0, "model_size_mb", "must be > 0");
    require(model_complexity_flops > 0.0, "model_complexity_flops", "must be > 0");
    require(target_error > 0.0 && target_error < 1.0, "target_error", "must lie in (0, 1)");
    require(deadline_s > 0.0, "deadline_s", "must be > 0");
    require(gamma >= 0.0 && gamma <= 1.0, "gamma", "must lie in [0, 1]");
    require(local_iterations_min >= 1 && local_iterations_min <= local_iterations_max,
            "local_iterations_*", "must satisfy 1 <= min <= max");
    require(calibration_rounds >= 1, "calibration_rounds", "must be >= 1");
    require(truncation_rounds >= 1, "truncation_rounds", "must be >= 1");
    require(participation_fraction >= 0.0 && participation_fraction < 1.0,
            "participation_fraction", "must lie in [0, 1)");
    require(harvest.panel_area > 0.0 && harvest.air_density > 0.0 && harvest.sweep_area > 0.0,
            "harvest parameters", "must be > 0");
    require(harvest.weibull_shape >= 1.0, "weibull_shape", "must be >= 1");
    require(harvest_efficiency_min >= 0.0 && harvest_efficiency_min <= harvest_efficiency_max,
            "harvest_efficiency_*", "must satisfy 0 <= min <= max");
    require(outage_fraction_cap >= 0.0 && outage_fraction_cap <= 1.0, "outage_fraction_cap",
            "must lie in [0, 1]");
    require(initial_battery_min_fraction >= 0.0 &&
                initial_battery_min_fraction <= initial_battery_max_fraction &&
                initial_battery_max_fraction <= 1.0,
            "initial_battery_*_fraction", "must satisfy 0 <= min <= max <= 1");
    require(mu_deadline >= 0.0 && mu_idle >= 0.0 && mu_admission >= 0.0, "mu_*", "must be >= 0");
    require(reward_energy_scale > 0.0, "reward_energy_scale", "must be > 0");
    require(gss_exploration_rate >= 0.0 && gss_exploration_rate <= 1.0, "gss_exploration_rate",
            "must lie in [0, 1]");
}

ScenarioConfig default_scenario(ScenarioKind kind) {
    ScenarioConfig config;
    config.scenario_kind = kind;
    return config;
}

ScenarioKind scenario_kind_from_int(int value) {
    if (value < 1 || value > 3) {
        throw ConfigError(fmt::format("scenario must be 1, 2 or 3, got {}", value));
    }
    return static_cast<ScenarioKind>(value);
}

void to_json(nlohmann::json& j, const ScenarioConfig& config) {
    j = nlohmann::json::object();
    j["scenario_kind"] = static_cast<int>(config.scenario_kind);
    j["queue_discipline"] =
        config.queue_discipline == QueueDiscipline::head_of_line ? "head_of_line" : "first_fit";
    visit_fields(config, [&](const char* key, const auto& value) { j[key] = value; });
}

void merge_json(const nlohmann::json& j, ScenarioConfig& config) {
    if (!j.is_object()) throw ConfigError("scenario config must be a JSON object");
    std::set<std::string> known{"scenario_kind", "queue_discipline"};
    try {
        if (j.contains("scenario_kind")) {
            config.scenario_kind = scenario_kind_from_int(j.at("scenario_kind").get<int>());
        }
        if (j.contains("queue_discipline")) {
            const auto d = j.at("queue_discipline").get<std::string>();
            if (d == "head_of_line") {
                config.queue_discipline = QueueDiscipline::head_of_line;
            } else if (d == "first_fit") {
                config.queue_discipline = QueueDiscipline::first_fit;
            } else {
                throw ConfigError(fmt::format("unknown queue_discipline '{}'", d));
            }
        }
        visit_fields(config, [&](const char* key, auto& value) {
            known.insert(key);
            if (j.contains(key)) {
                value = j.at(key).get<std::remove_reference_t<decltype(value)>>();
            }
        });
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(fmt::format("invalid scenario config: {}", e.what()));
    }
    for (const auto& [key, _] : j.items()) {
        if (!known.contains(key)) throw ConfigError(fmt::format("unknown config key '{}'", key));
    }
    config.validate();
}

ScenarioConfig load_scenario_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError(fmt::format("cannot open scenario config {}", path.string()));
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
    }
    ScenarioConfig config;
    merge_json(j, config);
    return config;
}

}  // namespace greenflag
