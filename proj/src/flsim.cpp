#include "greenflag/flsim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

#include "greenflag/errors.hpp"
#include "greenflag/rng.hpp"

namespace greenflag {

double RoundOutcome::total_energy() const {
    double sum = 0.0;
    for (const auto& w : workers) sum += w.energy.demand();
    return sum;
}

double RoundOutcome::grid_energy() const {
    double sum = 0.0;
    for (const auto& w : workers) sum += w.energy.grid_used;
    return sum;
}

double RoundOutcome::green_energy() const {
    double sum = 0.0;
    for (const auto& w : workers) sum += w.energy.green();
    return sum;
}

double RoundOutcome::wasted_energy() const {
    double sum = 0.0;
    for (const auto& w : workers) sum += w.energy.wasted;
    return sum;
}

int RoundOutcome::deadline_violations() const {
    return static_cast<int>(
        std::count_if(workers.begin(), workers.end(), [](const auto& w) { return w.deadline_violation; }));
}

int RoundOutcome::admission_failures() const {
    return static_cast<int>(
        std::count_if(workers.begin(), workers.end(), [](const auto& w) { return w.admission_failure; }));
}

int sample_low_end_count(const ScenarioConfig& config, Rng& rng) {
    const double k = config.worker_count;
    const double cap = config.low_end_cap();
    const double mean = config.low_end_mean_fraction * k;
    const double std = config.low_end_std_fraction * k;
    double draw = std::clamp(mean, 0.0, cap);
    if (std > 0.0) {
        std::normal_distribution<double> normal(mean, std);
        for (int attempt = 0; attempt < 1000; ++attempt) {
            const double x = normal(rng);
            if (x >= 0.0 && x <= cap) {
                draw = x;
                break;
            }
        }
    }
    return static_cast<int>(std::clamp(std::round(draw), 0.0, cap));
}

std::vector<WorkerProfile> sample_worker_fleet(const ScenarioConfig& config, std::uint64_t seed) {
    config.validate();
    auto rng = make_rng(seed, streams::fleet);
    const auto k = static_cast<std::size_t>(config.worker_count);
    const auto low_end = static_cast<std::size_t>(sample_low_end_count(config, rng));

    std::vector<std::size_t> ids(k);
    std::iota(ids.begin(), ids.end(), std::size_t{0});
    std::shuffle(ids.begin(), ids.end(), rng);
    std::vector<bool> is_low(k, false);
    for (std::size_t i = 0; i < low_end; ++i) is_low[ids[i]] = true;

    auto uniform = [&](double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(rng);
    };

    std::vector<WorkerProfile> fleet(k);
    for (std::size_t w = 0; w < k; ++w) {
        auto& p = fleet[w];
        p.id = w;
        p.switched_capacitance = config.switched_capacitance;
        if (is_low[w]) {
            p.device_class = DeviceClass::low_end;
            p.flops_per_cycle = config.low_end_flops_per_cycle;
            p.f_max = uniform(config.low_end_f_min_hz, config.low_end_f_max_hz);
            p.p_max = dbm_to_watts(uniform(config.low_end_p_min_dbm, config.low_end_p_max_dbm));
        } else {
            p.device_class = DeviceClass::high_end;
            p.flops_per_cycle = config.high_end_flops_per_cycle;
            p.f_max = uniform(config.high_end_f_min_hz, config.high_end_f_max_hz);
            p.p_max = dbm_to_watts(uniform(config.high_end_p_min_dbm, config.high_end_p_max_dbm));
        }
        p.battery_capacity = uniform(config.battery_min_j, config.battery_max_j);
    }
    return fleet;
}

bool OutagePlan::harvest_blocked(std::size_t worker, std::size_t round) const {
    if (worker >= affected.size() || !affected[worker] || round == 0) return false;
    if (permanent) return true;
    return round - 1 >= window_begin && round - 1 < window_end;
}

OutagePlan sample_outages(const ScenarioConfig& config, std::uint64_t seed, std::size_t iterations) {
    auto rng = make_rng(seed, streams::outages);
    const auto k = static_cast<std::size_t>(config.worker_count);

    OutagePlan plan;
    plan.affected.assign(k, false);
    plan.no_harvest.assign(k, std::vector<bool>(iterations, false));
    plan.initial_battery_fraction.assign(k, 1.0);
    if (config.scenario_kind == ScenarioKind::ideal) return plan;

    const auto cap = static_cast<std::size_t>(std::floor(config.outage_fraction_cap * k + 1e-9));
    std::size_t count = 0;
    if (cap > 0) count = std::uniform_int_distribution<std::size_t>(1, cap)(rng);
    std::vector<std::size_t> ids(k);
    std::iota(ids.begin(), ids.end(), std::size_t{0});
    std::shuffle(ids.begin(), ids.end(), rng);
    for (std::size_t i = 0; i < count; ++i) plan.affected[ids[i]] = true;

    std::uniform_real_distribution<double> charge(config.initial_battery_min_fraction,
                                                  config.initial_battery_max_fraction);
    if (config.scenario_kind == ScenarioKind::sporadic_outages) {
        if (iterations > 0) {
            plan.window_begin = std::uniform_int_distribution<std::size_t>(0, iterations - 1)(rng);
            const std::size_t length =
                std::uniform_int_distribution<std::size_t>(1, iterations - plan.window_begin)(rng);
            plan.window_end = plan.window_begin + length;
        }
        for (std::size_t w = 0; w < k; ++w) {
            if (plan.affected[w]) {
                for (std::size_t n = plan.window_begin; n < plan.window_end; ++n) {
                    plan.no_harvest[w][n] = true;
                }
            } else {
                plan.initial_battery_fraction[w] = charge(rng);
            }
        }
        return plan;
    }

    // Grid dependent: the subset has neither harvest nor stored energy.
    plan.permanent = true;
    for (std::size_t w = 0; w < k; ++w) {
        if (plan.affected[w]) {
            plan.initial_battery_fraction[w] = 0.0;
            std::fill(plan.no_harvest[w].begin(), plan.no_harvest[w].end(), true);
        } else {
            plan.initial_battery_fraction[w] = charge(rng);
        }
    }
    return plan;
}

int sample_local_iterations(const ScenarioConfig& config, std::size_t worker, std::size_t round,
                            std::uint64_t seed) {
    auto rng = make_rng(seed, stream_id(streams::local_iterations, worker, round));
    return std::uniform_int_distribution<int>(config.local_iterations_min,
                                              config.local_iterations_max)(rng);
}

double surrogate_update(double e_prev, double participation, const ScenarioConfig& config) {
    if (!(e_prev > 0.0 && e_prev <= 1.0)) {
        throw DomainError(fmt::format("global error {} outside (0, 1]", e_prev));
    }
    const double u = std::clamp(participation, 0.0, 1.0);
    const double rho = std::pow(config.target_error, 1.0 / config.calibration_rounds);
    return e_prev * std::pow(rho, u);
}

bool reached_target(double error, const ScenarioConfig& config) {
    return error <= config.target_error * (1.0 + 1e-9);
}

RoundOutcome run_round(std::span<const WorkerProfile> fleet, const RoundContext& context,
                       const ActionVector& action, const ScenarioConfig& config) {
    const std::size_t k = fleet.size();
    if (action.size() != k || action.power_w.size() != k || action.bandwidth_hz.size() != k ||
        context.states.size() != k) {
        throw DomainError("action and context must have one entry per worker");
    }

    const double deadline = config.deadline_s;
    const double model_bits = config.model_size_bits();
    const double noise = config.noise_density_w_hz();

    RoundOutcome out;
    out.round = context.round;
    out.bandwidth_max = context.bandwidth_max;
    out.deadline = deadline;
    out.workers.resize(k);

    std::vector<TransmissionRequest> requests;
    std::vector<double> rates(k, 0.0);
    std::vector<double> compute_energy(k, 0.0);
    bool any_cpu = false;

    for (std::size_t w = 0; w < k; ++w) {
        const auto& profile = fleet[w];
        const auto& state = context.states[w];
        auto& r = out.workers[w];
        r.cpu_hz = action.cpu_hz[w];
        r.power_w = action.power_w[w];
        r.bandwidth_hz = action.bandwidth_hz[w];
        r.local_iterations = state.local_iterations;
        r.harvest = state.harvest_available;
        if (!(r.power_w >= 0.0) || r.power_w > profile.p_max * (1.0 + 1e-12)) {
            throw DomainError(fmt::format("power {} W outside [0, {}] W for worker {}", r.power_w,
                                          profile.p_max, w));
        }
        if (!(r.bandwidth_hz >= 0.0)) throw DomainError("bandwidth must be >= 0");
        if (r.cpu_hz > config.participation_fraction * profile.f_max) any_cpu = true;

        r.participating = participation_indicator(r.cpu_hz, r.power_w, r.bandwidth_hz,
                                                  profile.f_max, profile.p_max,
                                                  context.bandwidth_max,
                                                  config.participation_fraction);
        if (!r.participating) {
            computation_time(profile, state, r.cpu_hz, config.model_complexity_flops);  // bounds
            r.compute_time = kNever;
            r.transmit_time = kNever;
            continue;
        }
        r.compute_time = computation_time(profile, state, r.cpu_hz, config.model_complexity_flops);
        compute_energy[w] =
            computation_energy(profile, state, r.cpu_hz, config.model_complexity_flops);
        rates[w] = achievable_rate(r.bandwidth_hz, r.power_w, channel_gain(state.distance), noise);
        r.transmit_time = transmission_time(rates[w], model_bits);
        if (r.compute_time < deadline) {
            requests.push_back({w, r.compute_time, r.bandwidth_hz, r.transmit_time});
        }
    }
    out.all_idle = !any_cpu;

    auto schedule = schedule_round(requests, context.bandwidth_max, deadline,
                                   config.queue_discipline);
    for (const auto& s : schedule.outcomes) out.workers[s.worker].schedule = s;
    out.timeline = std::move(schedule.timeline);

    double weighted_on_time = 0.0;
    double weight_total = 0.0;
    for (std::size_t w = 0; w < k; ++w) {
        const auto& state = context.states[w];
        auto& r = out.workers[w];
        weight_total += state.dataset_size;
        double transmit_energy = 0.0;

        if (r.participating) {
            r.schedule.worker = w;
            if (r.compute_time >= deadline) {
                r.completion_time = r.compute_time + r.transmit_time;
            } else if (r.schedule.started_at) {
                r.completion_time = *r.schedule.finished_at;
                if (r.schedule.completed_by_deadline) {
                    transmit_energy = transmission_energy(r.power_w, rates[w], model_bits);
                } else {
                    const double sent = std::max(0.0, deadline - *r.schedule.started_at);
                    transmit_energy = r.power_w * sent;
                }
            } else {
                r.completion_time = kNever;
            }
            r.admission_failure = r.schedule.never_admitted;
            r.on_time = r.compute_time < deadline && r.schedule.completed_by_deadline;
            r.deadline_violation = !r.on_time;
            if (r.on_time) weighted_on_time += state.dataset_size;
        }

        r.energy = settle_iteration(state, fleet[w], compute_energy[w] + transmit_energy);
        r.energy.computation = compute_energy[w];
        r.energy.transmission = transmit_energy;
        r.energy.wasted = r.deadline_violation ? compute_energy[w] + transmit_energy : 0.0;

        if (r.participating) {
            out.duration = std::max(out.duration, std::min(r.completion_time, deadline));
        }
    }
    out.participation = weight_total > 0.0 ? weighted_on_time / weight_total : 0.0;
    return out;
}

Episode::Episode(ScenarioConfig config, std::span<const WeatherRecord> weather, std::uint64_t seed)
    : config_(std::move(config)), seed_(seed) {
    config_.validate();
    const auto k = static_cast<std::size_t>(config_.worker_count);
    fleet_ = sample_worker_fleet(config_, seed_);

    auto data_rng = make_rng(seed_, streams::datasets);
    std::uniform_int_distribution<int> samples(config_.samples_min, config_.samples_max);
    std::uniform_real_distribution<double> efficiency(config_.harvest_efficiency_min,
                                                      config_.harvest_efficiency_max);
    dataset_sizes_.resize(k);
    std::vector<double> harvest_efficiency(k);
    for (std::size_t w = 0; w < k; ++w) {
        dataset_sizes_[w] = samples(data_rng);
        harvest_efficiency[w] = efficiency(data_rng);
    }

    outages_ = sample_outages(config_, seed_, static_cast<std::size_t>(config_.calibration_rounds));
    HarvestParams params = config_.harvest;
    params.horizon = config_.deadline_s;
    harvest_ = build_harvest_series(weather, k, static_cast<std::size_t>(config_.truncation_rounds),
                                    params, seed_, harvest_efficiency);

    batteries_.resize(k);
    for (std::size_t w = 0; w < k; ++w) {
        batteries_[w] = outages_.initial_battery_fraction[w] * fleet_[w].battery_capacity;
    }
    violations_per_worker_.assign(k, 0);
    upcoming_ = make_context(1);
}

RoundContext Episode::make_context(std::size_t round) const {
    auto rng = make_rng(seed_, stream_id(streams::round_context, round));
    RoundContext ctx;
    ctx.round = round;
    ctx.bandwidth_max =
        std::uniform_real_distribution<double>(config_.bandwidth_min_hz, config_.bandwidth_max_hz)(rng);
    std::uniform_real_distribution<double> distance(config_.distance_min_m, config_.distance_max_m);
    ctx.states.resize(fleet_.size());
    for (std::size_t w = 0; w < fleet_.size(); ++w) {
        auto& s = ctx.states[w];
        s.battery = batteries_[w];
        s.dataset_size = dataset_sizes_[w];
        s.distance = distance(rng);
        s.local_iterations = sample_local_iterations(config_, w, round, seed_);
        s.harvest_available = outages_.harvest_blocked(w, round) ? 0.0 : harvest_.total_at(w, round - 1);
    }
    return ctx;
}

RoundOutcome Episode::step(const ActionVector& action) {
    if (done()) throw std::logic_error("episode already finished");
    RoundOutcome outcome = run_round(fleet_, upcoming_, action, config_);

    for (std::size_t w = 0; w < fleet_.size(); ++w) {
        const auto& r = outcome.workers[w];
        batteries_[w] = r.energy.battery_after;
        if (r.deadline_violation) ++violations_per_worker_[w];
    }
    error_ = surrogate_update(error_, outcome.participation, config_);

    RoundRecord rec;
    rec.round = outcome.round;
    rec.global_error = error_;
    rec.participation = outcome.participation;
    rec.duration = outcome.duration;
    rec.bandwidth_max = outcome.bandwidth_max;
    rec.total_energy = outcome.total_energy();
    rec.grid_energy = outcome.grid_energy();
    rec.green_energy = outcome.green_energy();
    rec.wasted_energy = outcome.wasted_energy();
    rec.deadline_violations = outcome.deadline_violations();
    rec.admission_failures = outcome.admission_failures();
    rec.idle_workers = static_cast<int>(std::count_if(
        outcome.workers.begin(), outcome.workers.end(), [](const auto& w) { return !w.participating; }));
    rec.all_idle = outcome.all_idle;
    trace_.push_back(rec);

    total_energy_ += rec.total_energy;
    grid_energy_ += rec.grid_energy;
    green_energy_ += rec.green_energy;
    wasted_energy_ += rec.wasted_energy;
    duration_sum_ += rec.duration;
    grid_per_round_.push_back(rec.grid_energy);

    converged_ = reached_target(error_, config_);
    truncated_ = !converged_ && trace_.size() >= static_cast<std::size_t>(config_.truncation_rounds);
    if (!done()) upcoming_ = make_context(outcome.round + 1);
    return outcome;
}

EpisodeMetrics Episode::metrics() const {
    EpisodeMetrics m;
    m.total_energy = total_energy_;
    m.grid_energy = grid_energy_;
    m.green_energy = green_energy_;
    m.wasted_energy = wasted_energy_;
    m.global_iterations = static_cast<int>(trace_.size());
    m.mean_round_duration = trace_.empty() ? 0.0 : duration_sum_ / trace_.size();
    const int violations = std::accumulate(violations_per_worker_.begin(), violations_per_worker_.end(), 0);
    m.violations_per_worker = static_cast<double>(violations) / fleet_.size();
    m.discounted_grid = discounted_grid_total(grid_per_round_, config_.gamma);
    m.final_error = error_;
    m.converged = converged_;
    m.truncated = truncated_;
    return m;
}

EpisodeResult run_episode(const ScenarioConfig& config, std::span<const WeatherRecord> weather,
                          ActionSource& policy, std::uint64_t seed) {
    Episode episode(config, weather, seed);
    policy.begin_episode(seed);
    while (!episode.done()) {
        const ActionVector action = policy.act(episode.view());
        policy.observe(episode.step(action));
    }
    return EpisodeResult{seed, episode.metrics(), episode.trace()};
}

void write_trace_header(std::ostream& out) {
    out << "policy,episode,seed,round,global_error,participation,duration_s,bandwidth_max_hz,"
           "total_energy_j,grid_energy_j,green_energy_j,wasted_energy_j,deadline_violations,"
           "admission_failures,idle_workers,all_idle\n";
}

void write_trace_rows(std::ostream& out, const std::string& policy, std::size_t episode,
                      const EpisodeResult& result) {
    for (const auto& r : result.trace) {
        out << fmt::format("{},{},{},{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},"
                           "{:.17g},{},{},{},{}\n",
                           policy, episode, result.seed, r.round, r.global_error, r.participation,
                           r.duration, r.bandwidth_max, r.total_energy, r.grid_energy,
                           r.green_energy, r.wasted_energy, r.deadline_violations,
                           r.admission_failures, r.idle_workers, r.all_idle ? 1 : 0);
    }
}

}  // namespace greenflag
