#include "greenflag/energy.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "greenflag/errors.hpp"

namespace greenflag {

namespace {

constexpr double kBoundTolerance = 1e-12;

void check_cpu(const WorkerProfile& profile, double f) {
    if (!(f >= 0.0) || f > profile.f_max * (1.0 + kBoundTolerance)) {
        throw DomainError(
            fmt::format("cpu frequency {} Hz outside [0, {}] Hz", f, profile.f_max));
    }
}

double workload(const WorkerState& state, double model_complexity) {
    return static_cast<double>(state.local_iterations) * model_complexity * state.dataset_size;
}

}  // namespace

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

double megabytes_to_bits(double megabytes) { return megabytes * 8.0e6; }

double computation_energy(const WorkerProfile& profile, const WorkerState& state, double f,
                          double model_complexity) {
    check_cpu(profile, f);
    return profile.switched_capacitance * workload(state, model_complexity) * f * f /
           profile.flops_per_cycle;
}

double computation_time(const WorkerProfile& profile, const WorkerState& state, double f,
                        double model_complexity) {
    check_cpu(profile, f);
    if (f == 0.0) return kNever;
    return workload(state, model_complexity) / (profile.flops_per_cycle * f);
}

double path_loss_db(double distance_m) {
    return 127.0 + 30.0 * std::log10(distance_m / 1000.0);
}

double channel_gain(double distance_m) {
    if (!(distance_m >= 10.0 && distance_m <= 500.0)) {
        throw DomainError(fmt::format("distance {} m outside [10, 500] m", distance_m));
    }
    return std::pow(10.0, -path_loss_db(distance_m) / 10.0);
}

double achievable_rate(double bandwidth, double power, double gain, double noise_density) {
    if (bandwidth <= 0.0 || power <= 0.0) return 0.0;
    return bandwidth * std::log2(1.0 + gain * power / (bandwidth * noise_density));
}

double transmission_energy(double power, double rate, double model_size_bits) {
    if (rate <= 0.0) return kNever;
    return model_size_bits * power / rate;
}

double transmission_time(double rate, double model_size_bits) {
    if (rate <= 0.0) return kNever;
    return model_size_bits / rate;
}

bool participation_indicator(double f, double p, double b, double f_max, double p_max,
                             double b_max, double fraction) {
    return f > fraction * f_max && p > fraction * p_max && b > fraction * b_max;
}

EnergyBreakdown settle_iteration(const WorkerState& state, const WorkerProfile& profile,
                                 double demand) {
    if (!(demand >= 0.0)) throw DomainError("energy demand must be >= 0");

    EnergyBreakdown out;
    out.battery_before = state.battery;
    out.renewable_used = std::min(demand, state.harvest_available);
    const double residual = demand - out.renewable_used;
    out.battery_used = std::min(residual, state.battery);
    // Written as the remainder so the three buckets add up to the demand.
    out.grid_used = residual - out.battery_used;

    const double surplus = state.harvest_available - out.renewable_used;
    const double drained = state.battery - out.battery_used;
    out.battery_after = std::min(profile.battery_capacity, drained + surplus);
    out.surplus_stored = out.battery_after - drained;
    return out;
}

double discounted_grid_total(std::span<const double> per_round_grid, double gamma) {
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw DomainError("gamma must lie in [0, 1]");
    double total = 0.0;
    double weight = 1.0;
    for (double grid : per_round_grid) {
        total += weight * grid;
        weight *= gamma;
    }
    return total;
}

}  // namespace greenflag
