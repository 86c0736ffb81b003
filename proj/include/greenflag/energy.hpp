#pragma once

#include <cstddef>
#include <limits>
#include <span>

namespace greenflag {

/// Returned by time/energy functions when the operation can never finish
/// (zero CPU frequency, zero rate).
inline constexpr double kNever = std::numeric_limits<double>::infinity();

inline bool is_never(double value) noexcept { return value == kNever; }

enum class DeviceClass { low_end, high_end };

struct WorkerProfile {
    std::size_t id = 0;
    double switched_capacitance = 1e-28;  // W/Hz^3
    double flops_per_cycle = 4.0;
    double f_max = 0.0;                   // Hz
    double p_max = 0.0;                   // W
    double battery_capacity = 0.0;        // J
    DeviceClass device_class = DeviceClass::low_end;
};

/// Per-round dynamic state of a worker. The caller owns it; nothing in this
/// module mutates it.
struct WorkerState {
    double battery = 0.0;             // J, stored before the round
    double dataset_size = 0.0;        // samples
    double distance = 100.0;          // m
    int local_iterations = 0;
    double harvest_available = 0.0;   // J harvested during the round
};

struct EnergyBreakdown {
    double computation = 0.0;
    double transmission = 0.0;
    double wasted = 0.0;
    double renewable_used = 0.0;
    double battery_used = 0.0;
    double grid_used = 0.0;
    double battery_before = 0.0;
    double battery_after = 0.0;
    double surplus_stored = 0.0;

    double demand() const noexcept { return computation + transmission; }
    double green() const noexcept { return renewable_used + battery_used; }
};

// Units at the boundary; everything internal is J, W, Hz, bit, s.
double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);
double megabytes_to_bits(double megabytes);

double computation_energy(const WorkerProfile& profile, const WorkerState& state, double f,
                          double model_complexity);

/// I alpha s / (c f); kNever when f == 0.
double computation_time(const WorkerProfile& profile, const WorkerState& state, double f,
                        double model_complexity);

/// Path loss 127 + 30 log10(d / 1 km) in dB.
double path_loss_db(double distance_m);

/// Linear gain 10^(-PL/10) for d in [10, 500] m. Throws DomainError otherwise.
double channel_gain(double distance_m);

/// Shannon rate b log2(1 + g p / (b N0)); zero when b or p is zero.
double achievable_rate(double bandwidth, double power, double gain, double noise_density);

/// m p / r; kNever when the rate is zero.
double transmission_energy(double power, double rate, double model_size_bits);

/// m / r; kNever when the rate is zero.
double transmission_time(double rate, double model_size_bits);

/// Fraction of each per-worker maximum below which an action component is
/// treated as zero.
inline constexpr double kParticipationFraction = 0.01;

/// 1 iff f, p and b all exceed kParticipationFraction of their maxima.
bool participation_indicator(double f, double p, double b, double f_max, double p_max,
                             double b_max, double fraction = kParticipationFraction);

/// Covers `demand` from the round's harvest, then the battery, then the grid.
/// Unused harvest charges the battery up to its capacity.
EnergyBreakdown settle_iteration(const WorkerState& state, const WorkerProfile& profile,
                                 double demand);

/// sum_n gamma^(n-1) grid_n.
double discounted_grid_total(std::span<const double> per_round_grid, double gamma);

}  // namespace greenflag
