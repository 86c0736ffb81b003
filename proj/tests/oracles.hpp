#pragma once

// Slow, independent reference implementations used to check the library.
// Nothing here calls into the code under test.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace oracle {

inline double clearness(double oktas) { return 1.0 - 0.75 * std::pow(oktas / 8.0, 3.4); }

inline double wind_power(double v, double rho = 1.225, double area = 0.1) {
    return 0.5 * rho * area * v * v * v;
}

// Dense trapezoid rule of P(v) f(v) over the interval, Weibull scale fitted
// from the interval mean speed.
inline double wind_density_trapezoid(double v1, double v2, double shape = 2.0,
                                     double rho = 1.225, double area = 0.1, int nodes = 10000) {
    const double lo = std::min(v1, v2);
    const double hi = std::max(v1, v2);
    if (lo == hi) return wind_power(lo, rho, area);
    const double scale = 0.5 * (lo + hi) / std::exp(std::lgamma(1.0 + 1.0 / shape));
    auto f = [&](double v) {
        const double x = v / scale;
        const double pdf = shape / scale * std::pow(x, shape - 1.0) * std::exp(-std::pow(x, shape));
        return wind_power(v, rho, area) * pdf;
    };
    const double h = (hi - lo) / (nodes - 1);
    double sum = 0.5 * (f(lo) + f(hi));
    for (int i = 1; i < nodes - 1; ++i) sum += f(lo + i * h);
    return sum * h;
}

struct Ledger {
    double renewable = 0, battery = 0, grid = 0, battery_after = 0;
};

// Renewables first, then the battery, then the grid; leftover harvest tops
// the battery up to capacity.
inline Ledger waterfall(double demand, double harvest, double battery, double capacity) {
    Ledger l;
    double need = demand;
    l.renewable = need < harvest ? need : harvest;
    need -= l.renewable;
    l.battery = need < battery ? need : battery;
    need -= l.battery;
    l.grid = need;
    l.battery_after = std::min(capacity, battery - l.battery + (harvest - l.renewable));
    return l;
}

inline double discounted_fold(const std::vector<double>& grid, double gamma) {
    double total = 0.0;
    for (std::size_t n = 0; n < grid.size(); ++n) total += std::pow(gamma, double(n)) * grid[n];
    return total;
}

struct TickRequest {
    std::size_t worker;
    long ready_ms;
    long bandwidth;
    long duration_ms;
};

struct TickOutcome {
    std::optional<long> start_ms;
    bool never_admitted = false;
};

// Millisecond-step FCFS channel. At every tick: finished transmissions leave,
// the queue is served from the head, new arrivals (by worker index) join the
// back and the queue is served again. No admission at or after the deadline.
inline std::vector<TickOutcome> tick_fcfs(const std::vector<TickRequest>& reqs, long capacity,
                                          long deadline_ms) {
    std::vector<TickOutcome> out(reqs.size());
    std::vector<long> finish(reqs.size(), -1);
    std::vector<bool> running(reqs.size(), false);
    std::vector<std::size_t> queue;
    long used = 0;
    long horizon = deadline_ms;
    for (const auto& r : reqs) horizon = std::max(horizon, r.ready_ms + 1);

    auto serve = [&](long t) {
        if (t >= deadline_ms) return;
        while (!queue.empty() && used + reqs[queue.front()].bandwidth <= capacity) {
            const std::size_t i = queue.front();
            queue.erase(queue.begin());
            out[i].start_ms = t;
            finish[i] = t + reqs[i].duration_ms;
            running[i] = true;
            used += reqs[i].bandwidth;
        }
    };

    for (long t = 0; t <= horizon; ++t) {
        for (std::size_t i = 0; i < reqs.size(); ++i) {
            if (running[i] && finish[i] <= t) {
                running[i] = false;
                used -= reqs[i].bandwidth;
            }
        }
        serve(t);
        std::vector<std::size_t> arriving;
        for (std::size_t i = 0; i < reqs.size(); ++i) {
            if (reqs[i].ready_ms == t) arriving.push_back(i);
        }
        std::sort(arriving.begin(), arriving.end(),
                  [&](std::size_t a, std::size_t b) { return reqs[a].worker < reqs[b].worker; });
        for (std::size_t i : arriving) {
            if (t >= deadline_ms || reqs[i].bandwidth > capacity) {
                out[i].never_admitted = true;
            } else {
                queue.push_back(i);
            }
        }
        serve(t);
    }
    for (std::size_t i : queue) out[i].never_admitted = true;
    return out;
}

}  // namespace oracle
