#include "greenflag/channel.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <ostream>

#include <fmt/format.h>

#include "greenflag/errors.hpp"

namespace greenflag {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double capacity_tolerance(double capacity) { return 1e-9 * capacity; }

struct Active {
    double finish;
    std::size_t index;
    double bandwidth;
};

}  // namespace

ScheduleResult schedule_round(std::span<const TransmissionRequest> requests, double capacity,
                              double deadline, QueueDiscipline discipline) {
    if (!(deadline > 0.0)) throw DomainError("deadline must be > 0");
    if (!(capacity >= 0.0)) throw DomainError("channel capacity must be >= 0");
    for (const auto& r : requests) {
        if (!(r.ready_at >= 0.0) || !(r.bandwidth >= 0.0) || !(r.duration_if_served >= 0.0)) {
            throw DomainError(fmt::format("invalid transmission request of worker {}", r.worker));
        }
    }

    ScheduleResult result;
    result.timeline.capacity = capacity;
    result.outcomes.resize(requests.size());
    for (std::size_t i = 0; i < requests.size(); ++i) {
        result.outcomes[i].worker = requests[i].worker;
    }

    std::vector<std::size_t> order(requests.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (requests[a].ready_at != requests[b].ready_at) {
            return requests[a].ready_at < requests[b].ready_at;
        }
        return requests[a].worker < requests[b].worker;
    });

    const double tolerance = capacity_tolerance(capacity);
    std::vector<Active> active;
    std::deque<std::size_t> queue;
    auto& events = result.timeline.events;

    auto occupancy = [&] {
        double sum = 0.0;
        for (const auto& a : active) sum += a.bandwidth;
        return sum;
    };
    auto fits = [&](std::size_t i) {
        return occupancy() + requests[i].bandwidth <= capacity + tolerance;
    };
    auto admit = [&](std::size_t i, double t) {
        const auto& req = requests[i];
        auto& out = result.outcomes[i];
        out.queued_for = t - req.ready_at;
        out.started_at = t;
        out.finished_at = t + req.duration_if_served;
        out.completed_by_deadline = *out.finished_at < deadline;
        active.push_back({*out.finished_at, i, req.bandwidth});
        events.push_back({t, req.worker, ChannelEventKind::admit, req.bandwidth});
    };
    auto serve_queue = [&](double t) {
        if (t >= deadline) return;
        if (discipline == QueueDiscipline::head_of_line) {
            while (!queue.empty() && fits(queue.front())) {
                admit(queue.front(), t);
                queue.pop_front();
            }
            return;
        }
        for (auto it = queue.begin(); it != queue.end();) {
            if (fits(*it)) {
                admit(*it, t);
                it = queue.erase(it);
            } else {
                ++it;
            }
        }
    };

    std::size_t next = 0;
    auto next_arrival = [&] {
        if (next < order.size() && requests[order[next]].ready_at < deadline) {
            return requests[order[next]].ready_at;
        }
        return kInf;
    };

    while (true) {
        double next_release = kInf;
        for (const auto& a : active) next_release = std::min(next_release, a.finish);
        const double t = std::min(next_arrival(), next_release);
        if (t == kInf) break;

        // Releases at t, ordered by worker for a stable event log.
        std::vector<Active> leaving;
        std::erase_if(active, [&](const Active& a) {
            if (a.finish <= t) {
                leaving.push_back(a);
                return true;
            }
            return false;
        });
        std::sort(leaving.begin(), leaving.end(), [&](const Active& a, const Active& b) {
            return requests[a.index].worker < requests[b.index].worker;
        });
        for (const auto& a : leaving) {
            events.push_back({t, requests[a.index].worker, ChannelEventKind::release, a.bandwidth});
        }
        serve_queue(t);

        while (next < order.size() && requests[order[next]].ready_at == t && t < deadline) {
            const std::size_t i = order[next++];
            if (requests[i].bandwidth > capacity + tolerance) {
                result.outcomes[i].never_admitted = true;
                result.outcomes[i].queued_for = deadline - requests[i].ready_at;
                continue;
            }
            queue.push_back(i);
        }
        serve_queue(t);
    }

    for (std::size_t i : queue) {
        result.outcomes[i].never_admitted = true;
        result.outcomes[i].queued_for = deadline - requests[i].ready_at;
    }
    // Ready at or after the deadline: nothing can be admitted any more.
    for (; next < order.size(); ++next) result.outcomes[order[next]].never_admitted = true;
    return result;
}

AuditResult audit_timeline(const ChannelTimeline& timeline) {
    auto events = timeline.events;
    std::stable_sort(events.begin(), events.end(), [](const ChannelEvent& a, const ChannelEvent& b) {
        if (a.time != b.time) return a.time < b.time;
        return a.kind == ChannelEventKind::release && b.kind == ChannelEventKind::admit;
    });

    AuditResult result;
    const double tolerance = capacity_tolerance(timeline.capacity);
    double occupancy = 0.0;
    for (const auto& e : events) {
        if (e.kind == ChannelEventKind::release) {
            occupancy -= e.bandwidth;
            continue;
        }
        occupancy += e.bandwidth;
        result.peak = std::max(result.peak, occupancy);
        if (result.ok && occupancy > timeline.capacity + tolerance) {
            result.ok = false;
            result.first_violation = e.time;
        }
    }
    return result;
}

void write_timeline_csv(std::ostream& out, const ChannelTimeline& timeline) {
    out << "time,worker,event,bandwidth_hz\n";
    for (const auto& e : timeline.events) {
        out << fmt::format("{:.17g},{},{},{:.17g}\n", e.time, e.worker,
                           e.kind == ChannelEventKind::admit ? "admit" : "release", e.bandwidth);
    }
}

}  // namespace greenflag
