#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace greenflag {

struct TransmissionRequest {
    std::size_t worker = 0;
    double ready_at = 0.0;            // s, end of local computation
    double bandwidth = 0.0;           // Hz
    double duration_if_served = 0.0;  // s
};

struct ScheduleOutcome {
    std::size_t worker = 0;
    double queued_for = 0.0;
    std::optional<double> started_at;
    std::optional<double> finished_at;
    bool completed_by_deadline = false;
    bool never_admitted = false;
};

enum class ChannelEventKind { admit, release };

struct ChannelEvent {
    double time = 0.0;
    std::size_t worker = 0;
    ChannelEventKind kind = ChannelEventKind::admit;
    double bandwidth = 0.0;
};

struct ChannelTimeline {
    double capacity = 0.0;
    std::vector<ChannelEvent> events;  // in processing order
};

struct ScheduleResult {
    std::vector<ScheduleOutcome> outcomes;  // same order as the requests
    ChannelTimeline timeline;
};

enum class QueueDiscipline {
    head_of_line,  // strict FCFS: a blocked head blocks everyone behind it
    first_fit,     // any queued request that fits is admitted, in queue order
};

/// Event-driven FCFS admission of upload requests on a shared channel.
///
/// Requests are taken in ready_at order (ties by worker index). At every
/// instant releases are applied first, then the queue is served, then new
/// arrivals join the back of the queue. Nothing is admitted at or after the
/// deadline. A request wider than the channel is never admitted and never
/// enters the queue.
ScheduleResult schedule_round(std::span<const TransmissionRequest> requests, double capacity,
                              double deadline,
                              QueueDiscipline discipline = QueueDiscipline::head_of_line);

struct AuditResult {
    bool ok = true;
    std::optional<double> first_violation;  // time of the first over-commit
    double peak = 0.0;                      // highest occupancy seen, Hz
};

/// Replays the events (releases before admits at equal times) and checks
/// that occupancy never exceeds capacity.
AuditResult audit_timeline(const ChannelTimeline& timeline);

/// time,worker,event,bandwidth_hz
void write_timeline_csv(std::ostream& out, const ChannelTimeline& timeline);

}  // namespace greenflag
