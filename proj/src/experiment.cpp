#include "greenflag/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "greenflag/errors.hpp"
#include "greenflag/policies.hpp"

namespace greenflag {

double metric_value(const EpisodeMetrics& m, std::size_t metric) {
    switch (metric) {
        case 0: return m.total_energy;
        case 1: return m.grid_energy;
        case 2: return m.green_energy;
        case 3: return m.mean_round_duration;
        case 4: return m.violations_per_worker;
        case 5: return m.global_iterations;
        default: throw std::out_of_range("metric index");
    }
}

ReportTable aggregate(const std::string& policy, std::span<const EpisodeMetrics> episodes) {
    ReportTable rows;
    for (std::size_t m = 0; m < kMetricNames.size(); ++m) {
        ReportRow row{policy, std::string(kMetricNames[m]), 0.0, 0.0};
        if (!episodes.empty()) {
            double sum = 0.0;
            for (const auto& e : episodes) sum += metric_value(e, m);
            row.mean = sum / episodes.size();
            double sq = 0.0;
            for (const auto& e : episodes) {
                const double d = metric_value(e, m) - row.mean;
                sq += d * d;
            }
            row.std = std::sqrt(sq / episodes.size());
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

ExperimentResult run_experiment(const ExperimentSpec& spec, std::span<const WeatherRecord> weather) {
    if (spec.episodes < 1) throw ConfigError("episodes must be >= 1");
    if (spec.policies.empty()) throw ConfigError("at least one policy is required");
    spec.scenario.validate();
    for (const auto& name : spec.policies) make_policy(name, spec.scenario);

    ExperimentResult result;
    for (const auto& name : spec.policies) {
        PolicyRuns runs{name, std::vector<EpisodeResult>(spec.episodes)};

        // Each worker thread owns its policy instance; episode i always uses
        // seed base + i and lands in slot i.
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        auto work = [&] {
            try {
                auto policy = make_policy(name, spec.scenario);
                for (std::size_t i = next++; i < spec.episodes; i = next++) {
                    runs.episodes[i] =
                        run_episode(spec.scenario, weather, *policy, spec.base_seed + i);
                }
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        };
        const unsigned jobs =
            static_cast<unsigned>(std::clamp<std::size_t>(spec.jobs, 1, spec.episodes));
        std::vector<std::thread> threads;
        for (unsigned j = 1; j < jobs; ++j) threads.emplace_back(work);
        work();
        for (auto& t : threads) t.join();
        if (failure) std::rethrow_exception(failure);

        std::vector<EpisodeMetrics> metrics;
        for (const auto& e : runs.episodes) metrics.push_back(e.metrics);
        auto rows = aggregate(name, metrics);
        result.table.insert(result.table.end(), rows.begin(), rows.end());
        result.runs.push_back(std::move(runs));
    }
    return result;
}

ReportFormat report_format_from_string(std::string_view text) {
    if (text == "csv") return ReportFormat::csv;
    if (text == "md" || text == "markdown") return ReportFormat::markdown;
    throw ConfigError(fmt::format("unknown report format '{}' (expected csv or md)", text));
}

void emit_report(std::ostream& out, const ReportTable& table, ReportFormat format) {
    if (format == ReportFormat::csv) {
        out << "policy,metric,mean,std\n";
        for (const auto& r : table) {
            out << fmt::format("{},{},{:.17g},{:.17g}\n", r.policy, r.metric, r.mean, r.std);
        }
        return;
    }

    std::vector<std::string> policies;
    std::vector<std::string> metrics;
    for (const auto& r : table) {
        if (std::find(policies.begin(), policies.end(), r.policy) == policies.end()) {
            policies.push_back(r.policy);
        }
        if (std::find(metrics.begin(), metrics.end(), r.metric) == metrics.end()) {
            metrics.push_back(r.metric);
        }
    }
    out << "| Total Avg. (± STD) |";
    for (const auto& p : policies) out << ' ' << p << " |";
    out << "\n|---|";
    for (std::size_t i = 0; i < policies.size(); ++i) out << "---|";
    out << '\n';
    for (const auto& m : metrics) {
        out << "| " << m << " |";
        for (const auto& p : policies) {
            auto it = std::find_if(table.begin(), table.end(),
                                   [&](const ReportRow& r) { return r.policy == p && r.metric == m; });
            if (it == table.end()) {
                out << "  |";
            } else {
                out << fmt::format(" {:.1f} (± {:.1f}) |", it->mean, it->std);
            }
        }
        out << '\n';
    }
}

void emit_report(const std::filesystem::path& path, const ReportTable& table, ReportFormat format) {
    std::ofstream out(path);
    if (!out) throw IoError(fmt::format("cannot write report {}", path.string()));
    emit_report(out, table, format);
    if (!out) throw IoError(fmt::format("failed writing report {}", path.string()));
}

ReportTable parse_report_csv(std::istream& in) {
    ReportTable table;
    std::string line;
    if (!std::getline(in, line) || line != "policy,metric,mean,std") {
        throw ConfigError("report CSV must start with 'policy,metric,mean,std'");
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        ReportRow row;
        std::string mean, std;
        if (!std::getline(ss, row.policy, ',') || !std::getline(ss, row.metric, ',') ||
            !std::getline(ss, mean, ',') || !std::getline(ss, std)) {
            throw ConfigError(fmt::format("bad report row '{}'", line));
        }
        row.mean = std::stod(mean);
        row.std = std::stod(std);
        table.push_back(std::move(row));
    }
    return table;
}

void write_trace_csv(std::ostream& out, const ExperimentResult& result) {
    write_trace_header(out);
    for (const auto& runs : result.runs) {
        for (std::size_t i = 0; i < runs.episodes.size(); ++i) {
            write_trace_rows(out, runs.policy, i, runs.episodes[i]);
        }
    }
}

}  // namespace greenflag
