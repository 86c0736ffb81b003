#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "greenflag/flsim.hpp"

namespace greenflag {

inline constexpr std::array<std::string_view, 6> kMetricNames{
    "Total Energy (J)",
    "Grid Energy (J)",
    "Green Energy (J)",
    "Duration of Global Iteration (s)",
    "Violations per Worker",
    "Global Iterations",
};

double metric_value(const EpisodeMetrics& metrics, std::size_t metric);

struct ExperimentSpec {
    ScenarioConfig scenario{};
    std::vector<std::string> policies{"bes", "rss", "gss"};
    std::size_t episodes = 100;
    std::uint64_t base_seed = 0;
    unsigned jobs = 1;
};

struct ReportRow {
    std::string policy;
    std::string metric;
    double mean = 0.0;
    double std = 0.0;  // population standard deviation
};

using ReportTable = std::vector<ReportRow>;

struct PolicyRuns {
    std::string policy;
    std::vector<EpisodeResult> episodes;  // episode i ran with seed base + i
};

struct ExperimentResult {
    ReportTable table;
    std::vector<PolicyRuns> runs;
};

/// Mean and population std of the six table metrics, one row per metric.
ReportTable aggregate(const std::string& policy, std::span<const EpisodeMetrics> episodes);

/// Runs `episodes` independent episodes per policy on up to `jobs` threads.
/// The result does not depend on `jobs` or on completion order.
ExperimentResult run_experiment(const ExperimentSpec& spec, std::span<const WeatherRecord> weather);

enum class ReportFormat { csv, markdown };

ReportFormat report_format_from_string(std::string_view text);

/// CSV: policy,metric,mean,std. Markdown: one row per metric, one column per
/// policy, cells "mean (± std)".
void emit_report(std::ostream& out, const ReportTable& table, ReportFormat format);
void emit_report(const std::filesystem::path& path, const ReportTable& table, ReportFormat format);

ReportTable parse_report_csv(std::istream& in);

void write_trace_csv(std::ostream& out, const ExperimentResult& result);

}  // namespace greenflag
