// greenflag: experiment harness and environment server.
//
//   greenflag run --scenario 1 --policy bes,rss,gss --episodes 100 --out table.md --format md
//   greenflag serve-env --scenario 2 --seed 7 --listen 127.0.0.1:5555
//   greenflag validate-weather data/athens_2020_synthetic.csv

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "greenflag/errors.hpp"
#include "greenflag/experiment.hpp"
#include "greenflag/protocol.hpp"
#include "greenflag/weather.hpp"

#ifndef GREENFLAG_DEFAULT_WEATHER
#define GREENFLAG_DEFAULT_WEATHER "data/athens_2020_synthetic.csv"
#endif

namespace gf = greenflag;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

struct CommonOptions {
    int scenario = 1;
    std::uint64_t seed = 0;
    std::string weather = GREENFLAG_DEFAULT_WEATHER;
    std::string config;
};

gf::ScenarioConfig resolve_config(const CommonOptions& opts) {
    auto kind = gf::scenario_kind_from_int(opts.scenario);
    gf::ScenarioConfig config =
        opts.config.empty() ? gf::default_scenario(kind) : gf::load_scenario_config(opts.config);
    // An explicit --scenario always wins over the file.
    config.scenario_kind = kind;
    config.seed = opts.seed;
    config.validate();
    return config;
}

std::vector<std::string> split_policies(const std::vector<std::string>& raw) {
    std::vector<std::string> out;
    for (const auto& item : raw) {
        std::stringstream ss(item);
        std::string name;
        while (std::getline(ss, name, ',')) {
            if (!name.empty()) out.push_back(name);
        }
    }
    return out;
}

// Drives `episodes` protocol episodes from an external agent and reports
// their metrics under the name "protocol".
gf::ReportTable run_protocol(const gf::ScenarioConfig& config, std::vector<gf::WeatherRecord> weather,
                             std::size_t episodes, const std::string& listen) {
    gf::ProtocolSession session(config, std::move(weather));
    const std::uint64_t base = config.seed;
    session.override_seeds([base](std::size_t i) { return base + i; });
    std::vector<gf::EpisodeMetrics> collected;
    session.on_episode_end([&](const gf::Episode& e) {
        if (collected.size() < episodes) collected.push_back(e.metrics());
    });
    if (listen.empty()) {
        gf::serve_stream(session, std::cin, std::cout);
    } else {
        gf::serve_listen(session, listen);
    }
    if (collected.size() < episodes) {
        spdlog::warn("agent finished {} of {} requested episodes", collected.size(), episodes);
    }
    return gf::aggregate("protocol", collected);
}

int cmd_run(const CommonOptions& opts, const std::vector<std::string>& policy_args, std::size_t episodes,
            const std::string& out_path, const std::string& format_name, unsigned jobs,
            const std::string& trace_path, const std::string& listen) {
    auto config = resolve_config(opts);
    auto format = gf::report_format_from_string(format_name);
    auto policies = split_policies(policy_args);
    if (policies.empty()) throw gf::ConfigError("no policy given");
    if (episodes < 1) throw gf::ConfigError("--episodes must be >= 1");
    auto weather = gf::load_weather_csv(opts.weather);
    if (weather.empty()) throw gf::ConfigError(fmt::format("weather file {} has no records", opts.weather));

    gf::ReportTable table;
    std::vector<std::string> simulated;
    for (const auto& p : policies) {
        if (p != "protocol") simulated.push_back(p);
    }

    gf::ExperimentResult result;
    if (!simulated.empty()) {
        gf::ExperimentSpec spec{config, simulated, episodes, opts.seed, jobs};
        result = gf::run_experiment(spec, weather);
    }
    for (const auto& p : policies) {
        if (p == "protocol") {
            auto rows = run_protocol(config, weather, episodes, listen);
            table.insert(table.end(), rows.begin(), rows.end());
            continue;
        }
        for (const auto& row : result.table) {
            if (row.policy == p) table.push_back(row);
        }
    }

    if (out_path.empty() || out_path == "-") {
        gf::emit_report(std::cout, table, format);
    } else {
        gf::emit_report(out_path, table, format);
        spdlog::info("wrote {}", out_path);
    }
    if (!trace_path.empty()) {
        std::ofstream trace(trace_path);
        if (!trace) throw gf::IoError(fmt::format("cannot write trace {}", trace_path));
        gf::write_trace_csv(trace, result);
    }
    return 0;
}

int cmd_serve(const CommonOptions& opts, const std::string& listen, bool stdio) {
    auto config = resolve_config(opts);
    auto weather = gf::load_weather_csv(opts.weather);
    if (weather.empty()) throw gf::ConfigError(fmt::format("weather file {} has no records", opts.weather));
    gf::ProtocolSession session(config, std::move(weather));
    if (stdio || listen.empty()) {
        gf::serve_stream(session, std::cin, std::cout);
    } else {
        gf::serve_listen(session, listen);
    }
    return 0;
}

int cmd_validate(const std::string& path) {
    auto records = gf::load_weather_csv(path);
    if (records.empty()) {
        fmt::print("{}: 0 records\n", path);
        return 0;
    }
    fmt::print("{}: {} records, {} .. {}\n", path, records.size(),
               gf::format_iso8601(records.front().timestamp), gf::format_iso8601(records.back().timestamp));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    spdlog::set_default_logger(spdlog::stderr_color_mt("greenflag"));
    spdlog::set_pattern("[%l] %v");

    CLI::App app{"Energy-aware federated learning simulator"};
    app.require_subcommand(1);

    CommonOptions run_opts;
    std::vector<std::string> policies{"bes,rss,gss"};
    std::size_t episodes = 100;
    std::string out_path;
    std::string format = "csv";
    unsigned jobs = 1;
    std::string trace_path;
    std::string run_listen;

    auto* run = app.add_subcommand("run", "Run independent episodes and report mean (± std) metrics");
    run->add_option("--scenario", run_opts.scenario, "1 ideal, 2 sporadic outages, 3 grid dependent")
        ->check(CLI::Range(1, 3));
    run->add_option("--policy", policies, "bes, rss, random, gss, protocol (comma separated)")
        ->delimiter(',');
    run->add_option("--episodes", episodes, "Episodes per policy")->check(CLI::PositiveNumber);
    run->add_option("--seed", run_opts.seed, "Base seed; episode i uses seed + i");
    run->add_option("--weather", run_opts.weather, "Hourly weather CSV");
    run->add_option("--config", run_opts.config, "Scenario JSON overriding defaults");
    run->add_option("--out", out_path, "Report path (stdout if omitted)");
    run->add_option("--format", format, "csv or md")->check(CLI::IsMember({"csv", "md", "markdown"}));
    run->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
    run->add_option("--trace", trace_path, "Per-round trace CSV");
    run->add_option("--listen", run_listen, "Address for --policy protocol (stdio if omitted)");

    CommonOptions serve_opts;
    std::string listen;
    bool stdio = false;
    auto* serve = app.add_subcommand("serve-env", "Expose the environment over the line-delimited JSON protocol");
    serve->add_option("--scenario", serve_opts.scenario, "1, 2 or 3")->check(CLI::Range(1, 3));
    serve->add_option("--seed", serve_opts.seed, "Seed used when reset omits one");
    serve->add_option("--weather", serve_opts.weather, "Hourly weather CSV");
    serve->add_option("--config", serve_opts.config, "Scenario JSON overriding defaults");
    auto* listen_opt = serve->add_option("--listen", listen, "host:port or unix:/path");
    serve->add_flag("--stdio", stdio, "Serve on stdin/stdout (default)")->excludes(listen_opt);

    std::string validate_path;
    auto* validate = app.add_subcommand("validate-weather", "Check a weather CSV");
    validate->add_option("file", validate_path, "Weather CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*run) {
            return cmd_run(run_opts, policies, episodes, out_path, format, jobs, trace_path, run_listen);
        }
        if (*serve) return cmd_serve(serve_opts, listen, stdio);
        if (*validate) return cmd_validate(validate_path);
    } catch (const gf::ParseError& e) {
        spdlog::error("{}", e.what());
        return kExitConfig;
    } catch (const gf::ConfigError& e) {
        spdlog::error("{}", e.what());
        return kExitConfig;
    } catch (const gf::IoError& e) {
        spdlog::error("{}", e.what());
        return kExitIo;
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return 1;
    }
    return 0;
}
