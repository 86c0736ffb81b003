#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "greenflag/errors.hpp"
#include "greenflag/experiment.hpp"

using namespace greenflag;

namespace {

const std::vector<WeatherRecord>& sample_weather() {
    static const auto rows = load_weather_csv(GREENFLAG_SAMPLE_WEATHER);
    return rows;
}

}  // namespace

TEST_SUITE("experiment") {

TEST_CASE("aggregate") {
    std::vector<EpisodeMetrics> one(1);
    one[0].total_energy = 5.0;
    auto rows = aggregate("bes", one);
    REQUIRE(rows.size() == 6);
    for (const auto& r : rows) CHECK(r.std == 0.0);
    CHECK(rows[0].metric == "Total Energy (J)");
    CHECK(rows[5].metric == "Global Iterations");
    CHECK(rows[0].mean == 5.0);

    std::vector<EpisodeMetrics> two(2);
    two[0].grid_energy = 1.0;
    two[1].grid_energy = 3.0;
    rows = aggregate("x", two);
    CHECK(rows[1].mean == 2.0);
    CHECK(rows[1].std == 1.0);  // population std
}

TEST_CASE("run_experiment") {
    ExperimentSpec spec;
    spec.scenario = default_scenario(ScenarioKind::ideal);
    spec.episodes = 6;
    spec.base_seed = 30;

    auto a = run_experiment(spec, sample_weather());
    spec.jobs = 3;
    auto b = run_experiment(spec, sample_weather());
    REQUIRE(a.table.size() == 18);
    for (std::size_t i = 0; i < a.table.size(); ++i) {
        CHECK(a.table[i].policy == b.table[i].policy);
        CHECK(a.table[i].mean == b.table[i].mean);
        CHECK(a.table[i].std == b.table[i].std);
    }
    for (std::size_t i = 0; i < 6; ++i) CHECK(a.runs[0].episodes[i].seed == 30 + i);

    // total == grid + green per policy
    for (std::size_t p = 0; p < 3; ++p) {
        CHECK(a.table[6 * p].mean == doctest::Approx(a.table[6 * p + 1].mean + a.table[6 * p + 2].mean));
    }

    // Episode order does not change the aggregate.
    std::vector<EpisodeMetrics> forward, backward;
    for (const auto& e : a.runs[1].episodes) forward.push_back(e.metrics);
    backward.assign(forward.rbegin(), forward.rend());
    auto f = aggregate("rss", forward), r = aggregate("rss", backward);
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK(f[i].mean == doctest::Approx(r[i].mean).epsilon(1e-14));
        CHECK(f[i].std == doctest::Approx(r[i].std).epsilon(1e-12));
    }

    spec.episodes = 0;
    CHECK_THROWS_AS(run_experiment(spec, sample_weather()), ConfigError);
    spec.episodes = 1;
    spec.policies = {"bogus"};
    CHECK_THROWS_AS(run_experiment(spec, sample_weather()), ConfigError);
}

TEST_CASE("reports") {
    ReportTable table{{"bes", "Total Energy (J)", 1603.84, 233.81},
                      {"bes", "Global Iterations", 11.0, 0.0},
                      {"rss", "Total Energy (J)", 856.75, 118.06},
                      {"rss", "Global Iterations", 19.1, 2.12}};
    SUBCASE("markdown golden") {
        std::ostringstream out;
        emit_report(out, table, ReportFormat::markdown);
        CHECK(out.str() ==
              "| Total Avg. (± STD) | bes | rss |\n"
              "|---|---|---|\n"
              "| Total Energy (J) | 1603.8 (± 233.8) | 856.8 (± 118.1) |\n"
              "| Global Iterations | 11.0 (± 0.0) | 19.1 (± 2.1) |\n");
    }
    SUBCASE("empty table is just the header") {
        std::ostringstream csv, md;
        emit_report(csv, {}, ReportFormat::csv);
        emit_report(md, {}, ReportFormat::markdown);
        CHECK(csv.str() == "policy,metric,mean,std\n");
        CHECK(md.str() == "| Total Avg. (± STD) |\n|---|\n");
    }
    SUBCASE("csv round trip") {
        table[0].mean = 0.1 + 0.2;
        std::stringstream buf;
        emit_report(buf, table, ReportFormat::csv);
        auto back = parse_report_csv(buf);
        REQUIRE(back.size() == table.size());
        for (std::size_t i = 0; i < table.size(); ++i) {
            CHECK(back[i].policy == table[i].policy);
            CHECK(back[i].metric == table[i].metric);
            CHECK(back[i].mean == table[i].mean);
            CHECK(back[i].std == table[i].std);
        }
    }
    SUBCASE("unwritable path") {
        CHECK_THROWS_AS(emit_report(std::filesystem::path("/nonexistent/dir/r.csv"), table, ReportFormat::csv),
                        IoError);
    }
    CHECK(report_format_from_string("md") == ReportFormat::markdown);
    CHECK_THROWS_AS(report_format_from_string("xlsx"), ConfigError);
}

}  // TEST_SUITE
