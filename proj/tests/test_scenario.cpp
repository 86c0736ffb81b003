#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "greenflag/errors.hpp"
#include "greenflag/scenario.hpp"

using namespace greenflag;

TEST_SUITE("scenario") {

TEST_CASE("defaults") {
    auto c = default_scenario(ScenarioKind::grid_dependent);
    CHECK(c.scenario_kind == ScenarioKind::grid_dependent);
    CHECK(c.worker_count == 20);
    CHECK(c.low_end_cap() == 12.0);
    CHECK(c.model_size_bits() == doctest::Approx(2.008e7));
    CHECK(c.noise_density_w_hz() == doctest::Approx(1.5849e-19).epsilon(1e-4));
    CHECK_NOTHROW(c.validate());
    CHECK(scenario_kind_from_int(2) == ScenarioKind::sporadic_outages);
    CHECK_THROWS_AS(scenario_kind_from_int(4), ConfigError);
}

TEST_CASE("validation names the field") {
    auto c = default_scenario(ScenarioKind::ideal);
    c.worker_count = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = default_scenario(ScenarioKind::ideal);
    c.gamma = 1.5;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = default_scenario(ScenarioKind::ideal);
    c.local_iterations_min = 20;
    CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("json round trip and merge") {
    auto c = default_scenario(ScenarioKind::sporadic_outages);
    c.worker_count = 7;
    c.harvest.panel_area = 0.05;
    c.queue_discipline = QueueDiscipline::first_fit;
    nlohmann::json j;
    to_json(j, c);

    ScenarioConfig back;
    merge_json(j, back);
    CHECK(back.worker_count == 7);
    CHECK(back.harvest.panel_area == 0.05);
    CHECK(back.scenario_kind == ScenarioKind::sporadic_outages);
    CHECK(back.queue_discipline == QueueDiscipline::first_fit);

    ScenarioConfig partial;
    merge_json(nlohmann::json{{"deadline_s", 15.0}}, partial);
    CHECK(partial.deadline_s == 15.0);
    CHECK(partial.worker_count == 20);

    CHECK_THROWS_AS(merge_json(nlohmann::json{{"no_such_key", 1}}, partial), ConfigError);
    CHECK_THROWS_AS(merge_json(nlohmann::json{{"worker_count", "many"}}, partial), ConfigError);
}

TEST_CASE("load from file") {
    const auto dir = std::filesystem::temp_directory_path();
    const auto good = dir / "greenflag_scenario_ok.json";
    std::ofstream(good) << R"({"worker_count": 5, "mu_idle": 0.5})";
    auto c = load_scenario_config(good);
    CHECK(c.worker_count == 5);
    CHECK(c.mu_idle == 0.5);

    const auto bad = dir / "greenflag_scenario_bad.json";
    std::ofstream(bad) << "{ not json";
    CHECK_THROWS_AS(load_scenario_config(bad), ConfigError);
    CHECK_THROWS_AS(load_scenario_config(dir / "greenflag_missing.json"), IoError);
    std::filesystem::remove(good);
    std::filesystem::remove(bad);
}

}  // TEST_SUITE
