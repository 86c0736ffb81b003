#include <doctest.h>

#include <cmath>

#include "greenflag/mdp.hpp"
#include "greenflag/policies.hpp"

using namespace greenflag;

namespace {

const std::vector<WeatherRecord>& sample_weather() {
    static const auto rows = load_weather_csv(GREENFLAG_SAMPLE_WEATHER);
    return rows;
}

WorkerRoundResult worker(double demand, double harvest, double battery_before) {
    WorkerRoundResult r;
    r.participating = true;
    r.on_time = true;
    r.harvest = harvest;
    r.energy.computation = demand;
    r.energy.battery_before = battery_before;
    return r;
}

// Reward written out term by term from the outcome fields.
double hand_reward(const RoundOutcome& o, double mu1, double mu2, double mu3) {
    double grid = 0.0, pen = 0.0;
    for (const auto& w : o.workers) {
        const double p1 = w.participating && w.deadline_violation;
        const double p3 = w.participating && w.admission_failure;
        if (w.participating) {
            const double short_by = w.energy.computation + w.energy.transmission - w.harvest -
                                    w.energy.battery_before;
            grid += short_by > 0 ? short_by : 0.0;
        }
        pen += w.energy.wasted + (mu1 + mu3 * p3) * p1;
    }
    return -(grid + pen + mu2 * (o.all_idle ? 1 : 0));
}

}  // namespace

TEST_SUITE("mdp") {

TEST_CASE("state layout") {
    CHECK(state_size(20) == 162);
    CHECK(state_index(StateField::local_iterations, 0, 20) == 0);
    CHECK(state_index(StateField::battery, 19, 20) == 159);
    CHECK(state_index(StateField::harvest, 2, 5) == 27);
}

TEST_CASE("action mapping") {
    ActionBounds b;
    b.f_max = {2e9, 4e9};
    b.p_max = {0.2, 1.5};
    b.b_max = 80e6;
    std::vector<double> lo(6, -1.0), hi(6, 1.0), mid(6, 0.0);
    auto a = clamp_action(lo, b);
    for (std::size_t w = 0; w < 2; ++w) {
        CHECK(a.cpu_hz[w] == 0.0);
        CHECK(a.power_w[w] == 0.0);
        CHECK(a.bandwidth_hz[w] == 0.0);
    }
    a = clamp_action(hi, b);
    CHECK(a.cpu_hz[1] == 4e9);
    CHECK(a.power_w[0] == 0.2);
    CHECK(a.bandwidth_hz[1] == 80e6);
    a = clamp_action(mid, b);
    CHECK(a.cpu_hz[0] == 1e9);
    CHECK(a.power_w[1] == 0.75);
    CHECK(a.bandwidth_hz[0] == 40e6);

    std::vector<double> wild{-7, 3, 0.5, 2, 1, -0.5};
    a = clamp_action(wild, b);
    CHECK(a.cpu_hz[0] == 0.0);
    CHECK(a.cpu_hz[1] == 4e9);
    auto back = normalize_action(a, b);
    CHECK(back[2] == doctest::Approx(0.5));
    CHECK(back[5] == doctest::Approx(-0.5));

    std::vector<double> short_action(5, 0.0);
    CHECK_THROWS_AS(clamp_action(short_action, b), std::invalid_argument);
    std::vector<double> nan_action(6, std::nan(""));
    CHECK_THROWS_AS(clamp_action(nan_action, b), std::invalid_argument);

    ActionVector big(2);
    big.cpu_hz = {9e9, 1e9};
    big.power_w = {-1, 1};
    big.bandwidth_hz = {1e9, 1};
    auto clipped = clip_to_bounds(big, b);
    CHECK(clipped.cpu_hz[0] == 2e9);
    CHECK(clipped.power_w[0] == 0.0);
    CHECK(clipped.bandwidth_hz[0] == 80e6);
}

TEST_CASE("penalty indicators") {
    RoundOutcome all_idle;
    all_idle.all_idle = true;
    all_idle.workers.resize(3);
    auto p = penalty_indicators(all_idle);
    CHECK(p.idle == 1);
    CHECK(p.deadline == std::vector<int>{0, 0, 0});
    CHECK(p.admission == std::vector<int>{0, 0, 0});

    RoundOutcome o;
    o.workers = {worker(1, 1, 0), worker(1, 1, 0)};
    o.workers[1].deadline_violation = true;
    o.workers[1].admission_failure = true;
    o.workers[1].on_time = false;
    p = penalty_indicators(o);
    CHECK(p.idle == 0);
    CHECK(p.deadline == std::vector<int>{0, 1});
    CHECK(p.admission == std::vector<int>{0, 1});
}

TEST_CASE("reward fixtures") {
    const PenaltyWeights mu{0.3, 0.4, 0.3};
    SUBCASE("renewables cover everything") {
        RoundOutcome o;
        o.workers = {worker(10, 30, 0), worker(4, 1, 5)};
        auto r = compute_reward(o, mu);
        CHECK(r.total == doctest::Approx(0.0).epsilon(1e-9));
    }
    SUBCASE("five joules from the grid") {
        RoundOutcome o;
        o.workers = {worker(15, 5, 5)};
        CHECK(compute_reward(o, mu).total == doctest::Approx(-5.0).epsilon(1e-9));
    }
    SUBCASE("deadline and admission penalties") {
        RoundOutcome o;
        o.workers = {worker(2, 10, 0)};
        o.workers[0].deadline_violation = true;
        o.workers[0].admission_failure = true;
        o.workers[0].on_time = false;
        o.workers[0].energy.wasted = 2.0;
        auto r = compute_reward(o, mu);
        CHECK(r.total == doctest::Approx(-(2.0 + 0.3 + 0.3)).epsilon(1e-9));
        CHECK(r.wasted == 2.0);
        CHECK(r.deadline_penalty == doctest::Approx(0.3));
        CHECK(r.admission_penalty == doctest::Approx(0.3));
    }
    SUBCASE("all idle") {
        RoundOutcome o;
        o.all_idle = true;
        o.workers.resize(4);
        CHECK(compute_reward(o, mu).total == doctest::Approx(-0.4));
    }
    SUBCASE("energy scale divides the energy terms only") {
        RoundOutcome o;
        o.workers = {worker(15, 5, 5)};
        o.workers[0].deadline_violation = true;
        o.workers[0].energy.wasted = 15.0;
        auto r = compute_reward(o, mu, 10.0);
        CHECK(r.total == doctest::Approx(-(0.5 + 1.5 + 0.3)));
    }
}

TEST_CASE("environment") {
    const auto& weather = sample_weather();
    auto cfg = default_scenario(ScenarioKind::ideal);
    Environment env(cfg, weather);
    const std::size_t k = 20;

    std::vector<double> idle(3 * k, -1.0);
    CHECK_THROWS_AS(env.step(idle), EnvironmentError);

    auto s0 = env.reset(7);
    REQUIRE(s0.values.size() == state_size(k));
    for (std::size_t w = 0; w < k; ++w) {
        CHECK(s0.values[state_index(StateField::local_iterations, w, k)] == 0.0);
        CHECK(s0.values[state_index(StateField::wasted_energy, w, k)] == 0.0);
        CHECK(s0.values[state_index(StateField::battery, w, k)] == doctest::Approx(1.0));
    }
    CHECK(s0.values[8 * k] == 1.0);
    CHECK(env.reset(7).values == s0.values);

    SUBCASE("full idle action") {
        auto r = env.step(idle);
        CHECK(r.outcome.all_idle);
        CHECK(r.reward.idle_penalty == doctest::Approx(0.4));
        CHECK(r.reward.total == doctest::Approx(-0.4));
        CHECK(env.episode().global_error() == 1.0);
        CHECK(r.state.values[8 * k] == 1.0);
    }
    SUBCASE("wrong action length") {
        std::vector<double> bad(3 * k - 1, 0.0);
        CHECK_THROWS_AS(env.step(bad), std::invalid_argument);
        CHECK(env.active());
    }
    SUBCASE("scripted episode against the hand ledger") {
        std::vector<std::vector<double>> script{std::vector<double>(3 * k, 1.0),
                                                std::vector<double>(3 * k, 0.0),
                                                std::vector<double>(3 * k, -0.5)};
        for (const auto& a : script) {
            auto r = env.step(a);
            CHECK(r.reward.total == doctest::Approx(hand_reward(r.outcome, 0.3, 0.4, 0.3)).epsilon(1e-12));
            for (double v : r.state.values) {
                CHECK(v >= 0.0);
                CHECK(v <= 1.0 + 1e-12);
            }
        }
    }
    SUBCASE("runs until done, then refuses steps") {
        std::vector<double> full(3 * k, 1.0);
        // Full cpu and power, bandwidth share b_max / K.
        for (std::size_t w = 0; w < k; ++w) full[2 * k + w] = 2.0 / k - 1.0;
        StepResult r;
        int steps = 0;
        do {
            r = env.step(full);
            ++steps;
        } while (!r.done);
        CHECK(steps == r.metrics.global_iterations);
        CHECK(r.metrics.converged);
        CHECK_THROWS_AS(env.step(full), EnvironmentError);
    }
    SUBCASE("reset can switch scenario") {
        env.reset(3, ScenarioKind::grid_dependent);
        CHECK(env.episode().config().scenario_kind == ScenarioKind::grid_dependent);
    }
}

}  // TEST_SUITE
