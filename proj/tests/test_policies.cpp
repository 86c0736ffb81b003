#include <doctest.h>

#include "greenflag/errors.hpp"
#include "greenflag/policies.hpp"

using namespace greenflag;

namespace {

const std::vector<WeatherRecord>& sample_weather() {
    static const auto rows = load_weather_csv(GREENFLAG_SAMPLE_WEATHER);
    return rows;
}

}  // namespace

TEST_SUITE("policies") {

TEST_CASE("best effort") {
    auto cfg = default_scenario(ScenarioKind::ideal);
    auto fleet = sample_worker_fleet(cfg, 1);
    auto a = bes_action(fleet, 100e6);
    double total = 0.0;
    for (std::size_t w = 0; w < fleet.size(); ++w) {
        CHECK(a.cpu_hz[w] == fleet[w].f_max);
        CHECK(a.power_w[w] == fleet[w].p_max);
        CHECK(a.bandwidth_hz[w] == doctest::Approx(5e6));
        total += a.bandwidth_hz[w];
    }
    CHECK(total <= 100e6 * (1 + 1e-12));

    BestEffortPolicy bes;
    Episode e(cfg, sample_weather(), 2);
    while (!e.done()) {
        auto out = e.step(bes.act(e.view()));
        for (const auto& w : out.workers) {
            REQUIRE(w.participating);
            REQUIRE_FALSE(w.admission_failure);
            REQUIRE_FALSE(w.deadline_violation);
        }
    }
}

TEST_CASE("random") {
    auto cfg = default_scenario(ScenarioKind::ideal);
    auto fleet = sample_worker_fleet(cfg, 4);
    Rng a = make_rng(5, streams::policy), b = make_rng(5, streams::policy);
    CHECK(rss_action(fleet, 80e6, a) == rss_action(fleet, 80e6, b));

    Rng rng = make_rng(6, streams::policy);
    double f = 0, p = 0, bw = 0;
    const int draws = 5000;
    for (int i = 0; i < draws; ++i) {
        auto act = rss_action(fleet, 80e6, rng);
        for (std::size_t w = 0; w < fleet.size(); ++w) {
            REQUIRE(act.cpu_hz[w] >= 0.0);
            REQUIRE(act.cpu_hz[w] <= fleet[w].f_max);
            REQUIRE(act.power_w[w] >= 0.0);
            REQUIRE(act.power_w[w] <= fleet[w].p_max);
            REQUIRE(act.bandwidth_hz[w] >= 0.0);
            REQUIRE(act.bandwidth_hz[w] <= 80e6);
            f += act.cpu_hz[w] / fleet[w].f_max;
            p += act.power_w[w] / fleet[w].p_max;
            bw += act.bandwidth_hz[w] / 80e6;
        }
    }
    const double n = double(draws) * fleet.size();
    CHECK(f / n == doctest::Approx(0.5).epsilon(0.01));
    CHECK(p / n == doctest::Approx(0.5).epsilon(0.01));
    CHECK(bw / n == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("greedy") {
    auto cfg = default_scenario(ScenarioKind::ideal);
    const auto& weather = sample_weather();

    SUBCASE("first round is the random action") {
        GreedyPolicy gss(0.1);
        gss.begin_episode(9);
        Episode e(cfg, weather, 9);
        Rng rng = make_rng(9, streams::policy);
        std::uniform_real_distribution<double>(0.0, 1.0)(rng);  // explore coin
        auto expected = rss_action(e.fleet(), e.upcoming().bandwidth_max, rng);
        CHECK(gss.act(e.view()) == expected);
    }
    SUBCASE("memory adopts strictly better rounds and never gets worse") {
        GreedyPolicy gss(0.1);
        gss.begin_episode(3);
        Episode e(cfg, weather, 3);
        std::optional<double> best;
        while (!e.done()) {
            auto out = e.step(gss.act(e.view()));
            gss.observe(out);
            // The comparison happens when the next action is chosen.
            if (!e.done()) {
                gss.act(e.view());
                const auto& m = gss.memory();
                REQUIRE(m.best_round_energy.has_value());
                if (best) REQUIRE(*m.best_round_energy <= *best);
                best = m.best_round_energy;
            }
        }
    }
    SUBCASE("without exploration every round replays round one") {
        GreedyPolicy gss(0.0);
        gss.begin_episode(11);
        Episode e(cfg, weather, 11);
        const double b1 = e.upcoming().bandwidth_max;
        auto first = gss.act(e.view());
        gss.observe(e.step(first));
        while (!e.done()) {
            auto a = gss.act(e.view());
            const double scale = e.upcoming().bandwidth_max / b1;
            for (std::size_t w = 0; w < a.size(); ++w) {
                REQUIRE(a.cpu_hz[w] == first.cpu_hz[w]);
                REQUIRE(a.power_w[w] == first.power_w[w]);
                REQUIRE(a.bandwidth_hz[w] == doctest::Approx(first.bandwidth_hz[w] * scale));
            }
            gss.observe(e.step(a));
        }
    }
    SUBCASE("memory resets between episodes") {
        GreedyPolicy gss(0.1);
        Episode e(cfg, weather, 4);
        gss.begin_episode(4);
        gss.observe(e.step(gss.act(e.view())));
        gss.act(e.view());
        CHECK(gss.memory().best_round_energy.has_value());
        gss.begin_episode(5);
        CHECK_FALSE(gss.memory().best_round_energy.has_value());
    }
}

TEST_CASE("factory") {
    auto cfg = default_scenario(ScenarioKind::ideal);
    CHECK(make_policy("bes", cfg)->name() == "bes");
    CHECK(make_policy("random", cfg)->name() == "rss");
    CHECK(make_policy("gss", cfg)->name() == "gss");
    CHECK_THROWS_AS(make_policy("sac", cfg), ConfigError);
}

}  // TEST_SUITE
