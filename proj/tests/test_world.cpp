#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "rowswarm/rng.hpp"
#include "rowswarm/world.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

using namespace rowswarm;

namespace {

WorldConfig quiet_config(int n, double gap) {
    WorldConfig cfg;
    cfg.n_agents = n;
    cfg.avg_gap = gap;
    cfg.motor_noise_rel = 0.0;
    return cfg;
}

} // namespace

TEST_CASE("seed fan-out is stable and label-sensitive") {
    CHECK(run_seed(10, 3) == (10ull ^ 3ull));
    CHECK(run_seed(42, 0) == 42);
    CHECK(sub_seed(7, "shuffle", 0) == sub_seed(7, "shuffle", 0));
    CHECK(sub_seed(7, "shuffle", 0) != sub_seed(7, "shuffle", 1));
    CHECK(sub_seed(7, "shuffle", 0) != sub_seed(7, "init", 0));
    CHECK(sub_seed(7, "shuffle", 0) != sub_seed(8, "shuffle", 0));
}

TEST_CASE("ground-truth membership splits the row at the middle") {
    // n = 5: first three blue, last two red.
    CHECK(ground_truth_colour(0, 5) == Colour::blue);
    CHECK(ground_truth_colour(2, 5) == Colour::blue);
    CHECK(ground_truth_colour(3, 5) == Colour::red);
    CHECK(ground_truth_colour(4, 5) == Colour::red);
    // n = 6: clean halves.
    CHECK(ground_truth_colour(2, 6) == Colour::blue);
    CHECK(ground_truth_colour(3, 6) == Colour::red);
    for (int n = 3; n <= 12; ++n) {
        int blues = 0;
        for (int i = 0; i < n; ++i)
            if (ground_truth_colour(i, n) == Colour::blue) ++blues;
        CHECK(blues == (n + 1) / 2);
    }
    CHECK(colour_to_int(Colour::red) == 0);
    CHECK(colour_to_int(Colour::blue) == 1);
    CHECK(colour_from_int(1) == Colour::blue);
}

TEST_CASE("config validation rejects out-of-range fields") {
    CHECK_NOTHROW(WorldConfig{}.validate());
    WorldConfig cfg;
    cfg.n_agents = 2;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = WorldConfig{};
    cfg.avg_gap = 4.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.variable_gap = true; // gap range is drawn per run instead
    CHECK_NOTHROW(cfg.validate());
    cfg = WorldConfig{};
    cfg.dt = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = WorldConfig{};
    cfg.motor_noise_rel = -0.1;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = WorldConfig{};
    cfg.goal_tolerance = -1.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("config JSON round trips and rejects unknown keys") {
    WorldConfig cfg = quiet_config(5, 13.5);
    cfg.max_steps = 17;
    cfg.rng_seed = 99;
    WorldConfig back = world_config_from_json(world_config_to_json(cfg));
    CHECK(back.n_agents == 5);
    CHECK(back.avg_gap == doctest::Approx(13.5));
    CHECK(back.variable_gap == false);
    CHECK(back.motor_noise_rel == 0.0);
    CHECK(back.max_steps == 17);
    CHECK(back.rng_seed == 99);

    WorldConfig var = world_config_from_json(R"({"avg_gap": "variable"})");
    CHECK(var.variable_gap);
    CHECK(world_config_from_json("{}").n_agents == WorldConfig{}.n_agents);
    CHECK_THROWS_AS(world_config_from_json(R"({"gap": 8})"), std::invalid_argument);
    CHECK_THROWS_AS(world_config_from_json(R"({"avg_gap": "typo"})"),
                    std::invalid_argument);
    // Round trip keeps the "variable" marker.
    WorldConfig var2 = world_config_from_json(world_config_to_json(var));
    CHECK(var2.variable_gap);
}

TEST_CASE("positions accumulate gaps plus body length") {
    auto xs = positions_from_gaps({0.0}, 10.9);
    REQUIRE(xs.size() == 2);
    CHECK(xs[0] == 0.0);
    CHECK(xs[1] == doctest::Approx(10.9));
    auto ys = positions_from_gaps({5.0, 3.0}, 10.9);
    REQUIRE(ys.size() == 3);
    CHECK(ys[1] == doctest::Approx(15.9));
    CHECK(ys[2] == doctest::Approx(29.8));
}

TEST_CASE("goals interpolate between the exact extremes") {
    std::vector<double> xs = {2.0, 11.0, 17.0, 44.0};
    auto goals = compute_goals(xs);
    REQUIRE(goals.size() == 4);
    CHECK(goals.front() == 2.0); // bitwise: anchors are the fixed robots
    CHECK(goals.back() == 44.0);
    CHECK(goals[1] == doctest::Approx(16.0));
    CHECK(goals[2] == doctest::Approx(30.0));
}

TEST_CASE("spawn seeds are reproducible and structure is sound") {
    WorldConfig cfg = quiet_config(6, 9.0);
    WorldState a = spawn_world(cfg, 31);
    WorldState b = spawn_world(cfg, 31);
    WorldState c = spawn_world(cfg, 32);
    REQUIRE(a.n() == 6);
    for (int i = 0; i < 6; ++i) {
        CHECK(a.agents[i].x == b.agents[i].x);
        CHECK(a.agents[i].colour == b.agents[i].colour);
        CHECK(a.agents[i].tx_message == 0.0);
    }
    bool any_differs = false;
    for (int i = 1; i < 6; ++i) any_differs |= (a.agents[i].x != c.agents[i].x);
    CHECK(any_differs);

    CHECK(a.agents.front().x == 0.0);
    CHECK(a.agents.front().dead);
    CHECK(a.agents.back().dead);
    for (int i = 1; i < 5; ++i) CHECK_FALSE(a.agents[i].dead);
    // Row is ordered with non-negative surface gaps.
    for (int i = 1; i < 6; ++i)
        CHECK(a.agents[i].x - a.agents[i - 1].x >= cfg.robot_length);
    CHECK(a.goals == compute_goals([&] {
              std::vector<double> xs;
              for (auto& ag : a.agents) xs.push_back(ag.x);
              return xs;
          }()));
    CHECK(a.drawn_avg_gap == 9.0);
}

TEST_CASE("spawn gaps are uniform with the configured mean") {
    WorldConfig cfg = quiet_config(8, 8.0);
    double sum = 0.0;
    double max_gap = 0.0;
    int count = 0;
    for (std::uint64_t s = 0; s < 2000; ++s) {
        WorldState w = spawn_world(cfg, s);
        for (int i = 1; i < w.n(); ++i) {
            double gap = w.agents[i].x - w.agents[i - 1].x - cfg.robot_length;
            sum += gap;
            max_gap = std::max(max_gap, gap);
            ++count;
        }
    }
    double mean = sum / count;
    CHECK(mean > 7.8);
    CHECK(mean < 8.2);
    CHECK(max_gap < 16.0); // Uniform[0, 2 * avg_gap)
    CHECK(max_gap > 15.5); // ... and the right edge is actually approached
}

TEST_CASE("variable gap draws the run's average from [5, 24]") {
    WorldConfig cfg = quiet_config(5, 8.0);
    cfg.variable_gap = true;
    double lo = 1e9, hi = -1e9, sum = 0.0;
    int runs = 3000;
    for (int s = 0; s < runs; ++s) {
        WorldState w = spawn_world(cfg, static_cast<std::uint64_t>(s));
        lo = std::min(lo, w.drawn_avg_gap);
        hi = std::max(hi, w.drawn_avg_gap);
        sum += w.drawn_avg_gap;
    }
    CHECK(lo >= 5.0);
    CHECK(lo < 5.3);
    CHECK(hi < 24.0);
    CHECK(hi > 23.7);
    CHECK(sum / runs == doctest::Approx(14.5).epsilon(0.02));
}

TEST_CASE("spawn colours are uniform") {
    WorldConfig cfg = quiet_config(8, 8.0);
    int blues = 0, total = 0;
    for (std::uint64_t s = 0; s < 1500; ++s) {
        WorldState w = spawn_world(cfg, s);
        for (auto& ag : w.agents) {
            blues += ag.colour == Colour::blue ? 1 : 0;
            ++total;
        }
    }
    double frac = static_cast<double>(blues) / total;
    CHECK(frac > 0.47);
    CHECK(frac < 0.53);
}

TEST_CASE("one step integrates clamped speeds; dead robots hold") {
    WorldConfig cfg = quiet_config(3, 20.0);
    WorldState w = spawn_world(cfg, 5);
    // Re-park with generous slack so no step can reach a neighbour.
    w.agents[0].x = 0.0;
    w.agents[1].x = 60.0;
    w.agents[2].x = 120.0;
    std::vector<double> before;
    for (auto& ag : w.agents) before.push_back(ag.x);

    step_world(w, {3.0, 5.0, -2.0});
    CHECK(w.agents[0].x == before[0]); // dead entries are ignored
    CHECK(w.agents[2].x == before[2]);
    CHECK(w.agents[1].x == doctest::Approx(before[1] + 0.5));

    step_world(w, {0.0, 100.0, 0.0}); // clamp at max_speed
    CHECK(w.agents[1].x == doctest::Approx(before[1] + 0.5 + 1.66));
    step_world(w, {0.0, -100.0, 0.0});
    CHECK(w.agents[1].x == doctest::Approx(before[1] + 0.5));

    CHECK_THROWS_AS(step_world(w, {1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("motor noise is multiplicative with the configured spread") {
    WorldConfig cfg = quiet_config(3, 24.0);
    cfg.motor_noise_rel = 0.027;
    WorldState w = spawn_world(cfg, 11);
    // Park the mover far from both walls so contact never clips a draw.
    w.agents[0].x = 0.0;
    w.agents[1].x = 60.0;
    w.agents[2].x = 120.0;
    double v = 10.0;
    int steps = 20000;
    double sum = 0.0, sq = 0.0;
    double prev = w.agents[1].x;
    for (int t = 0; t < steps; ++t) {
        double sign = (t % 2 == 0) ? 1.0 : -1.0; // stay in place on average
        step_world(w, {0.0, sign * v, 0.0});
        double eps = (w.agents[1].x - prev) / (cfg.dt * sign * v) - 1.0;
        prev = w.agents[1].x;
        sum += eps;
        sq += eps * eps;
    }
    double mean = sum / steps;
    double stddev = std::sqrt(sq / steps - mean * mean);
    CHECK(std::fabs(mean) < 0.002);
    CHECK(stddev == doctest::Approx(0.027).epsilon(0.05));

    // Same seed, same noise stream.
    WorldState w2 = spawn_world(cfg, 11);
    step_world(w2, {0.0, v, 0.0});
    WorldState w3 = spawn_world(cfg, 11);
    step_world(w3, {0.0, v, 0.0});
    CHECK(w2.agents[1].x == w3.agents[1].x);
}

TEST_CASE("rigid bodies clamp at surface contact") {
    WorldConfig cfg = quiet_config(3, 5.0);
    WorldState w = spawn_world(cfg, 2);
    // Drive the mover into the right wall for many steps.
    for (int t = 0; t < 60; ++t) step_world(w, {0.0, 16.6, 0.0});
    CHECK(w.agents[1].x == doctest::Approx(w.agents[2].x - cfg.robot_length));
    CHECK(w.agents[1].x <= w.agents[2].x - cfg.robot_length + 1e-12);
    // And into the left wall.
    for (int t = 0; t < 60; ++t) step_world(w, {0.0, -16.6, 0.0});
    CHECK(w.agents[1].x == doctest::Approx(w.agents[0].x + cfg.robot_length));

    // Two movers pushed right pile up against the wall in order.
    WorldConfig cfg4 = quiet_config(4, 5.0);
    WorldState w4 = spawn_world(cfg4, 3);
    for (int t = 0; t < 80; ++t) step_world(w4, {0.0, 16.6, 16.6, 0.0});
    CHECK(w4.agents[2].x == doctest::Approx(w4.agents[3].x - cfg4.robot_length));
    CHECK(w4.agents[1].x == doctest::Approx(w4.agents[2].x - cfg4.robot_length));
    for (int i = 1; i < 4; ++i)
        CHECK(w4.agents[i].x - w4.agents[i - 1].x >= cfg4.robot_length - 1e-12);
}

TEST_CASE("convergence band is inclusive") {
    WorldConfig cfg = quiet_config(3, 10.0);
    WorldState w = spawn_world(cfg, 1);
    w.agents[1].x = w.goals[1] + cfg.goal_tolerance; // exactly on the edge
    CHECK(is_converged(w));
    w.agents[1].x = w.goals[1] + cfg.goal_tolerance + 1e-9;
    CHECK_FALSE(is_converged(w));
    w.agents[1].x = w.goals[1];
    CHECK(is_converged(w));
}
