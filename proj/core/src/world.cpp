#include "rowswarm/world.hpp"

#include "rowswarm/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rowswarm {

Colour ground_truth_colour(int index, int n_agents) {
    if (n_agents < 1 || index < 0 || index >= n_agents)
        throw std::invalid_argument("ground_truth_colour: index out of range");
    return index < (n_agents + 1) / 2 ? Colour::blue : Colour::red;
}

void WorldConfig::validate() const {
    if (n_agents < 3 || n_agents > 50)
        throw std::invalid_argument("WorldConfig: n_agents must be in [3, 50]");
    if (!variable_gap && (avg_gap < 5.0 || avg_gap > 24.0))
        throw std::invalid_argument("WorldConfig: avg_gap must be in [5, 24] cm");
    if (dt <= 0.0)
        throw std::invalid_argument("WorldConfig: dt must be positive");
    if (max_speed <= 0.0)
        throw std::invalid_argument("WorldConfig: max_speed must be positive");
    if (robot_length <= 0.0)
        throw std::invalid_argument("WorldConfig: robot_length must be positive");
    if (wheel_base <= 0.0)
        throw std::invalid_argument("WorldConfig: wheel_base must be positive");
    if (motor_noise_rel < 0.0)
        throw std::invalid_argument("WorldConfig: motor_noise_rel must be >= 0");
    if (max_steps < 1)
        throw std::invalid_argument("WorldConfig: max_steps must be >= 1");
    if (goal_tolerance < 0.0)
        throw std::invalid_argument("WorldConfig: goal_tolerance must be >= 0");
}

WorldConfig world_config_from_json(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("WorldConfig: bad JSON: ") + e.what());
    }
    if (!j.is_object())
        throw std::invalid_argument("WorldConfig: document must be a JSON object");

    static const char* known[] = {
        "n_agents", "avg_gap", "dt", "max_speed", "robot_length", "wheel_base",
        "motor_noise_rel", "max_steps", "goal_tolerance", "rng_seed"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = std::any_of(std::begin(known), std::end(known),
                              [&](const char* k) { return it.key() == k; });
        if (!ok)
            throw std::invalid_argument("WorldConfig: unknown key '" + it.key() + "'");
    }

    try {
        WorldConfig cfg;
        if (j.contains("n_agents")) cfg.n_agents = j.at("n_agents").get<int>();
        if (j.contains("avg_gap")) {
            const auto& g = j.at("avg_gap");
            if (g.is_string()) {
                if (g.get<std::string>() != "variable")
                    throw std::invalid_argument(
                        "WorldConfig: avg_gap must be a number or \"variable\"");
                cfg.variable_gap = true;
            } else {
                cfg.avg_gap = g.get<double>();
                cfg.variable_gap = false;
            }
        }
        if (j.contains("dt")) cfg.dt = j.at("dt").get<double>();
        if (j.contains("max_speed")) cfg.max_speed = j.at("max_speed").get<double>();
        if (j.contains("robot_length")) cfg.robot_length = j.at("robot_length").get<double>();
        if (j.contains("wheel_base")) cfg.wheel_base = j.at("wheel_base").get<double>();
        if (j.contains("motor_noise_rel"))
            cfg.motor_noise_rel = j.at("motor_noise_rel").get<double>();
        if (j.contains("max_steps")) cfg.max_steps = j.at("max_steps").get<int>();
        if (j.contains("goal_tolerance"))
            cfg.goal_tolerance = j.at("goal_tolerance").get<double>();
        if (j.contains("rng_seed")) cfg.rng_seed = j.at("rng_seed").get<std::uint64_t>();
        cfg.validate();
        return cfg;
    } catch (const nlohmann::json::exception& e) {
        // Wrong-typed values are caller errors, like bad JSON.
        throw std::invalid_argument(std::string("WorldConfig: ") + e.what());
    }
}

std::string world_config_to_json(const WorldConfig& cfg) {
    nlohmann::json j;
    j["n_agents"] = cfg.n_agents;
    if (cfg.variable_gap)
        j["avg_gap"] = "variable";
    else
        j["avg_gap"] = cfg.avg_gap;
    j["dt"] = cfg.dt;
    j["max_speed"] = cfg.max_speed;
    j["robot_length"] = cfg.robot_length;
    j["wheel_base"] = cfg.wheel_base;
    j["motor_noise_rel"] = cfg.motor_noise_rel;
    j["max_steps"] = cfg.max_steps;
    j["goal_tolerance"] = cfg.goal_tolerance;
    j["rng_seed"] = cfg.rng_seed;
    return j.dump(2);
}

std::vector<double> positions_from_gaps(const std::vector<double>& gaps,
                                        double robot_length) {
    std::vector<double> xs;
    xs.reserve(gaps.size() + 1);
    xs.push_back(0.0);
    for (double g : gaps) {
        if (g < 0.0)
            throw std::invalid_argument("positions_from_gaps: negative gap");
        xs.push_back(xs.back() + g + robot_length);
    }
    return xs;
}

WorldState spawn_world(const WorldConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    auto rng = make_rng(seed);

    double avg_gap = cfg.avg_gap;
    if (cfg.variable_gap) {
        std::uniform_real_distribution<double> gap_dist(5.0, 24.0);
        avg_gap = gap_dist(rng);
    }

    const int n = cfg.n_agents;
    std::vector<double> gaps(n - 1);
    std::uniform_real_distribution<double> spawn_dist(0.0, 2.0 * avg_gap);
    for (double& g : gaps) g = spawn_dist(rng);

    WorldState world;
    world.config = cfg;
    world.drawn_avg_gap = avg_gap;
    world.noise_seed = sub_seed(seed, "motor-noise");
    world.noise_rng = make_rng(world.noise_seed);

    auto xs = positions_from_gaps(gaps, cfg.robot_length);
    std::uniform_int_distribution<int> colour_dist(0, 1);
    world.agents.resize(n);
    for (int i = 0; i < n; ++i) {
        world.agents[i].x = xs[i];
        world.agents[i].colour = colour_from_int(colour_dist(rng));
        world.agents[i].tx_message = 0.0;
        world.agents[i].dead = (i == 0 || i == n - 1);
    }
    world.goals = compute_goals(xs);
    return world;
}

std::vector<double> compute_goals(const std::vector<double>& positions) {
    const int n = static_cast<int>(positions.size());
    if (n < 2)
        throw std::invalid_argument("compute_goals: need at least two positions");
    std::vector<double> goals(n);
    const double x0 = positions.front();
    const double span = positions.back() - x0;
    goals.front() = positions.front();
    goals.back() = positions.back();
    for (int i = 1; i + 1 < n; ++i)
        goals[i] = x0 + static_cast<double>(i) * span / static_cast<double>(n - 1);
    return goals;
}

void step_world(WorldState& world, const std::vector<double>& speeds) {
    const int n = world.n();
    if (static_cast<int>(speeds.size()) != n)
        throw std::invalid_argument("step_world: speeds length != n_agents");

    const auto& cfg = world.config;
    std::normal_distribution<double> noise(0.0, cfg.motor_noise_rel);
    for (int i = 0; i < n; ++i) {
        auto& a = world.agents[i];
        if (a.dead) continue;
        double v = std::clamp(speeds[i], -cfg.max_speed, cfg.max_speed);
        if (cfg.motor_noise_rel != 0.0) v *= 1.0 + noise(world.noise_rng);
        a.x += v * cfg.dt;
    }

    // Rigid bodies: restore minimum centre distance (one body length)
    // with a left-to-right then right-to-left clamp sweep. The fixed
    // ends never move, and the row always fits between them, so the
    // sweep leaves every gap non-negative.
    const double min_dist = cfg.robot_length;
    for (int i = 1; i < n - 1; ++i)
        world.agents[i].x = std::max(world.agents[i].x, world.agents[i - 1].x + min_dist);
    for (int i = n - 2; i >= 1; --i)
        world.agents[i].x = std::min(world.agents[i].x, world.agents[i + 1].x - min_dist);
}

bool is_converged(const WorldState& world) {
    for (int i = 0; i < world.n(); ++i) {
        if (world.agents[i].dead) continue;
        if (std::abs(world.agents[i].x - world.goals[i]) > world.config.goal_tolerance)
            return false;
    }
    return true;
}

} // namespace rowswarm
