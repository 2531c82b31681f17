#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace rowswarm {

// Agent colour used by the group-membership task. Stored as 0 = red,
// 1 = blue when serialized.
enum class Colour : int { red = 0, blue = 1 };

inline int colour_to_int(Colour c) { return static_cast<int>(c); }
inline Colour colour_from_int(int v) {
    return v == 0 ? Colour::red : Colour::blue;
}

// Ground-truth membership for agent `index` in a row of `n` agents:
// the first ceil(n/2) agents are blue, the rest red.
Colour ground_truth_colour(int index, int n_agents);

// Static parameters of the simulated row of differential-drive robots.
// Distances are centimetres, times seconds, speeds cm/s.
struct WorldConfig {
    int n_agents = 8;            // total robots, including the two fixed ends
    double avg_gap = 8.0;        // mean spawn gap between robot surfaces
    bool variable_gap = false;   // true: draw avg_gap per run from [5, 24]
    double dt = 0.1;             // control period
    double max_speed = 16.6;     // wheel speed clamp
    double robot_length = 10.9;  // body length along the row
    double wheel_base = 9.4;     // informational; motion is 1-D
    double motor_noise_rel = 0.027; // stddev of multiplicative speed noise;
                                    // 0 disables motor noise entirely
    int max_steps = 40;          // episode horizon for data collection
    double goal_tolerance = 0.5; // convergence band around each goal (inclusive)
    std::uint64_t rng_seed = 0;  // base seed for spawning / noise

    // Throws std::invalid_argument when any field is out of range.
    void validate() const;
};

// Parse a WorldConfig from a JSON document. Field names must match the
// struct members exactly ("avg_gap" accepts a number or the string
// "variable"); unknown keys are rejected. Missing keys keep defaults.
WorldConfig world_config_from_json(const std::string& json_text);
std::string world_config_to_json(const WorldConfig& cfg);

struct AgentState {
    double x = 0.0;           // centre position on the row axis
    Colour colour = Colour::red;
    double tx_message = 0.0;  // message scheduled for the next exchange
    bool dead = false;        // fixed end robot: never moves
};

struct WorldState {
    WorldConfig config;
    std::vector<AgentState> agents;
    std::vector<double> goals;   // equal-spacing target per agent
    double drawn_avg_gap = 0.0;  // the gap value actually used this run
    std::uint64_t noise_seed = 0;
    std::mt19937_64 noise_rng;   // motor-noise stream, seeded at spawn

    int n() const { return static_cast<int>(agents.size()); }
};

// Accumulate centre positions from surface gaps: agent 0 at x=0, then
// x_i = x_{i-1} + gap_i + robot_length.
std::vector<double> positions_from_gaps(const std::vector<double>& gaps,
                                        double robot_length);

// Spawn a row of robots. Gaps are i.i.d. Uniform[0, 2*avg_gap); when
// `variable_gap` is set, avg_gap is first drawn Uniform[5, 24] for the
// run. Colours are initialized uniformly at random, messages to zero;
// the two extreme robots are marked dead. Goals are the equal-spacing
// targets between the fixed ends.
WorldState spawn_world(const WorldConfig& cfg, std::uint64_t seed);

// Equal spacing between the fixed extremes:
// goal_i = x_0 + i * (x_{n-1} - x_0) / (n - 1).
std::vector<double> compute_goals(const std::vector<double>& positions);

// Advance one control period. `speeds[i]` is the commanded wheel speed
// of agent i; dead agents ignore their entry. Speeds are clamped to
// ±max_speed, then (unless motor_noise_rel == 0) perturbed by
// multiplicative Gaussian noise. Robots are rigid: overlaps are
// resolved by clamping the mover at surface contact, discarding the
// residual motion for the step. Throws std::invalid_argument when
// `speeds` has the wrong length.
void step_world(WorldState& world, const std::vector<double>& speeds);

// True when every mover sits within goal_tolerance (inclusive) of its goal.
bool is_converged(const WorldState& world);

} // namespace rowswarm
