#pragma once

#include "rowswarm/controllers.hpp"
#include "rowswarm/nn.hpp"
#include "rowswarm/sensing.hpp"
#include "rowswarm/world.hpp"

#include <array>
#include <string>
#include <vector>

namespace rowswarm {

// The controllers an episode can be driven by. `expert` and `manual`
// solve the spacing task; `manual_colour` and `net_colour` the
// membership task; `net_distributed` and `net_comm` are the learned
// spacing controllers without / with the learned message channel.
enum class ControllerType {
    expert,
    manual,
    manual_colour,
    net_distributed,
    net_comm,
    net_colour,
};

ControllerType controller_type_from_string(const std::string& name);
std::string controller_type_to_string(ControllerType type);

// 1 = equal spacing (robots move), 2 = colouring (robots hold position).
int task_of(ControllerType type);

struct ControllerSpec {
    ControllerType type = ControllerType::expert;
    InputKind kind = InputKind::prox_values; // sensing slice for manual/net_*
    const MlpParams* model = nullptr;        // required for net_* types
};

// Everything one agent saw and decided at one step.
struct StepRecord {
    double pose_x = 0.0;
    std::array<double, prox_sensor_count> prox_values{};
    std::array<double, prox_sensor_count> prox_comm{};
    double rx_left = 0.0;
    double rx_right = 0.0;
    double motor_target = 0.0; // commanded wheel speed (pre-noise)
    double tx_message = 0.0;   // message actually scheduled for next step
    int colour = 0;            // colour after this step's decision
    double colour_prob = 0.0;  // learned membership probability (nets only)
};

struct RunLog {
    int n_agents = 0;
    double avg_gap = 0.0; // the gap value the run was spawned with
    std::vector<double> goals;
    std::vector<int> initial_colours;               // colours at spawn, pre-decision
    std::vector<std::vector<StepRecord>> steps;     // [step][agent]
    std::vector<std::vector<double>> positions;     // [0..T][agent], incl. final
    bool converged = false;                         // spacing task only

    int n_steps() const { return static_cast<int>(steps.size()); }
};

// Simulate one episode. Each step: deliver the messages scheduled at
// the previous step, build sensor frames, let the controller decide
// (speed, message, colour), then advance the world. Spacing-task
// episodes stop early once every mover is inside the goal band;
// colouring-task episodes hold position and always run the full
// horizon. The two fixed end robots never move but otherwise behave
// like everyone else: the manual colouring protocol anchors on them
// (constant counter 1, end-of-row colours) and the learned
// controllers, message heads included, run on every robot.
RunLog run_episode(WorldState& world, const ControllerSpec& controller, int horizon);

} // namespace rowswarm
