#pragma once

#include "rowswarm/nn.hpp"
#include "rowswarm/sensing.hpp"
#include "rowswarm/world.hpp"

namespace rowswarm {

// Omniscient spacing controller: drive straight at the goal with gain
// 1/dt so one step lands exactly when the clamp allows, saturating at
// max_speed otherwise.
double expert_velocity(double pose_x, double goal_x, double max_speed = 16.6,
                       double gain = 10.0);

// Hand-written spacing controller using only the IR snapshot: compare
// the strongest front reading against the strongest rear reading and
// steer away from the closer side with a proportional gain.
double manual_p_velocity(const SensorFrame& frame, InputKind kind,
                         double max_speed = 16.6, double kp = 5.0,
                         double intensity_max = 4505.0);

// One decision of the hand-written colouring protocol: from the two
// received counters (0 = silence) and the row size, choose the counter
// to rebroadcast and the agent's colour. Counters count robots from the
// nearer end of the row; an agent compares them against n/2 to tell
// which half it sits in.
struct ColourDecision {
    double message = 0.0;
    Colour colour = Colour::red;
};
ColourDecision manual_colour_step(double c_left, double c_right, int n_agents);

} // namespace rowswarm
