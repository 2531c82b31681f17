#include "rowswarm/controllers.hpp"

#include <algorithm>
#include <stdexcept>

namespace rowswarm {

double expert_velocity(double pose_x, double goal_x, double max_speed, double gain) {
    return std::clamp(gain * (goal_x - pose_x), -max_speed, max_speed);
}

namespace {

double strongest(const ProxArray& a, const int* idx, int count) {
    double best = 0.0;
    for (int k = 0; k < count; ++k) best = std::max(best, a[idx[k]]);
    return best;
}

constexpr int front_idx[5] = {prox_front_left_outer, prox_front_left,
                              prox_front_center, prox_front_right,
                              prox_front_right_outer};
constexpr int rear_idx[2] = {prox_back_left, prox_back_right};

} // namespace

double manual_p_velocity(const SensorFrame& frame, InputKind kind,
                         double max_speed, double kp, double intensity_max) {
    double front = 0.0;
    double rear = 0.0;
    if (kind == InputKind::prox_values || kind == InputKind::all_sensors) {
        front = std::max(front, strongest(frame.prox_values, front_idx, 5));
        rear = std::max(rear, strongest(frame.prox_values, rear_idx, 2));
    }
    if (kind == InputKind::prox_comm || kind == InputKind::all_sensors) {
        front = std::max(front, strongest(frame.prox_comm, front_idx, 5));
        rear = std::max(rear, strongest(frame.prox_comm, rear_idx, 2));
    }
    double error = (rear - front) / intensity_max;
    return std::clamp(kp * error * max_speed, -max_speed, max_speed);
}

ColourDecision manual_colour_step(double c_left, double c_right, int n_agents) {
    if (n_agents < 3)
        throw std::invalid_argument("manual_colour_step: need at least 3 agents");
    if (c_left < 0.0 || c_right < 0.0)
        throw std::invalid_argument("manual_colour_step: counters must be >= 0");

    const double half = static_cast<double>(n_agents / 2);
    ColourDecision d;
    if (n_agents % 2 != 0) {
        if (c_left == 0.0) {
            // Hearing only the right-hand counter.
            if (c_right > half) {
                d.message = c_right - 1.0;
                d.colour = Colour::blue;
            } else if (c_right == half) {
                d.message = c_right + 1.0;
                d.colour = Colour::blue;
            } else {
                d.message = c_right + 1.0;
                d.colour = Colour::red;
            }
        } else if (c_right == 0.0) {
            // Hearing only the left-hand counter.
            if (c_left > half) {
                d.message = c_left - 1.0;
                d.colour = Colour::red;
            } else if (c_left == half) {
                d.message = c_left + 1.0;
                d.colour = Colour::blue;
            } else {
                d.message = c_left + 1.0;
                d.colour = Colour::blue;
            }
        } else {
            // Hearing both sides: the smaller counter wins.
            if (c_left > c_right) {
                d.message = c_right + 1.0;
                d.colour = Colour::red;
            } else {
                d.message = c_left + 1.0;
                d.colour = Colour::blue;
            }
        }
    } else {
        if (c_left == 0.0) {
            if (c_right > half) {
                // Ambiguous position: hold the counter rather than
                // decrement it.
                d.message = c_right;
                d.colour = Colour::blue;
            } else {
                d.message = c_right + 1.0;
                d.colour = Colour::red;
            }
        } else if (c_right == 0.0) {
            if (c_left < half) {
                d.message = c_left + 1.0;
                d.colour = Colour::blue;
            } else {
                // Ambiguous position: hold the counter.
                d.message = c_left;
                d.colour = Colour::red;
            }
        } else {
            if (c_left > c_right) {
                d.message = c_right + 1.0;
                d.colour = Colour::red;
            } else if (c_left < c_right) {
                d.message = c_left + 1.0;
                d.colour = Colour::blue;
            } else {
                d.message = c_left;
                d.colour = Colour::red;
            }
        }
    }
    return d;
}

} // namespace rowswarm
