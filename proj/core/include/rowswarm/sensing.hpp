#pragma once

#include "rowswarm/world.hpp"

#include <array>
#include <vector>

namespace rowswarm {

// Horizontal IR array of the simulated robot: five forward-facing
// sensors and two rear-facing ones, reported in this fixed order.
enum ProxIndex : int {
    prox_front_left_outer = 0,  // fll
    prox_front_left = 1,        // fl
    prox_front_center = 2,      // fc
    prox_front_right = 3,       // fr
    prox_front_right_outer = 4, // frr
    prox_back_left = 5,         // bl
    prox_back_right = 6,        // br
};
inline constexpr int prox_sensor_count = 7;

struct ProxArray {
    std::array<double, prox_sensor_count> values{};

    double& operator[](int i) { return values[static_cast<std::size_t>(i)]; }
    double operator[](int i) const { return values[static_cast<std::size_t>(i)]; }
};

struct SensorModel {
    double prox_range = 14.0;      // obstacle detection range, cm
    double comm_range = 48.0;      // IR message range, cm
    double intensity_max = 4505.0; // reading at distance 0
};

// Linear intensity ramp: intensity_max * (1 - d / range), clamped to
// [0, intensity_max]. Throws std::invalid_argument for negative d.
double intensity(double distance, double range, double intensity_max = 4505.0);

// One received IR message: the payload plus the per-sensor intensity
// pattern it produced on the receiving robot.
struct CommEvent {
    double payload = 0.0;
    ProxArray intensities;
};

// Sensor snapshot handed to controllers, all from one agent's viewpoint.
struct SensorFrame {
    ProxArray prox_values; // obstacle intensities
    ProxArray prox_comm;   // message-carrier intensities
    double rx_left = 0.0;  // payload heard from behind (lower index)
    double rx_right = 0.0; // payload heard from ahead (higher index)

    // prox_values followed by prox_comm, as one 14-wide vector.
    std::vector<double> all_sensors() const;
};

// Obstacle readings of agent i: in a 1-D row only the front-center
// sensor can see the next robot ahead and the two rear sensors the
// robot behind; oblique sensors read zero. Distances are surface gaps.
ProxArray read_prox_values(const WorldState& world, int agent,
                           const SensorModel& model = {});

// Deliver the messages scheduled in `tx` (one per agent): each agent
// hears its immediate neighbours when the surface gap is inside the
// communication range. A message from ahead lights the front-center
// sensor; one from behind lights both rear sensors.
std::vector<std::vector<CommEvent>> exchange_comm(const WorldState& world,
                                                  const std::vector<double>& tx,
                                                  const SensorModel& model = {});

// Collapse simultaneous events into one intensity pattern (elementwise
// max) and recover the two directional payloads.
struct FlattenedComm {
    ProxArray prox_comm;
    double rx_left = 0.0;
    double rx_right = 0.0;
};
FlattenedComm flatten_events(const std::vector<CommEvent>& events);

// Full sensor snapshot for one agent given its delivered events.
SensorFrame build_frame(const WorldState& world, int agent,
                        const std::vector<CommEvent>& events,
                        const SensorModel& model = {});

// Input slices a controller can be wired to.
enum class InputKind { prox_values, prox_comm, all_sensors };

InputKind input_kind_from_string(const std::string& name);
std::string input_kind_to_string(InputKind kind);
int input_width(InputKind kind);

// The selected slice of a frame, in controller input order.
std::vector<double> select_inputs(const SensorFrame& frame, InputKind kind);

} // namespace rowswarm
