#include "rowswarm/sensing.hpp"

#include <algorithm>
#include <stdexcept>

namespace rowswarm {

double intensity(double distance, double range, double intensity_max) {
    if (distance < 0.0)
        throw std::invalid_argument("intensity: negative distance");
    if (range <= 0.0)
        throw std::invalid_argument("intensity: range must be positive");
    double v = intensity_max * (1.0 - distance / range);
    return std::clamp(v, 0.0, intensity_max);
}

std::vector<double> SensorFrame::all_sensors() const {
    std::vector<double> out;
    out.reserve(2 * prox_sensor_count);
    for (int i = 0; i < prox_sensor_count; ++i) out.push_back(prox_values[i]);
    for (int i = 0; i < prox_sensor_count; ++i) out.push_back(prox_comm[i]);
    return out;
}

namespace {

double surface_gap(const WorldState& world, int a, int b) {
    double d = std::abs(world.agents[b].x - world.agents[a].x) -
               world.config.robot_length;
    return std::max(d, 0.0);
}

} // namespace

ProxArray read_prox_values(const WorldState& world, int agent,
                           const SensorModel& model) {
    const int n = world.n();
    if (agent < 0 || agent >= n)
        throw std::invalid_argument("read_prox_values: agent out of range");
    ProxArray prox;
    if (agent + 1 < n) {
        double gap = surface_gap(world, agent, agent + 1);
        prox[prox_front_center] = intensity(gap, model.prox_range, model.intensity_max);
    }
    if (agent - 1 >= 0) {
        double gap = surface_gap(world, agent, agent - 1);
        double v = intensity(gap, model.prox_range, model.intensity_max);
        prox[prox_back_left] = v;
        prox[prox_back_right] = v;
    }
    return prox;
}

std::vector<std::vector<CommEvent>> exchange_comm(const WorldState& world,
                                                  const std::vector<double>& tx,
                                                  const SensorModel& model) {
    const int n = world.n();
    if (static_cast<int>(tx.size()) != n)
        throw std::invalid_argument("exchange_comm: tx length != n_agents");
    std::vector<std::vector<CommEvent>> events(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        if (i - 1 >= 0) {
            double gap = surface_gap(world, i, i - 1);
            if (gap < model.comm_range) {
                CommEvent ev;
                ev.payload = tx[static_cast<std::size_t>(i - 1)];
                double v = intensity(gap, model.comm_range, model.intensity_max);
                ev.intensities[prox_back_left] = v;
                ev.intensities[prox_back_right] = v;
                events[static_cast<std::size_t>(i)].push_back(ev);
            }
        }
        if (i + 1 < n) {
            double gap = surface_gap(world, i, i + 1);
            if (gap < model.comm_range) {
                CommEvent ev;
                ev.payload = tx[static_cast<std::size_t>(i + 1)];
                double v = intensity(gap, model.comm_range, model.intensity_max);
                ev.intensities[prox_front_center] = v;
                events[static_cast<std::size_t>(i)].push_back(ev);
            }
        }
    }
    return events;
}

FlattenedComm flatten_events(const std::vector<CommEvent>& events) {
    FlattenedComm out;
    for (const auto& ev : events) {
        for (int s = 0; s < prox_sensor_count; ++s)
            out.prox_comm[s] = std::max(out.prox_comm[s], ev.intensities[s]);
        bool rear = ev.intensities[prox_back_left] > 0.0 ||
                    ev.intensities[prox_back_right] > 0.0;
        bool front = ev.intensities[prox_front_center] > 0.0;
        if (rear) out.rx_left = ev.payload;
        if (front) out.rx_right = ev.payload;
    }
    return out;
}

SensorFrame build_frame(const WorldState& world, int agent,
                        const std::vector<CommEvent>& events,
                        const SensorModel& model) {
    SensorFrame frame;
    frame.prox_values = read_prox_values(world, agent, model);
    FlattenedComm fc = flatten_events(events);
    frame.prox_comm = fc.prox_comm;
    frame.rx_left = fc.rx_left;
    frame.rx_right = fc.rx_right;
    return frame;
}

InputKind input_kind_from_string(const std::string& name) {
    if (name == "prox_values") return InputKind::prox_values;
    if (name == "prox_comm") return InputKind::prox_comm;
    if (name == "all_sensors") return InputKind::all_sensors;
    throw std::invalid_argument("unknown input kind '" + name + "'");
}

std::string input_kind_to_string(InputKind kind) {
    switch (kind) {
        case InputKind::prox_values: return "prox_values";
        case InputKind::prox_comm: return "prox_comm";
        case InputKind::all_sensors: return "all_sensors";
    }
    throw std::invalid_argument("unknown input kind");
}

int input_width(InputKind kind) {
    return kind == InputKind::all_sensors ? 2 * prox_sensor_count
                                          : prox_sensor_count;
}

std::vector<double> select_inputs(const SensorFrame& frame, InputKind kind) {
    switch (kind) {
        case InputKind::prox_values: {
            std::vector<double> out(prox_sensor_count);
            for (int i = 0; i < prox_sensor_count; ++i) out[static_cast<std::size_t>(i)] = frame.prox_values[i];
            return out;
        }
        case InputKind::prox_comm: {
            std::vector<double> out(prox_sensor_count);
            for (int i = 0; i < prox_sensor_count; ++i) out[static_cast<std::size_t>(i)] = frame.prox_comm[i];
            return out;
        }
        case InputKind::all_sensors: return frame.all_sensors();
    }
    throw std::invalid_argument("unknown input kind");
}

} // namespace rowswarm
