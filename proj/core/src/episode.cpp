#include "rowswarm/episode.hpp"

#include <algorithm>
#include <stdexcept>

namespace rowswarm {

ControllerType controller_type_from_string(const std::string& name) {
    if (name == "expert") return ControllerType::expert;
    if (name == "manual") return ControllerType::manual;
    if (name == "manual-colour") return ControllerType::manual_colour;
    if (name == "net-distributed") return ControllerType::net_distributed;
    if (name == "net-comm") return ControllerType::net_comm;
    if (name == "net-colour") return ControllerType::net_colour;
    throw std::invalid_argument("unknown controller '" + name + "'");
}

std::string controller_type_to_string(ControllerType type) {
    switch (type) {
        case ControllerType::expert: return "expert";
        case ControllerType::manual: return "manual";
        case ControllerType::manual_colour: return "manual-colour";
        case ControllerType::net_distributed: return "net-distributed";
        case ControllerType::net_comm: return "net-comm";
        case ControllerType::net_colour: return "net-colour";
    }
    throw std::invalid_argument("unknown controller type");
}

int task_of(ControllerType type) {
    switch (type) {
        case ControllerType::expert:
        case ControllerType::manual:
        case ControllerType::net_distributed:
        case ControllerType::net_comm:
            return 1;
        case ControllerType::manual_colour:
        case ControllerType::net_colour:
            return 2;
    }
    throw std::invalid_argument("unknown controller type");
}

namespace {

void check_model(const ControllerSpec& spec) {
    switch (spec.type) {
        case ControllerType::net_distributed:
        case ControllerType::net_comm:
        case ControllerType::net_colour: {
            if (spec.model == nullptr)
                throw std::invalid_argument("run_episode: controller needs a model");
            const MlpParams& m = *spec.model;
            validate_params(m);
            if (spec.type == ControllerType::net_distributed) {
                if (m.arch != Arch::distributed)
                    throw std::invalid_argument("run_episode: model arch mismatch");
                if (m.input_width != input_width(spec.kind))
                    throw std::invalid_argument("run_episode: model width mismatch");
            } else if (spec.type == ControllerType::net_comm) {
                if (m.arch != Arch::single_comm)
                    throw std::invalid_argument("run_episode: model arch mismatch");
                if (m.input_width != input_width(spec.kind) + 2)
                    throw std::invalid_argument("run_episode: model width mismatch");
            } else {
                if (m.arch != Arch::colour)
                    throw std::invalid_argument("run_episode: model arch mismatch");
                if (m.input_width != 2)
                    throw std::invalid_argument("run_episode: model width mismatch");
            }
            break;
        }
        default:
            break;
    }
}

} // namespace

RunLog run_episode(WorldState& world, const ControllerSpec& spec, int horizon) {
    if (horizon < 1)
        throw std::invalid_argument("run_episode: horizon must be >= 1");
    check_model(spec);

    const int n = world.n();
    const auto& cfg = world.config;
    const int task = task_of(spec.type);

    RunLog log;
    log.n_agents = n;
    log.avg_gap = world.drawn_avg_gap;
    log.goals = world.goals;
    log.initial_colours.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        log.initial_colours[static_cast<std::size_t>(i)] = colour_to_int(world.agents[i].colour);

    auto snapshot = [&] {
        std::vector<double> xs(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) xs[static_cast<std::size_t>(i)] = world.agents[i].x;
        log.positions.push_back(std::move(xs));
    };

    if (task == 1 && is_converged(world)) {
        log.converged = true;
        snapshot();
        return log;
    }

    for (int t = 0; t < horizon; ++t) {
        snapshot();

        std::vector<double> tx(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) tx[static_cast<std::size_t>(i)] = world.agents[i].tx_message;
        auto events = exchange_comm(world, tx);

        std::vector<SensorFrame> frames(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
            frames[static_cast<std::size_t>(i)] = build_frame(world, i, events[static_cast<std::size_t>(i)]);

        std::vector<double> speeds(static_cast<std::size_t>(n), 0.0);
        std::vector<double> tx_next(static_cast<std::size_t>(n), 0.0);
        std::vector<Colour> colours(static_cast<std::size_t>(n));
        std::vector<double> probs(static_cast<std::size_t>(n), 0.0);
        for (int i = 0; i < n; ++i) colours[static_cast<std::size_t>(i)] = world.agents[i].colour;

        for (int i = 0; i < n; ++i) {
            const auto ui = static_cast<std::size_t>(i);
            const SensorFrame& frame = frames[ui];
            switch (spec.type) {
                case ControllerType::expert:
                    speeds[ui] = expert_velocity(world.agents[i].x, world.goals[ui],
                                                 cfg.max_speed);
                    colours[ui] = ground_truth_colour(i, n);
                    break;
                case ControllerType::manual:
                    speeds[ui] = manual_p_velocity(frame, spec.kind, cfg.max_speed);
                    break;
                case ControllerType::manual_colour:
                    if (i == 0) {
                        tx_next[ui] = 1.0;
                        colours[ui] = Colour::blue;
                    } else if (i == n - 1) {
                        tx_next[ui] = 1.0;
                        colours[ui] = Colour::red;
                    } else if (frame.rx_left != 0.0 || frame.rx_right != 0.0) {
                        ColourDecision d =
                            manual_colour_step(frame.rx_left, frame.rx_right, n);
                        tx_next[ui] = d.message;
                        colours[ui] = d.colour;
                    }
                    break;
                case ControllerType::net_distributed: {
                    auto out = forward(*spec.model, select_inputs(frame, spec.kind));
                    speeds[ui] = std::clamp(out.output[0], -cfg.max_speed, cfg.max_speed);
                    break;
                }
                case ControllerType::net_comm: {
                    auto input = select_inputs(frame, spec.kind);
                    input.push_back(frame.rx_left);
                    input.push_back(frame.rx_right);
                    auto out = forward(*spec.model, input);
                    speeds[ui] = std::clamp(out.output[0], -cfg.max_speed, cfg.max_speed);
                    // Ends transmit like everyone else (they only lack
                    // motion), matching the training-time message board.
                    tx_next[ui] = out.output[1];
                    break;
                }
                case ControllerType::net_colour: {
                    auto out = forward(*spec.model, {frame.rx_left, frame.rx_right});
                    probs[ui] = out.output[0];
                    colours[ui] = out.output[0] >= 0.5 ? Colour::blue : Colour::red;
                    tx_next[ui] = out.output[1];
                    break;
                }
            }
            if (spec.type != ControllerType::net_colour)
                probs[ui] = colours[ui] == Colour::blue ? 1.0 : 0.0;
        }

        std::vector<StepRecord> row(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            const auto ui = static_cast<std::size_t>(i);
            StepRecord& r = row[ui];
            r.pose_x = world.agents[i].x;
            for (int s = 0; s < prox_sensor_count; ++s) {
                r.prox_values[static_cast<std::size_t>(s)] = frames[ui].prox_values[s];
                r.prox_comm[static_cast<std::size_t>(s)] = frames[ui].prox_comm[s];
            }
            r.rx_left = frames[ui].rx_left;
            r.rx_right = frames[ui].rx_right;
            r.motor_target = speeds[ui];
            r.tx_message = tx_next[ui];
            r.colour = colour_to_int(colours[ui]);
            r.colour_prob = probs[ui];
        }
        log.steps.push_back(std::move(row));

        for (int i = 0; i < n; ++i) {
            world.agents[i].colour = colours[static_cast<std::size_t>(i)];
            world.agents[i].tx_message = tx_next[static_cast<std::size_t>(i)];
        }
        step_world(world, speeds);

        if (task == 1 && is_converged(world)) {
            log.converged = true;
            break;
        }
    }
    snapshot();
    return log;
}

} // namespace rowswarm
