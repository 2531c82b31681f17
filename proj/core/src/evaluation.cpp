#include "rowswarm/evaluation.hpp"

#include "rowswarm/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace rowswarm {

double r2_score(const std::vector<double>& y_true, const std::vector<double>& y_pred) {
    if (y_true.size() != y_pred.size() || y_true.empty())
        throw std::invalid_argument("r2_score: size mismatch or empty");
    double mean = std::accumulate(y_true.begin(), y_true.end(), 0.0) /
                  static_cast<double>(y_true.size());
    double ss_res = 0.0;
    double ss_tot = 0.0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        double r = y_true[i] - y_pred[i];
        double t = y_true[i] - mean;
        ss_res += r * r;
        ss_tot += t * t;
    }
    if (ss_tot <= 0.0)
        throw std::invalid_argument("r2_score: target variance is zero");
    return 1.0 - ss_res / ss_tot;
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw std::invalid_argument("quantile: empty input");
    if (q < 0.0 || q > 1.0) throw std::invalid_argument("quantile: q outside [0, 1]");
    std::sort(values.begin(), values.end());
    const double h = q * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= values.size()) return values.back();
    const double frac = h - static_cast<double>(lo);
    return values[lo] + frac * (values[lo + 1] - values[lo]);
}

namespace {

std::vector<double> mover_distances(const RunLog& log, std::size_t row) {
    const auto& xs = log.positions[std::min(row, log.positions.size() - 1)];
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(log.n_agents));
    for (int i = 1; i + 1 < log.n_agents; ++i)
        out.push_back(std::abs(xs[static_cast<std::size_t>(i)] - log.goals[static_cast<std::size_t>(i)]));
    return out;
}

} // namespace

DistanceStats distance_stats(const std::vector<RunLog>& logs) {
    if (logs.empty()) throw std::invalid_argument("distance_stats: no runs");
    std::size_t len = 0;
    for (const auto& log : logs) {
        if (log.positions.empty())
            throw std::invalid_argument("distance_stats: run without positions");
        len = std::max(len, log.positions.size());
    }
    DistanceStats stats;
    for (std::size_t t = 0; t < len; ++t) {
        std::vector<double> pool;
        for (const auto& log : logs) {
            auto d = mover_distances(log, t);
            pool.insert(pool.end(), d.begin(), d.end());
        }
        stats.median.push_back(quantile(pool, 0.5));
        stats.q25.push_back(quantile(pool, 0.25));
        stats.q75.push_back(quantile(pool, 0.75));
        stats.d10.push_back(quantile(pool, 0.10));
        stats.d90.push_back(quantile(pool, 0.90));
    }
    return stats;
}

double final_median_distance(const std::vector<RunLog>& logs) {
    std::vector<double> pool;
    for (const auto& log : logs) {
        auto d = mover_distances(log, log.positions.size() - 1);
        pool.insert(pool.end(), d.begin(), d.end());
    }
    return quantile(pool, 0.5);
}

RocCurve roc_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size() || scores.empty())
        throw std::invalid_argument("roc_auc: size mismatch or empty");
    long pos = 0;
    long neg = 0;
    for (int l : labels) {
        if (l == 1)
            ++pos;
        else if (l == 0)
            ++neg;
        else
            throw std::invalid_argument("roc_auc: labels must be 0 or 1");
    }
    if (pos == 0 || neg == 0)
        throw std::invalid_argument("roc_auc: need both classes");

    std::vector<std::size_t> idx(scores.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return scores[a] > scores[b];
    });

    RocCurve curve;
    curve.points.push_back({0.0, 0.0});
    long tp = 0;
    long fp = 0;
    long area2 = 0; // trapezoid area in units of 1 / (2 pos neg)
    std::size_t i = 0;
    while (i < idx.size()) {
        // Equal scores cross the threshold together.
        double s = scores[idx[i]];
        long tp_prev = tp;
        long fp_prev = fp;
        while (i < idx.size() && scores[idx[i]] == s) {
            if (labels[idx[i]] == 1)
                ++tp;
            else
                ++fp;
            ++i;
        }
        area2 += (fp - fp_prev) * (tp + tp_prev);
        curve.points.push_back({static_cast<double>(fp) / static_cast<double>(neg),
                                static_cast<double>(tp) / static_cast<double>(pos)});
    }

    // Integer accumulation keeps the area identical to the
    // tie-credited pair count, down to the final division.
    curve.auc = static_cast<double>(area2) /
                (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
    return curve;
}

WrongColourSeries wrong_colour_rate(const std::vector<RunLog>& logs, int series_len) {
    if (logs.empty()) throw std::invalid_argument("wrong_colour_rate: no runs");
    int len = series_len;
    if (len <= 0) {
        for (const auto& log : logs)
            len = std::max(len, log.n_steps() + 1);
    }
    long total_agents = 0;
    for (const auto& log : logs) total_agents += log.n_agents;

    WrongColourSeries series;
    for (int t = 0; t < len; ++t) {
        long wrong = 0;
        for (const auto& log : logs) {
            for (int i = 0; i < log.n_agents; ++i) {
                int colour;
                if (t == 0) {
                    colour = log.initial_colours[static_cast<std::size_t>(i)];
                } else {
                    int row = std::min(t, log.n_steps()) - 1;
                    colour = log.steps[static_cast<std::size_t>(row)][static_cast<std::size_t>(i)].colour;
                }
                if (colour != colour_to_int(ground_truth_colour(i, log.n_agents)))
                    ++wrong;
            }
        }
        series.per_run.push_back(static_cast<double>(wrong) /
                                 static_cast<double>(logs.size()));
        series.per_agent.push_back(static_cast<double>(wrong) /
                                   static_cast<double>(total_agents));
    }
    return series;
}

namespace {

SensorFrame frame_from_pattern(InputKind kind, ProbeAxis axis, double reading) {
    if (reading < 0.0)
        throw std::invalid_argument("probe_sensing: negative reading");
    SensorFrame frame;
    auto apply = [&](ProxArray& a) {
        if (axis == ProbeAxis::front) {
            a[prox_front_center] = reading;
        } else {
            a[prox_back_left] = reading;
            a[prox_back_right] = reading;
        }
    };
    if (kind == InputKind::prox_values || kind == InputKind::all_sensors)
        apply(frame.prox_values);
    if (kind == InputKind::prox_comm || kind == InputKind::all_sensors)
        apply(frame.prox_comm);
    return frame;
}

double commanded_speed(const ControllerSpec& spec, const SensorFrame& frame,
                       double max_speed) {
    switch (spec.type) {
        case ControllerType::manual:
            return manual_p_velocity(frame, spec.kind, max_speed);
        case ControllerType::net_distributed: {
            auto out = forward(*spec.model, select_inputs(frame, spec.kind));
            return std::clamp(out.output[0], -max_speed, max_speed);
        }
        case ControllerType::net_comm: {
            auto input = select_inputs(frame, spec.kind);
            input.push_back(frame.rx_left);
            input.push_back(frame.rx_right);
            auto out = forward(*spec.model, input);
            return std::clamp(out.output[0], -max_speed, max_speed);
        }
        default:
            throw std::invalid_argument(
                "probe: controller does not map sensing to speed");
    }
}

} // namespace

ProbeCurve probe_sensing(const ControllerSpec& controller, ProbeAxis axis,
                         const std::vector<double>& grid) {
    if (grid.empty()) throw std::invalid_argument("probe_sensing: empty grid");
    if (controller.type == ControllerType::net_distributed ||
        controller.type == ControllerType::net_comm) {
        if (controller.model == nullptr)
            throw std::invalid_argument("probe_sensing: controller needs a model");
    }
    const double max_speed = WorldConfig{}.max_speed;
    ProbeCurve curve;
    curve.x = grid;
    curve.value.reserve(grid.size());
    for (double reading : grid) {
        SensorFrame frame = frame_from_pattern(controller.kind, axis, reading);
        curve.value.push_back(commanded_speed(controller, frame, max_speed));
    }
    return curve;
}

PositionProbe probe_position(const ControllerSpec& controller, double left_x,
                             double right_x, const std::vector<double>& grid,
                             int jitters, std::uint64_t seed,
                             const WorldConfig& base) {
    if (grid.empty()) throw std::invalid_argument("probe_position: empty grid");
    if (jitters < 1) throw std::invalid_argument("probe_position: jitters must be >= 1");
    if (!(left_x < right_x - 2.0 * base.robot_length))
        throw std::invalid_argument(
            "probe_position: neighbours too close to fit a mover");

    WorldConfig cfg = base;
    cfg.n_agents = 3;
    cfg.motor_noise_rel = 0.0;
    cfg.validate();

    auto rng = make_rng(sub_seed(seed, "probe-jitter"));
    std::uniform_real_distribution<double> jitter(-0.5, 0.5);

    PositionProbe probe;
    probe.position = grid;
    for (double p : grid) {
        std::vector<double> speeds;
        speeds.reserve(static_cast<std::size_t>(jitters));
        for (int j = 0; j < jitters; ++j) {
            // A single jitter means "probe the exact position".
            double pos = jitters == 1 ? p : p + jitter(rng);

            WorldState world;
            world.config = cfg;
            world.drawn_avg_gap = cfg.avg_gap;
            world.agents.resize(3);
            world.agents[0].x = left_x;
            world.agents[1].x = pos;
            world.agents[2].x = right_x;
            world.agents[0].dead = true;
            world.agents[2].dead = true;
            world.goals = compute_goals({left_x, pos, right_x});

            std::vector<double> tx(3, 0.0);
            auto events = exchange_comm(world, tx);
            SensorFrame frame = build_frame(world, 1, events[1]);

            double v;
            if (controller.type == ControllerType::expert)
                v = expert_velocity(pos, world.goals[1], cfg.max_speed);
            else
                v = commanded_speed(controller, frame, cfg.max_speed);
            speeds.push_back(v);
        }
        double mean = std::accumulate(speeds.begin(), speeds.end(), 0.0) /
                      static_cast<double>(speeds.size());
        double var = 0.0;
        for (double v : speeds) var += (v - mean) * (v - mean);
        var /= static_cast<double>(speeds.size());
        probe.mean.push_back(mean);
        probe.stddev.push_back(std::sqrt(var));
    }
    return probe;
}

std::vector<RunLog> run_eval_episodes(const ControllerSpec& controller,
                                      const WorldConfig& cfg, int runs,
                                      std::uint64_t seed, int horizon, int jobs) {
    if (runs < 1) throw std::invalid_argument("run_eval_episodes: runs must be >= 1");
    cfg.validate();
    int h = horizon;
    if (h <= 0) {
        h = cfg.max_steps;
        if (task_of(controller.type) == 2) h = std::max(h, cfg.n_agents);
    }

    std::vector<RunLog> logs(static_cast<std::size_t>(runs));
    auto simulate = [&](int i) {
        WorldState world = spawn_world(cfg, run_seed(seed, static_cast<std::uint64_t>(i)));
        logs[static_cast<std::size_t>(i)] = run_episode(world, controller, h);
    };
    if (jobs <= 1) {
        for (int i = 0; i < runs; ++i) simulate(i);
    } else {
        std::atomic<int> next{0};
        std::vector<std::exception_ptr> errors(static_cast<std::size_t>(jobs));
        std::vector<std::thread> workers;
        for (int w = 0; w < jobs; ++w) {
            workers.emplace_back([&, w] {
                try {
                    for (int i = next.fetch_add(1); i < runs; i = next.fetch_add(1))
                        simulate(i);
                } catch (...) {
                    errors[static_cast<std::size_t>(w)] = std::current_exception();
                }
            });
        }
        for (auto& t : workers) t.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }
    return logs;
}

namespace {

SensorFrame frame_from_step(const StepRecord& s) {
    SensorFrame frame;
    for (int k = 0; k < prox_sensor_count; ++k) {
        frame.prox_values[k] = s.prox_values[static_cast<std::size_t>(k)];
        frame.prox_comm[k] = s.prox_comm[static_cast<std::size_t>(k)];
    }
    frame.rx_left = s.rx_left;
    frame.rx_right = s.rx_right;
    return frame;
}

} // namespace

double r2_vs_expert(const std::vector<RunLog>& expert_logs,
                    const ControllerSpec& controller) {
    std::vector<double> y_true;
    std::vector<double> y_pred;
    const double max_speed = WorldConfig{}.max_speed;
    for (const auto& log : expert_logs) {
        for (int t = 0; t < log.n_steps(); ++t) {
            for (int i = 1; i + 1 < log.n_agents; ++i) {
                const StepRecord& s = log.steps[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)];
                y_true.push_back(s.motor_target);
                if (controller.type == ControllerType::expert) {
                    y_pred.push_back(expert_velocity(s.pose_x,
                                                     log.goals[static_cast<std::size_t>(i)],
                                                     max_speed));
                } else {
                    y_pred.push_back(
                        commanded_speed(controller, frame_from_step(s), max_speed));
                }
            }
        }
    }
    return r2_score(y_true, y_pred);
}

RocCurve colour_windows_auc(const MlpParams& model,
                            const std::vector<RunRecord>& records,
                            std::uint64_t seed) {
    if (model.arch != Arch::colour)
        throw std::invalid_argument("colour_windows_auc: model arch mismatch");
    auto windows =
        build_sequences(records, InputKind::prox_values, TargetKind::colour);
    if (windows.empty())
        throw std::invalid_argument("colour_windows_auc: no windows");
    auto rng = make_rng(sub_seed(seed, "auc-init"));
    std::vector<double> scores;
    std::vector<int> labels;
    for (const auto& w : windows) {
        auto board = make_init_comm(w.n_slots, rng);
        auto rolled = commnet_unroll(model, w, board);
        for (int i = 0; i < w.n_slots; ++i) {
            if (!w.mask[static_cast<std::size_t>(i)]) continue;
            scores.push_back(rolled.primary[1][static_cast<std::size_t>(i)]);
            labels.push_back(w.targets[1][static_cast<std::size_t>(i)] > 0.5 ? 1 : 0);
        }
    }
    return roc_auc(scores, labels);
}

std::vector<ScalabilityRow> scalability_spacing(const ControllerSpec& controller,
                                                const std::vector<int>& n_list,
                                                int runs, std::uint64_t seed,
                                                const WorldConfig& base, int jobs) {
    std::vector<ScalabilityRow> rows;
    for (int n : n_list) {
        WorldConfig cfg = base;
        cfg.n_agents = n;
        auto logs = run_eval_episodes(controller, cfg, runs,
                                      sub_seed(seed, "scal", static_cast<std::uint64_t>(n)),
                                      0, jobs);
        std::vector<double> pool;
        for (const auto& log : logs) {
            auto d = mover_distances(log, log.positions.size() - 1);
            pool.insert(pool.end(), d.begin(), d.end());
        }
        ScalabilityRow row;
        row.n_agents = n;
        row.median = quantile(pool, 0.5);
        row.q25 = quantile(pool, 0.25);
        row.q75 = quantile(pool, 0.75);
        row.d10 = quantile(pool, 0.10);
        row.d90 = quantile(pool, 0.90);
        rows.push_back(row);
    }
    return rows;
}

std::vector<ColourScalabilityRow> scalability_colour(const ControllerSpec& controller,
                                                     const std::vector<int>& n_list,
                                                     int runs, std::uint64_t seed,
                                                     const WorldConfig& base, int jobs) {
    std::vector<ColourScalabilityRow> rows;
    for (int n : n_list) {
        WorldConfig cfg = base;
        cfg.n_agents = n;
        auto logs = run_eval_episodes(controller, cfg, runs,
                                      sub_seed(seed, "scal", static_cast<std::uint64_t>(n)),
                                      0, jobs);
        auto series = wrong_colour_rate(logs);
        ColourScalabilityRow row;
        row.n_agents = n;
        row.final_per_run = series.per_run.back();
        row.final_per_agent = series.per_agent.back();
        rows.push_back(row);
    }
    return rows;
}

namespace {

void append_real(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    out += buf;
}

} // namespace

std::string distance_stats_csv(const DistanceStats& stats) {
    std::string out = "step,median,q25,q75,d10,d90\n";
    for (std::size_t t = 0; t < stats.size(); ++t) {
        out += std::to_string(t);
        for (double v : {stats.median[t], stats.q25[t], stats.q75[t], stats.d10[t],
                         stats.d90[t]}) {
            out += ',';
            append_real(out, v);
        }
        out += '\n';
    }
    return out;
}

std::string wrong_colour_csv(const WrongColourSeries& series) {
    std::string out = "step,wrong_per_run,wrong_per_agent\n";
    for (std::size_t t = 0; t < series.per_run.size(); ++t) {
        out += std::to_string(t);
        out += ',';
        append_real(out, series.per_run[t]);
        out += ',';
        append_real(out, series.per_agent[t]);
        out += '\n';
    }
    return out;
}

std::string roc_csv(const RocCurve& curve) {
    std::string out = "fpr,tpr\n";
    for (const auto& p : curve.points) {
        append_real(out, p.fpr);
        out += ',';
        append_real(out, p.tpr);
        out += '\n';
    }
    return out;
}

std::string probe_sensing_csv(const ProbeCurve& curve) {
    std::string out = "reading,speed\n";
    for (std::size_t i = 0; i < curve.x.size(); ++i) {
        append_real(out, curve.x[i]);
        out += ',';
        append_real(out, curve.value[i]);
        out += '\n';
    }
    return out;
}

std::string probe_position_csv(const PositionProbe& probe) {
    std::string out = "position,mean_speed,std_speed\n";
    for (std::size_t i = 0; i < probe.position.size(); ++i) {
        append_real(out, probe.position[i]);
        out += ',';
        append_real(out, probe.mean[i]);
        out += ',';
        append_real(out, probe.stddev[i]);
        out += '\n';
    }
    return out;
}

std::string scalability_csv(const std::vector<ScalabilityRow>& rows) {
    std::string out = "n_agents,median,q25,q75,d10,d90\n";
    for (const auto& r : rows) {
        out += std::to_string(r.n_agents);
        for (double v : {r.median, r.q25, r.q75, r.d10, r.d90}) {
            out += ',';
            append_real(out, v);
        }
        out += '\n';
    }
    return out;
}

std::string colour_scalability_csv(const std::vector<ColourScalabilityRow>& rows) {
    std::string out = "n_agents,final_wrong_per_run,final_wrong_per_agent\n";
    for (const auto& r : rows) {
        out += std::to_string(r.n_agents);
        out += ',';
        append_real(out, r.final_per_run);
        out += ',';
        append_real(out, r.final_per_agent);
        out += '\n';
    }
    return out;
}

std::vector<double> linspace(double lo, double hi, int points) {
    if (points < 1) throw std::invalid_argument("linspace: points must be >= 1");
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(points));
    if (points == 1) {
        out.push_back(lo);
        return out;
    }
    double step = (hi - lo) / static_cast<double>(points - 1);
    for (int i = 0; i < points; ++i)
        out.push_back(lo + step * static_cast<double>(i));
    return out;
}

} // namespace rowswarm
