#include "rowswarm/pipeline.hpp"

#include "rowswarm/rng.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rowswarm {

void write_text_file(const std::string& path, const std::string& content) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f << content;
    f.close();
    if (!f) throw std::runtime_error("write failed for " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    return buf.str();
}

std::pair<int, int> parse_agent_range(const std::string& text) {
    auto colon = text.find(':');
    try {
        if (colon == std::string::npos) {
            int n = std::stoi(text);
            return {n, n};
        }
        int lo = std::stoi(text.substr(0, colon));
        int hi = std::stoi(text.substr(colon + 1));
        if (lo > hi) throw std::invalid_argument("range is reversed");
        return {lo, hi};
    } catch (const std::exception&) {
        throw std::invalid_argument("bad agent count '" + text +
                                    "' (expected N or MIN:MAX)");
    }
}

void apply_avg_gap(WorldConfig& cfg, const std::string& text) {
    if (text.empty()) return;
    if (text == "variable") {
        cfg.variable_gap = true;
        return;
    }
    try {
        cfg.avg_gap = std::stod(text);
        cfg.variable_gap = false;
    } catch (const std::exception&) {
        throw std::invalid_argument("bad avg gap '" + text +
                                    "' (expected centimetres or \"variable\")");
    }
}

namespace {

WorldConfig resolve_world(const std::string& config_path) {
    if (config_path.empty()) return WorldConfig{};
    return world_config_from_json(read_text_file(config_path));
}

MlpParams load_model_or_throw(const std::string& path) {
    if (path.empty()) throw std::invalid_argument("a model checkpoint is required");
    return load_checkpoint(path);
}

ControllerType controller_for_model(const MlpParams& model) {
    switch (model.arch) {
        case Arch::distributed: return ControllerType::net_distributed;
        case Arch::single_comm: return ControllerType::net_comm;
        case Arch::colour: return ControllerType::net_colour;
    }
    throw std::invalid_argument("unknown model arch");
}

void check_model_width(const MlpParams& model, InputKind kind) {
    if (model.arch == Arch::distributed && model.input_width != input_width(kind))
        throw std::invalid_argument(
            "model expects input width " + std::to_string(model.input_width) +
            " but '" + input_kind_to_string(kind) + "' provides " +
            std::to_string(input_width(kind)));
    if (model.arch == Arch::single_comm &&
        model.input_width != input_width(kind) + 2)
        throw std::invalid_argument(
            "model expects input width " + std::to_string(model.input_width) +
            " but '" + input_kind_to_string(kind) + "' plus messages provides " +
            std::to_string(input_width(kind) + 2));
}

std::string trace_csv(const RunLog& log) {
    std::string out = "step,agent,x,goal,speed,message,colour\n";
    char row[160];
    for (int t = 0; t < log.n_steps(); ++t) {
        for (int i = 0; i < log.n_agents; ++i) {
            const StepRecord& r = log.steps[static_cast<std::size_t>(t)]
                                          [static_cast<std::size_t>(i)];
            std::snprintf(row, sizeof(row), "%d,%d,%.9g,%.9g,%.9g,%.9g,%d\n", t,
                          i, r.pose_x, log.goals[static_cast<std::size_t>(i)],
                          r.motor_target, r.tx_message, r.colour);
            out += row;
        }
    }
    return out;
}

} // namespace

void cmd_gen(const GenCommand& cmd) {
    if (cmd.out.empty()) throw std::invalid_argument("gen: --out is required");
    GenOptions opts;
    opts.world = resolve_world(cmd.config_path);
    opts.controller = controller_type_from_string(cmd.controller);
    opts.kind = input_kind_from_string(cmd.input);
    opts.n_runs = cmd.runs;
    if (cmd.n_agents.empty()) {
        opts.n_agents_min = opts.n_agents_max = opts.world.n_agents;
    } else {
        auto range = parse_agent_range(cmd.n_agents);
        opts.n_agents_min = range.first;
        opts.n_agents_max = range.second;
    }
    apply_avg_gap(opts.world, cmd.avg_gap);
    opts.world.n_agents = opts.n_agents_min; // placeholder; drawn per run
    opts.world.validate();
    opts.seed = cmd.seed;
    opts.jobs = cmd.jobs;

    auto records = generate_dataset(opts);
    std::filesystem::path p(cmd.out);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::string hash = write_dataset(cmd.out, records, opts);
    std::printf("runs=%d records=%zu hash=%s\n", opts.n_runs, records.size(),
                hash.c_str());
}

TrainConfig cmd_train(const TrainCommand& cmd) {
    TrainConfig cfg;
    if (!cmd.config_path.empty()) {
        cfg = train_config_from_json(read_text_file(cmd.config_path));
        if (!cmd.pipeline.empty() && cmd.pipeline != cfg.pipeline)
            throw std::invalid_argument("train: --pipeline disagrees with the config file");
    } else {
        if (cmd.pipeline.empty())
            throw std::invalid_argument("train: --pipeline or --config is required");
        cfg = make_default_train_config(cmd.pipeline);
    }
    if (cmd.input) cfg.input_kind = input_kind_from_string(*cmd.input);
    if (cmd.epochs) cfg.epochs = *cmd.epochs;
    if (cmd.lr) cfg.lr = *cmd.lr;
    if (cmd.batch_size) cfg.batch_size = *cmd.batch_size;
    if (cmd.seed) cfg.seed = *cmd.seed;
    if (cmd.dataset) cfg.dataset_path = *cmd.dataset;
    if (cmd.out) cfg.checkpoint_path = *cmd.out;
    cfg.validate();
    if (cfg.dataset_path.empty())
        throw std::invalid_argument("train: a dataset path is required");
    if (cfg.checkpoint_path.empty())
        throw std::invalid_argument("train: a checkpoint path is required");

    auto records = read_dataset(cfg.dataset_path);
    {
        std::filesystem::path p(cfg.checkpoint_path);
        if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    }
    TrainResult result = train_pipeline(cfg, records);

    std::string curve_path = cmd.curve_out ? *cmd.curve_out
                                           : cfg.checkpoint_path + ".curve.csv";
    write_text_file(curve_path, loss_curve_csv(result.curve));
    return cfg;
}

RunLog cmd_simulate(const SimulateCommand& cmd) {
    WorldConfig cfg = resolve_world(cmd.config_path);
    if (cmd.n_agents > 0) cfg.n_agents = cmd.n_agents;
    apply_avg_gap(cfg, cmd.avg_gap);
    cfg.validate();

    ControllerSpec spec;
    spec.type = controller_type_from_string(cmd.controller);
    spec.kind = input_kind_from_string(cmd.input);
    MlpParams model;
    if (spec.type == ControllerType::net_distributed ||
        spec.type == ControllerType::net_comm ||
        spec.type == ControllerType::net_colour) {
        model = load_model_or_throw(cmd.model);
        check_model_width(model, spec.kind);
        spec.model = &model;
    }

    int horizon = cmd.steps;
    if (horizon <= 0) {
        horizon = cfg.max_steps;
        if (task_of(spec.type) == 2) horizon = std::max(horizon, cfg.n_agents);
    }

    WorldState world = spawn_world(cfg, cmd.seed);
    RunLog log = run_episode(world, spec, horizon);

    if (task_of(spec.type) == 1) {
        const auto& xs = log.positions.back();
        double worst = 0.0;
        for (int i = 1; i + 1 < log.n_agents; ++i)
            worst = std::max(worst, std::abs(xs[static_cast<std::size_t>(i)] -
                                             log.goals[static_cast<std::size_t>(i)]));
        std::printf("controller=%s n=%d steps=%d converged=%d final_median=%.9g final_max=%.9g\n",
                    cmd.controller.c_str(), log.n_agents, log.n_steps(),
                    log.converged ? 1 : 0,
                    final_median_distance({log}), worst);
    } else {
        auto series = wrong_colour_rate({log});
        std::printf("controller=%s n=%d steps=%d wrong_final=%.9g\n",
                    cmd.controller.c_str(), log.n_agents, log.n_steps(),
                    series.per_agent.back());
    }

    if (!cmd.trace_out.empty()) write_text_file(cmd.trace_out, trace_csv(log));
    return log;
}

std::vector<std::string> cmd_eval(const EvalCommand& cmd) {
    if (cmd.task != 1 && cmd.task != 2)
        throw std::invalid_argument("eval: --task must be 1 or 2");
    if (cmd.out_dir.empty()) throw std::invalid_argument("eval: --out-dir is required");
    WorldConfig cfg = resolve_world(cmd.config_path);
    cfg.validate();
    std::filesystem::create_directories(cmd.out_dir);

    std::vector<std::string> baselines = cmd.baselines;
    if (baselines.empty())
        baselines = cmd.task == 1 ? std::vector<std::string>{"expert", "manual"}
                                  : std::vector<std::string>{"manual-colour"};

    struct Entry {
        std::string name;
        ControllerSpec spec;
    };
    std::vector<Entry> entries;
    for (const auto& name : baselines) {
        Entry e;
        e.name = name;
        e.spec.type = controller_type_from_string(name);
        e.spec.kind = input_kind_from_string(cmd.input);
        if (task_of(e.spec.type) != cmd.task)
            throw std::invalid_argument("eval: controller '" + name +
                                        "' does not address task " +
                                        std::to_string(cmd.task));
        entries.push_back(std::move(e));
    }

    MlpParams model;
    if (!cmd.model.empty()) {
        model = load_checkpoint(cmd.model);
        Entry e;
        e.spec.type = controller_for_model(model);
        e.spec.kind = input_kind_from_string(cmd.input);
        e.spec.model = &model;
        check_model_width(model, e.spec.kind);
        e.name = controller_type_to_string(e.spec.type);
        if (task_of(e.spec.type) != cmd.task)
            throw std::invalid_argument("eval: model addresses the other task");
        entries.push_back(std::move(e));
    }
    if (entries.empty())
        throw std::invalid_argument("eval: nothing to evaluate");

    auto out_path = [&](const std::string& leaf) {
        return (std::filesystem::path(cmd.out_dir) / leaf).string();
    };
    std::vector<std::string> written;

    // The expert's matched episodes serve as the spacing baseline, the
    // reference for agreement scores, and the window source for
    // classification scores.
    ControllerSpec expert_spec;
    expert_spec.type = ControllerType::expert;
    std::vector<RunLog> expert_logs =
        run_eval_episodes(expert_spec, cfg, cmd.runs, cmd.seed, 0, cmd.jobs);

    if (cmd.task == 1) {
        std::string r2_rows = "controller,r2\n";
        for (const auto& e : entries) {
            std::vector<RunLog> logs =
                e.spec.type == ControllerType::expert
                    ? expert_logs
                    : run_eval_episodes(e.spec, cfg, cmd.runs, cmd.seed, 0, cmd.jobs);
            std::string path = out_path("distance_" + e.name + ".csv");
            write_text_file(path, distance_stats_csv(distance_stats(logs)));
            written.push_back(path);

            char row[96];
            std::snprintf(row, sizeof(row), "%s,%.9g\n", e.name.c_str(),
                          r2_vs_expert(expert_logs, e.spec));
            r2_rows += row;
        }
        std::string path = out_path("r2.csv");
        write_text_file(path, r2_rows);
        written.push_back(path);
    } else {
        std::string auc_rows = "controller,auc\n";
        bool have_auc = false;
        for (const auto& e : entries) {
            auto logs = run_eval_episodes(e.spec, cfg, cmd.runs, cmd.seed, 0, cmd.jobs);
            std::string path = out_path("wrong_colour_" + e.name + ".csv");
            write_text_file(path, wrong_colour_csv(wrong_colour_rate(logs)));
            written.push_back(path);

            if (e.spec.type == ControllerType::net_colour) {
                std::vector<RunRecord> records;
                for (std::size_t i = 0; i < expert_logs.size(); ++i) {
                    auto block = records_from_log(static_cast<int>(i), expert_logs[i]);
                    records.insert(records.end(), block.begin(), block.end());
                }
                RocCurve roc = colour_windows_auc(*e.spec.model, records, cmd.seed);
                std::string roc_path = out_path("roc_" + e.name + ".csv");
                write_text_file(roc_path, roc_csv(roc));
                written.push_back(roc_path);
                char row[96];
                std::snprintf(row, sizeof(row), "%s,%.9g\n", e.name.c_str(), roc.auc);
                auc_rows += row;
                have_auc = true;
            }
        }
        if (have_auc) {
            std::string path = out_path("auc.csv");
            write_text_file(path, auc_rows);
            written.push_back(path);
        }
    }
    return written;
}

void cmd_probe(const ProbeCommand& cmd) {
    if (cmd.out.empty()) throw std::invalid_argument("probe: --out is required");

    ControllerSpec spec;
    MlpParams model;
    if (!cmd.model.empty()) {
        model = load_checkpoint(cmd.model);
        spec.type = controller_for_model(model);
        spec.kind = input_kind_from_string(cmd.input);
        spec.model = &model;
        if (spec.type != ControllerType::net_colour)
            check_model_width(model, spec.kind);
    } else if (!cmd.controller.empty()) {
        spec.type = controller_type_from_string(cmd.controller);
        spec.kind = input_kind_from_string(cmd.input);
    } else {
        throw std::invalid_argument("probe: --model or --controller is required");
    }

    if (cmd.kind == "sensing") {
        ProbeAxis axis;
        if (cmd.axis == "front")
            axis = ProbeAxis::front;
        else if (cmd.axis == "rear")
            axis = ProbeAxis::rear;
        else
            throw std::invalid_argument("probe: --axis must be front or rear");
        auto curve =
            probe_sensing(spec, axis, linspace(0.0, cmd.max_reading, cmd.points));
        write_text_file(cmd.out, probe_sensing_csv(curve));
    } else if (cmd.kind == "position") {
        WorldConfig base;
        double lo = cmd.left_x + base.robot_length;
        double hi = cmd.right_x - base.robot_length;
        auto probe = probe_position(spec, cmd.left_x, cmd.right_x,
                                    linspace(lo, hi, cmd.position_points),
                                    cmd.jitters, cmd.seed, base);
        write_text_file(cmd.out, probe_position_csv(probe));
    } else {
        throw std::invalid_argument("probe: --kind must be sensing or position");
    }
}

} // namespace rowswarm
