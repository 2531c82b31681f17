// rowswarm: generate datasets, train controllers, and evaluate them on
// the 1D spacing and group-membership tasks.

#include "rowswarm/pipeline.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <exception>
#include <stdexcept>
#include <string>
#include <vector>

namespace {

const std::vector<std::string> spacing_or_colour_controllers = {
    "expert", "manual", "manual-colour", "net-distributed", "net-comm",
    "net-colour"};
const std::vector<std::string> scripted_controllers = {"expert", "manual",
                                                      "manual-colour"};
const std::vector<std::string> input_kinds = {"prox_values", "prox_comm",
                                              "all_sensors"};
const std::vector<std::string> pipelines = {"distributed", "comm", "colour"};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"1D robot-row workbench: spacing and group-membership "
                 "controllers, scripted and learned"};
    app.require_subcommand(1);

    rowswarm::GenCommand gen;
    CLI::App* gen_cmd = app.add_subcommand(
        "gen", "Simulate scripted episodes into a JSONL dataset");
    gen_cmd->add_option("--out", gen.out, "Dataset path (.jsonl)")->required();
    gen_cmd->add_option("--controller", gen.controller, "Scripted controller")
        ->check(CLI::IsMember(scripted_controllers))
        ->capture_default_str();
    gen_cmd->add_option("--input", gen.input, "Sensing slice for manual")
        ->check(CLI::IsMember(input_kinds))
        ->capture_default_str();
    gen_cmd->add_option("--runs", gen.runs, "Number of episodes")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    gen_cmd->add_option("--n-agents", gen.n_agents, "Row size, N or MIN:MAX")
        ->capture_default_str();
    gen_cmd->add_option("--avg-gap", gen.avg_gap,
                        "Average start gap in cm, or \"variable\"")
        ->capture_default_str();
    gen_cmd->add_option("--seed", gen.seed, "Master seed")->capture_default_str();
    gen_cmd->add_option("--jobs", gen.jobs, "Parallel simulation threads")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    gen_cmd->add_option("--config", gen.config_path, "World config JSON file");

    rowswarm::TrainCommand train;
    CLI::App* train_cmd = app.add_subcommand(
        "train", "Fit a controller net to a dataset by imitation");
    train_cmd->add_option("--pipeline", train.pipeline,
                          "distributed | comm | colour")
        ->check(CLI::IsMember(pipelines));
    train_cmd->add_option("--config", train.config_path, "Train config JSON file");
    train_cmd->add_option("--dataset", train.dataset, "Dataset path");
    train_cmd->add_option("--out", train.out, "Checkpoint path");
    train_cmd->add_option("--curve-out", train.curve_out,
                          "Loss curve CSV (default: <out>.curve.csv)");
    train_cmd->add_option("--input", train.input, "Sensing slice")
        ->check(CLI::IsMember(input_kinds));
    train_cmd->add_option("--epochs", train.epochs, "Training epochs")
        ->check(CLI::PositiveNumber);
    train_cmd->add_option("--lr", train.lr, "Learning rate")
        ->check(CLI::PositiveNumber);
    train_cmd->add_option("--batch-size", train.batch_size, "Batch size")
        ->check(CLI::PositiveNumber);
    train_cmd->add_option("--seed", train.seed, "Master seed");

    rowswarm::SimulateCommand sim;
    CLI::App* sim_cmd =
        app.add_subcommand("simulate", "Run one episode and print a summary");
    sim_cmd->add_option("--controller", sim.controller, "Controller")
        ->check(CLI::IsMember(spacing_or_colour_controllers))
        ->capture_default_str();
    sim_cmd->add_option("--model", sim.model, "Checkpoint for net-* controllers");
    sim_cmd->add_option("--input", sim.input, "Sensing slice")
        ->check(CLI::IsMember(input_kinds))
        ->capture_default_str();
    sim_cmd->add_option("--n-agents", sim.n_agents, "Row size")
        ->check(CLI::Range(3, 50))
        ->capture_default_str();
    sim_cmd->add_option("--avg-gap", sim.avg_gap,
                        "Average start gap in cm, or \"variable\"")
        ->capture_default_str();
    sim_cmd->add_option("--seed", sim.seed, "Spawn seed")->capture_default_str();
    sim_cmd->add_option("--steps", sim.steps, "Horizon (0: task default)")
        ->capture_default_str();
    sim_cmd->add_option("--trace-out", sim.trace_out, "Per-step trace CSV");
    sim_cmd->add_option("--config", sim.config_path, "World config JSON file");

    rowswarm::EvalCommand eval;
    CLI::App* eval_cmd = app.add_subcommand(
        "eval", "Run matched episodes and write the metric CSVs");
    eval_cmd->add_option("--task", eval.task, "1 spacing, 2 colouring")
        ->check(CLI::Range(1, 2))
        ->capture_default_str();
    eval_cmd->add_option("--model", eval.model, "Checkpoint to evaluate");
    eval_cmd->add_option("--input", eval.input, "Sensing slice for the model")
        ->check(CLI::IsMember(input_kinds))
        ->capture_default_str();
    eval_cmd
        ->add_option("--baselines", eval.baselines,
                     "Scripted controllers to compare against")
        ->delimiter(',');
    eval_cmd->add_option("--runs", eval.runs, "Episodes per controller")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    eval_cmd->add_option("--seed", eval.seed, "Master seed")->capture_default_str();
    eval_cmd->add_option("--out-dir", eval.out_dir, "Output directory")
        ->required();
    eval_cmd->add_option("--config", eval.config_path, "World config JSON file");
    eval_cmd->add_option("--jobs", eval.jobs, "Parallel episode threads")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    rowswarm::ProbeCommand probe;
    CLI::App* probe_cmd = app.add_subcommand(
        "probe", "Sweep a controller's response curve into a CSV");
    probe_cmd->add_option("--kind", probe.kind, "sensing | position")
        ->check(CLI::IsMember({"sensing", "position"}))
        ->capture_default_str();
    probe_cmd->add_option("--controller", probe.controller,
                          "Scripted controller (alternative to --model)")
        ->check(CLI::IsMember({"expert", "manual"}));
    probe_cmd->add_option("--model", probe.model, "Checkpoint to probe");
    probe_cmd->add_option("--input", probe.input, "Sensing slice")
        ->check(CLI::IsMember(input_kinds))
        ->capture_default_str();
    probe_cmd->add_option("--axis", probe.axis, "Sensing probe side")
        ->check(CLI::IsMember({"front", "rear"}))
        ->capture_default_str();
    probe_cmd->add_option("--max-reading", probe.max_reading,
                          "Sensing sweep upper bound")
        ->capture_default_str();
    probe_cmd->add_option("--points", probe.points, "Sensing sweep points")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    probe_cmd->add_option("--left-x", probe.left_x, "Left anchor position")
        ->capture_default_str();
    probe_cmd->add_option("--right-x", probe.right_x, "Right anchor position")
        ->capture_default_str();
    probe_cmd
        ->add_option("--position-points", probe.position_points,
                     "Position sweep points")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    probe_cmd->add_option("--jitters", probe.jitters, "Placements per point")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    probe_cmd->add_option("--seed", probe.seed, "Jitter seed")
        ->capture_default_str();
    probe_cmd->add_option("--out", probe.out, "Curve CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e); // --help and friends
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (gen_cmd->parsed()) {
            if (!gen.config_path.empty()) {
                // An explicit config wins over untouched defaults.
                if (gen_cmd->count("--n-agents") == 0) gen.n_agents.clear();
                if (gen_cmd->count("--avg-gap") == 0) gen.avg_gap.clear();
            }
            rowswarm::cmd_gen(gen);
        } else if (train_cmd->parsed()) {
            rowswarm::cmd_train(train);
        } else if (sim_cmd->parsed()) {
            if (!sim.config_path.empty()) {
                if (sim_cmd->count("--n-agents") == 0) sim.n_agents = 0;
                if (sim_cmd->count("--avg-gap") == 0) sim.avg_gap.clear();
            }
            rowswarm::cmd_simulate(sim);
        } else if (eval_cmd->parsed()) {
            for (const auto& path : rowswarm::cmd_eval(eval))
                std::printf("wrote %s\n", path.c_str());
        } else if (probe_cmd->parsed()) {
            rowswarm::cmd_probe(probe);
            std::printf("wrote %s\n", probe.out.c_str());
        }
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
