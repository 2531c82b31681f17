#pragma once

#include "rowswarm/dataset.hpp"
#include "rowswarm/evaluation.hpp"
#include "rowswarm/training.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rowswarm {

// The five CLI commands as plain functions, so that tests and other
// front ends can drive the exact code paths the binary uses. All of
// them throw std::invalid_argument (bad arguments / bad input files)
// or std::runtime_error (I/O, diverged training) on failure.

struct GenCommand {
    std::string out;                 // dataset path (.jsonl)
    std::string controller = "expert";
    std::string input = "prox_values"; // sensing slice for `manual`
    int runs = 1000;
    std::string n_agents = "5:10";   // "N" or "MIN:MAX"
    std::string avg_gap = "variable"; // centimetres or "variable"
    std::uint64_t seed = 1;
    int jobs = 1;
    std::string config_path;         // optional WorldConfig JSON
};
void cmd_gen(const GenCommand& cmd);

struct TrainCommand {
    std::string pipeline;            // required unless the config gives it
    std::string config_path;         // optional TrainConfig JSON
    std::optional<std::string> dataset;
    std::optional<std::string> out;  // checkpoint path
    std::optional<std::string> curve_out; // default: <out>.curve.csv
    std::optional<std::string> input;
    std::optional<int> epochs;
    std::optional<double> lr;
    std::optional<int> batch_size;
    std::optional<std::uint64_t> seed;
};
// Returns the resolved config actually trained with.
TrainConfig cmd_train(const TrainCommand& cmd);

struct SimulateCommand {
    std::string controller = "expert";
    std::string model;               // checkpoint for net-* controllers
    std::string input = "prox_values";
    int n_agents = 8;
    std::string avg_gap = "8";
    std::uint64_t seed = 1;
    int steps = 0;                   // 0: task default horizon
    std::string trace_out;           // optional JSONL trace
    std::string config_path;
};
// Prints a one-line summary to stdout; returns the run's trace.
RunLog cmd_simulate(const SimulateCommand& cmd);

struct EvalCommand {
    int task = 1;
    std::string model;               // optional checkpoint
    std::string input = "prox_values";
    std::vector<std::string> baselines; // default: expert,manual / manual-colour
    int runs = 50;
    std::uint64_t seed = 7;
    std::string out_dir;
    std::string config_path;
    int jobs = 1;
};
// Writes one CSV per metric into out_dir and returns their paths.
std::vector<std::string> cmd_eval(const EvalCommand& cmd);

struct ProbeCommand {
    std::string kind = "sensing";    // "sensing" | "position"
    std::string controller;          // manual / expert; empty with --model
    std::string model;
    std::string input = "prox_values";
    std::string axis = "front";      // sensing probe: "front" | "rear"
    double max_reading = 4500.0;
    int points = 451;
    double left_x = 0.0;             // position probe geometry
    double right_x = 40.0;
    int position_points = 101;
    int jitters = 100;
    std::uint64_t seed = 7;
    std::string out;
};
void cmd_probe(const ProbeCommand& cmd);

// Shared helpers.
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// Parse "N" or "MIN:MAX" into an inclusive range.
std::pair<int, int> parse_agent_range(const std::string& text);

// Apply an avg-gap argument ("variable" or centimetres) to a config.
void apply_avg_gap(WorldConfig& cfg, const std::string& text);

} // namespace rowswarm
