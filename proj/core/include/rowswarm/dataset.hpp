#pragma once

#include "rowswarm/commnet.hpp"
#include "rowswarm/episode.hpp"
#include "rowswarm/sensing.hpp"
#include "rowswarm/world.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace rowswarm {

// One line of the JSON-Lines dataset: everything one agent saw and did
// at one step of one run, plus enough context to stand alone.
struct RunRecord {
    int run_id = 0;
    int step = 0;
    int agent_id = 0;
    double pose_x = 0.0;
    std::array<double, prox_sensor_count> prox_values{};
    std::array<double, prox_sensor_count> prox_comm{};
    double rx_left = 0.0;
    double rx_right = 0.0;
    double motor_target = 0.0;
    double tx_message = 0.0;
    int colour = 0;
    double goal_x = 0.0;
    int n_agents = 0;
    double avg_gap = 0.0;
};

// Flatten an episode trace into records.
std::vector<RunRecord> records_from_log(int run_id, const RunLog& log);

// JSON-Lines round trip. Encoding is byte-deterministic (fixed key
// order, shortest round-trip reals). Decoding reports the offending
// line number on malformed input.
std::string encode_records(const std::vector<RunRecord>& records);
std::vector<RunRecord> decode_records(const std::string& jsonl_text);

// Rebuild the sensor snapshot stored in a record.
SensorFrame frame_from_record(const RunRecord& rec);

// Git-style content hash of a byte string: SHA-1 over
// "blob <size>\0<content>", hex-encoded.
std::string content_hash(const std::string& content);

struct GenOptions {
    ControllerType controller = ControllerType::expert;
    InputKind kind = InputKind::prox_values; // sensing slice for `manual`
    int n_runs = 1000;
    int n_agents_min = 5;
    int n_agents_max = 10;
    WorldConfig world;       // avg_gap / variable_gap / noise / horizon etc.
    std::uint64_t seed = 1;
    int jobs = 1;
};

// Simulate `n_runs` episodes and collect their records. Run i draws its
// row size from [n_agents_min, n_agents_max] and spawns from seed^i, so
// any subset of runs can be regenerated independently; with jobs > 1
// runs are simulated in parallel and merged back in run order.
std::vector<RunRecord> generate_dataset(const GenOptions& opts);

// Write records to `path` plus a `<stem>.meta.json` sidecar carrying
// {n_runs, seed, controller, config, content_hash}. Returns the hash.
std::string write_dataset(const std::string& path,
                          const std::vector<RunRecord>& records,
                          const GenOptions& opts);

// Read records back; when the sidecar exists the content hash is
// verified first.
std::vector<RunRecord> read_dataset(const std::string& path);

std::string meta_path_for(const std::string& dataset_path);

// Run-level split: shuffle the distinct run ids with the given seed and
// deal floor(0.6 n) / floor(0.2 n) / remainder. Requires n >= 5.
struct RunSplit {
    std::vector<int> train;
    std::vector<int> val;
    std::vector<int> test;
};
RunSplit split_runs(const std::vector<int>& run_ids, std::uint64_t seed);

std::vector<int> distinct_run_ids(const std::vector<RunRecord>& records);

// Keep only records whose run_id is in `runs`.
std::vector<RunRecord> filter_runs(const std::vector<RunRecord>& records,
                                   const std::vector<int>& runs);

// What the per-(step, agent) training target is.
enum class TargetKind {
    motor,  // recorded wheel command; sensing = the chosen input slice
    colour, // ground-truth membership (0/1); sensing is empty
};

// Cut every run into length-2, stride-1 windows over all its agents.
// A run of T steps yields T-1 windows; the two fixed end robots are
// masked out of the loss. Throws when a run's records are not a
// complete (step x agent) grid.
std::vector<SequenceSample> build_sequences(const std::vector<RunRecord>& records,
                                            InputKind kind, TargetKind target);

// Grow a window's agent axis to n_max slots (zero sensing and targets,
// inactive mask). Throws if the window already exceeds n_max.
void pad_to_max(SequenceSample& sample, int n_max = 10);

} // namespace rowswarm
