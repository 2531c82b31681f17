#include "rowswarm/dataset.hpp"

#include "rowswarm/rng.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace rowswarm {

std::vector<RunRecord> records_from_log(int run_id, const RunLog& log) {
    std::vector<RunRecord> out;
    out.reserve(log.steps.size() * static_cast<std::size_t>(log.n_agents));
    for (int t = 0; t < log.n_steps(); ++t) {
        for (int i = 0; i < log.n_agents; ++i) {
            const StepRecord& s = log.steps[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)];
            RunRecord r;
            r.run_id = run_id;
            r.step = t;
            r.agent_id = i;
            r.pose_x = s.pose_x;
            r.prox_values = s.prox_values;
            r.prox_comm = s.prox_comm;
            r.rx_left = s.rx_left;
            r.rx_right = s.rx_right;
            r.motor_target = s.motor_target;
            r.tx_message = s.tx_message;
            r.colour = s.colour;
            r.goal_x = log.goals[static_cast<std::size_t>(i)];
            r.n_agents = log.n_agents;
            r.avg_gap = log.avg_gap;
            out.push_back(r);
        }
    }
    return out;
}

namespace {

nlohmann::ordered_json record_to_json(const RunRecord& r) {
    nlohmann::ordered_json j;
    j["run_id"] = r.run_id;
    j["step"] = r.step;
    j["agent_id"] = r.agent_id;
    j["pose_x"] = r.pose_x;
    j["prox_values"] = r.prox_values;
    j["prox_comm"] = r.prox_comm;
    j["rx_left"] = r.rx_left;
    j["rx_right"] = r.rx_right;
    j["motor_target"] = r.motor_target;
    j["tx_message"] = r.tx_message;
    j["colour"] = r.colour;
    j["goal_x"] = r.goal_x;
    j["n_agents"] = r.n_agents;
    j["avg_gap"] = r.avg_gap;
    return j;
}

RunRecord record_from_json(const nlohmann::json& j) {
    RunRecord r;
    r.run_id = j.at("run_id").get<int>();
    r.step = j.at("step").get<int>();
    r.agent_id = j.at("agent_id").get<int>();
    r.pose_x = j.at("pose_x").get<double>();
    auto pv = j.at("prox_values").get<std::vector<double>>();
    auto pc = j.at("prox_comm").get<std::vector<double>>();
    if (pv.size() != prox_sensor_count || pc.size() != prox_sensor_count)
        throw std::invalid_argument("sensor arrays must have 7 entries");
    std::copy(pv.begin(), pv.end(), r.prox_values.begin());
    std::copy(pc.begin(), pc.end(), r.prox_comm.begin());
    r.rx_left = j.at("rx_left").get<double>();
    r.rx_right = j.at("rx_right").get<double>();
    r.motor_target = j.at("motor_target").get<double>();
    r.tx_message = j.at("tx_message").get<double>();
    r.colour = j.at("colour").get<int>();
    r.goal_x = j.at("goal_x").get<double>();
    r.n_agents = j.at("n_agents").get<int>();
    r.avg_gap = j.at("avg_gap").get<double>();
    return r;
}

} // namespace

std::string encode_records(const std::vector<RunRecord>& records) {
    std::string out;
    for (const auto& r : records) {
        out += record_to_json(r).dump();
        out += '\n';
    }
    return out;
}

std::vector<RunRecord> decode_records(const std::string& jsonl_text) {
    std::vector<RunRecord> out;
    std::istringstream stream(jsonl_text);
    std::string line;
    long line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            out.push_back(record_from_json(nlohmann::json::parse(line)));
        } catch (const std::exception& e) {
            throw std::invalid_argument("dataset line " + std::to_string(line_no) +
                                        ": " + e.what());
        }
    }
    return out;
}

SensorFrame frame_from_record(const RunRecord& rec) {
    SensorFrame frame;
    for (int s = 0; s < prox_sensor_count; ++s) {
        frame.prox_values[s] = rec.prox_values[static_cast<std::size_t>(s)];
        frame.prox_comm[s] = rec.prox_comm[static_cast<std::size_t>(s)];
    }
    frame.rx_left = rec.rx_left;
    frame.rx_right = rec.rx_right;
    return frame;
}

std::string content_hash(const std::string& content) {
    std::string blob = "blob " + std::to_string(content.size());
    blob.push_back('\0');
    blob += content;

    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (ctx == nullptr) throw std::runtime_error("content_hash: EVP context");
    if (EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx, blob.data(), blob.size()) != 1 ||
        EVP_DigestFinal_ex(ctx, digest, &len) != 1) {
        EVP_MD_CTX_free(ctx);
        throw std::runtime_error("content_hash: SHA-1 failure");
    }
    EVP_MD_CTX_free(ctx);

    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

namespace {

RunLog simulate_one_run(const GenOptions& opts, int run_id) {
    WorldConfig cfg = opts.world;
    if (opts.n_agents_min > opts.n_agents_max || opts.n_agents_min < 3)
        throw std::invalid_argument("generate_dataset: bad n_agents range");
    if (opts.n_agents_min == opts.n_agents_max) {
        cfg.n_agents = opts.n_agents_min;
    } else {
        auto rng = make_rng(sub_seed(opts.seed, "n-agents", static_cast<std::uint64_t>(run_id)));
        std::uniform_int_distribution<int> dist(opts.n_agents_min, opts.n_agents_max);
        cfg.n_agents = dist(rng);
    }
    WorldState world = spawn_world(cfg, run_seed(opts.seed, static_cast<std::uint64_t>(run_id)));
    ControllerSpec controller;
    controller.type = opts.controller;
    controller.kind = opts.kind;
    int horizon = cfg.max_steps;
    if (task_of(opts.controller) == 2) horizon = std::max(horizon, cfg.n_agents);
    return run_episode(world, controller, horizon);
}

} // namespace

std::vector<RunRecord> generate_dataset(const GenOptions& opts) {
    if (opts.n_runs < 0)
        throw std::invalid_argument("generate_dataset: n_runs must be >= 0");
    switch (opts.controller) {
        case ControllerType::expert:
        case ControllerType::manual:
        case ControllerType::manual_colour:
            break;
        default:
            throw std::invalid_argument(
                "generate_dataset: only model-free controllers can label data");
    }

    std::vector<std::vector<RunRecord>> per_run(static_cast<std::size_t>(opts.n_runs));
    const int jobs = std::max(1, opts.jobs);
    if (jobs == 1) {
        for (int i = 0; i < opts.n_runs; ++i)
            per_run[static_cast<std::size_t>(i)] = records_from_log(i, simulate_one_run(opts, i));
    } else {
        std::vector<std::thread> workers;
        std::atomic<int> next{0};
        workers.reserve(static_cast<std::size_t>(jobs));
        std::vector<std::exception_ptr> errors(static_cast<std::size_t>(jobs));
        for (int w = 0; w < jobs; ++w) {
            workers.emplace_back([&, w] {
                try {
                    for (int i = next.fetch_add(1); i < opts.n_runs; i = next.fetch_add(1))
                        per_run[static_cast<std::size_t>(i)] =
                            records_from_log(i, simulate_one_run(opts, i));
                } catch (...) {
                    errors[static_cast<std::size_t>(w)] = std::current_exception();
                }
            });
        }
        for (auto& t : workers) t.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    std::vector<RunRecord> out;
    for (auto& block : per_run)
        out.insert(out.end(), block.begin(), block.end());
    return out;
}

std::string meta_path_for(const std::string& dataset_path) {
    auto dot = dataset_path.rfind('.');
    auto slash = dataset_path.rfind('/');
    std::string stem = dataset_path;
    if (dot != std::string::npos && (slash == std::string::npos || dot > slash))
        stem = dataset_path.substr(0, dot);
    return stem + ".meta.json";
}

std::string write_dataset(const std::string& path,
                          const std::vector<RunRecord>& records,
                          const GenOptions& opts) {
    std::string body = encode_records(records);
    std::string hash = content_hash(body);

    nlohmann::ordered_json meta;
    meta["n_runs"] = opts.n_runs;
    meta["seed"] = opts.seed;
    meta["controller"] = controller_type_to_string(opts.controller);
    nlohmann::ordered_json config = nlohmann::ordered_json::parse(world_config_to_json(opts.world));
    config["n_agents_min"] = opts.n_agents_min;
    config["n_agents_max"] = opts.n_agents_max;
    meta["config"] = config;
    meta["content_hash"] = hash;

    std::ofstream data(path, std::ios::binary);
    if (!data) throw std::runtime_error("write_dataset: cannot open " + path);
    data << body;
    data.close();
    if (!data) throw std::runtime_error("write_dataset: write failed for " + path);

    std::string mpath = meta_path_for(path);
    std::ofstream mf(mpath, std::ios::binary);
    if (!mf) throw std::runtime_error("write_dataset: cannot open " + mpath);
    mf << meta.dump(2) << '\n';
    mf.close();
    if (!mf) throw std::runtime_error("write_dataset: write failed for " + mpath);
    return hash;
}

std::vector<RunRecord> read_dataset(const std::string& path) {
    std::ifstream data(path, std::ios::binary);
    if (!data) throw std::runtime_error("read_dataset: cannot open " + path);
    std::ostringstream buf;
    buf << data.rdbuf();
    std::string body = buf.str();

    std::ifstream mf(meta_path_for(path), std::ios::binary);
    if (mf) {
        nlohmann::json meta;
        try {
            mf >> meta;
        } catch (const std::exception& e) {
            throw std::runtime_error("read_dataset: bad meta sidecar: " +
                                     std::string(e.what()));
        }
        if (meta.contains("content_hash")) {
            std::string expect = meta.at("content_hash").get<std::string>();
            std::string got = content_hash(body);
            if (expect != got)
                throw std::runtime_error(
                    "read_dataset: content hash mismatch (expected " + expect +
                    ", file hashes to " + got + ")");
        }
    }
    return decode_records(body);
}

RunSplit split_runs(const std::vector<int>& run_ids, std::uint64_t seed) {
    const std::size_t n = run_ids.size();
    if (n < 5)
        throw std::invalid_argument("split_runs: need at least 5 runs");
    std::vector<int> shuffled = run_ids;
    auto rng = make_rng(sub_seed(seed, "split"));
    std::shuffle(shuffled.begin(), shuffled.end(), rng);

    const std::size_t n_train = (n * 6) / 10;
    const std::size_t n_val = (n * 2) / 10;
    RunSplit split;
    split.train.assign(shuffled.begin(), shuffled.begin() + static_cast<long>(n_train));
    split.val.assign(shuffled.begin() + static_cast<long>(n_train),
                     shuffled.begin() + static_cast<long>(n_train + n_val));
    split.test.assign(shuffled.begin() + static_cast<long>(n_train + n_val), shuffled.end());
    return split;
}

std::vector<int> distinct_run_ids(const std::vector<RunRecord>& records) {
    std::set<int> seen;
    std::vector<int> out;
    for (const auto& r : records)
        if (seen.insert(r.run_id).second) out.push_back(r.run_id);
    return out;
}

std::vector<RunRecord> filter_runs(const std::vector<RunRecord>& records,
                                   const std::vector<int>& runs) {
    std::set<int> keep(runs.begin(), runs.end());
    std::vector<RunRecord> out;
    for (const auto& r : records)
        if (keep.contains(r.run_id)) out.push_back(r);
    return out;
}

std::vector<SequenceSample> build_sequences(const std::vector<RunRecord>& records,
                                            InputKind kind, TargetKind target) {
    // Group into run -> step -> per-agent records, validating the grid.
    std::map<int, std::map<int, std::vector<const RunRecord*>>> runs;
    for (const auto& r : records) runs[r.run_id][r.step].push_back(&r);

    const int width = target == TargetKind::colour ? 0 : input_width(kind);
    std::vector<SequenceSample> out;
    for (auto& [run_id, steps] : runs) {
        const int t_count = static_cast<int>(steps.size());
        int n = -1;
        std::vector<std::vector<const RunRecord*>> grid;
        grid.reserve(static_cast<std::size_t>(t_count));
        int expect_step = steps.begin()->first;
        if (expect_step != 0)
            throw std::invalid_argument("build_sequences: run " + std::to_string(run_id) +
                                        " does not start at step 0");
        for (auto& [step, rows] : steps) {
            if (step != expect_step++)
                throw std::invalid_argument("build_sequences: run " + std::to_string(run_id) +
                                            " has non-consecutive steps");
            if (n == -1) n = static_cast<int>(rows.size());
            if (static_cast<int>(rows.size()) != n)
                throw std::invalid_argument("build_sequences: run " + std::to_string(run_id) +
                                            " has a ragged agent grid");
            std::vector<const RunRecord*> ordered(static_cast<std::size_t>(n), nullptr);
            for (const RunRecord* r : rows) {
                if (r->agent_id < 0 || r->agent_id >= n || r->n_agents != n ||
                    ordered[static_cast<std::size_t>(r->agent_id)] != nullptr)
                    throw std::invalid_argument("build_sequences: run " +
                                                std::to_string(run_id) +
                                                " has inconsistent agent ids");
                ordered[static_cast<std::size_t>(r->agent_id)] = r;
            }
            grid.push_back(std::move(ordered));
        }

        for (int t = 0; t + 1 < t_count; ++t) {
            SequenceSample s;
            s.n_agents = n;
            s.n_slots = n;
            s.mask.assign(static_cast<std::size_t>(n), false);
            for (int i = 1; i + 1 < n; ++i) s.mask[static_cast<std::size_t>(i)] = true;
            for (int dt = 0; dt < seq_len; ++dt) {
                auto& sensing = s.sensing[static_cast<std::size_t>(dt)];
                auto& targets = s.targets[static_cast<std::size_t>(dt)];
                sensing.resize(static_cast<std::size_t>(n));
                targets.resize(static_cast<std::size_t>(n));
                for (int i = 0; i < n; ++i) {
                    const RunRecord& r = *grid[static_cast<std::size_t>(t + dt)][static_cast<std::size_t>(i)];
                    if (target == TargetKind::colour) {
                        sensing[static_cast<std::size_t>(i)] = {};
                        targets[static_cast<std::size_t>(i)] =
                            ground_truth_colour(i, n) == Colour::blue ? 1.0 : 0.0;
                    } else {
                        sensing[static_cast<std::size_t>(i)] =
                            select_inputs(frame_from_record(r), kind);
                        targets[static_cast<std::size_t>(i)] = r.motor_target;
                    }
                }
            }
            s.validate(width);
            out.push_back(std::move(s));
        }
    }
    return out;
}

void pad_to_max(SequenceSample& sample, int n_max) {
    if (sample.n_slots > n_max)
        throw std::invalid_argument("pad_to_max: sample wider than n_max");
    if (sample.n_slots == n_max) return;
    const std::size_t width =
        sample.sensing[0].empty() ? 0 : sample.sensing[0][0].size();
    for (int t = 0; t < seq_len; ++t) {
        sample.sensing[static_cast<std::size_t>(t)].resize(
            static_cast<std::size_t>(n_max), std::vector<double>(width, 0.0));
        sample.targets[static_cast<std::size_t>(t)].resize(static_cast<std::size_t>(n_max), 0.0);
    }
    sample.mask.resize(static_cast<std::size_t>(n_max), false);
    sample.n_slots = n_max;
}

} // namespace rowswarm
