#include "rowswarm/training.hpp"

#include "rowswarm/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace rowswarm {

void TrainConfig::validate() const {
    if (pipeline != "distributed" && pipeline != "comm" && pipeline != "colour")
        throw std::invalid_argument("TrainConfig: unknown pipeline '" + pipeline + "'");
    if (epochs < 1) throw std::invalid_argument("TrainConfig: epochs must be >= 1");
    if (!(lr > 0.0)) throw std::invalid_argument("TrainConfig: lr must be > 0");
    if (batch_size < 1)
        throw std::invalid_argument("TrainConfig: batch_size must be >= 1");
}

TrainConfig make_default_train_config(const std::string& pipeline) {
    TrainConfig cfg;
    cfg.pipeline = pipeline;
    if (pipeline == "distributed") {
        cfg.epochs = 50;
        cfg.lr = 0.01;
        cfg.batch_size = 100;
    } else if (pipeline == "comm") {
        cfg.epochs = 500;
        cfg.lr = 0.001;
        cfg.batch_size = 10;
    } else if (pipeline == "colour") {
        cfg.epochs = 100;
        cfg.lr = 0.001;
        cfg.batch_size = 10;
    } else {
        throw std::invalid_argument("unknown pipeline '" + pipeline + "'");
    }
    return cfg;
}

TrainConfig train_config_from_json(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("TrainConfig: bad JSON: ") + e.what());
    }
    if (!j.is_object())
        throw std::invalid_argument("TrainConfig: document must be a JSON object");
    static const char* known[] = {"pipeline", "input_kind", "epochs",   "lr",
                                  "batch_size", "seed",     "dataset_path",
                                  "checkpoint_path"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = std::any_of(std::begin(known), std::end(known),
                              [&](const char* k) { return it.key() == k; });
        if (!ok)
            throw std::invalid_argument("TrainConfig: unknown key '" + it.key() + "'");
    }
    if (!j.contains("pipeline"))
        throw std::invalid_argument("TrainConfig: missing required key 'pipeline'");

    try {
        TrainConfig cfg = make_default_train_config(j.at("pipeline").get<std::string>());
        if (j.contains("input_kind"))
            cfg.input_kind = input_kind_from_string(j.at("input_kind").get<std::string>());
        if (j.contains("epochs")) cfg.epochs = j.at("epochs").get<int>();
        if (j.contains("lr")) cfg.lr = j.at("lr").get<double>();
        if (j.contains("batch_size")) cfg.batch_size = j.at("batch_size").get<int>();
        if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("dataset_path"))
            cfg.dataset_path = j.at("dataset_path").get<std::string>();
        if (j.contains("checkpoint_path"))
            cfg.checkpoint_path = j.at("checkpoint_path").get<std::string>();
        cfg.validate();
        return cfg;
    } catch (const nlohmann::json::exception& e) {
        // Wrong-typed values are caller errors, like bad JSON.
        throw std::invalid_argument(std::string("TrainConfig: ") + e.what());
    }
}

std::string train_config_to_json(const TrainConfig& cfg) {
    nlohmann::ordered_json j;
    j["pipeline"] = cfg.pipeline;
    j["input_kind"] = input_kind_to_string(cfg.input_kind);
    j["epochs"] = cfg.epochs;
    j["lr"] = cfg.lr;
    j["batch_size"] = cfg.batch_size;
    j["seed"] = cfg.seed;
    j["dataset_path"] = cfg.dataset_path;
    j["checkpoint_path"] = cfg.checkpoint_path;
    return j.dump(2);
}

namespace {

void guard_finite(double loss, int epoch, int batch) {
    if (!std::isfinite(loss))
        throw std::runtime_error("training diverged: non-finite loss at epoch " +
                                 std::to_string(epoch) + ", batch " +
                                 std::to_string(batch));
}

void maybe_checkpoint(const TrainConfig& cfg, const MlpParams& params) {
    if (!cfg.checkpoint_path.empty()) save_checkpoint(cfg.checkpoint_path, params);
}

} // namespace

TrainResult train_distributed(const TrainConfig& cfg,
                              const std::vector<RunRecord>& records) {
    cfg.validate();
    if (cfg.pipeline != "distributed")
        throw std::invalid_argument("train_distributed: wrong pipeline in config");

    RunSplit split = split_runs(distinct_run_ids(records), cfg.seed);

    struct Pair {
        std::vector<double> input;
        double target;
    };
    auto collect = [&](const std::vector<int>& runs) {
        std::vector<Pair> pairs;
        auto subset = filter_runs(records, runs);
        for (const auto& r : subset) {
            if (r.agent_id == 0 || r.agent_id == r.n_agents - 1) continue;
            pairs.push_back({select_inputs(frame_from_record(r), cfg.input_kind),
                             r.motor_target});
        }
        return pairs;
    };
    std::vector<Pair> train_pairs = collect(split.train);
    std::vector<Pair> val_pairs = collect(split.val);
    if (train_pairs.empty() || val_pairs.empty())
        throw std::invalid_argument("train_distributed: empty train or val set");

    MlpParams params = make_mlp(Arch::distributed, input_width(cfg.input_kind),
                                sub_seed(cfg.seed, "init"));
    AdamState adam = make_adam_state(params);
    AdamConfig adam_cfg;
    adam_cfg.lr = cfg.lr;

    TrainResult result;
    result.best = params;
    double best_val = std::numeric_limits<double>::infinity();

    std::vector<std::size_t> order(train_pairs.size());
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        auto rng = make_rng(sub_seed(cfg.seed, "shuffle", static_cast<std::uint64_t>(epoch)));
        std::shuffle(order.begin(), order.end(), rng);

        double epoch_sq_sum = 0.0;
        int batch_index = 0;
        for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
            ++batch_index;
            std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
            const double bsize = static_cast<double>(end - start);
            Grads grads = zero_grads(params);
            double batch_sq = 0.0;
            for (std::size_t k = start; k < end; ++k) {
                const Pair& p = train_pairs[order[k]];
                auto tape = forward(params, p.input);
                double diff = tape.output[0] - p.target;
                batch_sq += diff * diff;
                backward(params, tape, {2.0 * diff / bsize}, grads);
            }
            guard_finite(batch_sq / bsize, epoch, batch_index);
            adam_step(params, grads, adam, adam_cfg);
            epoch_sq_sum += batch_sq;
        }

        double val_sq = 0.0;
        for (const Pair& p : val_pairs) {
            double diff = forward(params, p.input).output[0] - p.target;
            val_sq += diff * diff;
        }
        EpochLoss loss;
        loss.train = epoch_sq_sum / static_cast<double>(train_pairs.size());
        loss.val = val_sq / static_cast<double>(val_pairs.size());
        guard_finite(loss.val, epoch, batch_index);
        result.curve.push_back(loss);

        if (loss.val < best_val) {
            best_val = loss.val;
            result.best = params;
            result.best_epoch = epoch;
            maybe_checkpoint(cfg, params);
        }
    }
    result.last = params;
    return result;
}

namespace {

// Shared scaffolding of the two unrolled pipelines: windows are padded
// to the widest row of the dataset, shuffled per epoch, and scored at
// both steps on the unmasked agents.
struct UnrolledSpec {
    Arch arch;
    TargetKind target;
    bool bce; // BCE on the primary head instead of MSE
};

TrainResult train_unrolled(const TrainConfig& cfg,
                           const std::vector<RunRecord>& records,
                           const UnrolledSpec& spec) {
    RunSplit split = split_runs(distinct_run_ids(records), cfg.seed);

    auto train_windows =
        build_sequences(filter_runs(records, split.train), cfg.input_kind, spec.target);
    auto val_windows =
        build_sequences(filter_runs(records, split.val), cfg.input_kind, spec.target);
    if (train_windows.empty() || val_windows.empty())
        throw std::invalid_argument("training: empty train or val window set");

    int n_max = 0;
    for (const auto& w : train_windows) n_max = std::max(n_max, w.n_agents);
    for (const auto& w : val_windows) n_max = std::max(n_max, w.n_agents);
    for (auto& w : train_windows) pad_to_max(w, n_max);
    for (auto& w : val_windows) pad_to_max(w, n_max);

    const int sensing_width = spec.target == TargetKind::colour
                                  ? 0
                                  : input_width(cfg.input_kind);
    MlpParams params =
        make_mlp(spec.arch, sensing_width + 2, sub_seed(cfg.seed, "init"));
    AdamState adam = make_adam_state(params);
    AdamConfig adam_cfg;
    adam_cfg.lr = cfg.lr;

    // Fixed per-window validation boards so that epochs are comparable.
    std::vector<std::vector<double>> val_boards;
    {
        auto rng = make_rng(sub_seed(cfg.seed, "val-init"));
        val_boards.reserve(val_windows.size());
        for (std::size_t i = 0; i < val_windows.size(); ++i)
            val_boards.push_back(make_init_comm(n_max, rng));
    }

    auto pair_loss = [&](double pred, double target) {
        if (spec.bce) return bce_loss(pred, target);
        double d = pred - target;
        return d * d;
    };
    auto pair_grad = [&](double pred, double target) {
        if (spec.bce) return bce_grad(pred, target);
        return 2.0 * (pred - target);
    };

    auto score_window = [&](const SequenceSample& w, const std::vector<double>& board,
                            double& loss_sum, long& pair_count) {
        auto rolled = commnet_unroll(params, w, board);
        for (int t = 0; t < seq_len; ++t)
            for (int i = 0; i < w.n_slots; ++i) {
                if (!w.mask[static_cast<std::size_t>(i)]) continue;
                loss_sum += pair_loss(rolled.primary[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)],
                                      w.targets[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)]);
                ++pair_count;
            }
    };

    TrainResult result;
    result.best = params;
    double best_val = std::numeric_limits<double>::infinity();

    std::vector<std::size_t> order(train_windows.size());
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        auto shuffle_rng =
            make_rng(sub_seed(cfg.seed, "shuffle", static_cast<std::uint64_t>(epoch)));
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        auto board_rng =
            make_rng(sub_seed(cfg.seed, "init-comm", static_cast<std::uint64_t>(epoch)));

        double epoch_loss_sum = 0.0;
        long epoch_pairs = 0;
        int batch_index = 0;
        for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
            ++batch_index;
            std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));

            // Pair count first: the loss is averaged over every
            // unmasked (step, agent) pair of the batch.
            long batch_pairs = 0;
            for (std::size_t k = start; k < end; ++k) {
                const auto& w = train_windows[order[k]];
                for (int i = 0; i < w.n_slots; ++i)
                    if (w.mask[static_cast<std::size_t>(i)]) batch_pairs += seq_len;
            }

            Grads grads = zero_grads(params);
            double batch_loss_sum = 0.0;
            for (std::size_t k = start; k < end; ++k) {
                const auto& w = train_windows[order[k]];
                auto board = make_init_comm(n_max, board_rng);
                auto rolled = commnet_unroll(params, w, board);
                std::array<std::vector<double>, seq_len> d_primary;
                for (int t = 0; t < seq_len; ++t) {
                    d_primary[static_cast<std::size_t>(t)].assign(static_cast<std::size_t>(w.n_slots), 0.0);
                    for (int i = 0; i < w.n_slots; ++i) {
                        if (!w.mask[static_cast<std::size_t>(i)]) continue;
                        double pred = rolled.primary[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)];
                        double target = w.targets[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)];
                        batch_loss_sum += pair_loss(pred, target);
                        d_primary[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)] =
                            pair_grad(pred, target) / static_cast<double>(batch_pairs);
                    }
                }
                commnet_backward(params, w, rolled, d_primary, grads);
            }
            guard_finite(batch_loss_sum / static_cast<double>(batch_pairs), epoch,
                         batch_index);
            adam_step(params, grads, adam, adam_cfg);
            epoch_loss_sum += batch_loss_sum;
            epoch_pairs += batch_pairs;
        }

        double val_loss_sum = 0.0;
        long val_pairs = 0;
        for (std::size_t i = 0; i < val_windows.size(); ++i)
            score_window(val_windows[i], val_boards[i], val_loss_sum, val_pairs);

        EpochLoss loss;
        loss.train = epoch_loss_sum / static_cast<double>(epoch_pairs);
        loss.val = val_loss_sum / static_cast<double>(val_pairs);
        guard_finite(loss.val, epoch, batch_index);
        result.curve.push_back(loss);

        if (loss.val < best_val) {
            best_val = loss.val;
            result.best = params;
            result.best_epoch = epoch;
            maybe_checkpoint(cfg, params);
        }
    }
    result.last = params;
    return result;
}

} // namespace

TrainResult train_comm(const TrainConfig& cfg, const std::vector<RunRecord>& records) {
    cfg.validate();
    if (cfg.pipeline != "comm")
        throw std::invalid_argument("train_comm: wrong pipeline in config");
    return train_unrolled(cfg, records,
                          {Arch::single_comm, TargetKind::motor, false});
}

TrainResult train_colour(const TrainConfig& cfg, const std::vector<RunRecord>& records) {
    cfg.validate();
    if (cfg.pipeline != "colour")
        throw std::invalid_argument("train_colour: wrong pipeline in config");
    return train_unrolled(cfg, records, {Arch::colour, TargetKind::colour, true});
}

TrainResult train_pipeline(const TrainConfig& cfg, const std::vector<RunRecord>& records) {
    if (cfg.pipeline == "distributed") return train_distributed(cfg, records);
    if (cfg.pipeline == "comm") return train_comm(cfg, records);
    if (cfg.pipeline == "colour") return train_colour(cfg, records);
    throw std::invalid_argument("unknown pipeline '" + cfg.pipeline + "'");
}

std::string checkpoint_to_json(const MlpParams& params) {
    validate_params(params);
    nlohmann::ordered_json j;
    j["arch"] = arch_to_string(params.arch);
    j["input_width"] = params.input_width;
    nlohmann::ordered_json layers = nlohmann::ordered_json::array();
    for (const auto& layer : params.layers) {
        nlohmann::ordered_json l;
        l["rows"] = layer.weight.rows;
        l["cols"] = layer.weight.cols;
        l["weights"] = layer.weight.data;
        l["bias"] = layer.bias;
        layers.push_back(std::move(l));
    }
    j["layers"] = std::move(layers);
    return j.dump(2);
}

MlpParams checkpoint_from_json(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("checkpoint: bad JSON: ") + e.what());
    }
    try {
        MlpParams p;
        p.arch = arch_from_string(j.at("arch").get<std::string>());
        p.input_width = j.at("input_width").get<int>();
        const auto& layers = j.at("layers");
        if (!layers.is_array() || layers.size() != 3)
            throw std::invalid_argument("checkpoint: expected 3 layers");
        for (const auto& l : layers) {
            Layer layer;
            int rows = l.at("rows").get<int>();
            int cols = l.at("cols").get<int>();
            if (rows < 1 || cols < 1)
                throw std::invalid_argument("checkpoint: non-positive layer shape");
            layer.weight = Matrix(rows, cols);
            auto weights = l.at("weights").get<std::vector<double>>();
            if (weights.size() != layer.weight.data.size())
                throw std::invalid_argument("checkpoint: weights length != rows*cols");
            layer.weight.data = std::move(weights);
            layer.bias = l.at("bias").get<std::vector<double>>();
            if (static_cast<int>(layer.bias.size()) != rows)
                throw std::invalid_argument("checkpoint: bias length != rows");
            p.layers.push_back(std::move(layer));
        }
        validate_params(p);
        return p;
    } catch (const nlohmann::json::exception& e) {
        // Missing keys / wrong types are caller errors, like bad JSON.
        throw std::invalid_argument(std::string("checkpoint: ") + e.what());
    }
}

void save_checkpoint(const std::string& path, const MlpParams& params) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("save_checkpoint: cannot open " + path);
    f << checkpoint_to_json(params) << '\n';
    f.close();
    if (!f) throw std::runtime_error("save_checkpoint: write failed for " + path);
}

MlpParams load_checkpoint(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("load_checkpoint: cannot open " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    return checkpoint_from_json(buf.str());
}

std::string loss_curve_csv(const std::vector<EpochLoss>& curve) {
    std::string out = "epoch,train_loss,val_loss\n";
    char line[96];
    for (std::size_t i = 0; i < curve.size(); ++i) {
        std::snprintf(line, sizeof(line), "%zu,%.9g,%.9g\n", i + 1, curve[i].train,
                      curve[i].val);
        out += line;
    }
    return out;
}

} // namespace rowswarm
