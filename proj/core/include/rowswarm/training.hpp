#pragma once

#include "rowswarm/dataset.hpp"
#include "rowswarm/nn.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace rowswarm {

// Hyper-parameters and wiring of one training job. Defaults depend on
// the pipeline; see make_default_train_config.
struct TrainConfig {
    std::string pipeline;      // "distributed" | "comm" | "colour"
    InputKind input_kind = InputKind::prox_values; // ignored by "colour"
    int epochs = 0;
    double lr = 0.0;
    int batch_size = 0;
    std::uint64_t seed = 0;
    std::string dataset_path;
    std::string checkpoint_path;

    void validate() const;
};

// Pipeline defaults:
//   distributed: 50 epochs, lr 0.01,  batch 100
//   comm:        500 epochs, lr 0.001, batch 10
//   colour:      100 epochs, lr 0.001, batch 10
TrainConfig make_default_train_config(const std::string& pipeline);

// Parse from JSON with exactly the field names of the struct
// ("input_kind" as a string); unknown keys are rejected, "pipeline" is
// required, missing fields keep the pipeline defaults.
TrainConfig train_config_from_json(const std::string& json_text);
std::string train_config_to_json(const TrainConfig& cfg);

struct EpochLoss {
    double train = 0.0;
    double val = 0.0;
};

struct TrainResult {
    MlpParams best;   // parameters at the best validation epoch
    MlpParams last;   // parameters after the final epoch
    std::vector<EpochLoss> curve;
    int best_epoch = 0; // 1-based epoch index of `best`
};

// Behavioural cloning of the recorded wheel commands from single-step
// sensing. The two fixed end robots are excluded from the pairs.
// Trains with mini-batch Adam on MSE; the dataset is split 60/20/20 by
// run, the validation loss is evaluated after every epoch, and the best
// validation parameters are retained (no early stopping). Aborts with a
// diagnostic if the loss goes non-finite. Deterministic for a fixed
// (config, dataset) pair.
TrainResult train_distributed(const TrainConfig& cfg,
                              const std::vector<RunRecord>& records);

// Same cloning loss on the wheel command, but through the two-step
// unroll with the learned message channel: inputs are sensing plus the
// two neighbour messages, the message head is trained only by what it
// contributes to the next step's predictions.
TrainResult train_comm(const TrainConfig& cfg, const std::vector<RunRecord>& records);

// Membership classification from the message channel alone: binary
// cross-entropy of the colour head against the ground-truth membership
// at both steps of the unroll; otherwise like train_comm.
TrainResult train_colour(const TrainConfig& cfg, const std::vector<RunRecord>& records);

// Dispatch on cfg.pipeline.
TrainResult train_pipeline(const TrainConfig& cfg, const std::vector<RunRecord>& records);

// Checkpoint round trip: {arch, input_width, layers:[{rows, cols,
// weights, bias}]} as JSON. Loading validates the shape chain.
std::string checkpoint_to_json(const MlpParams& params);
MlpParams checkpoint_from_json(const std::string& json_text);
void save_checkpoint(const std::string& path, const MlpParams& params);
MlpParams load_checkpoint(const std::string& path);

// "epoch,train_loss,val_loss" rows, 1-based epochs.
std::string loss_curve_csv(const std::vector<EpochLoss>& curve);

} // namespace rowswarm
