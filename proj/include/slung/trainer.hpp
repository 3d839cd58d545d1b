#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "slung/corpus.hpp"
#include "slung/model.hpp"
#include "slung/selective_loss.hpp"

namespace slung {

struct TrainConfig {
    std::uint64_t steps = 0;
    std::uint32_t batch_size = 32;
    double lr = 3e-4;
    double beta1 = 0.9;
    double beta2 = 0.95;
    double weight_decay = 0.1;
    double grad_clip_norm = 1.0;
    std::uint32_t warmup_steps = 100;
    double final_lr_frac = 0.1;  // cosine decays to final_lr_frac * lr
    std::uint64_t seed = 0;
    std::uint32_t checkpoint_interval = 0;  // 0: final checkpoint only
    Reduction reduction = Reduction::MeanNonMasked;
    bool sequential = false;

    void validate() const;
};

// Linear warmup, then cosine decay reaching final_lr_frac * lr at the last step.
double lr_at_step(const TrainConfig& cfg, std::uint64_t step);

struct StepRecord {
    double loss = 0.0;
    double loss_standard = 0.0;      // mean over Standard positions
    double loss_unlikelihood = 0.0;  // mean over Unlikelihood positions
    double grad_norm = 0.0;          // pre-clip global norm
};

struct RunManifest {
    std::string config_hash;
    std::vector<std::string> shard_hashes;
    std::uint64_t seed = 0;
    bool sequential = false;
    std::vector<StepRecord> steps;
};

void save_manifest(const std::string& path, const RunManifest& manifest);
RunManifest load_manifest(const std::string& path);

struct TrainDiverged : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Scales gradients in place so the global norm is at most max_norm.
// Returns the pre-clip norm.
double clip_gradients(ModelParams<float>& grads, double max_norm);

// Decoupled weight decay; 1-D tensors (norm scales) are not decayed.
class AdamW {
public:
    AdamW(ModelParams<float>& params, const TrainConfig& cfg);

    // Clips the gradient to cfg.grad_clip_norm, applies one update at the
    // given learning rate. Returns the pre-clip global norm.
    double step(ModelParams<float>& grads, double lr);

private:
    ModelParams<float>* params_;
    TrainConfig cfg_;
    ModelParams<float> m_;
    ModelParams<float> v_;
    std::uint64_t t_ = 0;
};

struct TrainResult {
    ModelParams<float> params;
    RunManifest manifest;
};

// Streams packed sequences in a seeded per-epoch order and runs
// clip -> AdamW -> schedule. Throws TrainDiverged on a non-finite loss after
// dumping the offending batch (when out_dir is set).
// initial: start from these weights instead of seed-initialized ones.
TrainResult train_run(const ModelConfig& model_cfg, const TrainConfig& train_cfg,
                      const std::vector<PackedSequences>& shards, const std::string& out_dir = "",
                      const ModelParams<float>* initial = nullptr,
                      const std::vector<std::string>& shard_paths = {});

// The five data-mix rows of the toxicity experiment.
struct BaselineRun {
    std::string name;
    LossConfig loss;
    double injection_rate = 0.0;  // fraction of base documents replaced
    TrainConfig train;
};

std::vector<BaselineRun> build_baseline_suite(std::uint64_t seed);

// Run-config file: TOML with [model], [train], [loss] sections.
struct RunFileConfig {
    ModelConfig model;
    TrainConfig train;
    LossConfig loss;
};

RunFileConfig parse_run_config(const std::string& path);
void write_run_config(const std::string& path, const RunFileConfig& cfg, const std::string& comment = "");

std::string config_hash(const ModelConfig& model, const TrainConfig& train);

}  // namespace slung
