#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "slung/model.hpp"

namespace slung {

// One mean-pooled last-layer feature per document, balanced by construction.
struct ProbeDataset {
    MatX<float> features;       // [n, d_model]
    std::vector<int> labels;    // 0/1

    std::size_t size() const { return labels.size(); }
};

struct ProbeModel {
    VecX<float> mean;     // per-feature standardization, folded into scoring
    VecX<float> inv_std;
    VecX<float> weights;
    float bias = 0.0f;

    double score(const Eigen::Ref<const VecX<float>>& x) const;
};

// Feature per document: mean over positions of the last-layer hidden states
// (documents truncated to the context length).
MatX<float> extract_features(const ModelParams<float>& params,
                             const std::vector<std::vector<TokenId>>& docs);

// Balanced dataset: n_per_class from each pool, sampled without replacement.
ProbeDataset balanced_sample(const MatX<float>& pos_features, const MatX<float>& neg_features,
                             std::size_t n_per_class, Rng& rng);

// Logistic regression, full-batch gradient descent from zero init, L2 1e-4,
// stops at grad-norm < 1e-6 or 5000 iterations. Throws on single-class input.
ProbeModel train_probe(const ProbeDataset& dataset);

// Mann-Whitney AUROC: P(score_pos > score_neg) + 0.5 P(tie), exact.
// Throws std::invalid_argument when a class is missing.
double auroc(const std::vector<double>& scores, const std::vector<int>& labels);

struct ProbeReport {
    double auroc_mean = 0.0;
    std::vector<double> auroc_per_split;
    std::size_t n_train = 0;
    std::size_t n_test = 0;
};

// Three independently resampled balanced train/test splits over the given
// feature pools; reports the mean test AUROC.
ProbeReport probe_auroc_report(const MatX<float>& pos_features, const MatX<float>& neg_features,
                               std::size_t train_per_class, std::size_t test_per_class,
                               std::uint64_t seed, int n_splits = 3);

void save_probe_report(const std::string& path, const ProbeReport& report);
ProbeReport load_probe_report(const std::string& path);

}  // namespace slung
