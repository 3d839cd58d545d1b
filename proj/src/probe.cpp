#include "slung/probe.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "json.hpp"
#include "slung/common.hpp"

namespace slung {

double ProbeModel::score(const Eigen::Ref<const VecX<float>>& x) const {
    const VecX<float> z = (x - mean).cwiseProduct(inv_std);
    return static_cast<double>(weights.dot(z)) + bias;
}

MatX<float> extract_features(const ModelParams<float>& params,
                             const std::vector<std::vector<TokenId>>& docs) {
    const auto d = static_cast<Eigen::Index>(params.cfg.d_model);
    MatX<float> features(static_cast<Eigen::Index>(docs.size()), d);
    Activations<float> acts;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        std::vector<TokenId> tokens = docs[i];
        if (tokens.empty()) throw std::invalid_argument("cannot featurize an empty document");
        if (tokens.size() > params.cfg.context_len) tokens.resize(params.cfg.context_len);
        forward(params, tokens, 1, static_cast<int>(tokens.size()), acts);
        features.row(static_cast<Eigen::Index>(i)) = acts.last_hidden.colwise().mean();
    }
    return features;
}

ProbeDataset balanced_sample(const MatX<float>& pos_features, const MatX<float>& neg_features,
                             std::size_t n_per_class, Rng& rng) {
    if (static_cast<Eigen::Index>(n_per_class) > pos_features.rows() ||
        static_cast<Eigen::Index>(n_per_class) > neg_features.rows()) {
        throw std::invalid_argument("not enough documents for a balanced sample");
    }
    std::vector<std::size_t> pos_idx(static_cast<std::size_t>(pos_features.rows()));
    std::vector<std::size_t> neg_idx(static_cast<std::size_t>(neg_features.rows()));
    std::iota(pos_idx.begin(), pos_idx.end(), 0);
    std::iota(neg_idx.begin(), neg_idx.end(), 0);
    rng.shuffle(pos_idx);
    rng.shuffle(neg_idx);

    ProbeDataset ds;
    ds.features.resize(static_cast<Eigen::Index>(2 * n_per_class), pos_features.cols());
    ds.labels.resize(2 * n_per_class);
    for (std::size_t i = 0; i < n_per_class; ++i) {
        ds.features.row(static_cast<Eigen::Index>(2 * i)) =
            pos_features.row(static_cast<Eigen::Index>(pos_idx[i]));
        ds.labels[2 * i] = 1;
        ds.features.row(static_cast<Eigen::Index>(2 * i + 1)) =
            neg_features.row(static_cast<Eigen::Index>(neg_idx[i]));
        ds.labels[2 * i + 1] = 0;
    }
    return ds;
}

ProbeModel train_probe(const ProbeDataset& dataset) {
    const Eigen::Index n = dataset.features.rows();
    const Eigen::Index d = dataset.features.cols();
    std::size_t n_pos = 0;
    for (int l : dataset.labels) n_pos += static_cast<std::size_t>(l);
    if (n_pos == 0 || n_pos == dataset.labels.size() || n < 4) {
        throw std::invalid_argument("probe training needs at least two examples per class");
    }

    ProbeModel model;
    model.mean = dataset.features.colwise().mean().transpose();
    model.inv_std.resize(d);
    for (Eigen::Index j = 0; j < d; ++j) {
        const float var =
            (dataset.features.col(j).array() - model.mean(j)).square().sum() / static_cast<float>(n);
        model.inv_std(j) = 1.0f / std::sqrt(var + 1e-8f);
    }

    MatX<float> X = (dataset.features.rowwise() - model.mean.transpose()).array().rowwise() *
                    model.inv_std.transpose().array();
    VecX<float> y(n);
    for (Eigen::Index i = 0; i < n; ++i) y(i) = static_cast<float>(dataset.labels[static_cast<std::size_t>(i)]);

    model.weights = VecX<float>::Zero(d);
    model.bias = 0.0f;

    const float l2 = 1e-4f;
    // gradient Lipschitz bound for the mean logistic loss on standardized rows
    float max_row_sq = 0.0f;
    for (Eigen::Index i = 0; i < n; ++i) max_row_sq = std::max(max_row_sq, X.row(i).squaredNorm());
    const float lr = 1.0f / (0.25f * (max_row_sq + 1.0f) + l2);

    VecX<float> z(n), p(n), err(n);
    for (int iter = 0; iter < 5000; ++iter) {
        z.noalias() = X * model.weights;
        z.array() += model.bias;
        p = z.unaryExpr([](float v) { return 1.0f / (1.0f + std::exp(-v)); });
        err = p - y;
        VecX<float> gw = X.transpose() * err / static_cast<float>(n) + l2 * model.weights;
        const float gb = err.mean();
        const double gnorm = std::sqrt(static_cast<double>(gw.squaredNorm()) + static_cast<double>(gb) * gb);
        if (gnorm < 1e-6) break;
        model.weights -= lr * gw;
        model.bias -= lr * gb;
    }
    return model;
}

double auroc(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size() || scores.empty()) {
        throw std::invalid_argument("auroc: scores/labels size mismatch");
    }
    std::uint64_t n_pos = 0, n_neg = 0;
    for (int l : labels) (l == 1 ? n_pos : n_neg) += 1;
    if (n_pos == 0 || n_neg == 0) throw std::invalid_argument("auroc: needs both classes");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // walk groups of tied scores; count pos>neg wins and ties exactly
    std::uint64_t wins = 0, ties = 0, neg_seen = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        std::uint64_t group_pos = 0, group_neg = 0;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) {
            (labels[order[j]] == 1 ? group_pos : group_neg) += 1;
            ++j;
        }
        wins += group_pos * neg_seen;
        ties += group_pos * group_neg;
        neg_seen += group_neg;
        i = j;
    }
    return (static_cast<double>(wins) + 0.5 * static_cast<double>(ties)) /
           (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

ProbeReport probe_auroc_report(const MatX<float>& pos_features, const MatX<float>& neg_features,
                               std::size_t train_per_class, std::size_t test_per_class,
                               std::uint64_t seed, int n_splits) {
    ProbeReport report;
    report.n_train = 2 * train_per_class;
    report.n_test = 2 * test_per_class;
    for (int split = 0; split < n_splits; ++split) {
        Rng rng(seed + static_cast<std::uint64_t>(split) * 0x9e3779b97f4a7c15ull);

        // disjoint train/test draw from each pool
        std::vector<std::size_t> pos_idx(static_cast<std::size_t>(pos_features.rows()));
        std::vector<std::size_t> neg_idx(static_cast<std::size_t>(neg_features.rows()));
        std::iota(pos_idx.begin(), pos_idx.end(), 0);
        std::iota(neg_idx.begin(), neg_idx.end(), 0);
        rng.shuffle(pos_idx);
        rng.shuffle(neg_idx);
        if (pos_idx.size() < train_per_class + test_per_class ||
            neg_idx.size() < train_per_class + test_per_class) {
            throw std::invalid_argument("feature pools too small for the requested split");
        }

        const Eigen::Index d = pos_features.cols();
        ProbeDataset train;
        train.features.resize(static_cast<Eigen::Index>(2 * train_per_class), d);
        train.labels.resize(2 * train_per_class);
        for (std::size_t i = 0; i < train_per_class; ++i) {
            train.features.row(static_cast<Eigen::Index>(2 * i)) =
                pos_features.row(static_cast<Eigen::Index>(pos_idx[i]));
            train.labels[2 * i] = 1;
            train.features.row(static_cast<Eigen::Index>(2 * i + 1)) =
                neg_features.row(static_cast<Eigen::Index>(neg_idx[i]));
            train.labels[2 * i + 1] = 0;
        }
        const ProbeModel probe = train_probe(train);

        std::vector<double> scores;
        std::vector<int> labels;
        for (std::size_t i = train_per_class; i < train_per_class + test_per_class; ++i) {
            scores.push_back(probe.score(pos_features.row(static_cast<Eigen::Index>(pos_idx[i])).transpose()));
            labels.push_back(1);
            scores.push_back(probe.score(neg_features.row(static_cast<Eigen::Index>(neg_idx[i])).transpose()));
            labels.push_back(0);
        }
        report.auroc_per_split.push_back(auroc(scores, labels));
    }
    double sum = 0.0;
    for (double a : report.auroc_per_split) sum += a;
    report.auroc_mean = sum / static_cast<double>(report.auroc_per_split.size());
    return report;
}

void save_probe_report(const std::string& path, const ProbeReport& report) {
    nlohmann::json j;
    j["auroc_mean"] = report.auroc_mean;
    j["auroc_per_split"] = report.auroc_per_split;
    j["n_train"] = report.n_train;
    j["n_test"] = report.n_test;
    write_file(path, j.dump(2) + "\n");
}

ProbeReport load_probe_report(const std::string& path) {
    const auto j = nlohmann::json::parse(read_file(path));
    ProbeReport r;
    r.auroc_mean = j.at("auroc_mean").get<double>();
    r.auroc_per_split = j.at("auroc_per_split").get<std::vector<double>>();
    r.n_train = j.at("n_train").get<std::size_t>();
    r.n_test = j.at("n_test").get<std::size_t>();
    return r;
}

}  // namespace slung
