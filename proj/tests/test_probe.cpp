#include "doctest.h"
#include "slung/probe.hpp"

#include <filesystem>
#include <random>

using namespace slung;

namespace {

// O(n^2) oracle with the same final expression
double brute_force_auroc(const std::vector<double>& scores, const std::vector<int>& labels) {
    std::uint64_t wins = 0, ties = 0, n_pos = 0, n_neg = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (labels[i] != 1) continue;
        ++n_pos;
        for (std::size_t j = 0; j < scores.size(); ++j) {
            if (labels[j] == 1) continue;
            if (scores[i] > scores[j]) ++wins;
            if (scores[i] == scores[j]) ++ties;
        }
    }
    for (int l : labels) n_neg += (l == 0) ? 1 : 0;
    return (static_cast<double>(wins) + 0.5 * static_cast<double>(ties)) /
           (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

MatX<float> random_features(std::size_t n, std::size_t d, unsigned seed, float shift = 0.0f) {
    std::mt19937 gen(seed);
    std::normal_distribution<float> gauss(0.0f, 1.0f);
    MatX<float> f(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < f.size(); ++i) f.data()[i] = gauss(gen) + shift;
    return f;
}

}  // namespace

TEST_CASE("auroc on the worked example") {
    CHECK(auroc({0.1, 0.4, 0.35, 0.8}, {0, 0, 1, 1}) == doctest::Approx(0.75));
}

TEST_CASE("auroc extremes") {
    CHECK(auroc({0.9, 0.8, 0.1, 0.2}, {1, 1, 0, 0}) == 1.0);
    CHECK(auroc({0.1, 0.2, 0.9, 0.8}, {1, 1, 0, 0}) == 0.0);
    CHECK(auroc({0.5, 0.5, 0.5, 0.5}, {1, 0, 1, 0}) == 0.5);
}

TEST_CASE("auroc rejects single-class input") {
    CHECK_THROWS_AS(auroc({0.1, 0.2}, {1, 1}), std::invalid_argument);
    CHECK_THROWS_AS(auroc({0.1, 0.2}, {0, 0}), std::invalid_argument);
    CHECK_THROWS_AS(auroc({}, {}), std::invalid_argument);
}

TEST_CASE("sort-based auroc equals brute force on random sets, exactly") {
    std::mt19937 gen(2024);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + gen() % 50;
        std::vector<double> scores(n);
        std::vector<int> labels(n);
        // coarse score grid forces plenty of ties
        for (std::size_t i = 0; i < n; ++i) {
            scores[i] = static_cast<double>(gen() % 7) / 7.0;
            labels[i] = static_cast<int>(gen() % 2);
        }
        labels[0] = 1;
        labels[n - 1] = 0;
        CHECK(auroc(scores, labels) == brute_force_auroc(scores, labels));
    }
}

TEST_CASE("auroc is invariant under strictly monotone transforms") {
    std::mt19937 gen(7);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 4 + gen() % 30;
        std::vector<double> scores(n);
        std::vector<int> labels(n);
        for (std::size_t i = 0; i < n; ++i) {
            scores[i] = static_cast<double>(gen() % 11) - 5.0;
            labels[i] = static_cast<int>(gen() % 2);
        }
        labels[0] = 1;
        labels[n - 1] = 0;
        const double base = auroc(scores, labels);

        auto affine = scores;
        for (auto& s : affine) s = 3.0 * s + 2.0;
        CHECK(auroc(affine, labels) == base);

        auto expd = scores;
        for (auto& s : expd) s = std::exp(s);
        CHECK(auroc(expd, labels) == base);
    }
}

TEST_CASE("probe separates a linearly separable pair") {
    ProbeDataset ds;
    ds.features.resize(4, 2);
    ds.features << 1.0f, 0.0f, 2.0f, 0.5f, -1.0f, 0.0f, -2.0f, -0.5f;
    ds.labels = {1, 1, 0, 0};
    const ProbeModel probe = train_probe(ds);
    for (Eigen::Index i = 0; i < 4; ++i) {
        const double s = probe.score(ds.features.row(i).transpose());
        CHECK((s > 0.0) == (ds.labels[static_cast<std::size_t>(i)] == 1));
    }
}

TEST_CASE("probe training is deterministic") {
    const auto pos = random_features(40, 6, 1, 0.5f);
    const auto neg = random_features(40, 6, 2, -0.5f);
    Rng rng1(3), rng2(3);
    const auto ds1 = balanced_sample(pos, neg, 30, rng1);
    const auto ds2 = balanced_sample(pos, neg, 30, rng2);
    const ProbeModel p1 = train_probe(ds1);
    const ProbeModel p2 = train_probe(ds2);
    CHECK(p1.weights == p2.weights);
    CHECK(p1.bias == p2.bias);
}

TEST_CASE("probe rejects degenerate single-class data") {
    ProbeDataset ds;
    ds.features = random_features(6, 3, 4);
    ds.labels = {1, 1, 1, 1, 1, 1};
    CHECK_THROWS_AS(train_probe(ds), std::invalid_argument);
}

TEST_CASE("random labels give chance-level test auroc") {
    // features and labels are independent; expect ~0.5
    const auto pos = random_features(1500, 8, 10);
    const auto neg = random_features(1500, 8, 11);
    const auto report = probe_auroc_report(pos, neg, 500, 1000, 99, 3);
    for (double a : report.auroc_per_split) {
        CHECK(a >= 0.4);
        CHECK(a <= 0.6);
    }
}

TEST_CASE("balanced splits have the stated class counts") {
    const auto pos = random_features(8000, 4, 20, 0.1f);
    const auto neg = random_features(8000, 4, 21, -0.1f);
    Rng rng(5);
    const auto ds = balanced_sample(pos, neg, 4000, rng);
    CHECK(ds.size() == 8000);
    std::size_t n_pos = 0;
    for (int l : ds.labels) n_pos += static_cast<std::size_t>(l);
    CHECK(n_pos == 4000);

    const auto report = probe_auroc_report(pos, neg, 4000, 1000, 7, 3);
    CHECK(report.n_train == 8000);
    CHECK(report.n_test == 2000);
    CHECK(report.auroc_per_split.size() == 3);
}

TEST_CASE("balanced sampling validates pool sizes") {
    const auto pos = random_features(10, 4, 30);
    const auto neg = random_features(3, 4, 31);
    Rng rng(1);
    CHECK_THROWS_AS(balanced_sample(pos, neg, 5, rng), std::invalid_argument);
}

TEST_CASE("feature extraction is positionwise mean pooling") {
    ModelConfig cfg;
    cfg.vocab_size = 32;
    cfg.d_model = 8;
    cfg.n_layers = 1;
    cfg.n_heads = 2;
    cfg.context_len = 16;
    ModelParams<float> params;
    params.init(cfg, 55);

    const std::vector<std::vector<TokenId>> docs = {{5}, {5}, {1, 2, 3, 4}};
    const auto features = extract_features(params, docs);
    REQUIRE(features.rows() == 3);

    // single-token document: feature equals that position's hidden state
    Activations<float> acts;
    forward(params, {5}, 1, 1, acts);
    for (Eigen::Index j = 0; j < features.cols(); ++j) {
        CHECK(features(0, j) == acts.last_hidden(0, j));
    }
    // identical documents get identical features
    CHECK(features.row(0) == features.row(1));

    // and the mean matches a manual pooling
    forward(params, {1, 2, 3, 4}, 1, 4, acts);
    for (Eigen::Index j = 0; j < features.cols(); ++j) {
        CHECK(features(2, j) == doctest::Approx(acts.last_hidden.col(j).mean()));
    }
}

TEST_CASE("probe report json round-trips") {
    ProbeReport r;
    r.auroc_mean = 0.87;
    r.auroc_per_split = {0.85, 0.88, 0.88};
    r.n_train = 100;
    r.n_test = 50;
    const auto path = (std::filesystem::temp_directory_path() / "slung_probe_report.json").string();
    save_probe_report(path, r);
    const auto loaded = load_probe_report(path);
    CHECK(loaded.auroc_mean == doctest::Approx(0.87));
    CHECK(loaded.auroc_per_split.size() == 3);
    CHECK(loaded.n_train == 100);
    std::filesystem::remove(path);
}
