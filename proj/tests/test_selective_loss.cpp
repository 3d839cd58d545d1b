#include "doctest.h"
#include "slung/model.hpp"
#include "slung/selective_loss.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

using namespace slung;

namespace {

// log-softmax over a row-major logits matrix
template <typename T>
std::vector<T> to_logprobs(const std::vector<T>& logits, std::size_t n, std::size_t v) {
    std::vector<T> out(logits.size());
    for (std::size_t i = 0; i < n; ++i) log_softmax_row(logits.data() + i * v, v, out.data() + i * v);
    return out;
}

template <typename T>
std::vector<T> random_logits(std::size_t n, std::size_t v, unsigned seed, T scale = T(2)) {
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::vector<T> z(n * v);
    for (auto& x : z) x = static_cast<T>(unit(gen)) * scale;
    return z;
}

}  // namespace

TEST_CASE("all-masked batch has zero total and zero gradient") {
    const std::size_t n = 6, v = 8;
    const auto logits = random_logits<double>(n, v, 1);
    const auto lp = to_logprobs(logits, n, v);
    std::vector<TokenId> targets(n, 3);
    std::vector<LossMode> modes(n, LossMode::Masked);

    const auto report = slung_loss(lp.data(), n, v, targets.data(), modes.data());
    CHECK(report.total == 0.0);
    CHECK(report.n_masked == n);
    CHECK(report.included_count() == 0);

    std::vector<double> grad(n * v, 123.0);
    loss_grad_at_logits(lp.data(), n, v, targets.data(), modes.data(), grad.data());
    for (double g : grad) CHECK(g == 0.0);
}

TEST_CASE("all-standard reduces to plain mean NLL") {
    const std::size_t n = 10, v = 12;
    const auto logits = random_logits<double>(n, v, 2);
    const auto lp = to_logprobs(logits, n, v);
    std::vector<TokenId> targets(n);
    for (std::size_t i = 0; i < n; ++i) targets[i] = static_cast<TokenId>(i % v);
    std::vector<LossMode> modes(n, LossMode::Standard);

    const auto report = slung_loss(lp.data(), n, v, targets.data(), modes.data());
    double nll = 0.0;
    for (std::size_t i = 0; i < n; ++i) nll -= lp[i * v + targets[i]];
    CHECK(report.total == doctest::Approx(nll / static_cast<double>(n)).epsilon(1e-12));
}

TEST_CASE("unlikelihood at p=0.5 is ln 2") {
    const std::size_t v = 2;
    std::vector<double> lp = {std::log(0.5), std::log(0.5)};
    TokenId target = 0;
    LossMode mode = LossMode::Unlikelihood;
    const auto report = slung_loss(lp.data(), 1, v, &target, &mode);
    CHECK(report.total == doctest::Approx(0.693147).epsilon(1e-5));
}

TEST_CASE("masked-slung total equals all-standard mean over the l=0 subset") {
    std::mt19937 gen(3);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 32, v = 16;
        const auto logits = random_logits<double>(n, v, 100 + static_cast<unsigned>(trial));
        const auto lp = to_logprobs(logits, n, v);
        std::vector<TokenId> targets(n);
        std::vector<LossMode> modes(n);
        std::vector<std::uint8_t> labels(n);
        for (std::size_t i = 0; i < n; ++i) {
            targets[i] = static_cast<TokenId>(gen() % v);
            labels[i] = (gen() % 3 == 0) ? 1 : 0;
            modes[i] = labels[i] ? LossMode::Masked : LossMode::Standard;
        }
        const auto report = slung_loss(lp.data(), n, v, targets.data(), modes.data());

        // independent oracle: mean NLL over the l=0 subset
        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (labels[i] == 0) {
                sum -= lp[i * v + targets[i]];
                ++count;
            }
        }
        if (count == 0) {
            CHECK(report.total == 0.0);
        } else {
            const double expected = sum / static_cast<double>(count);
            CHECK(std::abs(report.total - expected) <= 1e-6 * std::max(1.0, std::abs(expected)));
        }
    }
}

TEST_CASE("standard gradient for uniform logits is softmax minus onehot") {
    const std::size_t v = 4;
    std::vector<double> logits(v, 0.7);  // any constant row
    const auto lp = to_logprobs(logits, 1, v);
    TokenId target = 2;
    LossMode mode = LossMode::Standard;
    std::vector<double> grad(v);
    loss_grad_at_logits(lp.data(), 1, v, &target, &mode, grad.data());
    CHECK(grad[0] == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(grad[1] == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(grad[2] == doctest::Approx(-0.75).epsilon(1e-9));
    CHECK(grad[3] == doctest::Approx(0.25).epsilon(1e-9));
}

TEST_CASE("masked rows in a mixed batch are exactly zero") {
    const std::size_t n = 5, v = 9;
    const auto logits = random_logits<double>(n, v, 4);
    const auto lp = to_logprobs(logits, n, v);
    std::vector<TokenId> targets(n, 1);
    std::vector<LossMode> modes = {LossMode::Standard, LossMode::Masked, LossMode::Unlikelihood,
                                   LossMode::Masked, LossMode::Standard};
    std::vector<double> grad(n * v);
    loss_grad_at_logits(lp.data(), n, v, targets.data(), modes.data(), grad.data());
    for (std::size_t k = 0; k < v; ++k) {
        CHECK(grad[1 * v + k] == 0.0);
        CHECK(grad[3 * v + k] == 0.0);
    }
}

TEST_CASE("gradients match central finite differences through log-softmax") {
    const std::size_t n = 5, v = 8;
    auto logits = random_logits<double>(n, v, 5);
    std::vector<TokenId> targets = {0, 3, 7, 2, 5};
    std::vector<LossMode> modes = {LossMode::Standard, LossMode::Unlikelihood, LossMode::Standard,
                                   LossMode::Unlikelihood, LossMode::Masked};

    auto loss_of = [&](const std::vector<double>& z) {
        const auto lp = to_logprobs(z, n, v);
        return slung_loss(lp.data(), n, v, targets.data(), modes.data()).total;
    };

    const auto lp = to_logprobs(logits, n, v);
    std::vector<double> analytic(n * v);
    loss_grad_at_logits(lp.data(), n, v, targets.data(), modes.data(), analytic.data());

    const double h = 1e-6;
    for (std::size_t i = 0; i < n * v; ++i) {
        auto plus = logits, minus = logits;
        plus[i] += h;
        minus[i] -= h;
        const double fd = (loss_of(plus) - loss_of(minus)) / (2 * h);
        const double denom = std::max({std::abs(fd), std::abs(analytic[i]), 1e-8});
        CHECK(std::abs(fd - analytic[i]) / denom < 1e-4);
    }
}

TEST_CASE("unlikelihood loss is strictly increasing in p(target)") {
    double prev = -1.0;
    for (double p = 0.05; p < 0.999; p += 0.05) {
        std::vector<double> lp = {std::log(p), std::log1p(-p)};
        TokenId target = 0;
        LossMode mode = LossMode::Unlikelihood;
        const double value = slung_loss(lp.data(), 1, 2, &target, &mode).total;
        CHECK(value > prev);
        prev = value;
    }
}

TEST_CASE("clamp bounds the unlikelihood value and zeroes its gradient") {
    // p(target) ~ 1: log p above the clamp threshold
    std::vector<double> lp = {-1e-9, std::log1p(-std::exp(-1e-9))};
    TokenId target = 0;
    LossMode mode = LossMode::Unlikelihood;
    const auto report = slung_loss(lp.data(), 1, 2, &target, &mode);
    const double max_value = -std::log1p(-std::exp(-kLogProbClamp));
    CHECK(report.total == doctest::Approx(max_value).epsilon(1e-12));
    CHECK(std::isfinite(report.total));

    std::vector<double> grad(2, 1.0);
    loss_grad_at_logits(lp.data(), 1, 2, &target, &mode, grad.data());
    CHECK(grad[0] == 0.0);
    CHECK(grad[1] == 0.0);
}

TEST_CASE("sum reduction skips the mean") {
    const std::size_t n = 4, v = 6;
    const auto logits = random_logits<double>(n, v, 6);
    const auto lp = to_logprobs(logits, n, v);
    std::vector<TokenId> targets(n, 2);
    std::vector<LossMode> modes(n, LossMode::Standard);
    const auto mean_report = slung_loss(lp.data(), n, v, targets.data(), modes.data());
    const auto sum_report = slung_loss(lp.data(), n, v, targets.data(), modes.data(), Reduction::Sum);
    CHECK(sum_report.total == doctest::Approx(mean_report.total * static_cast<double>(n)).epsilon(1e-12));
}

TEST_CASE("loss report audit jsonl") {
    const std::size_t n = 3, v = 4;
    const auto logits = random_logits<double>(n, v, 7);
    const auto lp = to_logprobs(logits, n, v);
    std::vector<TokenId> targets(n, 0);
    std::vector<LossMode> modes = {LossMode::Standard, LossMode::Masked, LossMode::Unlikelihood};
    const auto report = slung_loss(lp.data(), n, v, targets.data(), modes.data());

    const auto path = (std::filesystem::temp_directory_path() / "slung_loss_report.jsonl").string();
    save_loss_report_jsonl(path, report);
    std::ifstream in(path);
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) {
        if (!line.empty()) ++lines;
    }
    CHECK(lines == 3);
    std::filesystem::remove(path);
}
