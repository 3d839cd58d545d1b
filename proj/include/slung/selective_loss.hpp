#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "slung/risk.hpp"
#include "slung/tokenizer.hpp"

namespace slung {

// log p is clamped to <= -kLogProbClamp before the unlikelihood log1p, which
// bounds the per-token value at -log1p(-exp(-kLogProbClamp)).
inline constexpr double kLogProbClamp = 1e-6;

enum class Reduction : std::uint8_t {
    MeanNonMasked,  // default: total = mean over non-Masked positions
    Sum,
};

struct TokenLossReport {
    struct Entry {
        LossMode mode;
        double value;
        bool included;  // contributes to total / gradient
    };
    std::vector<Entry> entries;
    double total = 0.0;
    std::size_t n_standard = 0;
    std::size_t n_masked = 0;
    std::size_t n_unlikelihood = 0;

    std::size_t included_count() const { return n_standard + n_unlikelihood; }
};

// Per-token values given log-probabilities:
//   Standard      -log p(target)
//   Masked        0, excluded from total and gradient
//   Unlikelihood  -log(1 - p(target)), via -log1p(-exp(min(log p, -eps)))
// An all-Masked batch yields total 0 (no division by zero).
template <typename T>
TokenLossReport slung_loss(const T* logprobs, std::size_t n_positions, std::size_t vocab,
                           const TokenId* targets, const LossMode* modes,
                           Reduction reduction = Reduction::MeanNonMasked) {
    TokenLossReport report;
    report.entries.reserve(n_positions);
    double sum = 0.0;
    for (std::size_t i = 0; i < n_positions; ++i) {
        const LossMode mode = modes[i];
        const double lp = static_cast<double>(logprobs[i * vocab + targets[i]]);
        double value = 0.0;
        bool included = true;
        switch (mode) {
            case LossMode::Standard:
                value = -lp;
                ++report.n_standard;
                break;
            case LossMode::Unlikelihood:
                value = -std::log1p(-std::exp(std::min(lp, -kLogProbClamp)));
                ++report.n_unlikelihood;
                break;
            case LossMode::Masked:
            default:
                value = 0.0;
                included = false;
                ++report.n_masked;
                break;
        }
        if (included) sum += value;
        report.entries.push_back({mode, value, included});
    }
    const std::size_t n = report.included_count();
    if (reduction == Reduction::MeanNonMasked) {
        report.total = n > 0 ? sum / static_cast<double>(n) : 0.0;
    } else {
        report.total = sum;
    }
    return report;
}

// Gradient of the reduced loss w.r.t. logits, written to dlogits (same layout
// as logprobs). Masked rows are exactly zero.
template <typename T>
void loss_grad_at_logits(const T* logprobs, std::size_t n_positions, std::size_t vocab,
                         const TokenId* targets, const LossMode* modes, T* dlogits,
                         Reduction reduction = Reduction::MeanNonMasked) {
    std::size_t n_included = 0;
    for (std::size_t i = 0; i < n_positions; ++i) {
        if (modes[i] != LossMode::Masked) ++n_included;
    }
    const T scale = (reduction == Reduction::MeanNonMasked && n_included > 0)
                        ? static_cast<T>(1.0 / static_cast<double>(n_included))
                        : static_cast<T>(reduction == Reduction::MeanNonMasked ? 0.0 : 1.0);

    using ArrayMap = Eigen::Map<Eigen::Array<T, Eigen::Dynamic, 1>>;
    using ConstArrayMap = Eigen::Map<const Eigen::Array<T, Eigen::Dynamic, 1>>;
    const auto v = static_cast<Eigen::Index>(vocab);
    for (std::size_t i = 0; i < n_positions; ++i) {
        ConstArrayMap lp(logprobs + i * vocab, v);
        ArrayMap g(dlogits + i * vocab, v);
        const LossMode mode = modes[i];
        const TokenId tgt = targets[i];
        if (mode == LossMode::Masked) {
            g.setZero();
            continue;
        }
        if (mode == LossMode::Standard) {
            // d(-log p_t)/dz_k = p_k - 1[k=t]
            g = lp.exp() * scale;
            g(static_cast<Eigen::Index>(tgt)) -= scale;
            continue;
        }
        // Unlikelihood: d(-log(1-p_t))/dz_k = p_t (1[k=t] - p_k) / (1-p_t).
        // In the clamp region the forward value is constant, so the gradient
        // is zero there.
        const double lpt = static_cast<double>(lp(static_cast<Eigen::Index>(tgt)));
        if (lpt >= -kLogProbClamp) {
            g.setZero();
            continue;
        }
        const double pt = std::exp(lpt);
        const T ratio = static_cast<T>(pt / (-std::expm1(lpt)));  // p_t / (1 - p_t)
        g = lp.exp() * (-ratio * scale);
        g(static_cast<Eigen::Index>(tgt)) += ratio * scale;
    }
}

// Audit trail: one JSONL row per position with {position, mode, loss}.
void save_loss_report_jsonl(const std::string& path, const TokenLossReport& report);

}  // namespace slung
