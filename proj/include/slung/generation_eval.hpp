#pragma once

#include <cstdint>
#include <string>
#include <unordered_set>
#include <vector>

#include "slung/corpus.hpp"
#include "slung/model.hpp"
#include "slung/risk.hpp"

namespace slung {

// 95% normal-approximation half-width for a Bernoulli rate.
double bernoulli_ci95(double rate, std::size_t n);
// 95% half-width for a mean over independent values (sample std, n-1).
double mean_ci95(const std::vector<double>& values);

// Max sentence-span score of a continuation under the lexicon scorer.
double continuation_max_score(const std::string& continuation, const Lexicon& lexicon);

struct GenEvalReport {
    double risky_gen_rate = 0.0;  // fraction of continuations with a span above th.high
    double mean_gen_score = 0.0;
    double rate_ci95 = 0.0;
    std::size_t n_prompts = 0;
};

// Greedy-decodes each prompt and scores only the continuation. Prompts longer
// than context - max_new_tokens keep their tail.
GenEvalReport eval_risky_generation(const ModelParams<float>& params,
                                    const std::vector<std::string>& prompts, const Lexicon& lexicon,
                                    const Thresholds& th = {}, std::size_t max_new_tokens = 64);

struct ContaminationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// exp(mean next-token NLL) over all documents, every position weighted
// equally. Documents found in train_doc_hashes raise ContaminationError.
double perplexity(const ModelParams<float>& params, const std::vector<std::vector<TokenId>>& docs,
                  const std::unordered_set<std::uint64_t>& train_doc_hashes = {});

struct EntityJudgement {
    bool name_gen = false;
    bool full_correct = false;
    bool partial_correct = false;
};

// Deterministic stand-in for a judge model: whole-word name match, and
// substring matching of the gold fact strings (a partial hit must not already
// appear in the question).
EntityJudgement judge_entity_continuation(const std::string& continuation, const QaItem& qa);

struct EntityEvalReport {
    double name_gen_rate = 0.0;
    double full_correct_rate = 0.0;
    double partial_correct_rate = 0.0;
    double name_gen_ci95 = 0.0;
    double full_ci95 = 0.0;
    double partial_ci95 = 0.0;
    std::size_t n_questions = 0;
};

EntityEvalReport eval_entity_task(const ModelParams<float>& params, const std::vector<QaItem>& questions,
                                  std::size_t max_new_tokens = 64);

// ---- cross-method comparison ------------------------------------------------

struct MethodMetrics {
    std::string name;
    std::vector<double> aurocs;       // one per seed
    std::vector<double> risky_rates;  // one per seed
};

struct MethodSummary {
    std::string name;
    double auroc_mean = 0.0;
    double auroc_ci95 = 0.0;
    double rate_mean = 0.0;
    double rate_ci95 = 0.0;
    bool on_frontier = false;
};

// A method is on the frontier iff no other method is >= on AUROC and <= on
// risky rate with at least one strict inequality.
std::vector<MethodSummary> pareto_report(const std::vector<MethodMetrics>& methods);

std::string render_method_table(const std::vector<MethodSummary>& summaries);
void save_method_report_json(const std::string& path, const std::vector<MethodSummary>& summaries);
void save_tradeoff_svg(const std::string& path, const std::vector<MethodSummary>& summaries);

void save_gen_report(const std::string& path, const GenEvalReport& report);
GenEvalReport load_gen_report(const std::string& path);
void save_entity_report(const std::string& path, const EntityEvalReport& report);
EntityEvalReport load_entity_report(const std::string& path);

}  // namespace slung
