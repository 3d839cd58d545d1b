#include "slung/generation_eval.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"
#include "slung/common.hpp"
#include "slung/selective_loss.hpp"

namespace slung {

double bernoulli_ci95(double rate, std::size_t n) {
    if (n == 0) return 0.0;
    return 1.96 * std::sqrt(rate * (1.0 - rate) / static_cast<double>(n));
}

double mean_ci95(const std::vector<double>& values) {
    const std::size_t n = values.size();
    if (n < 2) return 0.0;
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(n - 1);
    return 1.96 * std::sqrt(var / static_cast<double>(n));
}

double continuation_max_score(const std::string& continuation, const Lexicon& lexicon) {
    if (continuation.empty()) return 0.0;
    double best = 0.0;
    for (const auto& span : sentence_spans(continuation)) {
        best = std::max(best, lexicon_score(
                                  std::string_view(continuation).substr(span.begin, span.end - span.begin),
                                  lexicon));
    }
    return best;
}

GenEvalReport eval_risky_generation(const ModelParams<float>& params,
                                    const std::vector<std::string>& prompts, const Lexicon& lexicon,
                                    const Thresholds& th, std::size_t max_new_tokens) {
    GenEvalReport report;
    report.n_prompts = prompts.size();
    if (prompts.empty()) return report;

    const std::size_t max_prompt = params.cfg.context_len > max_new_tokens
                                       ? params.cfg.context_len - max_new_tokens
                                       : params.cfg.context_len;
    std::size_t n_risky = 0;
    double score_sum = 0.0;
    for (const auto& prompt : prompts) {
        std::vector<TokenId> tokens = encode(prompt);
        if (tokens.size() > max_prompt) {
            tokens.erase(tokens.begin(), tokens.end() - static_cast<std::ptrdiff_t>(max_prompt));
        }
        const std::vector<TokenId> out = greedy_decode(params, tokens, max_new_tokens);
        const std::vector<TokenId> continuation(out.begin() + static_cast<std::ptrdiff_t>(tokens.size()),
                                                out.end());
        const double score = continuation_max_score(decode(continuation), lexicon);
        score_sum += score;
        if (score > th.high) ++n_risky;
    }
    report.risky_gen_rate = static_cast<double>(n_risky) / static_cast<double>(prompts.size());
    report.mean_gen_score = score_sum / static_cast<double>(prompts.size());
    report.rate_ci95 = bernoulli_ci95(report.risky_gen_rate, prompts.size());
    return report;
}

double perplexity(const ModelParams<float>& params, const std::vector<std::vector<TokenId>>& docs,
                  const std::unordered_set<std::uint64_t>& train_doc_hashes) {
    if (docs.empty()) throw std::invalid_argument("perplexity: empty document set");

    const std::size_t T = params.cfg.context_len;
    Activations<float> acts;
    double total_nll = 0.0;
    std::size_t count = 0;
    for (const auto& doc : docs) {
        if (!train_doc_hashes.empty() && train_doc_hashes.count(doc_hash(doc)) > 0) {
            throw ContaminationError("perplexity: document overlaps the training set");
        }
        for (std::size_t off = 0; off < doc.size(); off += T) {
            const std::size_t len = std::min(T, doc.size() - off);
            if (len < 2) continue;
            std::vector<TokenId> chunk(doc.begin() + static_cast<std::ptrdiff_t>(off),
                                       doc.begin() + static_cast<std::ptrdiff_t>(off + len));
            forward(params, chunk, 1, static_cast<int>(len), acts);
            for (std::size_t i = 0; i + 1 < len; ++i) {
                total_nll -= static_cast<double>(
                    acts.logprobs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(chunk[i + 1])));
                ++count;
            }
        }
    }
    if (count == 0) throw std::invalid_argument("perplexity: no scoreable positions");
    return std::exp(total_nll / static_cast<double>(count));
}

EntityJudgement judge_entity_continuation(const std::string& continuation, const QaItem& qa) {
    EntityJudgement j;
    j.name_gen = contains_word_ci(continuation, qa.first_name) ||
                 contains_word_ci(continuation, qa.last_name);
    j.full_correct = !qa.gold.empty();
    for (const auto& g : qa.gold) {
        const bool present = contains_ci(continuation, g);
        if (!present) j.full_correct = false;
        if (present && !contains_ci(qa.question, g)) j.partial_correct = true;
    }
    return j;
}

EntityEvalReport eval_entity_task(const ModelParams<float>& params, const std::vector<QaItem>& questions,
                                  std::size_t max_new_tokens) {
    EntityEvalReport report;
    report.n_questions = questions.size();
    if (questions.empty()) return report;

    const std::size_t max_prompt = params.cfg.context_len > max_new_tokens
                                       ? params.cfg.context_len - max_new_tokens
                                       : params.cfg.context_len;
    std::size_t n_name = 0, n_full = 0, n_partial = 0;
    for (const auto& qa : questions) {
        std::vector<TokenId> tokens = encode(qa.question + " ");
        if (tokens.size() > max_prompt) {
            tokens.erase(tokens.begin(), tokens.end() - static_cast<std::ptrdiff_t>(max_prompt));
        }
        const std::vector<TokenId> out = greedy_decode(params, tokens, max_new_tokens);
        const std::vector<TokenId> continuation(out.begin() + static_cast<std::ptrdiff_t>(tokens.size()),
                                                out.end());
        const EntityJudgement judgement = judge_entity_continuation(decode(continuation), qa);
        n_name += judgement.name_gen ? 1 : 0;
        n_full += judgement.full_correct ? 1 : 0;
        n_partial += judgement.partial_correct ? 1 : 0;
    }
    const auto n = static_cast<double>(questions.size());
    report.name_gen_rate = static_cast<double>(n_name) / n;
    report.full_correct_rate = static_cast<double>(n_full) / n;
    report.partial_correct_rate = static_cast<double>(n_partial) / n;
    report.name_gen_ci95 = bernoulli_ci95(report.name_gen_rate, questions.size());
    report.full_ci95 = bernoulli_ci95(report.full_correct_rate, questions.size());
    report.partial_ci95 = bernoulli_ci95(report.partial_correct_rate, questions.size());
    return report;
}

std::vector<MethodSummary> pareto_report(const std::vector<MethodMetrics>& methods) {
    std::vector<MethodSummary> out;
    for (const auto& m : methods) {
        MethodSummary s;
        s.name = m.name;
        double a = 0.0, r = 0.0;
        for (double v : m.aurocs) a += v;
        for (double v : m.risky_rates) r += v;
        s.auroc_mean = m.aurocs.empty() ? 0.0 : a / static_cast<double>(m.aurocs.size());
        s.rate_mean = m.risky_rates.empty() ? 0.0 : r / static_cast<double>(m.risky_rates.size());
        s.auroc_ci95 = mean_ci95(m.aurocs);
        s.rate_ci95 = mean_ci95(m.risky_rates);
        out.push_back(s);
    }
    for (auto& s : out) {
        bool dominated = false;
        for (const auto& other : out) {
            if (&other == &s) continue;
            const bool geq_auroc = other.auroc_mean >= s.auroc_mean;
            const bool leq_rate = other.rate_mean <= s.rate_mean;
            const bool strict = other.auroc_mean > s.auroc_mean || other.rate_mean < s.rate_mean;
            if (geq_auroc && leq_rate && strict) {
                dominated = true;
                break;
            }
        }
        s.on_frontier = !dominated;
    }
    return out;
}

std::string render_method_table(const std::vector<MethodSummary>& summaries) {
    std::ostringstream ss;
    ss << "method               probe_auroc        risky_gen_rate     frontier\n";
    ss << "-------------------  -----------------  -----------------  --------\n";
    char buf[128];
    for (const auto& s : summaries) {
        std::snprintf(buf, sizeof(buf), "%-19s  %.4f +/- %.4f  %.4f +/- %.4f  %s\n", s.name.c_str(),
                      s.auroc_mean, s.auroc_ci95, s.rate_mean, s.rate_ci95,
                      s.on_frontier ? "yes" : "no");
        ss << buf;
    }
    return ss.str();
}

void save_method_report_json(const std::string& path, const std::vector<MethodSummary>& summaries) {
    auto arr = nlohmann::json::array();
    for (const auto& s : summaries) {
        arr.push_back({{"method", s.name},
                       {"auroc_mean", s.auroc_mean},
                       {"auroc_ci95", s.auroc_ci95},
                       {"risky_gen_rate_mean", s.rate_mean},
                       {"risky_gen_rate_ci95", s.rate_ci95},
                       {"on_frontier", s.on_frontier}});
    }
    write_file(path, arr.dump(2) + "\n");
}

void save_tradeoff_svg(const std::string& path, const std::vector<MethodSummary>& summaries) {
    const int width = 560, height = 420, margin = 60;
    double max_rate = 0.05;
    for (const auto& s : summaries) max_rate = std::max(max_rate, s.rate_mean + s.rate_ci95);
    max_rate = std::min(1.0, max_rate * 1.15);

    auto sx = [&](double auroc) {
        return margin + (auroc - 0.4) / 0.6 * (width - 2 * margin);
    };
    auto sy = [&](double rate) { return height - margin - rate / max_rate * (height - 2 * margin); };

    std::ostringstream ss;
    ss << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\">\n";
    ss << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    ss << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\"" << width - margin
       << "\" y2=\"" << height - margin << "\" stroke=\"black\"/>\n";
    ss << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin << "\" y2=\""
       << height - margin << "\" stroke=\"black\"/>\n";
    ss << "<text x=\"" << width / 2 << "\" y=\"" << height - 15
       << "\" text-anchor=\"middle\" font-size=\"13\">probe AUROC (understanding)</text>\n";
    ss << "<text x=\"18\" y=\"" << height / 2
       << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 " << height / 2
       << ")\">risky generation rate</text>\n";
    for (const auto& s : summaries) {
        const double x = sx(s.auroc_mean);
        const double y = sy(s.rate_mean);
        const char* color = s.on_frontier ? "orange" : "steelblue";
        ss << "<line x1=\"" << sx(s.auroc_mean - s.auroc_ci95) << "\" y1=\"" << y << "\" x2=\""
           << sx(s.auroc_mean + s.auroc_ci95) << "\" y2=\"" << y << "\" stroke=\"" << color << "\"/>\n";
        ss << "<line x1=\"" << x << "\" y1=\"" << sy(std::max(0.0, s.rate_mean - s.rate_ci95))
           << "\" x2=\"" << x << "\" y2=\"" << sy(std::min(max_rate, s.rate_mean + s.rate_ci95))
           << "\" stroke=\"" << color << "\"/>\n";
        ss << "<circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"5\" fill=\"" << color << "\"/>\n";
        ss << "<text x=\"" << x + 8 << "\" y=\"" << y - 8 << "\" font-size=\"12\">" << s.name
           << "</text>\n";
    }
    ss << "</svg>\n";
    write_file(path, ss.str());
}

void save_gen_report(const std::string& path, const GenEvalReport& report) {
    nlohmann::json j;
    j["risky_gen_rate"] = report.risky_gen_rate;
    j["mean_gen_score"] = report.mean_gen_score;
    j["rate_ci95"] = report.rate_ci95;
    j["n_prompts"] = report.n_prompts;
    write_file(path, j.dump(2) + "\n");
}

GenEvalReport load_gen_report(const std::string& path) {
    const auto j = nlohmann::json::parse(read_file(path));
    GenEvalReport r;
    r.risky_gen_rate = j.at("risky_gen_rate").get<double>();
    r.mean_gen_score = j.at("mean_gen_score").get<double>();
    r.rate_ci95 = j.at("rate_ci95").get<double>();
    r.n_prompts = j.at("n_prompts").get<std::size_t>();
    return r;
}

void save_entity_report(const std::string& path, const EntityEvalReport& report) {
    nlohmann::json j;
    j["name_gen_rate"] = report.name_gen_rate;
    j["full_correct_rate"] = report.full_correct_rate;
    j["partial_correct_rate"] = report.partial_correct_rate;
    j["name_gen_ci95"] = report.name_gen_ci95;
    j["full_ci95"] = report.full_ci95;
    j["partial_ci95"] = report.partial_ci95;
    j["n_questions"] = report.n_questions;
    write_file(path, j.dump(2) + "\n");
}

EntityEvalReport load_entity_report(const std::string& path) {
    const auto j = nlohmann::json::parse(read_file(path));
    EntityEvalReport r;
    r.name_gen_rate = j.at("name_gen_rate").get<double>();
    r.full_correct_rate = j.at("full_correct_rate").get<double>();
    r.partial_correct_rate = j.at("partial_correct_rate").get<double>();
    r.name_gen_ci95 = j.at("name_gen_ci95").get<double>();
    r.full_ci95 = j.at("full_ci95").get<double>();
    r.partial_ci95 = j.at("partial_ci95").get<double>();
    r.n_questions = j.at("n_questions").get<std::size_t>();
    return r;
}

}  // namespace slung
