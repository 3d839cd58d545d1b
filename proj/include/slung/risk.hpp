#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "slung/tokenizer.hpp"

namespace slung {

// Half-open byte range with a risk score. Spans of one document are
// non-overlapping and cover it completely.
struct SpanScore {
    std::size_t begin = 0;
    std::size_t end = 0;  // exclusive
    double t = 0.0;       // in [0,1]
};

enum class RiskBucket : std::uint8_t { NotToxic = 0, PossiblyToxic = 1, DefinitelyToxic = 2 };

struct Thresholds {
    double low = 1e-4;
    double high = 0.99;
};

// t exactly at a threshold lands in the middle bucket.
RiskBucket bucket(double t, const Thresholds& th);

// Per-token training treatment. The numeric values of the first three are the
// on-disk shard codes; Excluded never reaches a shard.
enum class LossMode : std::uint8_t { Standard = 0, Masked = 1, Unlikelihood = 2, Excluded = 3 };

const char* loss_mode_name(LossMode m);
LossMode loss_mode_from_name(std::string_view name);

struct LossConfig {
    LossMode not_toxic = LossMode::Standard;
    LossMode possibly_toxic = LossMode::Standard;
    LossMode definitely_toxic = LossMode::Standard;

    LossMode mode_for(RiskBucket b) const {
        switch (b) {
            case RiskBucket::PossiblyToxic: return possibly_toxic;
            case RiskBucket::DefinitelyToxic: return definitely_toxic;
            default: return not_toxic;
        }
    }
};

// term -> weight in [0,1]; keys stored lowercase
using Lexicon = std::map<std::string, double>;

// Noisy-or over distinct matched terms: t = 1 - prod(1 - w).
// Case-insensitive whole-word matching.
double lexicon_score(std::string_view span, const Lexicon& lexicon);

using SpanScorer = std::function<double(std::string_view)>;

// Sentence spans: break after '.', '!', '?', '\n'; trailing text forms a
// final span. The spans partition the document.
std::vector<SpanScore> sentence_spans(std::string_view doc);
std::vector<SpanScore> score_spans(std::string_view doc, const SpanScorer& scorer);

// A document after span modes are applied: Excluded spans are dropped, every
// surviving token carries its label and mode.
struct ProjectedTokens {
    std::vector<TokenId> tokens;
    std::vector<std::uint8_t> labels;  // l_i in {0,1}
    std::vector<LossMode> modes;
};

// Throws std::invalid_argument if the spans do not partition the document.
ProjectedTokens project_labels(std::string_view doc, const std::vector<SpanScore>& spans,
                               const LossConfig& cfg, const Thresholds& th);

// l_i = 1 for bytes inside any case-sensitive occurrence of a full entity
// name, its first name, or its last name.
std::vector<std::uint8_t> entity_labels(std::string_view doc, const std::vector<std::string>& entity_names);

// Lexicon file: one "term<TAB>weight" per line.
Lexicon load_lexicon(const std::string& path);
void save_lexicon(const std::string& path, const Lexicon& lexicon);

// Labeled-document JSONL: {"text":..., "spans":[[begin,end,t],...], "entity_names":[...]}
struct LabeledText {
    std::string text;
    std::vector<SpanScore> spans;
    std::vector<std::string> entity_names;
};

void save_labeled_jsonl(const std::string& path, const std::vector<LabeledText>& docs);
std::vector<LabeledText> load_labeled_jsonl(const std::string& path);

}  // namespace slung
