#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "slung/risk.hpp"
#include "slung/tokenizer.hpp"

namespace slung {

// Token-level training document. labels/modes stay aligned with tokens;
// l_i = 1 exactly when the mode is Masked or Unlikelihood.
struct LabeledDocument {
    enum class Source : std::uint8_t { Base, InjectedRisky, Entity };
    std::vector<TokenId> tokens;
    std::vector<std::uint8_t> labels;
    std::vector<LossMode> modes;
    Source source = Source::Base;
};

// Generated text plus its span scores under the default lexicon.
struct CorpusDoc {
    std::string text;
    std::vector<SpanScore> spans;
    std::vector<std::string> entity_names;
    LabeledDocument::Source source = LabeledDocument::Source::Base;

    LabeledDocument project(const LossConfig& cfg, const Thresholds& th) const;
    // For entity documents: name bytes take high_risk_mode, the rest Standard.
    LabeledDocument project_entity(LossMode high_risk_mode) const;
};

struct InjectionPlan {
    double injection_rate = 0.05;
    std::uint64_t rng_seed = 0;
};

struct EntityProfile {
    std::string first_name;
    std::string last_name;
    // keys: genre, birthplace, award, book_title
    std::vector<std::pair<std::string, std::string>> attributes;

    std::string full_name() const { return first_name + " " + last_name; }
    const std::string& attribute(const std::string& key) const;
};

struct QaItem {
    std::string question;
    std::string attribute;
    std::vector<std::string> gold;  // every string must appear for "full correct"
    std::string first_name;
    std::string last_name;
};

struct EntityCorpus {
    std::vector<CorpusDoc> train_answers;
    std::vector<QaItem> questions;
    std::vector<EntityProfile> profiles;
};

// Built-in scorer vocabulary: definite insults near 1, hedged ones at 0.5.
const Lexicon& default_lexicon();

// Fixed insult -> cue-noun pairing. Each risky document ends with a cue
// sentence whose final word is the pair of its insult, so the cue token is
// predictable only from the risky span.
const std::vector<std::pair<std::string, std::string>>& insult_cue_pairs();
std::string cue_word_for(const std::string& insult);

// Clean template-grammar documents; no lexicon or cue vocabulary.
std::vector<CorpusDoc> gen_base_corpus(std::size_t n_docs, std::uint64_t seed);

// Forum-domain documents with possibly-toxic and definitely-toxic sentences
// followed by the paired cue sentence.
std::vector<CorpusDoc> gen_risky_corpus(std::size_t n_docs, std::uint64_t seed);

// Same forum templates with neutral slot words; no span scores above 0.
std::vector<CorpusDoc> gen_matched_clean_corpus(std::size_t n_docs, std::uint64_t seed);

// Each base document is independently replaced with probability
// plan.injection_rate by the next unused risky document. Output order equals
// base order. Throws if the risky pool cannot cover the expected draw.
std::vector<CorpusDoc> inject_documents(const std::vector<CorpusDoc>& base,
                                        const std::vector<CorpusDoc>& risky, const InjectionPlan& plan);

// Synthetic author profiles. Train docs are answer sentences mentioning the
// entity by name; questions are kept separate for evaluation only.
EntityCorpus gen_entity_corpus(std::size_t n_entities, std::size_t facts_per_entity, std::uint64_t seed);

// Prefix of a risky document ending just before its last definitely-toxic
// span; nullopt when the document has none.
std::optional<std::string> risky_prompt_prefix(const CorpusDoc& doc, const Thresholds& th = {});

// Fixed-length training sequences: documents joined by EOS, chunked, the tail
// PAD-filled with Masked mode.
struct PackedSequences {
    std::uint32_t context_len = 0;
    std::uint64_t n_seqs = 0;
    std::vector<TokenId> tokens;   // n_seqs * context_len
    std::vector<LossMode> modes;   // aligned with tokens
};

PackedSequences pack_sequences(const std::vector<LabeledDocument>& docs, std::uint32_t context_len);

// Shard file: "SLNG", version, contextLen, nSeqs, then per sequence
// contextLen u32 token ids and contextLen u8 mode codes, little-endian.
void write_shard(const std::string& path, const PackedSequences& packed);
PackedSequences read_shard(const std::string& path);

std::uint64_t doc_hash(const std::vector<TokenId>& tokens);
void save_doc_hashes(const std::string& path, const std::vector<std::uint64_t>& hashes);
std::vector<std::uint64_t> load_doc_hashes(const std::string& path);

void save_qa_jsonl(const std::string& path, const std::vector<QaItem>& items);
std::vector<QaItem> load_qa_jsonl(const std::string& path);

void save_prompts_jsonl(const std::string& path, const std::vector<std::string>& prompts);
std::vector<std::string> load_prompts_jsonl(const std::string& path);

}  // namespace slung
