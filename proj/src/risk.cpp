#include "slung/risk.hpp"

#include <cctype>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "slung/common.hpp"

namespace slung {

RiskBucket bucket(double t, const Thresholds& th) {
    if (t < th.low) return RiskBucket::NotToxic;
    if (t > th.high) return RiskBucket::DefinitelyToxic;
    return RiskBucket::PossiblyToxic;
}

const char* loss_mode_name(LossMode m) {
    switch (m) {
        case LossMode::Standard: return "standard";
        case LossMode::Masked: return "masked";
        case LossMode::Unlikelihood: return "unlikelihood";
        case LossMode::Excluded: return "excluded";
    }
    return "?";
}

LossMode loss_mode_from_name(std::string_view name) {
    if (name == "standard") return LossMode::Standard;
    if (name == "masked") return LossMode::Masked;
    if (name == "unlikelihood") return LossMode::Unlikelihood;
    if (name == "excluded") return LossMode::Excluded;
    throw std::invalid_argument("unknown loss mode: " + std::string(name));
}

double lexicon_score(std::string_view span, const Lexicon& lexicon) {
    // Collect distinct lowercase words, then noisy-or their weights.
    std::set<std::string> words;
    std::string cur;
    for (unsigned char c : span) {
        if (std::isalnum(c)) {
            cur.push_back(static_cast<char>(std::tolower(c)));
        } else if (!cur.empty()) {
            words.insert(cur);
            cur.clear();
        }
    }
    if (!cur.empty()) words.insert(cur);

    double keep = 1.0;
    for (const auto& w : words) {
        auto it = lexicon.find(w);
        if (it != lexicon.end()) keep *= (1.0 - it->second);
    }
    return 1.0 - keep;
}

std::vector<SpanScore> sentence_spans(std::string_view doc) {
    std::vector<SpanScore> spans;
    std::size_t start = 0;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        char c = doc[i];
        if (c == '.' || c == '!' || c == '?' || c == '\n') {
            spans.push_back({start, i + 1, 0.0});
            start = i + 1;
        }
    }
    if (start < doc.size()) spans.push_back({start, doc.size(), 0.0});
    return spans;
}

std::vector<SpanScore> score_spans(std::string_view doc, const SpanScorer& scorer) {
    std::vector<SpanScore> spans = sentence_spans(doc);
    for (auto& s : spans) s.t = scorer(doc.substr(s.begin, s.end - s.begin));
    return spans;
}

static void check_partition(std::string_view doc, const std::vector<SpanScore>& spans) {
    std::size_t cursor = 0;
    for (const auto& s : spans) {
        if (s.begin != cursor || s.end <= s.begin || s.end > doc.size()) {
            throw std::invalid_argument("spans must partition the document without overlap");
        }
        cursor = s.end;
    }
    if (cursor != doc.size()) {
        throw std::invalid_argument("spans must cover the whole document");
    }
}

ProjectedTokens project_labels(std::string_view doc, const std::vector<SpanScore>& spans,
                               const LossConfig& cfg, const Thresholds& th) {
    check_partition(doc, spans);
    ProjectedTokens out;
    out.tokens.reserve(doc.size());
    for (const auto& s : spans) {
        const LossMode mode = cfg.mode_for(bucket(s.t, th));
        if (mode == LossMode::Excluded) continue;
        const std::uint8_t label = (mode == LossMode::Masked || mode == LossMode::Unlikelihood) ? 1 : 0;
        for (std::size_t i = s.begin; i < s.end; ++i) {
            out.tokens.push_back(static_cast<TokenId>(static_cast<unsigned char>(doc[i])));
            out.labels.push_back(label);
            out.modes.push_back(mode);
        }
    }
    return out;
}

std::vector<std::uint8_t> entity_labels(std::string_view doc, const std::vector<std::string>& entity_names) {
    std::vector<std::uint8_t> labels(doc.size(), 0);

    std::vector<std::string> needles;
    for (const auto& full : entity_names) {
        if (full.empty()) continue;
        needles.push_back(full);
        const auto space = full.find(' ');
        if (space != std::string::npos) {
            needles.push_back(full.substr(0, space));
            needles.push_back(full.substr(space + 1));
        }
    }

    for (const auto& needle : needles) {
        if (needle.empty()) continue;
        std::size_t pos = 0;
        while ((pos = doc.find(needle, pos)) != std::string_view::npos) {
            for (std::size_t i = pos; i < pos + needle.size(); ++i) labels[i] = 1;
            ++pos;
        }
    }
    return labels;
}

Lexicon load_lexicon(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open lexicon: " + path);
    Lexicon lex;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) {
            throw std::runtime_error("lexicon line " + std::to_string(lineno) + ": expected term<TAB>weight");
        }
        const std::string term = to_lower(line.substr(0, tab));
        const double w = std::stod(line.substr(tab + 1));
        if (w < 0.0 || w > 1.0) {
            throw std::runtime_error("lexicon line " + std::to_string(lineno) + ": weight out of [0,1]");
        }
        lex[term] = w;
    }
    return lex;
}

void save_lexicon(const std::string& path, const Lexicon& lexicon) {
    std::ostringstream ss;
    for (const auto& [term, w] : lexicon) {
        ss << term << '\t' << w << '\n';
    }
    write_file(path, ss.str());
}

void save_labeled_jsonl(const std::string& path, const std::vector<LabeledText>& docs) {
    std::ostringstream ss;
    for (const auto& d : docs) {
        nlohmann::json j;
        j["text"] = d.text;
        auto spans = nlohmann::json::array();
        for (const auto& s : d.spans) spans.push_back({s.begin, s.end, s.t});
        j["spans"] = spans;
        if (!d.entity_names.empty()) j["entity_names"] = d.entity_names;
        ss << j.dump() << '\n';
    }
    write_file(path, ss.str());
}

std::vector<LabeledText> load_labeled_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open labeled jsonl: " + path);
    std::vector<LabeledText> docs;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto j = nlohmann::json::parse(line);
        LabeledText d;
        d.text = j.at("text").get<std::string>();
        for (const auto& s : j.at("spans")) {
            d.spans.push_back({s.at(0).get<std::size_t>(), s.at(1).get<std::size_t>(), s.at(2).get<double>()});
        }
        if (j.contains("entity_names")) d.entity_names = j["entity_names"].get<std::vector<std::string>>();
        docs.push_back(std::move(d));
    }
    return docs;
}

}  // namespace slung
