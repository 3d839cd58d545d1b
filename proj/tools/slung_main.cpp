// slung: corpus generation, selective-loss training, and evaluation tools.

#include <filesystem>
#include <iostream>
#include <map>
#include <unordered_set>

#include "CLI11.hpp"
#include "json.hpp"
#include "slung/common.hpp"
#include "slung/corpus.hpp"
#include "slung/generation_eval.hpp"
#include "slung/model.hpp"
#include "slung/probe.hpp"
#include "slung/risk.hpp"
#include "slung/selective_loss.hpp"
#include "slung/tokenizer.hpp"
#include "slung/trainer.hpp"

namespace fs = std::filesystem;
using namespace slung;

namespace {

std::vector<LabeledText> to_labeled(const std::vector<CorpusDoc>& docs) {
    std::vector<LabeledText> out;
    out.reserve(docs.size());
    for (const auto& d : docs) out.push_back({d.text, d.spans, d.entity_names});
    return out;
}

std::vector<CorpusDoc> from_labeled(const std::vector<LabeledText>& docs,
                                    LabeledDocument::Source source) {
    std::vector<CorpusDoc> out;
    out.reserve(docs.size());
    for (const auto& d : docs) out.push_back({d.text, d.spans, d.entity_names, source});
    return out;
}

std::vector<std::vector<TokenId>> encode_docs(const std::vector<LabeledText>& docs) {
    std::vector<std::vector<TokenId>> out;
    out.reserve(docs.size());
    for (const auto& d : docs) out.push_back(encode(d.text));
    return out;
}

std::vector<std::string> collect_shard_paths(const std::string& shards_arg) {
    std::vector<std::string> paths;
    if (fs::is_directory(shards_arg)) {
        for (const auto& entry : fs::directory_iterator(shards_arg)) {
            if (entry.path().extension() == ".slng") paths.push_back(entry.path().string());
        }
        std::sort(paths.begin(), paths.end());
    } else {
        paths.push_back(shards_arg);
    }
    if (paths.empty()) throw std::runtime_error("no .slng shards under " + shards_arg);
    return paths;
}

int cmd_gen_data(const std::string& out_dir, std::uint64_t seed, std::size_t base_docs,
                 std::size_t risky_docs, std::size_t heldout_docs, std::size_t entities,
                 std::size_t facts, std::size_t n_prompts) {
    fs::create_directories(out_dir);
    save_lexicon(out_dir + "/lexicon.tsv", default_lexicon());

    const auto base = gen_base_corpus(base_docs, seed);
    const auto risky = gen_risky_corpus(risky_docs, seed + 1);
    save_labeled_jsonl(out_dir + "/base.jsonl", to_labeled(base));
    save_labeled_jsonl(out_dir + "/risky.jsonl", to_labeled(risky));

    // held-out pools draw from disjoint seeds
    save_labeled_jsonl(out_dir + "/heldout_base.jsonl", to_labeled(gen_base_corpus(heldout_docs, seed + 1000)));
    save_labeled_jsonl(out_dir + "/heldout_clean.jsonl",
                       to_labeled(gen_matched_clean_corpus(heldout_docs, seed + 2000)));
    const auto heldout_risky = gen_risky_corpus(std::max(heldout_docs, n_prompts), seed + 3000);
    save_labeled_jsonl(out_dir + "/heldout_risky.jsonl", to_labeled(heldout_risky));

    std::vector<std::string> prompts;
    for (const auto& doc : heldout_risky) {
        if (prompts.size() >= n_prompts) break;
        if (auto p = risky_prompt_prefix(doc)) prompts.push_back(*p);
    }
    save_prompts_jsonl(out_dir + "/prompts.jsonl", prompts);

    if (entities > 0) {
        const auto entity = gen_entity_corpus(entities, facts, seed + 4000);
        save_labeled_jsonl(out_dir + "/entity_train.jsonl", to_labeled(entity.train_answers));
        save_qa_jsonl(out_dir + "/qa.jsonl", entity.questions);
    }
    std::cout << "wrote corpus files to " << out_dir << "\n";
    return 0;
}

int cmd_pack(const std::string& data_dir, const std::string& config_path, const std::string& out_shard,
             double inject_rate, std::uint64_t inject_seed) {
    const RunFileConfig cfg = parse_run_config(config_path);
    const auto base = from_labeled(load_labeled_jsonl(data_dir + "/base.jsonl"),
                                   LabeledDocument::Source::Base);
    std::vector<CorpusDoc> stream = base;
    if (inject_rate > 0.0) {
        const auto risky = from_labeled(load_labeled_jsonl(data_dir + "/risky.jsonl"),
                                        LabeledDocument::Source::InjectedRisky);
        stream = inject_documents(base, risky, {inject_rate, inject_seed});
    }

    Thresholds th;
    std::vector<LabeledDocument> projected;
    std::vector<std::uint64_t> hashes;
    projected.reserve(stream.size());
    for (const auto& doc : stream) {
        projected.push_back(doc.project(cfg.loss, th));
        hashes.push_back(doc_hash(encode(doc.text)));
    }
    const auto packed = pack_sequences(projected, cfg.model.context_len);
    write_shard(out_shard, packed);
    save_doc_hashes(out_shard + ".hashes", hashes);
    std::cout << "packed " << packed.n_seqs << " sequences to " << out_shard << "\n";
    return 0;
}

int cmd_pack_entity(const std::string& data_dir, const std::string& config_path,
                    const std::string& out_shard, const std::string& name_mode) {
    const RunFileConfig cfg = parse_run_config(config_path);
    const auto docs = from_labeled(load_labeled_jsonl(data_dir + "/entity_train.jsonl"),
                                   LabeledDocument::Source::Entity);
    const LossMode mode = loss_mode_from_name(name_mode);
    std::vector<LabeledDocument> projected;
    std::vector<std::uint64_t> hashes;
    for (const auto& doc : docs) {
        projected.push_back(doc.project_entity(mode));
        hashes.push_back(doc_hash(encode(doc.text)));
    }
    const auto packed = pack_sequences(projected, cfg.model.context_len);
    write_shard(out_shard, packed);
    save_doc_hashes(out_shard + ".hashes", hashes);
    std::cout << "packed " << packed.n_seqs << " entity sequences to " << out_shard << "\n";
    return 0;
}

int cmd_train(const std::string& config_path, const std::string& shards_arg, const std::string& out_dir,
              std::uint64_t seed, bool sequential, const std::string& init_ckpt,
              const std::string& method) {
    RunFileConfig cfg = parse_run_config(config_path);
    cfg.train.seed = seed;
    cfg.train.sequential = sequential;

    const auto paths = collect_shard_paths(shards_arg);
    std::vector<PackedSequences> shards;
    for (const auto& p : paths) shards.push_back(read_shard(p));

    fs::create_directories(out_dir);
    ModelParams<float> init;
    const ModelParams<float>* init_ptr = nullptr;
    if (!init_ckpt.empty()) {
        init = load_checkpoint(init_ckpt);
        init_ptr = &init;
    }

    const auto result = train_run(cfg.model, cfg.train, shards, out_dir, init_ptr, paths);

    nlohmann::json meta;
    meta["method"] = method;
    meta["seed"] = seed;
    meta["config"] = config_path;
    write_file(out_dir + "/meta.json", meta.dump(2) + "\n");

    std::cout << "trained " << cfg.train.steps << " steps; final loss "
              << (result.manifest.steps.empty() ? 0.0 : result.manifest.steps.back().loss) << "\n";
    return 0;
}

int cmd_probe(const std::string& ckpt, const std::string& pos_path, const std::string& neg_path,
              const std::string& out_path, std::size_t train_per_class, std::size_t test_per_class,
              std::uint64_t seed, int splits) {
    const auto params = load_checkpoint(ckpt);
    const auto pos_docs = encode_docs(load_labeled_jsonl(pos_path));
    const auto neg_docs = encode_docs(load_labeled_jsonl(neg_path));
    const auto pos_features = extract_features(params, pos_docs);
    const auto neg_features = extract_features(params, neg_docs);
    const auto report =
        probe_auroc_report(pos_features, neg_features, train_per_class, test_per_class, seed, splits);
    save_probe_report(out_path, report);
    std::cout << "probe auroc mean " << report.auroc_mean << " over " << splits << " splits\n";
    return 0;
}

int cmd_eval_gen(const std::string& ckpt, const std::string& prompts_path, const std::string& lexicon_path,
                 const std::string& out_path, std::size_t max_new) {
    const auto params = load_checkpoint(ckpt);
    const auto prompts = load_prompts_jsonl(prompts_path);
    const Lexicon lexicon = lexicon_path.empty() ? default_lexicon() : load_lexicon(lexicon_path);
    const auto report = eval_risky_generation(params, prompts, lexicon, {}, max_new);
    save_gen_report(out_path, report);
    std::cout << "risky generation rate " << report.risky_gen_rate << " over " << report.n_prompts
              << " prompts\n";
    return 0;
}

int cmd_perplexity(const std::string& ckpt, const std::string& docs_path, const std::string& hashes_path,
                   const std::string& out_path) {
    const auto params = load_checkpoint(ckpt);
    const auto docs = encode_docs(load_labeled_jsonl(docs_path));
    std::unordered_set<std::uint64_t> train_hashes;
    if (!hashes_path.empty()) {
        for (auto h : load_doc_hashes(hashes_path)) train_hashes.insert(h);
    }
    const double ppl = perplexity(params, docs, train_hashes);
    if (!out_path.empty()) {
        nlohmann::json j;
        j["perplexity"] = ppl;
        j["n_docs"] = docs.size();
        write_file(out_path, j.dump(2) + "\n");
    }
    std::cout << "perplexity " << ppl << " over " << docs.size() << " docs\n";
    return 0;
}

int cmd_eval_entity(const std::string& ckpt, const std::string& qa_path, const std::string& out_path,
                    std::size_t max_new) {
    const auto params = load_checkpoint(ckpt);
    const auto questions = load_qa_jsonl(qa_path);
    const auto report = eval_entity_task(params, questions, max_new);
    save_entity_report(out_path, report);
    std::cout << "name_gen " << report.name_gen_rate << "  full " << report.full_correct_rate
              << "  partial " << report.partial_correct_rate << "\n";
    return 0;
}

int cmd_report(const std::vector<std::string>& run_dirs, const std::string& out_path,
               const std::string& table_path, const std::string& svg_path) {
    std::map<std::string, MethodMetrics> by_method;
    for (const auto& dir : run_dirs) {
        const auto meta = nlohmann::json::parse(read_file(dir + "/meta.json"));
        const std::string method = meta.at("method").get<std::string>();
        auto& metrics = by_method[method];
        metrics.name = method;
        metrics.aurocs.push_back(load_probe_report(dir + "/probe_report.json").auroc_mean);
        metrics.risky_rates.push_back(load_gen_report(dir + "/gen_report.json").risky_gen_rate);
    }
    std::vector<MethodMetrics> methods;
    for (auto& [name, m] : by_method) methods.push_back(std::move(m));
    const auto summaries = pareto_report(methods);

    const std::string table = render_method_table(summaries);
    std::cout << table;
    if (!out_path.empty()) save_method_report_json(out_path, summaries);
    if (!table_path.empty()) write_file(table_path, table);
    if (!svg_path.empty()) save_tradeoff_svg(svg_path, summaries);
    return 0;
}

int cmd_suite(const std::string& out_dir, std::uint64_t seed, std::uint64_t steps, double inject) {
    fs::create_directories(out_dir);
    auto suite = build_baseline_suite(seed);
    nlohmann::json index = nlohmann::json::array();
    for (auto& run : suite) {
        RunFileConfig cfg;
        cfg.train = run.train;
        cfg.train.steps = steps;
        cfg.train.warmup_steps = static_cast<std::uint32_t>(std::min<std::uint64_t>(cfg.train.warmup_steps, steps / 2));
        cfg.loss = run.loss;
        const std::string path = out_dir + "/" + run.name + ".toml";
        write_run_config(path, cfg, run.name);
        const double rate = run.injection_rate > 0.0 ? inject : 0.0;
        index.push_back({{"name", run.name}, {"config", path}, {"injection_rate", rate}});
    }
    write_file(out_dir + "/suite.json", index.dump(2) + "\n");
    std::cout << "wrote 5 baseline configs to " << out_dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"selective-loss training and evaluation toolkit"};
    app.require_subcommand(1);

    std::string out_dir, data_dir, config_path, shards_arg, ckpt, init_ckpt;
    std::uint64_t seed = 0;
    std::size_t base_docs = 9000, risky_docs = 1200, heldout_docs = 800, entities = 50, facts = 12;
    std::size_t n_prompts = 2000;
    auto* gen = app.add_subcommand("gen-data", "generate synthetic corpora and eval sets");
    gen->add_option("--out", out_dir)->required();
    gen->add_option("--seed", seed);
    gen->add_option("--base-docs", base_docs);
    gen->add_option("--risky-docs", risky_docs);
    gen->add_option("--heldout", heldout_docs);
    gen->add_option("--entities", entities);
    gen->add_option("--facts", facts);
    gen->add_option("--prompts", n_prompts);

    std::string out_shard;
    double inject_rate = 0.0;
    std::uint64_t inject_seed = 0;
    auto* pack = app.add_subcommand("pack", "label, inject, and pack training shards");
    pack->add_option("--data", data_dir)->required();
    pack->add_option("--config", config_path)->required();
    pack->add_option("--out-shard", out_shard)->required();
    pack->add_option("--inject", inject_rate);
    pack->add_option("--inject-seed", inject_seed);

    std::string name_mode = "masked";
    auto* packe = app.add_subcommand("pack-entity", "pack entity answers with a name-token mode");
    packe->add_option("--data", data_dir)->required();
    packe->add_option("--config", config_path)->required();
    packe->add_option("--out-shard", out_shard)->required();
    packe->add_option("--name-mode", name_mode)->check(CLI::IsMember({"standard", "masked", "unlikelihood"}));

    bool sequential = false;
    std::string method = "run";
    auto* train = app.add_subcommand("train", "run the training loop over packed shards");
    train->add_option("--config", config_path)->required();
    train->add_option("--shards", shards_arg)->required();
    train->add_option("--out", out_dir)->required();
    train->add_option("--seed", seed);
    train->add_flag("--sequential", sequential);
    train->add_option("--init", init_ckpt);
    train->add_option("--method", method);

    std::string pos_path, neg_path, out_path;
    std::size_t train_per_class = 512, test_per_class = 256;
    int splits = 3;
    auto* probe = app.add_subcommand("probe", "linear probe AUROC on last-layer states");
    probe->add_option("--ckpt", ckpt)->required();
    probe->add_option("--pos", pos_path)->required();
    probe->add_option("--neg", neg_path)->required();
    probe->add_option("--out", out_path)->required();
    probe->add_option("--train-per-class", train_per_class);
    probe->add_option("--test-per-class", test_per_class);
    probe->add_option("--seed", seed);
    probe->add_option("--splits", splits);

    std::string prompts_path, lexicon_path;
    std::size_t max_new = 64;
    auto* evalgen = app.add_subcommand("eval-gen", "greedy-decode prompts and score continuations");
    evalgen->add_option("--ckpt", ckpt)->required();
    evalgen->add_option("--prompts", prompts_path)->required();
    evalgen->add_option("--lexicon", lexicon_path);
    evalgen->add_option("--out", out_path)->required();
    evalgen->add_option("--max-new", max_new);

    std::string docs_path, hashes_path;
    auto* ppl = app.add_subcommand("perplexity", "held-out perplexity with contamination check");
    ppl->add_option("--ckpt", ckpt)->required();
    ppl->add_option("--docs", docs_path)->required();
    ppl->add_option("--train-hashes", hashes_path);
    ppl->add_option("--out", out_path);

    std::string qa_path;
    auto* evalent = app.add_subcommand("eval-entity", "entity-name suppression and fact recall");
    evalent->add_option("--ckpt", ckpt)->required();
    evalent->add_option("--qa", qa_path)->required();
    evalent->add_option("--out", out_path)->required();
    evalent->add_option("--max-new", max_new);

    std::vector<std::string> run_dirs;
    std::string table_path, svg_path;
    auto* report = app.add_subcommand("report", "aggregate runs into a comparison table");
    report->add_option("--runs", run_dirs)->required()->expected(-1);
    report->add_option("--out", out_path);
    report->add_option("--table", table_path);
    report->add_option("--svg", svg_path);

    std::uint64_t steps = 244;
    double inject = 0.05;
    auto* suite = app.add_subcommand("suite", "write the five baseline run configs");
    suite->add_option("--out", out_dir)->required();
    suite->add_option("--seed", seed);
    suite->add_option("--steps", steps);
    suite->add_option("--inject", inject);

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            return cmd_gen_data(out_dir, seed, base_docs, risky_docs, heldout_docs, entities, facts,
                                n_prompts);
        }
        if (pack->parsed()) return cmd_pack(data_dir, config_path, out_shard, inject_rate, inject_seed);
        if (packe->parsed()) return cmd_pack_entity(data_dir, config_path, out_shard, name_mode);
        if (train->parsed()) {
            return cmd_train(config_path, shards_arg, out_dir, seed, sequential, init_ckpt, method);
        }
        if (probe->parsed()) {
            return cmd_probe(ckpt, pos_path, neg_path, out_path, train_per_class, test_per_class, seed,
                             splits);
        }
        if (evalgen->parsed()) return cmd_eval_gen(ckpt, prompts_path, lexicon_path, out_path, max_new);
        if (ppl->parsed()) return cmd_perplexity(ckpt, docs_path, hashes_path, out_path);
        if (evalent->parsed()) return cmd_eval_entity(ckpt, qa_path, out_path, max_new);
        if (report->parsed()) return cmd_report(run_dirs, out_path, table_path, svg_path);
        if (suite->parsed()) return cmd_suite(out_dir, seed, steps, inject);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
