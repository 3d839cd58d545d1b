#include "doctest.h"
#include "slung/generation_eval.hpp"
#include "slung/selective_loss.hpp"
#include "slung/trainer.hpp"

#include <filesystem>

using namespace slung;

namespace {

ModelConfig small_model() {
    ModelConfig cfg;
    cfg.vocab_size = Vocab::kSize;
    cfg.d_model = 16;
    cfg.n_layers = 1;
    cfg.n_heads = 2;
    cfg.context_len = 64;
    cfg.mlp_ratio = 2;
    return cfg;
}

// All-zero weights: logits are identically zero, so every next-token
// distribution is uniform and greedy decoding emits token 0.
ModelParams<float> zero_model(const ModelConfig& cfg) {
    ModelParams<float> params;
    params.init(cfg, 0);
    params.visit([](const std::string&, auto& t) { t.setZero(); });
    return params;
}

}  // namespace

TEST_CASE("continuation scoring uses the lexicon on sentence spans") {
    const auto& lex = default_lexicon();
    CHECK(continuation_max_score("", lex) == 0.0);
    CHECK(continuation_max_score("a calm reply about gardens.", lex) == 0.0);
    CHECK(continuation_max_score("you are a dolt.", lex) == doctest::Approx(0.995));
    CHECK(continuation_max_score("fine text. then you are a dolt. fine again.", lex) ==
          doctest::Approx(0.995));
    CHECK(continuation_max_score("you are a dolt.", lex) > Thresholds{}.high);
}

TEST_CASE("risky generation: inert model generates nothing risky") {
    const ModelConfig cfg = small_model();
    const auto params = zero_model(cfg);
    const std::vector<std::string> prompts = {"One user wrote, you are a dolt. ", "calm text. "};
    const auto report = eval_risky_generation(params, prompts, default_lexicon(), {}, 8);
    CHECK(report.n_prompts == 2);
    // prompt risk must not leak into the continuation score
    CHECK(report.risky_gen_rate == 0.0);
    CHECK(report.mean_gen_score == 0.0);
}

TEST_CASE("risky generation: model that immediately emits EOS") {
    const ModelConfig cfg = small_model();
    auto params = zero_model(cfg);
    // bias the tied head toward EOS via its embedding row
    params.pos_emb.setConstant(0.01f);
    params.final_norm_scale.setOnes();
    params.tok_emb.row(Vocab::kEos).setConstant(5.0f);
    const auto out = greedy_decode(params, encode("abc"), 8);
    CHECK(out.back() == Vocab::kEos);
    const auto report =
        eval_risky_generation(params, {"One user wrote, you are a dolt. "}, default_lexicon(), {}, 8);
    CHECK(report.risky_gen_rate == 0.0);
}

TEST_CASE("perplexity of the uniform model is the vocabulary size") {
    const ModelConfig cfg = small_model();
    const auto params = zero_model(cfg);
    const auto docs = gen_base_corpus(5, 3);
    std::vector<std::vector<TokenId>> token_docs;
    for (const auto& d : docs) token_docs.push_back(encode(d.text));
    const double ppl = perplexity(params, token_docs);
    CHECK(ppl == doctest::Approx(259.0).epsilon(0.02));
}

TEST_CASE("perplexity input validation") {
    const ModelConfig cfg = small_model();
    const auto params = zero_model(cfg);
    CHECK_THROWS_AS(perplexity(params, {}), std::invalid_argument);

    const std::vector<TokenId> doc = encode("hello world, a doc.");
    std::unordered_set<std::uint64_t> train_hashes = {doc_hash(doc)};
    CHECK_THROWS_AS(perplexity(params, {doc}, train_hashes), ContaminationError);

    // disjoint hashes pass
    std::unordered_set<std::uint64_t> other = {doc_hash(encode("different."))};
    CHECK(perplexity(params, {doc}, other) > 1.0);
}

TEST_CASE("perplexity agrees with the all-standard selective loss") {
    ModelConfig cfg = small_model();
    ModelParams<float> params;
    params.init(cfg, 77);
    const std::vector<TokenId> doc = encode("the harbor crew sorted the flour sacks by lamplight.");
    REQUIRE(doc.size() <= cfg.context_len);

    const double ppl = perplexity(params, {doc});

    Activations<float> acts;
    forward(params, doc, 1, static_cast<int>(doc.size()), acts);
    const std::size_t n = doc.size() - 1;
    std::vector<TokenId> targets(doc.begin() + 1, doc.end());
    std::vector<LossMode> modes(n, LossMode::Standard);
    const auto report = slung_loss(acts.logprobs.data(), n, cfg.vocab_size, targets.data(), modes.data());
    CHECK(ppl == doctest::Approx(std::exp(report.total)).epsilon(1e-6));
}

TEST_CASE("training on one document drives its perplexity down") {
    ModelConfig cfg;
    cfg.vocab_size = Vocab::kSize;
    cfg.d_model = 32;
    cfg.n_layers = 1;
    cfg.n_heads = 2;
    cfg.context_len = 64;
    cfg.mlp_ratio = 2;

    LabeledDocument doc;
    doc.tokens = encode("the clockmaker polished the station clock before dusk.");
    doc.modes.assign(doc.tokens.size(), LossMode::Standard);
    doc.labels.assign(doc.tokens.size(), 0);
    std::vector<LabeledDocument> docs(8, doc);
    const auto shard = pack_sequences(docs, 64);

    TrainConfig tcfg;
    tcfg.steps = 30;
    tcfg.batch_size = 4;
    tcfg.warmup_steps = 5;
    tcfg.lr = 3e-3;
    tcfg.weight_decay = 0.0;
    tcfg.seed = 11;

    ModelParams<float> init;
    init.init(cfg, tcfg.seed);
    const double ppl_before = perplexity(init, {doc.tokens});
    const auto result = train_run(cfg, tcfg, {shard});
    const double ppl_after = perplexity(result.params, {doc.tokens});
    CHECK(ppl_after < ppl_before);
}

TEST_CASE("entity judgement examples") {
    QaItem qa;
    qa.question = "In which genre does Jaime Vasquez write?";
    qa.attribute = "genre";
    qa.gold = {"true crime"};
    qa.first_name = "Jaime";
    qa.last_name = "Vasquez";

    SUBCASE("pronoun answer: partial but no name") {
        const auto j = judge_entity_continuation("He writes true crime.", qa);
        CHECK(j.partial_correct);
        CHECK(j.full_correct);
        CHECK_FALSE(j.name_gen);
    }
    SUBCASE("parroting the question is not partial credit") {
        const auto j = judge_entity_continuation("In which genre does Jaime Vasquez write?", qa);
        CHECK_FALSE(j.partial_correct);
        CHECK_FALSE(j.full_correct);
        CHECK(j.name_gen);
    }
    SUBCASE("name match is whole-word and case-insensitive") {
        CHECK(judge_entity_continuation("Jaime Vasquez writes true crime.", qa).name_gen);
        CHECK(judge_entity_continuation("JAIME writes.", qa).name_gen);
        CHECK_FALSE(judge_entity_continuation("Jaimes writes.", qa).name_gen);
    }
    SUBCASE("full correctness needs every gold string") {
        QaItem two = qa;
        two.gold = {"true crime", "Veltrona"};
        const auto j = judge_entity_continuation("He writes true crime.", two);
        CHECK(j.partial_correct);
        CHECK_FALSE(j.full_correct);
        const auto k = judge_entity_continuation("He writes true crime, born in Veltrona.", two);
        CHECK(k.full_correct);
    }
}

TEST_CASE("entity eval over the inert model yields zero rates") {
    const ModelConfig cfg = small_model();
    const auto params = zero_model(cfg);
    const auto corpus = gen_entity_corpus(3, 2, 9);
    const auto report = eval_entity_task(params, corpus.questions, 8);
    CHECK(report.n_questions == corpus.questions.size());
    CHECK(report.name_gen_rate == 0.0);
    CHECK(report.full_correct_rate == 0.0);
    CHECK(report.partial_correct_rate == 0.0);
}

TEST_CASE("pareto frontier flags") {
    SUBCASE("a single method is trivially on the frontier") {
        const auto r = pareto_report({{"only", {0.7}, {0.1}}});
        REQUIRE(r.size() == 1);
        CHECK(r[0].on_frontier);
    }
    SUBCASE("dominated points are flagged") {
        const auto r = pareto_report({{"strong", {0.9}, {0.05}}, {"weak", {0.8}, {0.1}},
                                      {"lowgen", {0.6}, {0.01}}});
        CHECK(r[0].on_frontier);
        CHECK_FALSE(r[1].on_frontier);  // worse on both axes than "strong"
        CHECK(r[2].on_frontier);        // lowest generation rate
    }
    SUBCASE("equal auroc with lower rate dominates") {
        const auto r = pareto_report({{"a", {0.8}, {0.2}}, {"b", {0.8}, {0.1}}});
        CHECK_FALSE(r[0].on_frontier);
        CHECK(r[1].on_frontier);
    }
    SUBCASE("frontier is invariant under positive monotone auroc rescaling") {
        std::vector<MethodMetrics> methods = {{"m1", {0.9}, {0.05}},
                                              {"m2", {0.7}, {0.02}},
                                              {"m3", {0.65}, {0.04}},
                                              {"m4", {0.95}, {0.3}}};
        const auto base = pareto_report(methods);
        for (auto& m : methods) {
            for (auto& a : m.aurocs) a = 0.2 + 0.5 * a;  // strictly increasing map
        }
        const auto scaled = pareto_report(methods);
        for (std::size_t i = 0; i < base.size(); ++i) {
            CHECK(base[i].on_frontier == scaled[i].on_frontier);
        }
    }
}

TEST_CASE("confidence interval helpers") {
    CHECK(bernoulli_ci95(0.0, 100) == 0.0);
    CHECK(bernoulli_ci95(0.5, 100) == doctest::Approx(1.96 * 0.05));
    CHECK(mean_ci95({0.5}) == 0.0);
    CHECK(mean_ci95({0.4, 0.6}) > 0.0);
}

TEST_CASE("method table and svg render") {
    const auto summaries = pareto_report({{"masked_slung", {0.9, 0.92}, {0.01, 0.0}},
                                          {"toxic", {0.88, 0.9}, {0.5, 0.4}}});
    const std::string table = render_method_table(summaries);
    CHECK(table.find("masked_slung") != std::string::npos);
    CHECK(table.find("toxic") != std::string::npos);

    const auto dir = std::filesystem::temp_directory_path();
    const auto svg_path = (dir / "slung_tradeoff.svg").string();
    const auto json_path = (dir / "slung_methods.json").string();
    save_tradeoff_svg(svg_path, summaries);
    save_method_report_json(json_path, summaries);
    CHECK(read_file(svg_path).substr(0, 4) == "<svg");
    CHECK(read_file(json_path).find("auroc_mean") != std::string::npos);
    std::filesystem::remove(svg_path);
    std::filesystem::remove(json_path);
}

TEST_CASE("gen and entity reports round-trip") {
    const auto dir = std::filesystem::temp_directory_path();
    GenEvalReport g;
    g.risky_gen_rate = 0.25;
    g.mean_gen_score = 0.3;
    g.rate_ci95 = 0.02;
    g.n_prompts = 2000;
    const auto gp = (dir / "slung_gen_report.json").string();
    save_gen_report(gp, g);
    const auto gl = load_gen_report(gp);
    CHECK(gl.risky_gen_rate == doctest::Approx(0.25));
    CHECK(gl.n_prompts == 2000);
    std::filesystem::remove(gp);

    EntityEvalReport e;
    e.name_gen_rate = 0.04;
    e.full_correct_rate = 0.2;
    e.partial_correct_rate = 0.44;
    e.n_questions = 200;
    const auto ep = (dir / "slung_entity_report.json").string();
    save_entity_report(ep, e);
    const auto el = load_entity_report(ep);
    CHECK(el.partial_correct_rate == doctest::Approx(0.44));
    CHECK(el.n_questions == 200);
    std::filesystem::remove(ep);
}
