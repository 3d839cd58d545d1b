#include "slung/trainer.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "slung/common.hpp"

namespace slung {

void TrainConfig::validate() const {
    if (batch_size == 0) throw std::invalid_argument("batch_size must be positive");
    if (lr <= 0.0) throw std::invalid_argument("lr must be positive");
    if (warmup_steps > steps && steps > 0) throw std::invalid_argument("warmup must not exceed steps");
    if (final_lr_frac < 0.0 || final_lr_frac > 1.0) throw std::invalid_argument("final_lr_frac in [0,1]");
}

double lr_at_step(const TrainConfig& cfg, std::uint64_t step) {
    if (cfg.warmup_steps > 0 && step < cfg.warmup_steps) {
        return cfg.lr * static_cast<double>(step + 1) / static_cast<double>(cfg.warmup_steps);
    }
    const double lr_final = cfg.final_lr_frac * cfg.lr;
    const std::uint64_t decay_steps = cfg.steps > cfg.warmup_steps ? cfg.steps - cfg.warmup_steps : 0;
    if (decay_steps == 0) return cfg.lr;
    const double progress =
        static_cast<double>(step - cfg.warmup_steps + 1) / static_cast<double>(decay_steps);
    const double cosine = 0.5 * (1.0 + std::cos(M_PI * std::min(progress, 1.0)));
    return lr_final + (cfg.lr - lr_final) * cosine;
}

AdamW::AdamW(ModelParams<float>& params, const TrainConfig& cfg) : params_(&params), cfg_(cfg) {
    m_.zero_like(params);
    v_.zero_like(params);
}

double clip_gradients(ModelParams<float>& grads, double max_norm) {
    double sq_norm = 0.0;
    grads.visit([&](const std::string&, auto& g) { sq_norm += static_cast<double>(g.squaredNorm()); });
    const double norm = std::sqrt(sq_norm);
    if (max_norm > 0.0 && norm > max_norm) {
        const float scale = static_cast<float>(max_norm / (norm + 1e-12));
        grads.visit([&](const std::string&, auto& g) { g *= scale; });
    }
    return norm;
}

double AdamW::step(ModelParams<float>& grads, double lr) {
    const double norm = clip_gradients(grads, cfg_.grad_clip_norm);

    ++t_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    const float b1 = static_cast<float>(cfg_.beta1);
    const float b2 = static_cast<float>(cfg_.beta2);
    const float eps = 1e-8f;
    const float step_size = static_cast<float>(lr / bc1);
    const float inv_bc2 = static_cast<float>(1.0 / bc2);

    // walk params, grads, and both moment sets in the same tensor order
    struct Slot {
        float* p;
        float* g;
        float* m;
        float* v;
        std::size_t n;
        bool decayed;
    };
    std::vector<Slot> slots;
    std::size_t idx = 0;
    params_->visit([&](const std::string&, auto& t) {
        Slot s{};
        s.p = t.data();
        s.n = static_cast<std::size_t>(t.size());
        s.decayed = t.cols() > 1;  // norm scales are 1-D and not decayed
        slots.push_back(s);
        (void)idx;
    });
    idx = 0;
    grads.visit([&](const std::string&, auto& t) { slots[idx++].g = t.data(); });
    idx = 0;
    m_.visit([&](const std::string&, auto& t) { slots[idx++].m = t.data(); });
    idx = 0;
    v_.visit([&](const std::string&, auto& t) { slots[idx++].v = t.data(); });

    const float wd = static_cast<float>(lr * cfg_.weight_decay);
    for (auto& s : slots) {
        for (std::size_t i = 0; i < s.n; ++i) {
            const float g = s.g[i];
            s.m[i] = b1 * s.m[i] + (1.0f - b1) * g;
            s.v[i] = b2 * s.v[i] + (1.0f - b2) * g * g;
            const float vhat = s.v[i] * inv_bc2;
            float update = step_size * s.m[i] / (std::sqrt(vhat) + eps);
            if (s.decayed) update += wd * s.p[i];
            s.p[i] -= update;
        }
    }
    return norm;
}

namespace {

nlohmann::json step_to_json(const StepRecord& s) {
    return {{"loss", s.loss},
            {"loss_standard", s.loss_standard},
            {"loss_unlikelihood", s.loss_unlikelihood},
            {"grad_norm", s.grad_norm}};
}

}  // namespace

void save_manifest(const std::string& path, const RunManifest& manifest) {
    nlohmann::json j;
    j["config_hash"] = manifest.config_hash;
    j["shard_hashes"] = manifest.shard_hashes;
    j["seed"] = manifest.seed;
    j["sequential"] = manifest.sequential;
    auto steps = nlohmann::json::array();
    for (const auto& s : manifest.steps) steps.push_back(step_to_json(s));
    j["steps"] = steps;
    write_file(path, j.dump(2) + "\n");
}

RunManifest load_manifest(const std::string& path) {
    const auto j = nlohmann::json::parse(read_file(path));
    RunManifest m;
    m.config_hash = j.at("config_hash").get<std::string>();
    m.shard_hashes = j.at("shard_hashes").get<std::vector<std::string>>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.sequential = j.value("sequential", false);
    for (const auto& s : j.at("steps")) {
        m.steps.push_back({s.at("loss").get<double>(), s.at("loss_standard").get<double>(),
                           s.at("loss_unlikelihood").get<double>(), s.at("grad_norm").get<double>()});
    }
    return m;
}

std::string config_hash(const ModelConfig& model, const TrainConfig& train) {
    std::ostringstream ss;
    ss << model.vocab_size << '|' << model.d_model << '|' << model.n_layers << '|' << model.n_heads << '|'
       << model.context_len << '|' << model.mlp_ratio << '|' << train.steps << '|' << train.batch_size
       << '|' << train.lr << '|' << train.beta1 << '|' << train.beta2 << '|' << train.weight_decay << '|'
       << train.grad_clip_norm << '|' << train.warmup_steps << '|' << train.final_lr_frac << '|'
       << train.seed << '|' << static_cast<int>(train.reduction);
    return hex64(fnv1a(ss.str()));
}

TrainResult train_run(const ModelConfig& model_cfg, const TrainConfig& train_cfg,
                      const std::vector<PackedSequences>& shards, const std::string& out_dir,
                      const ModelParams<float>* initial, const std::vector<std::string>& shard_paths) {
    model_cfg.validate();
    train_cfg.validate();
    if (shards.empty()) throw std::invalid_argument("no shards");
    for (const auto& s : shards) {
        if (s.context_len != model_cfg.context_len) {
            throw std::invalid_argument("shard context_len does not match model");
        }
    }

    const std::uint32_t T = model_cfg.context_len;
    const std::uint32_t B = train_cfg.batch_size;
    const std::size_t N = static_cast<std::size_t>(B) * T;

    // flat index over (shard, sequence)
    std::vector<std::pair<std::uint32_t, std::uint64_t>> seq_index;
    for (std::uint32_t si = 0; si < shards.size(); ++si) {
        for (std::uint64_t q = 0; q < shards[si].n_seqs; ++q) seq_index.emplace_back(si, q);
    }
    if (seq_index.empty()) throw std::invalid_argument("shards contain no sequences");

    TrainResult result;
    if (initial != nullptr) {
        result.params = *initial;
        result.params.cfg = model_cfg;
    } else {
        result.params.init(model_cfg, train_cfg.seed);
    }

    result.manifest.config_hash = config_hash(model_cfg, train_cfg);
    result.manifest.seed = train_cfg.seed;
    result.manifest.sequential = train_cfg.sequential;
    for (const auto& p : shard_paths) {
        result.manifest.shard_hashes.push_back(hex64(fnv1a(read_file(p))));
    }

    AdamW optimizer(result.params, train_cfg);
    Activations<float> acts;
    ModelParams<float> grads;

    std::vector<TokenId> tokens(N);
    std::vector<TokenId> targets(N, 0);
    std::vector<LossMode> modes(N, LossMode::Masked);
    MatX<float> d_logits;

    std::vector<std::size_t> order(seq_index.size());
    std::uint64_t epoch = 0;
    std::size_t cursor = order.size();  // trigger reshuffle on first use

    auto next_sequence = [&]() -> std::pair<std::uint32_t, std::uint64_t> {
        if (cursor >= order.size()) {
            for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
            Rng perm_rng(train_cfg.seed ^ (0x9e3779b97f4a7c15ull * (epoch + 1)));
            perm_rng.shuffle(order);
            cursor = 0;
            ++epoch;
        }
        return seq_index[order[cursor++]];
    };

    for (std::uint64_t step = 0; step < train_cfg.steps; ++step) {
        for (std::uint32_t b = 0; b < B; ++b) {
            const auto [si, q] = next_sequence();
            const auto& shard = shards[si];
            const std::size_t off = static_cast<std::size_t>(q) * T;
            for (std::uint32_t i = 0; i < T; ++i) {
                const std::size_t p = static_cast<std::size_t>(b) * T + i;
                tokens[p] = shard.tokens[off + i];
                if (i + 1 < T) {
                    // predict the next token; its mode decides the treatment
                    targets[p] = shard.tokens[off + i + 1];
                    modes[p] = shard.modes[off + i + 1];
                } else {
                    targets[p] = 0;
                    modes[p] = LossMode::Masked;
                }
            }
        }

        forward(result.params, tokens, static_cast<int>(B), static_cast<int>(T), acts);
        const TokenLossReport report =
            slung_loss(acts.logprobs.data(), N, model_cfg.vocab_size, targets.data(), modes.data(),
                       train_cfg.reduction);

        if (!std::isfinite(report.total)) {
            if (!out_dir.empty()) {
                nlohmann::json dump;
                dump["step"] = step;
                dump["tokens"] = tokens;
                save_manifest(out_dir + "/manifest.json", result.manifest);
                write_file(out_dir + "/diverged_batch.json", dump.dump());
            }
            throw TrainDiverged("non-finite loss at step " + std::to_string(step));
        }

        d_logits.resize(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(model_cfg.vocab_size));
        loss_grad_at_logits(acts.logprobs.data(), N, model_cfg.vocab_size, targets.data(), modes.data(),
                            d_logits.data(), train_cfg.reduction);
        backward(result.params, acts, d_logits, grads);

        const double lr = lr_at_step(train_cfg, step);
        const double grad_norm = optimizer.step(grads, lr);

        StepRecord rec;
        rec.loss = report.total;
        double std_sum = 0.0, unlik_sum = 0.0;
        for (const auto& e : report.entries) {
            if (e.mode == LossMode::Standard) std_sum += e.value;
            if (e.mode == LossMode::Unlikelihood) unlik_sum += e.value;
        }
        rec.loss_standard = report.n_standard > 0 ? std_sum / static_cast<double>(report.n_standard) : 0.0;
        rec.loss_unlikelihood =
            report.n_unlikelihood > 0 ? unlik_sum / static_cast<double>(report.n_unlikelihood) : 0.0;
        rec.grad_norm = grad_norm;
        result.manifest.steps.push_back(rec);

        if (!out_dir.empty() && train_cfg.checkpoint_interval > 0 &&
            (step + 1) % train_cfg.checkpoint_interval == 0) {
            save_checkpoint(out_dir + "/ckpt_step" + std::to_string(step + 1) + ".bin", result.params);
        }
    }

    if (!out_dir.empty()) {
        save_checkpoint(out_dir + "/checkpoint.bin", result.params);
        save_manifest(out_dir + "/manifest.json", result.manifest);
    }
    return result;
}

std::vector<BaselineRun> build_baseline_suite(std::uint64_t seed) {
    const auto S = LossMode::Standard;
    const auto M = LossMode::Masked;
    const auto U = LossMode::Unlikelihood;
    const auto X = LossMode::Excluded;

    TrainConfig train;
    train.seed = seed;

    std::vector<BaselineRun> runs;
    runs.push_back({"control", {S, S, S}, 0.0, train});
    runs.push_back({"low_risk", {S, X, X}, 0.05, train});
    runs.push_back({"toxic", {S, S, S}, 0.05, train});
    runs.push_back({"masked_slung", {S, M, M}, 0.05, train});
    runs.push_back({"unlikelihood_slung", {S, S, U}, 0.05, train});
    return runs;
}

// ---- run-config file (TOML subset: sections, scalar key = value) -----------

namespace {

std::string strip(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

using TomlTable = std::map<std::string, std::map<std::string, std::string>>;

TomlTable parse_toml_subset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    TomlTable table;
    std::string section;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = strip(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw std::runtime_error("bad section header at line " + std::to_string(lineno));
            section = strip(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw std::runtime_error("expected key = value at line " + std::to_string(lineno));
        std::string key = strip(line.substr(0, eq));
        std::string value = strip(line.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
            value = value.substr(1, value.size() - 2);
        }
        table[section][key] = value;
    }
    return table;
}

const std::string* find(const TomlTable& t, const std::string& section, const std::string& key) {
    auto s = t.find(section);
    if (s == t.end()) return nullptr;
    auto k = s->second.find(key);
    if (k == s->second.end()) return nullptr;
    return &k->second;
}

template <typename T>
void set_num(const TomlTable& t, const std::string& sec, const std::string& key, T& out) {
    if (const std::string* v = find(t, sec, key)) out = static_cast<T>(std::stod(*v));
}

}  // namespace

RunFileConfig parse_run_config(const std::string& path) {
    const TomlTable t = parse_toml_subset(path);
    RunFileConfig cfg;

    set_num(t, "model", "vocab_size", cfg.model.vocab_size);
    set_num(t, "model", "d_model", cfg.model.d_model);
    set_num(t, "model", "n_layers", cfg.model.n_layers);
    set_num(t, "model", "n_heads", cfg.model.n_heads);
    set_num(t, "model", "context_len", cfg.model.context_len);
    set_num(t, "model", "mlp_ratio", cfg.model.mlp_ratio);

    set_num(t, "train", "steps", cfg.train.steps);
    set_num(t, "train", "batch_size", cfg.train.batch_size);
    set_num(t, "train", "lr", cfg.train.lr);
    set_num(t, "train", "beta1", cfg.train.beta1);
    set_num(t, "train", "beta2", cfg.train.beta2);
    set_num(t, "train", "weight_decay", cfg.train.weight_decay);
    set_num(t, "train", "grad_clip_norm", cfg.train.grad_clip_norm);
    set_num(t, "train", "warmup_steps", cfg.train.warmup_steps);
    set_num(t, "train", "final_lr_frac", cfg.train.final_lr_frac);
    set_num(t, "train", "seed", cfg.train.seed);
    set_num(t, "train", "checkpoint_interval", cfg.train.checkpoint_interval);
    if (const std::string* v = find(t, "train", "reduction")) {
        if (*v == "mean") cfg.train.reduction = Reduction::MeanNonMasked;
        else if (*v == "sum") cfg.train.reduction = Reduction::Sum;
        else throw std::runtime_error("reduction must be mean or sum");
    }

    if (const std::string* v = find(t, "loss", "not_toxic")) cfg.loss.not_toxic = loss_mode_from_name(*v);
    if (const std::string* v = find(t, "loss", "possibly_toxic")) cfg.loss.possibly_toxic = loss_mode_from_name(*v);
    if (const std::string* v = find(t, "loss", "definitely_toxic")) cfg.loss.definitely_toxic = loss_mode_from_name(*v);

    cfg.model.validate();
    return cfg;
}

void write_run_config(const std::string& path, const RunFileConfig& cfg, const std::string& comment) {
    std::ostringstream ss;
    if (!comment.empty()) ss << "# " << comment << "\n";
    ss << "[model]\n";
    ss << "vocab_size = " << cfg.model.vocab_size << "\n";
    ss << "d_model = " << cfg.model.d_model << "\n";
    ss << "n_layers = " << cfg.model.n_layers << "\n";
    ss << "n_heads = " << cfg.model.n_heads << "\n";
    ss << "context_len = " << cfg.model.context_len << "\n";
    ss << "mlp_ratio = " << cfg.model.mlp_ratio << "\n\n";
    ss << "[train]\n";
    ss << "steps = " << cfg.train.steps << "\n";
    ss << "batch_size = " << cfg.train.batch_size << "\n";
    ss << "lr = " << cfg.train.lr << "\n";
    ss << "beta1 = " << cfg.train.beta1 << "\n";
    ss << "beta2 = " << cfg.train.beta2 << "\n";
    ss << "weight_decay = " << cfg.train.weight_decay << "\n";
    ss << "grad_clip_norm = " << cfg.train.grad_clip_norm << "\n";
    ss << "warmup_steps = " << cfg.train.warmup_steps << "\n";
    ss << "final_lr_frac = " << cfg.train.final_lr_frac << "\n";
    ss << "reduction = \"" << (cfg.train.reduction == Reduction::Sum ? "sum" : "mean") << "\"\n\n";
    ss << "[loss]\n";
    ss << "not_toxic = \"" << loss_mode_name(cfg.loss.not_toxic) << "\"\n";
    ss << "possibly_toxic = \"" << loss_mode_name(cfg.loss.possibly_toxic) << "\"\n";
    ss << "definitely_toxic = \"" << loss_mode_name(cfg.loss.definitely_toxic) << "\"\n";
    write_file(path, ss.str());
}

}  // namespace slung
