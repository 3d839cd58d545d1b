#include "slung/model.hpp"

#include <cstring>
#include <fstream>

namespace slung {

namespace {

constexpr char kMagic[4] = {'S', 'L', 'C', 'K'};
constexpr std::uint32_t kVersion = 1;

void write_u32(std::ofstream& out, std::uint32_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::uint32_t read_u32(std::ifstream& in) {
    std::uint32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const ModelParams<float>& params) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
    out.write(kMagic, 4);
    write_u32(out, kVersion);
    write_u32(out, params.cfg.vocab_size);
    write_u32(out, params.cfg.d_model);
    write_u32(out, params.cfg.n_layers);
    write_u32(out, params.cfg.n_heads);
    write_u32(out, params.cfg.context_len);
    write_u32(out, params.cfg.mlp_ratio);
    const_cast<ModelParams<float>&>(params).visit([&](const std::string&, auto& t) {
        out.write(reinterpret_cast<const char*>(t.data()),
                  static_cast<std::streamsize>(sizeof(float) * static_cast<std::size_t>(t.size())));
    });
    if (!out) throw std::runtime_error("checkpoint write failed: " + path);
}

ModelParams<float> load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
    char magic[4] = {};
    in.read(magic, 4);
    if (std::memcmp(magic, kMagic, 4) != 0) throw std::runtime_error("bad checkpoint magic: " + path);
    const std::uint32_t version = read_u32(in);
    if (version != kVersion) throw std::runtime_error("unsupported checkpoint version");

    ModelConfig cfg;
    cfg.vocab_size = read_u32(in);
    cfg.d_model = read_u32(in);
    cfg.n_layers = read_u32(in);
    cfg.n_heads = read_u32(in);
    cfg.context_len = read_u32(in);
    cfg.mlp_ratio = read_u32(in);
    cfg.validate();

    ModelParams<float> params;
    params.init(cfg, 0);
    params.visit([&](const std::string& name, auto& t) {
        in.read(reinterpret_cast<char*>(t.data()),
                static_cast<std::streamsize>(sizeof(float) * static_cast<std::size_t>(t.size())));
        if (!in) throw std::runtime_error("checkpoint truncated at " + name + ": " + path);
    });
    return params;
}

}  // namespace slung
