#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "slung/common.hpp"
#include "slung/tokenizer.hpp"

namespace slung {

template <typename T>
using MatX = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using VecX = Eigen::Matrix<T, Eigen::Dynamic, 1>;

struct ModelConfig {
    std::uint32_t vocab_size = Vocab::kSize;
    std::uint32_t d_model = 128;
    std::uint32_t n_layers = 4;
    std::uint32_t n_heads = 4;
    std::uint32_t context_len = 256;
    std::uint32_t mlp_ratio = 4;
    // output head is always tied to the token embedding

    std::uint32_t head_dim() const { return d_model / n_heads; }
    std::uint32_t mlp_dim() const { return d_model * mlp_ratio; }

    void validate() const {
        if (d_model % n_heads != 0) throw std::invalid_argument("d_model must be divisible by n_heads");
        if (vocab_size == 0 || n_layers == 0 || context_len == 0) {
            throw std::invalid_argument("model dimensions must be positive");
        }
    }
};

inline constexpr double kRmsNormEps = 1e-5;

template <typename T>
void log_softmax_row(const T* z, std::size_t n, T* out) {
    Eigen::Map<const Eigen::Array<T, Eigen::Dynamic, 1>> zin(z, static_cast<Eigen::Index>(n));
    Eigen::Map<Eigen::Array<T, Eigen::Dynamic, 1>> zout(out, static_cast<Eigen::Index>(n));
    const T m = zin.maxCoeff();
    const T lse = m + std::log((zin - m).exp().sum());
    zout = zin - lse;
}

template <typename T>
struct ModelParams {
    struct Layer {
        VecX<T> norm1_scale;  // [d]
        VecX<T> norm2_scale;  // [d]
        MatX<T> w_qkv;        // [d, 3d]
        MatX<T> w_out;        // [d, d]
        MatX<T> w_mlp_in;     // [d, m]
        MatX<T> w_mlp_out;    // [m, d]
    };

    ModelConfig cfg;
    MatX<T> tok_emb;  // [V, d]; also the tied output head
    MatX<T> pos_emb;  // [ctx, d]
    std::vector<Layer> layers;
    VecX<T> final_norm_scale;  // [d]

    void init(const ModelConfig& c, std::uint64_t seed) {
        c.validate();
        cfg = c;
        Rng rng(seed);
        const auto d = static_cast<Eigen::Index>(cfg.d_model);
        const auto m = static_cast<Eigen::Index>(cfg.mlp_dim());
        const T std0 = T(0.02);
        // residual-branch projections scaled down with depth
        const T std_proj = T(0.02 / std::sqrt(2.0 * cfg.n_layers));

        auto fill = [&](MatX<T>& mat, Eigen::Index r, Eigen::Index cc, T std) {
            mat.resize(r, cc);
            for (Eigen::Index i = 0; i < r; ++i)
                for (Eigen::Index j = 0; j < cc; ++j) mat(i, j) = static_cast<T>(rng.gauss(0.0, std));
        };

        fill(tok_emb, static_cast<Eigen::Index>(cfg.vocab_size), d, std0);
        fill(pos_emb, static_cast<Eigen::Index>(cfg.context_len), d, std0);
        layers.assign(cfg.n_layers, {});
        for (auto& L : layers) {
            L.norm1_scale = VecX<T>::Ones(d);
            L.norm2_scale = VecX<T>::Ones(d);
            fill(L.w_qkv, d, 3 * d, std0);
            fill(L.w_out, d, d, std_proj);
            fill(L.w_mlp_in, d, m, std0);
            fill(L.w_mlp_out, m, d, std_proj);
        }
        final_norm_scale = VecX<T>::Ones(d);
    }

    void zero_like(const ModelParams<T>& other) {
        cfg = other.cfg;
        tok_emb = MatX<T>::Zero(other.tok_emb.rows(), other.tok_emb.cols());
        pos_emb = MatX<T>::Zero(other.pos_emb.rows(), other.pos_emb.cols());
        layers.assign(other.layers.size(), {});
        for (std::size_t l = 0; l < layers.size(); ++l) {
            const auto& o = other.layers[l];
            layers[l].norm1_scale = VecX<T>::Zero(o.norm1_scale.size());
            layers[l].norm2_scale = VecX<T>::Zero(o.norm2_scale.size());
            layers[l].w_qkv = MatX<T>::Zero(o.w_qkv.rows(), o.w_qkv.cols());
            layers[l].w_out = MatX<T>::Zero(o.w_out.rows(), o.w_out.cols());
            layers[l].w_mlp_in = MatX<T>::Zero(o.w_mlp_in.rows(), o.w_mlp_in.cols());
            layers[l].w_mlp_out = MatX<T>::Zero(o.w_mlp_out.rows(), o.w_mlp_out.cols());
        }
        final_norm_scale = VecX<T>::Zero(other.final_norm_scale.size());
    }

    // Tensors in checkpoint declaration order. The tied head shares tok_emb
    // and is not materialized separately.
    template <typename Fn>
    void visit(Fn&& fn) {
        fn("tok_emb", tok_emb);
        fn("pos_emb", pos_emb);
        for (std::size_t l = 0; l < layers.size(); ++l) {
            auto& L = layers[l];
            const std::string p = "layer" + std::to_string(l) + ".";
            fn(p + "norm1_scale", L.norm1_scale);
            fn(p + "norm2_scale", L.norm2_scale);
            fn(p + "w_qkv", L.w_qkv);
            fn(p + "w_out", L.w_out);
            fn(p + "w_mlp_in", L.w_mlp_in);
            fn(p + "w_mlp_out", L.w_mlp_out);
        }
        fn("final_norm_scale", final_norm_scale);
    }

    std::size_t num_params() const {
        std::size_t n = 0;
        const_cast<ModelParams<T>*>(this)->visit([&](const std::string&, auto& t) { n += static_cast<std::size_t>(t.size()); });
        return n;
    }
};

// Everything the forward pass keeps around so backward can run, plus the
// backward scratch. Sized lazily for (B, T).
template <typename T>
struct Activations {
    int B = 0, Tseq = 0;
    std::vector<TokenId> tokens;  // [B*T], copy of the forward input

    struct LayerActs {
        MatX<T> x_in;       // [N, d] layer input
        VecX<T> inv1;       // [N]
        MatX<T> normed1;    // [N, d]
        MatX<T> qkv;        // [N, 3d]
        MatX<T> att_probs;  // [B*H*T, T] causal softmax rows
        MatX<T> att_out;    // [N, d] concatenated heads
        MatX<T> x_mid;      // [N, d] after attention residual
        VecX<T> inv2;       // [N]
        MatX<T> normed2;    // [N, d]
        MatX<T> mlp_pre;    // [N, m]
        MatX<T> mlp_tanh;   // [N, m] cached tanh for the gelu backward
        MatX<T> mlp_act;    // [N, m]
    };
    std::vector<LayerActs> layers;
    MatX<T> x_final;      // [N, d] output of the last block
    VecX<T> inv_final;    // [N]
    MatX<T> last_hidden;  // [N, d] final-norm output; input to the tied head
    MatX<T> logits;       // [N, V]
    MatX<T> logprobs;     // [N, V]

    // backward scratch
    MatX<T> d_x, d_branch, d_qkv, d_att_out, d_mlp_pre, d_mlp_act, d_scores, d_probs;
    MatX<T> d_input_emb;  // [N, d] gradient at the embedding sum
};

namespace detail {

template <typename T>
void rmsnorm_forward(const MatX<T>& x, const VecX<T>& scale, MatX<T>& out, VecX<T>& inv) {
    const auto n = x.rows();
    const auto d = x.cols();
    out.resize(n, d);
    inv.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const T ms = x.row(i).squaredNorm() / static_cast<T>(d);
        const T iv = T(1) / std::sqrt(ms + static_cast<T>(kRmsNormEps));
        inv(i) = iv;
        out.row(i) = (x.row(i) * iv).cwiseProduct(scale.transpose());
    }
}

// Accumulates into d_scale; overwrites d_x.
template <typename T>
void rmsnorm_backward(const MatX<T>& x, const VecX<T>& scale, const VecX<T>& inv, const MatX<T>& d_out,
                      MatX<T>& d_x, VecX<T>& d_scale) {
    const auto n = x.rows();
    const auto d = x.cols();
    d_x.resize(n, d);
    for (Eigen::Index i = 0; i < n; ++i) {
        const T iv = inv(i);
        auto dg = d_out.row(i).cwiseProduct(scale.transpose());  // upstream through the scale
        const T dot = dg.cwiseProduct(x.row(i)).sum();
        d_x.row(i) = dg * iv - x.row(i) * (iv * iv * iv * dot / static_cast<T>(d));
        d_scale += (d_out.row(i).cwiseProduct(x.row(i)) * iv).transpose();
    }
}

inline constexpr double kGeluC = 0.7978845608028654;  // sqrt(2/pi)
inline constexpr double kGeluA = 0.044715;

template <typename T>
T gelu(T x) {
    return T(0.5) * x * (T(1) + std::tanh(static_cast<T>(kGeluC) * (x + static_cast<T>(kGeluA) * x * x * x)));
}

// tanh-form gelu over a whole matrix; caches tanh(u) for the backward pass
template <typename T>
void gelu_forward(const MatX<T>& x, MatX<T>& tanh_u, MatX<T>& y) {
    const T c = static_cast<T>(kGeluC);
    const T a = static_cast<T>(kGeluA);
    tanh_u = (c * (x.array() + a * x.array().cube())).tanh().matrix();
    y = (T(0.5) * x.array() * (T(1) + tanh_u.array())).matrix();
}

template <typename T>
void gelu_backward(const MatX<T>& x, const MatX<T>& tanh_u, const MatX<T>& d_y, MatX<T>& d_x) {
    const T c = static_cast<T>(kGeluC);
    const T a = static_cast<T>(kGeluA);
    d_x = (d_y.array() *
           (T(0.5) * (T(1) + tanh_u.array()) +
            T(0.5) * x.array() * (T(1) - tanh_u.array().square()) * c * (T(1) + T(3) * a * x.array().square())))
              .matrix();
}

}  // namespace detail

// Causal forward over a [B, T] token block (flattened row-major). Logits at
// position i depend only on tokens <= i.
template <typename T>
void forward(const ModelParams<T>& params, const std::vector<TokenId>& tokens, int B, int Tseq,
             Activations<T>& acts) {
    const auto& cfg = params.cfg;
    if (Tseq <= 0 || B <= 0 || tokens.size() != static_cast<std::size_t>(B) * static_cast<std::size_t>(Tseq)) {
        throw std::invalid_argument("forward: token buffer does not match B*T");
    }
    if (static_cast<std::uint32_t>(Tseq) > cfg.context_len) {
        throw std::invalid_argument("forward: sequence longer than context");
    }
    for (TokenId t : tokens) {
        if (t >= cfg.vocab_size) throw std::out_of_range("forward: invalid token id " + std::to_string(t));
    }

    const Eigen::Index N = static_cast<Eigen::Index>(B) * Tseq;
    const Eigen::Index d = cfg.d_model;
    const Eigen::Index H = cfg.n_heads;
    const Eigen::Index hd = cfg.head_dim();
    const Eigen::Index m = cfg.mlp_dim();
    const T att_scale = T(1) / std::sqrt(static_cast<T>(hd));

    acts.B = B;
    acts.Tseq = Tseq;
    acts.tokens = tokens;
    acts.layers.resize(cfg.n_layers);

    MatX<T> x(N, d);
    for (Eigen::Index p = 0; p < N; ++p) {
        const Eigen::Index pos = p % Tseq;
        x.row(p) = params.tok_emb.row(static_cast<Eigen::Index>(tokens[static_cast<std::size_t>(p)])) +
                   params.pos_emb.row(pos);
    }

    for (std::uint32_t l = 0; l < cfg.n_layers; ++l) {
        auto& A = acts.layers[l];
        const auto& W = params.layers[l];
        A.x_in = x;

        detail::rmsnorm_forward(A.x_in, W.norm1_scale, A.normed1, A.inv1);
        A.qkv.resize(N, 3 * d);
        A.qkv.noalias() = A.normed1 * W.w_qkv;

        A.att_probs.resize(static_cast<Eigen::Index>(B) * H * Tseq, Tseq);
        A.att_out.resize(N, d);
        for (int b = 0; b < B; ++b) {
            const Eigen::Index r0 = static_cast<Eigen::Index>(b) * Tseq;
            for (Eigen::Index h = 0; h < H; ++h) {
                auto Q = A.qkv.block(r0, h * hd, Tseq, hd);
                auto K = A.qkv.block(r0, d + h * hd, Tseq, hd);
                auto V = A.qkv.block(r0, 2 * d + h * hd, Tseq, hd);
                auto P = A.att_probs.block((static_cast<Eigen::Index>(b) * H + h) * Tseq, 0, Tseq, Tseq);
                P.noalias() = Q * K.transpose() * att_scale;
                for (Eigen::Index i = 0; i < Tseq; ++i) {
                    auto live = P.row(i).head(i + 1).array();
                    const T mx = live.maxCoeff();
                    live = (live - mx).exp();
                    live /= live.sum();
                    P.row(i).tail(Tseq - i - 1).setZero();
                }
                A.att_out.block(r0, h * hd, Tseq, hd).noalias() = P * V;
            }
        }

        A.x_mid.resize(N, d);
        A.x_mid.noalias() = A.att_out * W.w_out;
        A.x_mid += A.x_in;

        detail::rmsnorm_forward(A.x_mid, W.norm2_scale, A.normed2, A.inv2);
        A.mlp_pre.resize(N, m);
        A.mlp_pre.noalias() = A.normed2 * W.w_mlp_in;
        detail::gelu_forward(A.mlp_pre, A.mlp_tanh, A.mlp_act);

        x.noalias() = A.mlp_act * W.w_mlp_out;
        x += A.x_mid;
    }

    acts.x_final = x;
    detail::rmsnorm_forward(acts.x_final, params.final_norm_scale, acts.last_hidden, acts.inv_final);

    acts.logits.resize(N, static_cast<Eigen::Index>(cfg.vocab_size));
    acts.logits.noalias() = acts.last_hidden * params.tok_emb.transpose();

    acts.logprobs.resize(acts.logits.rows(), acts.logits.cols());
    for (Eigen::Index i = 0; i < N; ++i) {
        log_softmax_row(acts.logits.row(i).data(), static_cast<std::size_t>(cfg.vocab_size),
                        acts.logprobs.row(i).data());
    }
}

// Exact gradients w.r.t. all parameters and the per-position embedding input,
// given upstream gradients at the logits.
template <typename T>
void backward(const ModelParams<T>& params, Activations<T>& acts, const MatX<T>& d_logits,
              ModelParams<T>& grads) {
    const auto& cfg = params.cfg;
    const int B = acts.B;
    const int Tseq = acts.Tseq;
    const Eigen::Index N = static_cast<Eigen::Index>(B) * Tseq;
    const Eigen::Index d = cfg.d_model;
    const Eigen::Index H = cfg.n_heads;
    const Eigen::Index hd = cfg.head_dim();
    const T att_scale = T(1) / std::sqrt(static_cast<T>(hd));

    grads.zero_like(params);

    // tied head: logits = last_hidden * tok_emb^T
    acts.d_x.resize(N, d);
    acts.d_x.noalias() = d_logits * params.tok_emb;
    grads.tok_emb.noalias() += d_logits.transpose() * acts.last_hidden;

    MatX<T> d_prev;
    detail::rmsnorm_backward(acts.x_final, params.final_norm_scale, acts.inv_final, acts.d_x, d_prev,
                             grads.final_norm_scale);

    for (int l = static_cast<int>(cfg.n_layers) - 1; l >= 0; --l) {
        auto& A = acts.layers[static_cast<std::size_t>(l)];
        const auto& W = params.layers[static_cast<std::size_t>(l)];
        auto& G = grads.layers[static_cast<std::size_t>(l)];

        // MLP branch: x_out = x_mid + gelu(normed2 * Win) * Wout
        acts.d_mlp_act.resize(N, A.mlp_act.cols());
        acts.d_mlp_act.noalias() = d_prev * W.w_mlp_out.transpose();
        G.w_mlp_out.noalias() += A.mlp_act.transpose() * d_prev;

        detail::gelu_backward(A.mlp_pre, A.mlp_tanh, acts.d_mlp_act, acts.d_mlp_pre);
        G.w_mlp_in.noalias() += A.normed2.transpose() * acts.d_mlp_pre;

        acts.d_branch.resize(N, d);
        acts.d_branch.noalias() = acts.d_mlp_pre * W.w_mlp_in.transpose();

        MatX<T> d_mid;
        detail::rmsnorm_backward(A.x_mid, W.norm2_scale, A.inv2, acts.d_branch, d_mid, G.norm2_scale);
        d_mid += d_prev;  // residual

        // attention branch: x_mid = x_in + att_out * Wo
        acts.d_att_out.resize(N, d);
        acts.d_att_out.noalias() = d_mid * W.w_out.transpose();
        G.w_out.noalias() += A.att_out.transpose() * d_mid;

        acts.d_qkv.resize(N, 3 * d);
        acts.d_scores.resize(Tseq, Tseq);
        acts.d_probs.resize(Tseq, Tseq);
        for (int b = 0; b < B; ++b) {
            const Eigen::Index r0 = static_cast<Eigen::Index>(b) * Tseq;
            for (Eigen::Index h = 0; h < H; ++h) {
                auto Q = A.qkv.block(r0, h * hd, Tseq, hd);
                auto K = A.qkv.block(r0, d + h * hd, Tseq, hd);
                auto V = A.qkv.block(r0, 2 * d + h * hd, Tseq, hd);
                auto P = A.att_probs.block((static_cast<Eigen::Index>(b) * H + h) * Tseq, 0, Tseq, Tseq);
                auto dO = acts.d_att_out.block(r0, h * hd, Tseq, hd);

                acts.d_probs.noalias() = dO * V.transpose();
                acts.d_qkv.block(r0, 2 * d + h * hd, Tseq, hd).noalias() = P.transpose() * dO;

                // softmax backward, causal rows
                for (Eigen::Index i = 0; i < Tseq; ++i) {
                    auto p = P.row(i).head(i + 1).array();
                    auto dp = acts.d_probs.row(i).head(i + 1).array();
                    const T dot = (p * dp).sum();
                    acts.d_scores.row(i).head(i + 1).array() = p * (dp - dot);
                    acts.d_scores.row(i).tail(Tseq - i - 1).setZero();
                }

                acts.d_qkv.block(r0, h * hd, Tseq, hd).noalias() = acts.d_scores * K * att_scale;
                acts.d_qkv.block(r0, d + h * hd, Tseq, hd).noalias() =
                    acts.d_scores.transpose() * Q * att_scale;
            }
        }

        G.w_qkv.noalias() += A.normed1.transpose() * acts.d_qkv;
        acts.d_branch.resize(N, d);
        acts.d_branch.noalias() = acts.d_qkv * W.w_qkv.transpose();

        MatX<T> d_in;
        detail::rmsnorm_backward(A.x_in, W.norm1_scale, A.inv1, acts.d_branch, d_in, G.norm1_scale);
        d_in += d_mid;  // residual
        d_prev = std::move(d_in);
    }

    acts.d_input_emb = d_prev;
    for (Eigen::Index p = 0; p < N; ++p) {
        grads.tok_emb.row(static_cast<Eigen::Index>(acts.tokens[static_cast<std::size_t>(p)])) += d_prev.row(p);
        grads.pos_emb.row(p % Tseq) += d_prev.row(p);
    }
}

// Incremental decoding state. Feeding the same token prefix reproduces the
// same cache bit-for-bit, so greedy decoding is a fixed point of itself.
template <typename T>
struct DecodeState {
    ModelConfig cfg;
    std::vector<MatX<T>> k_cache;  // per layer [ctx, d]
    std::vector<MatX<T>> v_cache;
    Eigen::Index len = 0;

    explicit DecodeState(const ModelConfig& c) : cfg(c) {
        k_cache.assign(cfg.n_layers, MatX<T>::Zero(cfg.context_len, cfg.d_model));
        v_cache.assign(cfg.n_layers, MatX<T>::Zero(cfg.context_len, cfg.d_model));
    }

    bool full() const { return len >= static_cast<Eigen::Index>(cfg.context_len); }
};

// Appends one token and returns the next-token logits row.
template <typename T>
VecX<T> decode_step(const ModelParams<T>& params, DecodeState<T>& state, TokenId token) {
    const auto& cfg = params.cfg;
    if (token >= cfg.vocab_size) throw std::out_of_range("decode_step: invalid token id");
    if (state.full()) throw std::runtime_error("decode_step: context full");

    const Eigen::Index d = cfg.d_model;
    const Eigen::Index H = cfg.n_heads;
    const Eigen::Index hd = cfg.head_dim();
    const Eigen::Index pos = state.len;
    const T att_scale = T(1) / std::sqrt(static_cast<T>(hd));

    Eigen::Matrix<T, 1, Eigen::Dynamic> x =
        params.tok_emb.row(static_cast<Eigen::Index>(token)) + params.pos_emb.row(pos);

    auto rms_row = [&](const Eigen::Matrix<T, 1, Eigen::Dynamic>& v, const VecX<T>& scale) {
        const T ms = v.squaredNorm() / static_cast<T>(d);
        const T iv = T(1) / std::sqrt(ms + static_cast<T>(kRmsNormEps));
        return Eigen::Matrix<T, 1, Eigen::Dynamic>((v * iv).cwiseProduct(scale.transpose()));
    };

    for (std::uint32_t l = 0; l < cfg.n_layers; ++l) {
        const auto& W = params.layers[l];
        auto a = rms_row(x, W.norm1_scale);
        Eigen::Matrix<T, 1, Eigen::Dynamic> qkv = a * W.w_qkv;

        state.k_cache[l].row(pos) = qkv.segment(d, d);
        state.v_cache[l].row(pos) = qkv.segment(2 * d, d);

        Eigen::Matrix<T, 1, Eigen::Dynamic> att_out(1, d);
        for (Eigen::Index h = 0; h < H; ++h) {
            auto q = qkv.segment(h * hd, hd);
            auto K = state.k_cache[l].block(0, h * hd, pos + 1, hd);
            auto V = state.v_cache[l].block(0, h * hd, pos + 1, hd);
            VecX<T> scores = K * q.transpose() * att_scale;
            const T mx = scores.maxCoeff();
            VecX<T> w = (scores.array() - mx).exp();
            w /= w.sum();
            att_out.segment(h * hd, hd) = (V.transpose() * w).transpose();
        }
        x += att_out * W.w_out;

        auto b2 = rms_row(x, W.norm2_scale);
        Eigen::Matrix<T, 1, Eigen::Dynamic> pre = b2 * W.w_mlp_in;
        Eigen::Matrix<T, 1, Eigen::Dynamic> act = pre.unaryExpr([](T v) { return detail::gelu(v); });
        x += act * W.w_mlp_out;
    }

    auto f = rms_row(x, params.final_norm_scale);
    VecX<T> logits = params.tok_emb * f.transpose();
    state.len = pos + 1;
    return logits;
}

template <typename T>
TokenId argmax_lowest_id(const VecX<T>& logits) {
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < logits.size(); ++i) {
        if (logits(i) > logits(best)) best = i;
    }
    return static_cast<TokenId>(best);
}

// Greedy continuation: returns prompt + generated tokens. Stops at EOS, at
// max_new_tokens, or when the context fills up.
template <typename T>
std::vector<TokenId> greedy_decode(const ModelParams<T>& params, const std::vector<TokenId>& prompt,
                                   std::size_t max_new_tokens) {
    const auto& cfg = params.cfg;
    if (prompt.empty()) throw std::invalid_argument("greedy_decode: empty prompt");
    if (prompt.size() > cfg.context_len) throw std::invalid_argument("greedy_decode: prompt exceeds context");

    DecodeState<T> state(cfg);
    VecX<T> logits;
    for (TokenId t : prompt) logits = decode_step(params, state, t);

    std::vector<TokenId> out = prompt;
    for (std::size_t i = 0; i < max_new_tokens && !state.full(); ++i) {
        const TokenId next = argmax_lowest_id(logits);
        out.push_back(next);
        if (next == Vocab::kEos) break;
        if (state.full()) break;
        logits = decode_step(params, state, next);
    }
    return out;
}

// Checkpoint: "SLCK", version, config fields, then tensors as float32 LE in
// declaration order.
void save_checkpoint(const std::string& path, const ModelParams<float>& params);
ModelParams<float> load_checkpoint(const std::string& path);

}  // namespace slung
