#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sqlgen/gatenet/matrix.hpp"

namespace sqlgen::gatenet {

/// Parameters of the gated extraction layer and the generation head.
/// Linear maps act on row vectors: y = x * W (+ b).
struct GateParams {
    Matrix w_q;          ///< d x d, decoder-side query projection
    Matrix w_kv;         ///< d x d, encoder-side projection shared by keys and values
    Matrix ff_w;         ///< d x d
    Matrix ff_b;         ///< 1 x d
    Matrix ln_dec_gain;  ///< 1 x d
    Matrix ln_dec_bias;
    Matrix ln_ctx_gain;
    Matrix ln_ctx_bias;
    Matrix gate_w;       ///< 2d x 1, over [norm(H_dec), norm(Context)]
    Matrix gate_b;       ///< 1 x 1
    Matrix out_w;        ///< d x vocab, generation head
    Matrix out_b;        ///< 1 x vocab

    static GateParams zeros(std::size_t d_model, std::size_t vocab_size);

    template <typename Self, typename F>
    static void visit(Self& self, F&& f) {
        f("gate.w_q", self.w_q);
        f("gate.w_kv", self.w_kv);
        f("gate.ff_w", self.ff_w);
        f("gate.ff_b", self.ff_b);
        f("gate.ln_dec_gain", self.ln_dec_gain);
        f("gate.ln_dec_bias", self.ln_dec_bias);
        f("gate.ln_ctx_gain", self.ln_ctx_gain);
        f("gate.ln_ctx_bias", self.ln_ctx_bias);
        f("gate.gate_w", self.gate_w);
        f("gate.gate_b", self.gate_b);
        f("gate.out_w", self.out_w);
        f("gate.out_b", self.out_b);
    }
};

struct CrossAttention {
    Matrix query;    ///< tgt x d
    Matrix kv;       ///< src x d, keys and values are the same projection
    Matrix score;    ///< tgt x src, unscaled query . key
    Matrix weights;  ///< row softmax of score
    Matrix mixed;    ///< weights * kv
    Matrix ff_pre;   ///< mixed * ff_w + ff_b
    Matrix context;  ///< relu(ff_pre)
};

/// Throws ShapeError when widths disagree with the parameters.
CrossAttention cross_attention(const Matrix& h_enc, const Matrix& h_dec, const GateParams& p);

struct GateOutput {
    LayerNormCache ln_dec;
    LayerNormCache ln_ctx;
    Matrix lnorm_dec;
    Matrix lnorm_ctx;
    std::vector<double> logit;
    std::vector<double> p_ext;  ///< one probability per decoder position
};

GateOutput extraction_gate(const Matrix& h_dec, const Matrix& context, const GateParams& p);

/// O_ext[t, w] = sum of weights[t, s] over source positions s holding token w.
/// Throws std::out_of_range for a token id >= vocab_size.
Matrix copy_distribution(const Matrix& weights, std::span<const int> src_ids,
                         std::size_t vocab_size);

/// Softmax over the generation head's logits.
Matrix generation_distribution(const Matrix& h_dec, const GateParams& p, Matrix* logits = nullptr);

/// (1 - p_ext[t]) * O_gen[t, .] + p_ext[t] * O_ext[t, .]
Matrix merge(const Matrix& o_gen, const Matrix& o_ext, std::span<const double> p_ext);

}  // namespace sqlgen::gatenet
