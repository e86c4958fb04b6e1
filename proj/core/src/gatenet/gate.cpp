#include "sqlgen/gatenet/gate.hpp"

#include <stdexcept>
#include <string>

namespace sqlgen::gatenet {

GateParams GateParams::zeros(std::size_t d, std::size_t vocab) {
    GateParams p;
    p.w_q = Matrix(d, d);
    p.w_kv = Matrix(d, d);
    p.ff_w = Matrix(d, d);
    p.ff_b = Matrix(1, d);
    p.ln_dec_gain = Matrix(1, d);
    p.ln_dec_bias = Matrix(1, d);
    p.ln_ctx_gain = Matrix(1, d);
    p.ln_ctx_bias = Matrix(1, d);
    p.gate_w = Matrix(2 * d, 1);
    p.gate_b = Matrix(1, 1);
    p.out_w = Matrix(d, vocab);
    p.out_b = Matrix(1, vocab);
    return p;
}

CrossAttention cross_attention(const Matrix& h_enc, const Matrix& h_dec, const GateParams& p) {
    if (h_enc.cols() != h_dec.cols()) {
        throw ShapeError("cross_attention: encoder width " + std::to_string(h_enc.cols()) +
                         " vs decoder width " + std::to_string(h_dec.cols()));
    }
    if (h_enc.rows() == 0) throw ShapeError("cross_attention: empty encoder states");
    CrossAttention a;
    a.query = matmul(h_dec, p.w_q);
    a.kv = matmul(h_enc, p.w_kv);
    a.score = matmul_nt(a.query, a.kv);
    a.weights = softmax_rows(a.score);
    a.mixed = matmul(a.weights, a.kv);
    a.ff_pre = matmul(a.mixed, p.ff_w);
    add_row_bias(a.ff_pre, p.ff_b);
    a.context = relu(a.ff_pre);
    return a;
}

GateOutput extraction_gate(const Matrix& h_dec, const Matrix& context, const GateParams& p) {
    if (!h_dec.same_shape(context)) {
        throw ShapeError("extraction_gate: decoder states and context differ in shape");
    }
    const std::size_t d = h_dec.cols();
    if (p.gate_w.rows() != 2 * d || p.gate_w.cols() != 1 || p.gate_b.size() != 1) {
        throw ShapeError("extraction_gate: gate weights do not match width " + std::to_string(d));
    }
    GateOutput g;
    g.lnorm_dec = layer_norm(h_dec, p.ln_dec_gain, p.ln_dec_bias, &g.ln_dec);
    g.lnorm_ctx = layer_norm(context, p.ln_ctx_gain, p.ln_ctx_bias, &g.ln_ctx);
    g.logit.resize(h_dec.rows());
    g.p_ext.resize(h_dec.rows());
    for (std::size_t t = 0; t < h_dec.rows(); ++t) {
        double z = p.gate_b(0, 0);
        for (std::size_t j = 0; j < d; ++j) {
            z += g.lnorm_dec(t, j) * p.gate_w(j, 0) + g.lnorm_ctx(t, j) * p.gate_w(d + j, 0);
        }
        g.logit[t] = z;
        g.p_ext[t] = sigmoid(z);
    }
    return g;
}

Matrix copy_distribution(const Matrix& weights, std::span<const int> src_ids,
                         std::size_t vocab_size) {
    if (weights.cols() != src_ids.size()) {
        throw ShapeError("copy_distribution: " + std::to_string(weights.cols()) +
                         " source positions but " + std::to_string(src_ids.size()) + " ids");
    }
    for (int id : src_ids) {
        if (id < 0 || static_cast<std::size_t>(id) >= vocab_size) {
            throw std::out_of_range("copy_distribution: token id " + std::to_string(id) +
                                    " outside vocabulary of " + std::to_string(vocab_size));
        }
    }
    Matrix out(weights.rows(), vocab_size);
    for (std::size_t t = 0; t < weights.rows(); ++t) {
        for (std::size_t s = 0; s < src_ids.size(); ++s) {
            out(t, static_cast<std::size_t>(src_ids[s])) += weights(t, s);
        }
    }
    return out;
}

Matrix generation_distribution(const Matrix& h_dec, const GateParams& p, Matrix* logits) {
    Matrix z = matmul(h_dec, p.out_w);
    add_row_bias(z, p.out_b);
    Matrix probs = softmax_rows(z);
    if (logits != nullptr) *logits = std::move(z);
    return probs;
}

Matrix merge(const Matrix& o_gen, const Matrix& o_ext, std::span<const double> p_ext) {
    if (!o_gen.same_shape(o_ext) || p_ext.size() != o_gen.rows()) {
        throw ShapeError("merge: generation, extraction and gate shapes disagree");
    }
    Matrix out(o_gen.rows(), o_gen.cols());
    for (std::size_t t = 0; t < o_gen.rows(); ++t) {
        const double p = p_ext[t];
        for (std::size_t w = 0; w < o_gen.cols(); ++w) {
            out(t, w) = (1.0 - p) * o_gen(t, w) + p * o_ext(t, w);
        }
    }
    return out;
}

}  // namespace sqlgen::gatenet
