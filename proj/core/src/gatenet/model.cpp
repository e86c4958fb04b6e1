#include "sqlgen/gatenet/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "sqlgen/random.hpp"

namespace sqlgen::gatenet {

std::size_t GateConfig::embedding_rows() const {
    return shared_embedding_from == 0 ? vocab_size : shared_embedding_from + 1;
}

int GateConfig::embedding_row(int token) const {
    if (shared_embedding_from != 0 && static_cast<std::size_t>(token) >= shared_embedding_from) {
        return static_cast<int>(shared_embedding_from);
    }
    return token;
}

void GateConfig::validate() const {
    if (d_model == 0 || vocab_size == 0 || max_src_len == 0 || max_tgt_len == 0) {
        throw std::invalid_argument("gate config: sizes must be positive");
    }
    if (shared_embedding_from >= vocab_size) {
        throw std::invalid_argument("gate config: shared_embedding_from must be below vocab_size");
    }
    if (bos_id < 0 || static_cast<std::size_t>(bos_id) >= vocab_size) {
        throw std::invalid_argument("gate config: bos_id outside the vocabulary");
    }
}

std::size_t ModelParams::parameter_count() const {
    std::size_t n = 0;
    for_each([&](const char*, const Matrix& m) { n += m.size(); });
    return n;
}

ModelParams zero_params(const GateConfig& cfg) {
    cfg.validate();
    const std::size_t d = cfg.d_model;
    const std::size_t h = cfg.hidden();
    auto attention = [d] { return AttentionBlock{Matrix(d, d), Matrix(d, d), Matrix(d, d), Matrix(d, d)}; };
    auto feed_forward = [d, h] { return FeedForwardBlock{Matrix(d, h), Matrix(1, h), Matrix(h, d), Matrix(1, d)}; };
    ModelParams p;
    p.host.enc_tok = Matrix(cfg.embedding_rows(), d);
    p.host.enc_pos = Matrix(cfg.max_src_len, d);
    p.host.enc_attn = attention();
    p.host.enc_ff = feed_forward();
    p.host.dec_tok = Matrix(cfg.embedding_rows(), d);
    p.host.dec_pos = Matrix(cfg.max_tgt_len, d);
    p.host.dec_attn = attention();
    p.host.dec_ff = feed_forward();
    p.gate = GateParams::zeros(d, cfg.vocab_size);
    return p;
}

ModelParams init_params(const GateConfig& cfg) {
    ModelParams p = zero_params(cfg);
    Rng rng(cfg.seed);
    p.for_each([&](const char* raw_name, Matrix& m) {
        const std::string_view name(raw_name);
        if (name.ends_with("_gain")) {
            m.fill(1.0);
            return;
        }
        if (name.ends_with("b1") || name.ends_with("b2") || name.ends_with("_bias") ||
            name.ends_with("ff_b") || name.ends_with("gate_b") || name.ends_with("out_b")) {
            return;
        }
        double stddev = 1.0 / std::sqrt(static_cast<double>(m.rows()));
        if (name.ends_with(".tok") || name.ends_with(".pos")) stddev = 0.5;
        for (double& v : m.values()) v = stddev * rng.normal();
    });
    return p;
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// One self-attention + feed-forward layer with residual connections.
struct BlockCache {
    std::vector<int> rows;  // embedding rows of the input tokens
    Matrix x, q, k, v, attn, mixed, y1, ff_pre, ff_act, out;
};

BlockCache block_forward(std::span<const int> ids, const GateConfig& cfg, const Matrix& tok,
                         const Matrix& pos, const AttentionBlock& a, const FeedForwardBlock& f,
                         bool causal) {
    BlockCache c;
    const std::size_t n = ids.size();
    const std::size_t d = cfg.d_model;
    c.x = Matrix(n, d);
    for (std::size_t i = 0; i < n; ++i) {
        const int r = cfg.embedding_row(ids[i]);
        c.rows.push_back(r);
        for (std::size_t j = 0; j < d; ++j) {
            c.x(i, j) = tok(static_cast<std::size_t>(r), j) + pos(i, j);
        }
    }
    c.q = matmul(c.x, a.w_q);
    c.k = matmul(c.x, a.w_k);
    c.v = matmul(c.x, a.w_v);
    Matrix score = matmul_nt(c.q, c.k);
    const double scale = 1.0 / std::sqrt(static_cast<double>(d));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            score(i, j) = (causal && j > i) ? kNegInf : score(i, j) * scale;
        }
    }
    c.attn = softmax_rows(score);
    c.mixed = matmul(c.attn, c.v);
    c.y1 = c.x;
    add_inplace(c.y1, matmul(c.mixed, a.w_o));
    c.ff_pre = matmul(c.y1, f.w1);
    add_row_bias(c.ff_pre, f.b1);
    c.ff_act = relu(c.ff_pre);
    c.out = c.y1;
    Matrix ff_out = matmul(c.ff_act, f.w2);
    add_row_bias(ff_out, f.b2);
    add_inplace(c.out, ff_out);
    return c;
}

void block_backward(const BlockCache& c, const Matrix& d_out, const GateConfig& cfg,
                    const AttentionBlock& a, const FeedForwardBlock& f, Matrix& g_tok,
                    Matrix& g_pos, AttentionBlock& ga, FeedForwardBlock& gf) {
    // Feed-forward branch.
    add_inplace(gf.w2, matmul_tn(c.ff_act, d_out));
    accumulate_column_sums(d_out, gf.b2);
    const Matrix d_pre = relu_backward(c.ff_pre, matmul_nt(d_out, f.w2));
    add_inplace(gf.w1, matmul_tn(c.y1, d_pre));
    accumulate_column_sums(d_pre, gf.b1);
    Matrix d_y1 = d_out;
    add_inplace(d_y1, matmul_nt(d_pre, f.w1));

    // Attention branch.
    add_inplace(ga.w_o, matmul_tn(c.mixed, d_y1));
    const Matrix d_mixed = matmul_nt(d_y1, a.w_o);
    const Matrix d_attn = matmul_nt(d_mixed, c.v);
    const Matrix d_v = matmul_tn(c.attn, d_mixed);
    Matrix d_score = softmax_rows_backward(c.attn, d_attn);
    const double scale = 1.0 / std::sqrt(static_cast<double>(cfg.d_model));
    for (double& v : d_score.values()) v *= scale;
    const Matrix d_q = matmul(d_score, c.k);
    const Matrix d_k = matmul_tn(d_score, c.q);
    add_inplace(ga.w_q, matmul_tn(c.x, d_q));
    add_inplace(ga.w_k, matmul_tn(c.x, d_k));
    add_inplace(ga.w_v, matmul_tn(c.x, d_v));

    Matrix d_x = d_y1;
    add_inplace(d_x, matmul_nt(d_q, a.w_q));
    add_inplace(d_x, matmul_nt(d_k, a.w_k));
    add_inplace(d_x, matmul_nt(d_v, a.w_v));

    for (std::size_t i = 0; i < c.rows.size(); ++i) {
        auto src = d_x.row(i);
        auto tok_row = g_tok.row(static_cast<std::size_t>(c.rows[i]));
        auto pos_row = g_pos.row(i);
        for (std::size_t j = 0; j < src.size(); ++j) {
            tok_row[j] += src[j];
            pos_row[j] += src[j];
        }
    }
}

void check_ids(std::span<const int> ids, std::size_t max_len, const GateConfig& cfg,
               const char* what) {
    if (ids.empty() || ids.size() > max_len) {
        throw std::out_of_range(std::string(what) + " length " + std::to_string(ids.size()) +
                                " outside 1.." + std::to_string(max_len));
    }
    for (int id : ids) {
        if (id < 0 || static_cast<std::size_t>(id) >= cfg.vocab_size) {
            throw std::out_of_range(std::string(what) + " token id " + std::to_string(id) +
                                    " outside vocabulary of " + std::to_string(cfg.vocab_size));
        }
    }
}

struct Pass {
    BlockCache enc;
    BlockCache dec;
    CrossAttention cross;
    GateOutput gate;
    GateActivations act;
};

Pass run(const GateConfig& cfg, const ModelParams& p, std::span<const int> src,
         std::span<const int> dec_in) {
    Pass pass;
    const HostParams& h = p.host;
    pass.enc = block_forward(src, cfg, h.enc_tok, h.enc_pos, h.enc_attn, h.enc_ff, false);
    pass.dec = block_forward(dec_in, cfg, h.dec_tok, h.dec_pos, h.dec_attn, h.dec_ff, true);
    pass.cross = cross_attention(pass.enc.out, pass.dec.out, p.gate);
    pass.gate = extraction_gate(pass.dec.out, pass.cross.context, p.gate);

    GateActivations& act = pass.act;
    act.h_enc = pass.enc.out;
    act.h_dec = pass.dec.out;
    act.score = pass.cross.score;
    act.attention = pass.cross.weights;
    act.context = pass.cross.context;
    act.lnorm_dec = pass.gate.lnorm_dec;
    act.lnorm_ctx = pass.gate.lnorm_ctx;
    act.p_ext = pass.gate.p_ext;
    if (cfg.mode == GateMode::kGenerateOnly) std::fill(act.p_ext.begin(), act.p_ext.end(), 0.0);
    act.o_gen = generation_distribution(act.h_dec, p.gate);
    act.o_ext = copy_distribution(act.attention, src, cfg.vocab_size);
    act.o_final = merge(act.o_gen, act.o_ext, act.p_ext);
    return pass;
}

std::vector<int> shifted_input(const GateConfig& cfg, std::span<const int> tgt) {
    std::vector<int> dec_in;
    dec_in.reserve(tgt.size());
    dec_in.push_back(cfg.bos_id);
    dec_in.insert(dec_in.end(), tgt.begin(), tgt.end() - 1);
    return dec_in;
}

}  // namespace

GateModel::GateModel(GateConfig cfg, ModelParams params)
    : cfg_(std::move(cfg)), params_(std::move(params)) {
    cfg_.validate();
    const ModelParams expected = zero_params(cfg_);
    std::vector<std::pair<std::string, std::pair<std::size_t, std::size_t>>> shapes;
    expected.for_each([&](const char* name, const Matrix& m) {
        shapes.push_back({name, {m.rows(), m.cols()}});
    });
    std::size_t i = 0;
    params_.for_each([&](const char* name, const Matrix& m) {
        const auto& [want_name, want] = shapes[i++];
        if (m.rows() != want.first || m.cols() != want.second) {
            throw ShapeError("parameter " + want_name + " has shape " + std::to_string(m.rows()) +
                             "x" + std::to_string(m.cols()) + ", expected " +
                             std::to_string(want.first) + "x" + std::to_string(want.second));
        }
        (void)name;
    });
}

ForwardResult GateModel::forward(std::span<const int> src, std::span<const int> tgt) const {
    check_ids(src, cfg_.max_src_len, cfg_, "source");
    check_ids(tgt, cfg_.max_tgt_len, cfg_, "target");
    const std::vector<int> dec_in = shifted_input(cfg_, tgt);
    ForwardResult r;
    r.act = run(cfg_, params_, src, dec_in).act;
    r.token_loss.resize(tgt.size());
    for (std::size_t t = 0; t < tgt.size(); ++t) {
        r.token_loss[t] = -std::log(r.act.o_final(t, static_cast<std::size_t>(tgt[t])));
        r.loss += r.token_loss[t];
    }
    r.loss /= static_cast<double>(tgt.size());
    return r;
}

double GateModel::loss_and_gradient(std::span<const int> src, std::span<const int> tgt,
                                    ModelParams& grads, double scale) const {
    check_ids(src, cfg_.max_src_len, cfg_, "source");
    check_ids(tgt, cfg_.max_tgt_len, cfg_, "target");
    const std::vector<int> dec_in = shifted_input(cfg_, tgt);
    const Pass pass = run(cfg_, params_, src, dec_in);
    const GateActivations& act = pass.act;
    const GateParams& gp = params_.gate;
    GateParams& gg = grads.gate;
    const std::size_t n_tgt = tgt.size();
    const std::size_t d = cfg_.d_model;
    const bool gated = cfg_.mode == GateMode::kGated;

    double loss = 0.0;
    Matrix d_gen(n_tgt, cfg_.vocab_size);
    Matrix d_ext(n_tgt, cfg_.vocab_size);
    std::vector<double> d_p(n_tgt, 0.0);
    for (std::size_t t = 0; t < n_tgt; ++t) {
        const auto g = static_cast<std::size_t>(tgt[t]);
        const double prob = act.o_final(t, g);
        loss -= std::log(prob);
        const double d_final = -scale / (static_cast<double>(n_tgt) * prob);
        const double p = act.p_ext[t];
        d_gen(t, g) = (1.0 - p) * d_final;
        d_ext(t, g) = p * d_final;
        d_p[t] = d_final * (act.o_ext(t, g) - act.o_gen(t, g));
    }
    loss /= static_cast<double>(n_tgt);

    // Generation head.
    const Matrix d_logits = softmax_rows_backward(act.o_gen, d_gen);
    add_inplace(gg.out_w, matmul_tn(act.h_dec, d_logits));
    accumulate_column_sums(d_logits, gg.out_b);
    Matrix d_h_dec = matmul_nt(d_logits, gp.out_w);

    // Gate.
    Matrix d_context(n_tgt, d);
    if (gated) {
        Matrix d_ln_dec(n_tgt, d);
        Matrix d_ln_ctx(n_tgt, d);
        for (std::size_t t = 0; t < n_tgt; ++t) {
            const double p = act.p_ext[t];
            const double dz = d_p[t] * p * (1.0 - p);
            gg.gate_b(0, 0) += dz;
            for (std::size_t j = 0; j < d; ++j) {
                gg.gate_w(j, 0) += dz * act.lnorm_dec(t, j);
                gg.gate_w(d + j, 0) += dz * act.lnorm_ctx(t, j);
                d_ln_dec(t, j) = dz * gp.gate_w(j, 0);
                d_ln_ctx(t, j) = dz * gp.gate_w(d + j, 0);
            }
        }
        add_inplace(d_h_dec, layer_norm_backward(d_ln_dec, pass.gate.ln_dec, gp.ln_dec_gain,
                                                 gg.ln_dec_gain, gg.ln_dec_bias));
        d_context = layer_norm_backward(d_ln_ctx, pass.gate.ln_ctx, gp.ln_ctx_gain,
                                        gg.ln_ctx_gain, gg.ln_ctx_bias);
    }

    // Copy scatter, then the cross attention and its feed-forward.
    const CrossAttention& ca = pass.cross;
    Matrix d_weights(n_tgt, src.size());
    for (std::size_t t = 0; t < n_tgt; ++t) {
        for (std::size_t s = 0; s < src.size(); ++s) {
            d_weights(t, s) = d_ext(t, static_cast<std::size_t>(src[s]));
        }
    }
    const Matrix d_ff_pre = relu_backward(ca.ff_pre, d_context);
    add_inplace(gg.ff_w, matmul_tn(ca.mixed, d_ff_pre));
    accumulate_column_sums(d_ff_pre, gg.ff_b);
    const Matrix d_mixed = matmul_nt(d_ff_pre, gp.ff_w);
    add_inplace(d_weights, matmul_nt(d_mixed, ca.kv));
    Matrix d_kv = matmul_tn(ca.weights, d_mixed);
    const Matrix d_score = softmax_rows_backward(ca.weights, d_weights);
    const Matrix d_query = matmul(d_score, ca.kv);
    add_inplace(d_kv, matmul_tn(d_score, ca.query));
    add_inplace(gg.w_q, matmul_tn(act.h_dec, d_query));
    add_inplace(d_h_dec, matmul_nt(d_query, gp.w_q));
    add_inplace(gg.w_kv, matmul_tn(act.h_enc, d_kv));
    const Matrix d_h_enc = matmul_nt(d_kv, gp.w_kv);

    const HostParams& h = params_.host;
    HostParams& gh = grads.host;
    block_backward(pass.dec, d_h_dec, cfg_, h.dec_attn, h.dec_ff, gh.dec_tok, gh.dec_pos,
                   gh.dec_attn, gh.dec_ff);
    block_backward(pass.enc, d_h_enc, cfg_, h.enc_attn, h.enc_ff, gh.enc_tok, gh.enc_pos,
                   gh.enc_attn, gh.enc_ff);
    return loss;
}

std::vector<int> GateModel::greedy_decode(std::span<const int> src, int eos_id,
                                          std::size_t max_len) const {
    check_ids(src, cfg_.max_src_len, cfg_, "source");
    max_len = std::min(max_len, cfg_.max_tgt_len);
    std::vector<int> out;
    std::vector<int> dec_in{cfg_.bos_id};
    while (out.size() < max_len) {
        const Pass pass = run(cfg_, params_, src, dec_in);
        auto last = pass.act.o_final.row(dec_in.size() - 1);
        const auto best = static_cast<int>(std::max_element(last.begin(), last.end()) - last.begin());
        out.push_back(best);
        if (best == eos_id) break;
        dec_in.push_back(best);
    }
    return out;
}

}  // namespace sqlgen::gatenet
