#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sqlgen/gatenet/gate.hpp"
#include "sqlgen/gatenet/matrix.hpp"

namespace sqlgen::gatenet {

enum class GateMode {
    kGated,         ///< P_ext computed by the gate
    kGenerateOnly,  ///< P_ext forced to 0 (ablation)
};

struct GateConfig {
    std::size_t d_model = 16;
    std::size_t vocab_size = 32;
    std::size_t max_src_len = 16;
    std::size_t max_tgt_len = 16;
    std::uint64_t seed = 1;
    /// Hidden width of the host feed-forward blocks; 0 means 2 * d_model.
    std::size_t ff_hidden = 0;
    /// Token ids >= this value share one input embedding row (an unknown-word
    /// embedding); they can still be produced by copying. 0 disables sharing.
    std::size_t shared_embedding_from = 0;
    int bos_id = 0;
    GateMode mode = GateMode::kGated;

    std::size_t hidden() const { return ff_hidden == 0 ? 2 * d_model : ff_hidden; }
    std::size_t embedding_rows() const;
    int embedding_row(int token) const;

    /// Throws std::invalid_argument for non-positive sizes.
    void validate() const;
};

/// Single-head attention block weights for the host encoder/decoder.
struct AttentionBlock {
    Matrix w_q, w_k, w_v, w_o;  ///< d x d
};

struct FeedForwardBlock {
    Matrix w1;  ///< d x hidden
    Matrix b1;  ///< 1 x hidden
    Matrix w2;  ///< hidden x d
    Matrix b2;  ///< 1 x d
};

struct HostParams {
    Matrix enc_tok;  ///< embedding_rows x d
    Matrix enc_pos;  ///< max_src_len x d
    AttentionBlock enc_attn;
    FeedForwardBlock enc_ff;
    Matrix dec_tok;
    Matrix dec_pos;  ///< max_tgt_len x d
    AttentionBlock dec_attn;
    FeedForwardBlock dec_ff;
};

struct ModelParams {
    HostParams host;
    GateParams gate;

    /// Visits every tensor in a fixed order with a stable name.
    template <typename F>
    void for_each(F&& f) {
        visit_all(*this, f);
    }
    template <typename F>
    void for_each(F&& f) const {
        visit_all(*this, f);
    }

    std::size_t parameter_count() const;

private:
    template <typename Self, typename F>
    static void visit_all(Self& self, F& f) {
        auto& h = self.host;
        f("enc.tok", h.enc_tok);
        f("enc.pos", h.enc_pos);
        f("enc.attn.w_q", h.enc_attn.w_q);
        f("enc.attn.w_k", h.enc_attn.w_k);
        f("enc.attn.w_v", h.enc_attn.w_v);
        f("enc.attn.w_o", h.enc_attn.w_o);
        f("enc.ff.w1", h.enc_ff.w1);
        f("enc.ff.b1", h.enc_ff.b1);
        f("enc.ff.w2", h.enc_ff.w2);
        f("enc.ff.b2", h.enc_ff.b2);
        f("dec.tok", h.dec_tok);
        f("dec.pos", h.dec_pos);
        f("dec.attn.w_q", h.dec_attn.w_q);
        f("dec.attn.w_k", h.dec_attn.w_k);
        f("dec.attn.w_v", h.dec_attn.w_v);
        f("dec.attn.w_o", h.dec_attn.w_o);
        f("dec.ff.w1", h.dec_ff.w1);
        f("dec.ff.b1", h.dec_ff.b1);
        f("dec.ff.w2", h.dec_ff.w2);
        f("dec.ff.b2", h.dec_ff.b2);
        GateParams::visit(self.gate, f);
    }
};

/// Zero tensors shaped for cfg.
ModelParams zero_params(const GateConfig& cfg);
/// Seeded random initialization (scaled normal weights, unit gains, zero biases).
ModelParams init_params(const GateConfig& cfg);

/// Every intermediate of the gated extraction layer for one example.
struct GateActivations {
    Matrix h_enc;
    Matrix h_dec;
    Matrix score;
    Matrix attention;
    Matrix context;
    Matrix lnorm_dec;
    Matrix lnorm_ctx;
    std::vector<double> p_ext;
    Matrix o_gen;
    Matrix o_ext;
    Matrix o_final;
};

struct ForwardResult {
    GateActivations act;
    std::vector<double> token_loss;  ///< -log O_final[t, gold_t]
    double loss = 0.0;               ///< mean of token_loss
};

/// Host encoder/decoder (one self-attention + feed-forward layer each,
/// learned positions) topped by the gated extraction layer.
class GateModel {
public:
    GateModel(GateConfig cfg, ModelParams params);
    explicit GateModel(const GateConfig& cfg) : GateModel(cfg, init_params(cfg)) {}

    const GateConfig& config() const { return cfg_; }
    const ModelParams& params() const { return params_; }
    ModelParams& params() { return params_; }

    /// Teacher-forced pass: the decoder reads bos followed by tgt[0..n-2] and
    /// is scored on tgt. Throws std::out_of_range on a bad token id or length.
    ForwardResult forward(std::span<const int> src, std::span<const int> tgt) const;

    /// Loss of forward(); gradients are accumulated into grads (scaled by `scale`).
    double loss_and_gradient(std::span<const int> src, std::span<const int> tgt,
                             ModelParams& grads, double scale = 1.0) const;

    /// Greedy decoding of up to max_len tokens, stopping after eos_id.
    std::vector<int> greedy_decode(std::span<const int> src, int eos_id,
                                   std::size_t max_len) const;

private:
    GateConfig cfg_;
    ModelParams params_;
};

}  // namespace sqlgen::gatenet
