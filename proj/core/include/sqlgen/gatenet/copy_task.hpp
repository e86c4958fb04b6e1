#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sqlgen/gatenet/model.hpp"
#include "sqlgen/random.hpp"

namespace sqlgen::gatenet {

/// Synthetic text-to-SQL grammar whose condition values must be copied.
///
/// Source: "<bos> what is the C1 when C2 is V <sep> T <sep> c <sep> c ... <eos>"
/// (with a few phrasings). Target: "select C1 from T where C2 = V <eos>".
/// Value tokens share one input embedding, so seen and unseen values look the
/// same to the encoder; only seen values ever appear as training targets.
class CopyGrammar {
public:
    CopyGrammar(std::size_t n_columns, std::size_t n_tables, std::size_t n_seen_values,
                std::size_t n_unseen_values);

    struct Example {
        std::vector<int> src;
        std::vector<int> tgt;
        std::size_t value_pos = 0;  ///< index in tgt of the copied value
        bool unseen = false;
    };

    Example sample(Rng& rng, bool unseen_value) const;

    std::size_t vocab_size() const { return words_.size(); }
    /// First value token id; every id from here on is a value.
    std::size_t first_value_id() const { return first_value_; }
    int id(const std::string& word) const;
    const std::string& word(int id) const { return words_.at(static_cast<std::size_t>(id)); }
    std::size_t max_src_len() const;
    std::size_t tgt_len() const { return 9; }

    int bos() const { return id("<bos>"); }
    int eos() const { return id("<eos>"); }
    /// Target positions holding select/from/where/=.
    static constexpr std::size_t kKeywordPositions[] = {0, 2, 4, 6};
    /// Target positions copied from the source (columns, table, value).
    static constexpr std::size_t kCopyPositions[] = {1, 3, 5, 7};

private:
    std::vector<std::string> words_;
    std::size_t n_columns_, n_tables_, n_seen_, n_unseen_;
    std::size_t first_column_ = 0, first_table_ = 0, first_value_ = 0;
};

struct CopyTaskConfig {
    std::size_t d_model = 24;
    std::size_t n_columns = 8;
    std::size_t n_tables = 4;
    std::size_t n_seen_values = 24;
    std::size_t n_unseen_values = 16;
    std::size_t steps = 1500;
    std::size_t batch_size = 16;
    double learning_rate = 0.1;
    /// Learning rate is multiplied by lr_decay at each of these fractions of training.
    double lr_decay = 0.3;
    std::vector<double> decay_at = {0.6, 0.85};
    double clip_norm = 5.0;
    std::size_t eval_examples = 200;
    std::uint64_t seed = 7;
    GateMode mode = GateMode::kGated;
};

struct StepMetrics {
    std::size_t step = 0;
    double loss = 0.0;
    double learning_rate = 0.0;
    double grad_norm = 0.0;
};

struct CopyTaskMetrics {
    double final_loss = 0.0;
    double value_exact_match_seen = 0.0;
    double value_exact_match_unseen = 0.0;
    double sequence_exact_match_unseen = 0.0;
    double mean_p_ext_value = 0.0;
    double mean_p_ext_keyword = 0.0;
    double mean_p_ext_copy = 0.0;
};

struct CopyTaskResult {
    GateConfig model_config;
    ModelParams params;
    CopyTaskMetrics metrics;
    std::vector<StepMetrics> history;
};

/// Model configuration the copy task trains.
GateConfig copy_task_model_config(const CopyTaskConfig& cfg, const CopyGrammar& grammar);

/// Plain minibatch SGD with step decay and global-norm clipping. Throws
/// std::runtime_error naming the step if the loss becomes non-finite.
CopyTaskResult train_copy_task(const CopyTaskConfig& cfg,
                               const std::function<void(const StepMetrics&)>& on_step = {});

/// Evaluation metrics of a trained model on fresh examples.
CopyTaskMetrics evaluate_copy_task(const GateModel& model, const CopyGrammar& grammar,
                                   std::size_t n_examples, std::uint64_t seed);

}  // namespace sqlgen::gatenet
