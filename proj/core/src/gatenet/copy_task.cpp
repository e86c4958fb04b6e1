#include "sqlgen/gatenet/copy_task.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace sqlgen::gatenet {

namespace {

// Question phrasings; "C1", "C2" and "V" are placeholders.
const std::vector<std::vector<std::string>> kPhrasings = {
    {"what", "is", "the", "C1", "when", "C2", "is", "V"},
    {"show", "the", "C1", "for", "C2", "V"},
    {"which", "C1", "has", "C2", "V"},
    {"C1", "with", "C2", "equal", "to", "V", "?"},
};

constexpr std::size_t kListedColumns = 3;

}  // namespace

CopyGrammar::CopyGrammar(std::size_t n_columns, std::size_t n_tables, std::size_t n_seen_values,
                         std::size_t n_unseen_values)
    : n_columns_(n_columns), n_tables_(n_tables), n_seen_(n_seen_values), n_unseen_(n_unseen_values) {
    if (n_columns < kListedColumns || n_tables == 0 || n_seen_values == 0 || n_unseen_values == 0) {
        throw std::invalid_argument("copy grammar needs >= 3 columns and non-empty tables and values");
    }
    words_ = {"<bos>", "<eos>", "<sep>", "select", "from", "where", "="};
    for (const auto& phrase : kPhrasings) {
        for (const auto& w : phrase) {
            if (w == "C1" || w == "C2" || w == "V") continue;
            if (std::find(words_.begin(), words_.end(), w) == words_.end()) words_.push_back(w);
        }
    }
    first_column_ = words_.size();
    for (std::size_t i = 0; i < n_columns; ++i) words_.push_back("col" + std::to_string(i));
    first_table_ = words_.size();
    for (std::size_t i = 0; i < n_tables; ++i) words_.push_back("tab" + std::to_string(i));
    first_value_ = words_.size();
    for (std::size_t i = 0; i < n_seen_values + n_unseen_values; ++i) {
        words_.push_back("val" + std::to_string(i));
    }
}

int CopyGrammar::id(const std::string& word) const {
    auto it = std::find(words_.begin(), words_.end(), word);
    if (it == words_.end()) throw std::out_of_range("copy grammar: unknown word '" + word + "'");
    return static_cast<int>(it - words_.begin());
}

std::size_t CopyGrammar::max_src_len() const {
    std::size_t longest = 0;
    for (const auto& phrase : kPhrasings) longest = std::max(longest, phrase.size());
    // <bos> question <sep> table (<sep> column)* <eos>
    return 1 + longest + 2 + 2 * kListedColumns + 1;
}

CopyGrammar::Example CopyGrammar::sample(Rng& rng, bool unseen_value) const {
    const auto& phrase = kPhrasings[rng.below(kPhrasings.size())];
    const auto c1 = static_cast<int>(first_column_ + rng.below(n_columns_));
    auto c2 = static_cast<int>(first_column_ + rng.below(n_columns_ - 1));
    if (c2 >= c1) ++c2;
    const auto table = static_cast<int>(first_table_ + rng.below(n_tables_));
    const std::size_t value_index =
        unseen_value ? n_seen_ + rng.below(n_unseen_) : rng.below(n_seen_);
    const auto value = static_cast<int>(first_value_ + value_index);

    std::vector<int> listed = {c1, c2};
    while (listed.size() < kListedColumns) {
        const auto c = static_cast<int>(first_column_ + rng.below(n_columns_));
        if (std::find(listed.begin(), listed.end(), c) == listed.end()) listed.push_back(c);
    }
    for (std::size_t i = listed.size() - 1; i > 0; --i) {
        std::swap(listed[i], listed[rng.below(i + 1)]);
    }

    Example ex;
    ex.unseen = unseen_value;
    ex.src.push_back(bos());
    for (const auto& w : phrase) {
        if (w == "C1") ex.src.push_back(c1);
        else if (w == "C2") ex.src.push_back(c2);
        else if (w == "V") ex.src.push_back(value);
        else ex.src.push_back(id(w));
    }
    const int sep = id("<sep>");
    ex.src.push_back(sep);
    ex.src.push_back(table);
    for (int c : listed) {
        ex.src.push_back(sep);
        ex.src.push_back(c);
    }
    ex.src.push_back(eos());

    ex.tgt = {id("select"), c1, id("from"), table, id("where"), c2, id("="), value, eos()};
    ex.value_pos = 7;
    return ex;
}

GateConfig copy_task_model_config(const CopyTaskConfig& cfg, const CopyGrammar& grammar) {
    GateConfig m;
    m.d_model = cfg.d_model;
    m.vocab_size = grammar.vocab_size();
    m.max_src_len = grammar.max_src_len();
    m.max_tgt_len = grammar.tgt_len();
    m.seed = derive_seed(cfg.seed, "copy/init");
    m.shared_embedding_from = grammar.first_value_id();
    m.bos_id = grammar.bos();
    m.mode = cfg.mode;
    return m;
}

CopyTaskResult train_copy_task(const CopyTaskConfig& cfg,
                               const std::function<void(const StepMetrics&)>& on_step) {
    if (cfg.steps == 0 || cfg.batch_size == 0) {
        throw std::invalid_argument("copy task: steps and batch size must be positive");
    }
    const CopyGrammar grammar(cfg.n_columns, cfg.n_tables, cfg.n_seen_values, cfg.n_unseen_values);
    const GateConfig model_cfg = copy_task_model_config(cfg, grammar);
    GateModel model(model_cfg);
    Rng rng(derive_seed(cfg.seed, "copy/train"));

    CopyTaskResult result;
    result.model_config = model_cfg;
    double last_loss = 0.0;
    for (std::size_t step = 0; step < cfg.steps; ++step) {
        double lr = cfg.learning_rate;
        for (double at : cfg.decay_at) {
            if (static_cast<double>(step) >= at * static_cast<double>(cfg.steps)) lr *= cfg.lr_decay;
        }

        ModelParams grads = zero_params(model_cfg);
        double loss = 0.0;
        const double weight = 1.0 / static_cast<double>(cfg.batch_size);
        for (std::size_t b = 0; b < cfg.batch_size; ++b) {
            const auto ex = grammar.sample(rng, false);
            loss += weight * model.loss_and_gradient(ex.src, ex.tgt, grads, weight);
        }
        if (!std::isfinite(loss)) {
            throw std::runtime_error("copy task diverged at step " + std::to_string(step) +
                                     ": loss is not finite");
        }

        double sq = 0.0;
        grads.for_each([&](const char*, const Matrix& g) {
            for (double v : g.values()) sq += v * v;
        });
        const double norm = std::sqrt(sq);
        const double clip = (cfg.clip_norm > 0.0 && norm > cfg.clip_norm) ? cfg.clip_norm / norm : 1.0;

        std::vector<Matrix*> tensors;
        model.params().for_each([&](const char*, Matrix& m) { tensors.push_back(&m); });
        std::size_t t = 0;
        grads.for_each([&](const char*, const Matrix& g) {
            add_inplace(*tensors[t++], g, -lr * clip);
        });

        const StepMetrics metrics{step, loss, lr, norm};
        result.history.push_back(metrics);
        if (on_step) on_step(metrics);
        last_loss = loss;
    }

    result.metrics = evaluate_copy_task(model, grammar, cfg.eval_examples,
                                        derive_seed(cfg.seed, "copy/eval"));
    result.metrics.final_loss = last_loss;
    result.params = model.params();
    return result;
}

CopyTaskMetrics evaluate_copy_task(const GateModel& model, const CopyGrammar& grammar,
                                   std::size_t n_examples, std::uint64_t seed) {
    CopyTaskMetrics m;
    if (n_examples == 0) return m;
    Rng rng(seed);
    std::size_t seen_hits = 0, unseen_hits = 0, unseen_sequences = 0;
    double p_value = 0.0, p_keyword = 0.0, p_copy = 0.0;
    for (std::size_t i = 0; i < n_examples; ++i) {
        const auto seen = grammar.sample(rng, false);
        const auto decoded_seen = model.greedy_decode(seen.src, grammar.eos(), grammar.tgt_len());
        if (decoded_seen.size() > seen.value_pos &&
            decoded_seen[seen.value_pos] == seen.tgt[seen.value_pos]) {
            ++seen_hits;
        }

        const auto unseen = grammar.sample(rng, true);
        const auto decoded = model.greedy_decode(unseen.src, grammar.eos(), grammar.tgt_len());
        if (decoded.size() > unseen.value_pos &&
            decoded[unseen.value_pos] == unseen.tgt[unseen.value_pos]) {
            ++unseen_hits;
        }
        if (decoded == unseen.tgt) ++unseen_sequences;

        const auto fwd = model.forward(unseen.src, unseen.tgt);
        p_value += fwd.act.p_ext[unseen.value_pos];
        double kw = 0.0, cp = 0.0;
        for (std::size_t pos : CopyGrammar::kKeywordPositions) kw += fwd.act.p_ext[pos];
        for (std::size_t pos : CopyGrammar::kCopyPositions) cp += fwd.act.p_ext[pos];
        p_keyword += kw / std::size(CopyGrammar::kKeywordPositions);
        p_copy += cp / std::size(CopyGrammar::kCopyPositions);
    }
    const auto n = static_cast<double>(n_examples);
    m.value_exact_match_seen = static_cast<double>(seen_hits) / n;
    m.value_exact_match_unseen = static_cast<double>(unseen_hits) / n;
    m.sequence_exact_match_unseen = static_cast<double>(unseen_sequences) / n;
    m.mean_p_ext_value = p_value / n;
    m.mean_p_ext_keyword = p_keyword / n;
    m.mean_p_ext_copy = p_copy / n;
    return m;
}

}  // namespace sqlgen::gatenet
