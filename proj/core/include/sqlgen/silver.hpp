#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sqlgen/dataset.hpp"
#include "sqlgen/random.hpp"
#include "sqlgen/sql.hpp"

namespace sqlgen {

struct SamplerConfig {
    int max_conds = 3;
    bool allow_zero_conds = true;
    /// Keep SUM/AVG off text columns.
    bool numeric_agg_only = true;
    std::uint64_t seed = 0;
    /// Resampling attempts per example before a duplicate is kept.
    std::size_t dedup_retries = 16;
};

/// Produces a natural-language question for a statement.
class QuestionGenerator {
public:
    virtual ~QuestionGenerator() = default;
    virtual std::string question_for(const SqlStatement& stmt, const Table& tab) const = 0;
};

/// Deterministic English template; every condition value appears verbatim.
std::string template_question(const SqlStatement& stmt, const Table& tab);

class TemplateQuestionGenerator final : public QuestionGenerator {
public:
    std::string question_for(const SqlStatement& stmt, const Table& tab) const override {
        return template_question(stmt, tab);
    }
};

/// Draws a random logical form whose conditions each match at least one row.
/// Throws std::invalid_argument on a table without rows or columns.
LogicalForm sample_logical_form(const Table& tab, Rng& rng, const SamplerConfig& cfg);

struct SilverExample {
    std::string question;
    std::string sql;
    std::string table_id;
    LogicalForm lf;
};

struct SilverReport {
    std::size_t requested = 0;
    std::size_t generated = 0;
    std::size_t resamples = 0;
    std::size_t duplicates_kept = 0;
};

struct SilverResult {
    std::vector<SilverExample> examples;
    SilverReport report;
};

/// Generates n (question, sql, table) triples. Tables are picked uniformly
/// from a stream seeded by cfg.seed; each table draws forms from its own
/// stream derived from (cfg.seed, table id).
SilverResult generate_silver(std::span<const Table> tables, std::size_t n,
                             const QuestionGenerator& qg, const SamplerConfig& cfg);

/// Marks silver provenance in the questions-file phase field.
inline constexpr int kSilverPhase = 99;

}  // namespace sqlgen
