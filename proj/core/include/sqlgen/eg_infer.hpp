#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "sqlgen/db.hpp"

namespace sqlgen {

struct Candidate {
    std::string sql;
    double score = 0.0;
};

/// Ranked model outputs for one question, best first.
struct CandidateList {
    std::vector<Candidate> candidates;
    std::size_t beam_width = 3;

    /// Throws std::invalid_argument when empty or scores increase.
    void validate() const;

    /// Builds a list from texts ordered best first, with scores 0, -1, -2, ...
    static CandidateList from_texts(std::vector<std::string> texts, std::size_t beam_width = 3);
};

struct CandidateDiagnostic {
    std::size_t index = 0;
    bool executed = false;
    std::size_t row_count = 0;
    EngineErrorKind error_kind = EngineErrorKind::kOther;
    std::string error_message;
};

struct EgSelection {
    std::size_t chosen_index = 0;
    std::string sql;
    bool all_failed = false;
    std::vector<CandidateDiagnostic> diagnostics;
};

/// First candidate (within beam_width) that executes without a runtime
/// error; empty results count as clean. Falls back to the top candidate with
/// all_failed set when every candidate errors.
EgSelection eg_select(const CandidateList& cands, const Database& db);

struct GoldQuery {
    std::string table_id;
    std::string sql;
};

struct EgGainReport {
    std::size_t n = 0;
    std::size_t correct_top1 = 0;
    std::size_t correct_eg = 0;
    double accuracy_top1 = 0.0;
    double accuracy_eg = 0.0;
    std::size_t changed = 0;      ///< examples where EG picked a non-top candidate
    std::size_t all_failed = 0;
    std::map<EngineErrorKind, std::size_t> dropped_by_kind;

    double delta() const { return accuracy_eg - accuracy_top1; }
};

/// Top-1 vs execution-guided accuracy under results_equal scoring.
/// Throws std::invalid_argument when the lists are misaligned.
EgGainReport eg_gain(std::span<const CandidateList> pred_sets, std::span<const GoldQuery> golds,
                     DatabaseCache& dbs, std::vector<EgSelection>* selections = nullptr);

}  // namespace sqlgen
