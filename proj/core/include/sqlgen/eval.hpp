#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>

#include "sqlgen/dataset.hpp"
#include "sqlgen/db.hpp"

namespace sqlgen {

enum class Verdict { kCorrect, kParseFailure, kInvalid, kWrong };

/// Slots in tie-break order. kNone goes with kCorrect and kParseFailure.
enum class Slot { kAggFunction, kSelectColumn, kWhereColumn, kWhereOper, kWhereValue, kNone };

inline constexpr std::array<Slot, 5> kSlotOrder = {
    Slot::kAggFunction, Slot::kSelectColumn, Slot::kWhereColumn, Slot::kWhereOper,
    Slot::kWhereValue};

std::string_view verdict_name(Verdict v);
std::string_view slot_name(Slot s);

struct ErrorClass {
    Verdict kind = Verdict::kCorrect;
    Slot slot = Slot::kNone;

    auto operator<=>(const ErrorClass&) const = default;
};

/// Parses pred_text and compares it slot by slot with the composed gold.
/// Invalid: a predicted column is not in the table, an aggregation or
/// operator token is not recognized, or a value does not occur in the
/// question. Wrong: every token is legitimate but a slot disagrees; the first
/// disagreeing slot in kSlotOrder is reported. Conditions compare as multisets.
ErrorClass classify_error(std::string_view pred_text, const LogicalForm& gold, const Table& tab,
                          std::string_view question);

/// True iff classify_error would report Invalid on the select column, a where
/// column or a where value. The Invalid screen does not depend on the gold
/// form, so none is needed here.
bool hallucination_flag(std::string_view pred_text, const Table& tab, std::string_view question);

struct EvalReport {
    std::size_t n = 0;
    std::size_t exec_correct = 0;
    std::size_t unexecutable = 0;
    double exec_accuracy = 0.0;
    std::map<ErrorClass, std::size_t> error_counts;
    std::size_t hallucination_count = 0;

    std::size_t count(Verdict kind) const;
    std::size_t count(Verdict kind, Slot slot) const;
};

/// Executes each prediction and the composed gold on the record's table and
/// scores results_equal. Also classifies every prediction. Throws
/// std::invalid_argument when preds and records differ in length and
/// DataError when a record's table is missing.
EvalReport execution_accuracy(std::span<const std::string> preds,
                              std::span<const QuestionRecord> records, DatabaseCache& dbs,
                              const TableIndex& tables);

std::string report_to_json(const EvalReport& report);

/// Fixed-width Invalid/Wrong x slot table.
std::string format_error_table(const EvalReport& report);

}  // namespace sqlgen
