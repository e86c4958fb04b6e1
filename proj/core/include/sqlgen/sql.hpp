#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sqlgen/dataset.hpp"

namespace sqlgen {

/// Aggregation slot, indexed as in the WikiSQL annotations.
enum class Aggregation : int { kNone = 0, kMax = 1, kMin = 2, kCount = 3, kSum = 4, kAvg = 5 };
inline constexpr int kNumAggregations = 6;

/// Condition operator, indexed as in the WikiSQL annotations. kOp (index 3)
/// is accepted by the loader but never composed.
enum class Operator : int { kEq = 0, kGt = 1, kLt = 2, kOp = 3 };
inline constexpr int kNumOperators = 4;

/// Lowercase SQL function name, empty for kNone.
std::string_view aggregation_name(Aggregation agg);
std::optional<Aggregation> aggregation_from_name(std::string_view name);

std::string_view operator_symbol(Operator op);
std::optional<Operator> operator_from_symbol(std::string_view symbol);

struct Predicate {
    std::string column;
    Operator op = Operator::kEq;
    /// string renders quoted, double renders as a bare number.
    Value value;

    bool operator==(const Predicate&) const = default;
};

/// One select column, one aggregation slot, one table, a conjunction of conditions.
struct SqlStatement {
    Aggregation agg = Aggregation::kNone;
    std::string select_column;
    std::string table_id;
    std::vector<Predicate> conds;

    bool operator==(const SqlStatement&) const = default;
};

class ComposeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Resolves column indices to lowercased header names and normalizes condition
/// values. Numbers on real columns stay numeric; everything else becomes
/// lowercased text.
SqlStatement compose(const LogicalForm& lf, const Table& tab);

/// `select agg([col]) from [table] where [c] op 'v' and ...`, lowercase keywords.
std::string render(const SqlStatement& stmt);

/// Bracket-quotes an identifier, doubling any ']'.
std::string quote_identifier(std::string_view name);
/// Single-quotes a string literal, doubling any '\''.
std::string quote_string(std::string_view text);
std::string render_value(const Value& value);

struct ParseFailure {
    /// Index of the offending token; the end of input counts as one token.
    std::size_t token_index = 0;
    /// Byte offset of that token in the input.
    std::size_t offset = 0;
    std::string message;
};

/// Statement as written, with aggregation and operator slots kept verbatim so
/// that unrecognized tokens can be reported per slot.
struct SlotStatement {
    struct Cond {
        std::string column;
        std::string op;
        std::size_t op_token = 0;
        Value value;
    };
    /// Empty when no aggregation function was written.
    std::string agg;
    std::size_t agg_token = 0;
    std::string select_column;
    std::string table_id;
    std::vector<Cond> conds;
};

template <typename T>
class ParseResult {
public:
    ParseResult(T value) : result_(std::move(value)) {}
    ParseResult(ParseFailure failure) : result_(std::move(failure)) {}

    bool ok() const { return std::holds_alternative<T>(result_); }
    explicit operator bool() const { return ok(); }

    const T& value() const { return std::get<T>(result_); }
    T& value() { return std::get<T>(result_); }
    const ParseFailure& failure() const { return std::get<ParseFailure>(result_); }

private:
    std::variant<T, ParseFailure> result_;
};

/// Shape-level parse: accepts any word before '(' as an aggregation and any
/// operator-like token, so slot-level validity can be judged separately.
ParseResult<SlotStatement> parse_slots(std::string_view text);

/// Strict parse; exact inverse of render() on its image. Keywords are
/// case-insensitive and surrounding whitespace is ignored.
ParseResult<SqlStatement> parse(std::string_view text);

}  // namespace sqlgen
