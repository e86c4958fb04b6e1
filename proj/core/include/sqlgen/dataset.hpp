#pragma once

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace sqlgen {

/// A cell or literal keeps its source type: JSON strings stay strings and
/// JSON numbers become doubles.
using Value = std::variant<std::string, double>;

enum class ColumnType { kText, kReal };

std::string_view column_type_name(ColumnType type);

struct Table {
    std::string id;
    std::vector<std::string> headers;
    std::vector<ColumnType> types;
    std::vector<std::vector<Value>> rows;

    std::size_t num_columns() const { return headers.size(); }
    std::size_t num_rows() const { return rows.size(); }

    /// Throws DataError when the arity or non-emptiness invariants are broken.
    void check_invariants() const;

    bool operator==(const Table&) const = default;
};

struct Condition {
    int col = 0;
    int op = 0;
    Value value;

    bool operator==(const Condition&) const = default;
};

struct LogicalForm {
    int sel = 0;
    int agg = 0;
    std::vector<Condition> conds;

    bool operator==(const LogicalForm&) const = default;
};

struct QuestionRecord {
    int phase = 0;
    std::string table_id;
    std::string question;
    LogicalForm lf;

    bool operator==(const QuestionRecord&) const = default;
};

/// Malformed input data. line is 1-based; 0 when not tied to a file line.
class DataError : public std::runtime_error {
public:
    DataError(const std::string& message, std::size_t line = 0);
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Parses one line of a tables file.
Table parse_table_line(std::string_view line, std::size_t line_no = 0);

/// Parses one line of a questions file.
QuestionRecord parse_question_line(std::string_view line, std::size_t line_no = 0);

/// Newline-delimited JSON tables file. Blank lines are skipped; duplicate ids
/// are rejected.
std::vector<Table> load_tables(const std::filesystem::path& path);

std::vector<QuestionRecord> load_questions(const std::filesystem::path& path);

/// Serializes back to the input line format.
std::string dump_table(const Table& table);
std::string dump_question(const QuestionRecord& record);

/// Lookup by table_id over a set of loaded tables.
class TableIndex {
public:
    TableIndex() = default;
    explicit TableIndex(std::vector<Table> tables);

    const Table* find(std::string_view table_id) const;
    const Table& at(std::string_view table_id) const;

    const std::vector<Table>& tables() const { return tables_; }
    std::size_t size() const { return tables_.size(); }

private:
    std::vector<Table> tables_;
    std::unordered_map<std::string, std::size_t> by_id_;
};

struct Violation {
    enum class Kind {
        kTableMismatch,
        kSelOutOfRange,
        kAggOutOfRange,
        kAggTypeMismatch,
        kCondColumnOutOfRange,
        kOpOutOfRange,
    };
    Kind kind;
    std::string message;
};

/// Lists every index or type violation of rec against tab. Never throws.
std::vector<Violation> validate_record(const QuestionRecord& rec, const Table& tab);

}  // namespace sqlgen
