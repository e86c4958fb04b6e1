#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "sqlgen/dataset.hpp"

struct sqlite3;

namespace sqlgen {

using Datum = std::variant<std::monostate, std::int64_t, double, std::string>;
using Row = std::vector<Datum>;

/// Outcome of running one statement. An empty row list is a successful
/// result, never an error.
class ExecResult {
public:
    struct Rows {
        std::vector<Row> rows;
    };
    struct RuntimeError {
        std::string message;
    };

    static ExecResult rows(std::vector<Row> rows) { return ExecResult(Rows{std::move(rows)}); }
    static ExecResult error(std::string message) { return ExecResult(RuntimeError{std::move(message)}); }

    bool ok() const { return std::holds_alternative<Rows>(outcome_); }
    const std::vector<Row>& row_list() const { return std::get<Rows>(outcome_).rows; }
    const std::string& error_message() const { return std::get<RuntimeError>(outcome_).message; }

private:
    explicit ExecResult(std::variant<Rows, RuntimeError> outcome) : outcome_(std::move(outcome)) {}
    std::variant<Rows, RuntimeError> outcome_;
};

enum class EngineErrorKind { kSyntax, kUnknownColumn, kUnknownTable, kUnknownFunction, kOther };

std::string_view engine_error_kind_name(EngineErrorKind kind);
EngineErrorKind classify_engine_error(std::string_view message);

class DbError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An in-memory SQLite database holding exactly one materialized table.
/// Move-only; confined to one thread at a time.
class Database {
public:
    Database(Database&&) noexcept;
    Database& operator=(Database&&) noexcept;
    Database(const Database&) = delete;
    Database& operator=(const Database&) = delete;
    ~Database();

    const std::string& table_id() const { return table_id_; }

    /// Runs one read-only statement. Never throws on bad SQL.
    ExecResult execute(std::string_view sql) const;

private:
    friend Database materialize(const Table& tab);
    explicit Database(std::string table_id);

    std::string table_id_;
    sqlite3* handle_ = nullptr;
};

/// Creates the relation named by tab.id with lowercased column names. Real
/// cells that parse as numbers are stored as doubles; text is lowercased.
/// Throws DbError when two headers collide after lowercasing.
Database materialize(const Table& tab);

inline ExecResult execute(std::string_view sql, const Database& db) { return db.execute(sql); }

/// Rewrites bracket-quoted identifiers ([a]]b] -> "a]b") outside string
/// literals so the engine sees standard double-quoted identifiers.
std::string translate_identifiers(std::string_view sql);

/// Multiset equality of row sets after normalization (text lowercased and
/// trimmed, integers widened, numbers equal within 1e-9 relative). A runtime
/// error never equals anything.
bool results_equal(const ExecResult& a, const ExecResult& b);

/// One database per table id, built on first use.
class DatabaseCache {
public:
    explicit DatabaseCache(const TableIndex& tables) : tables_(&tables) {}

    /// Throws DataError for an unknown table id, DbError if the table cannot
    /// be materialized.
    const Database& get(std::string_view table_id);

private:
    const TableIndex* tables_;
    std::unordered_map<std::string, std::unique_ptr<Database>> cache_;
};

}  // namespace sqlgen
