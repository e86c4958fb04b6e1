#include "sqlgen/db.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <sqlite3.h>

#include "sqlgen/text.hpp"

namespace sqlgen {

namespace {

constexpr double kRelativeTolerance = 1e-9;

std::string double_quote(std::string_view name) {
    std::string out = "\"";
    for (char c : name) {
        out.push_back(c);
        if (c == '"') out.push_back('"');
    }
    out.push_back('"');
    return out;
}

class Statement {
public:
    Statement(sqlite3* db, const std::string& sql) {
        if (sqlite3_prepare_v2(db, sql.c_str(), -1, &stmt_, nullptr) != SQLITE_OK) {
            throw DbError(sqlite3_errmsg(db));
        }
    }
    ~Statement() { sqlite3_finalize(stmt_); }
    Statement(const Statement&) = delete;
    Statement& operator=(const Statement&) = delete;
    sqlite3_stmt* get() const { return stmt_; }

private:
    sqlite3_stmt* stmt_ = nullptr;
};

void exec_or_throw(sqlite3* db, const std::string& sql) {
    char* err = nullptr;
    if (sqlite3_exec(db, sql.c_str(), nullptr, nullptr, &err) != SQLITE_OK) {
        std::string message = err != nullptr ? err : "unknown error";
        sqlite3_free(err);
        throw DbError(message);
    }
}

void bind_cell(sqlite3_stmt* stmt, int index, const Value& cell, ColumnType type) {
    if (const auto* d = std::get_if<double>(&cell)) {
        if (type == ColumnType::kReal) {
            sqlite3_bind_double(stmt, index, *d);
        } else {
            const std::string text = format_number(*d);
            sqlite3_bind_text(stmt, index, text.c_str(), static_cast<int>(text.size()),
                              SQLITE_TRANSIENT);
        }
        return;
    }
    const auto& s = std::get<std::string>(cell);
    if (type == ColumnType::kReal) {
        if (auto number = parse_number(s)) {
            sqlite3_bind_double(stmt, index, *number);
            return;
        }
    }
    const std::string text = to_lower(s);
    sqlite3_bind_text(stmt, index, text.c_str(), static_cast<int>(text.size()), SQLITE_TRANSIENT);
}

Datum read_column(sqlite3_stmt* stmt, int col) {
    switch (sqlite3_column_type(stmt, col)) {
        case SQLITE_INTEGER:
            return static_cast<std::int64_t>(sqlite3_column_int64(stmt, col));
        case SQLITE_FLOAT:
            return sqlite3_column_double(stmt, col);
        case SQLITE_NULL:
            return std::monostate{};
        default: {
            const auto* text = reinterpret_cast<const char*>(sqlite3_column_text(stmt, col));
            const int len = sqlite3_column_bytes(stmt, col);
            return std::string(text != nullptr ? text : "", static_cast<std::size_t>(len));
        }
    }
}

// Normalized cell used for result comparison: 0 null, 1 number, 2 text.
struct NormCell {
    int kind = 0;
    double number = 0.0;
    std::string text;
};

NormCell normalize(const Datum& d) {
    NormCell n;
    if (std::holds_alternative<std::monostate>(d)) return n;
    if (const auto* i = std::get_if<std::int64_t>(&d)) {
        n.kind = 1;
        n.number = static_cast<double>(*i);
    } else if (const auto* x = std::get_if<double>(&d)) {
        n.kind = 1;
        n.number = *x;
    } else {
        n.kind = 2;
        n.text = to_lower(trim(std::get<std::string>(d)));
    }
    return n;
}

bool numbers_close(double a, double b) {
    if (a == b) return true;
    return std::fabs(a - b) <= kRelativeTolerance * std::max(std::fabs(a), std::fabs(b));
}

bool cells_equal(const NormCell& a, const NormCell& b) {
    if (a.kind != b.kind) return false;
    if (a.kind == 1) return numbers_close(a.number, b.number);
    return a.text == b.text;
}

bool rows_equal(const std::vector<NormCell>& a, const std::vector<NormCell>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!cells_equal(a[i], b[i])) return false;
    }
    return true;
}

bool row_less(const std::vector<NormCell>& a, const std::vector<NormCell>& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].kind != b[i].kind) return a[i].kind < b[i].kind;
        if (a[i].kind == 1 && a[i].number != b[i].number) return a[i].number < b[i].number;
        if (a[i].kind == 2 && a[i].text != b[i].text) return a[i].text < b[i].text;
    }
    return false;
}

std::vector<std::vector<NormCell>> normalize_rows(const std::vector<Row>& rows) {
    std::vector<std::vector<NormCell>> out;
    out.reserve(rows.size());
    for (const auto& row : rows) {
        std::vector<NormCell> cells;
        cells.reserve(row.size());
        for (const auto& d : row) cells.push_back(normalize(d));
        out.push_back(std::move(cells));
    }
    std::sort(out.begin(), out.end(), row_less);
    return out;
}

}  // namespace

std::string_view engine_error_kind_name(EngineErrorKind kind) {
    switch (kind) {
        case EngineErrorKind::kSyntax: return "syntax";
        case EngineErrorKind::kUnknownColumn: return "unknown_column";
        case EngineErrorKind::kUnknownTable: return "unknown_table";
        case EngineErrorKind::kUnknownFunction: return "unknown_function";
        case EngineErrorKind::kOther: return "other";
    }
    return "other";
}

EngineErrorKind classify_engine_error(std::string_view message) {
    const std::string m = to_lower(message);
    auto has = [&](std::string_view s) { return m.find(s) != std::string::npos; };
    if (has("no such column")) return EngineErrorKind::kUnknownColumn;
    if (has("no such table")) return EngineErrorKind::kUnknownTable;
    if (has("no such function") || has("wrong number of arguments")) {
        return EngineErrorKind::kUnknownFunction;
    }
    if (has("syntax error") || has("incomplete input") || has("unrecognized token") ||
        has("empty statement") || has("multiple statements")) {
        return EngineErrorKind::kSyntax;
    }
    return EngineErrorKind::kOther;
}

std::string translate_identifiers(std::string_view sql) {
    std::string out;
    out.reserve(sql.size() + 8);
    std::size_t i = 0;
    while (i < sql.size()) {
        const char c = sql[i];
        if (c == '\'' || c == '"') {
            // Copy a literal (or an already double-quoted name) through untouched.
            out.push_back(c);
            ++i;
            while (i < sql.size()) {
                out.push_back(sql[i]);
                if (sql[i] == c) {
                    if (i + 1 < sql.size() && sql[i + 1] == c) {
                        out.push_back(c);
                        i += 2;
                        continue;
                    }
                    ++i;
                    break;
                }
                ++i;
            }
        } else if (c == '[') {
            std::string name;
            std::size_t j = i + 1;
            bool closed = false;
            while (j < sql.size()) {
                if (sql[j] == ']') {
                    if (j + 1 < sql.size() && sql[j + 1] == ']') {
                        name.push_back(']');
                        j += 2;
                        continue;
                    }
                    closed = true;
                    ++j;
                    break;
                }
                name.push_back(sql[j++]);
            }
            if (!closed) {
                out.append(sql.substr(i));
                break;
            }
            out += double_quote(name);
            i = j;
        } else {
            out.push_back(c);
            ++i;
        }
    }
    return out;
}

Database::Database(std::string table_id) : table_id_(std::move(table_id)) {}

Database::Database(Database&& other) noexcept
    : table_id_(std::move(other.table_id_)), handle_(std::exchange(other.handle_, nullptr)) {}

Database& Database::operator=(Database&& other) noexcept {
    if (this != &other) {
        if (handle_ != nullptr) sqlite3_close(handle_);
        table_id_ = std::move(other.table_id_);
        handle_ = std::exchange(other.handle_, nullptr);
    }
    return *this;
}

Database::~Database() {
    if (handle_ != nullptr) sqlite3_close(handle_);
}

Database materialize(const Table& tab) {
    std::set<std::string> names;
    for (const auto& h : tab.headers) {
        if (!names.insert(to_lower(h)).second) {
            throw DbError("table " + tab.id + ": duplicate column name '" + to_lower(h) +
                          "' after lowercasing");
        }
    }
    if (tab.headers.empty()) throw DbError("table " + tab.id + " has no columns");

    Database db(tab.id);
    if (sqlite3_open_v2(":memory:", &db.handle_, SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE,
                        nullptr) != SQLITE_OK) {
        throw DbError("cannot open in-memory database");
    }
    // Otherwise an unknown "column" silently becomes a string literal.
    sqlite3_db_config(db.handle_, SQLITE_DBCONFIG_DQS_DML, 0, nullptr);
    sqlite3_db_config(db.handle_, SQLITE_DBCONFIG_DQS_DDL, 0, nullptr);

    std::string create = "CREATE TABLE " + double_quote(tab.id) + " (";
    std::string insert = "INSERT INTO " + double_quote(tab.id) + " VALUES (";
    for (std::size_t i = 0; i < tab.headers.size(); ++i) {
        if (i > 0) {
            create += ", ";
            insert += ", ";
        }
        create += double_quote(to_lower(tab.headers[i]));
        create += tab.types[i] == ColumnType::kReal ? " REAL" : " TEXT";
        insert += "?";
    }
    create += ")";
    insert += ")";
    exec_or_throw(db.handle_, create);

    exec_or_throw(db.handle_, "BEGIN");
    {
        Statement stmt(db.handle_, insert);
        for (const auto& row : tab.rows) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                bind_cell(stmt.get(), static_cast<int>(i + 1), row[i], tab.types[i]);
            }
            if (sqlite3_step(stmt.get()) != SQLITE_DONE) throw DbError(sqlite3_errmsg(db.handle_));
            sqlite3_reset(stmt.get());
            sqlite3_clear_bindings(stmt.get());
        }
    }
    exec_or_throw(db.handle_, "COMMIT");
    exec_or_throw(db.handle_, "PRAGMA query_only = ON");
    return db;
}

ExecResult Database::execute(std::string_view sql) const {
    const std::string translated = translate_identifiers(sql);
    sqlite3_stmt* raw = nullptr;
    const char* tail = nullptr;
    if (sqlite3_prepare_v2(handle_, translated.c_str(), static_cast<int>(translated.size()), &raw,
                           &tail) != SQLITE_OK) {
        return ExecResult::error(sqlite3_errmsg(handle_));
    }
    std::unique_ptr<sqlite3_stmt, int (*)(sqlite3_stmt*)> stmt(raw, sqlite3_finalize);
    if (!stmt) return ExecResult::error("empty statement");
    if (tail != nullptr && !trim(std::string_view(tail)).empty()) {
        return ExecResult::error("multiple statements are not supported");
    }
    if (!sqlite3_stmt_readonly(stmt.get())) return ExecResult::error("statement is not read-only");

    std::vector<Row> rows;
    const int ncols = sqlite3_column_count(stmt.get());
    while (true) {
        const int rc = sqlite3_step(stmt.get());
        if (rc == SQLITE_DONE) break;
        if (rc != SQLITE_ROW) return ExecResult::error(sqlite3_errmsg(handle_));
        Row row;
        row.reserve(static_cast<std::size_t>(ncols));
        for (int c = 0; c < ncols; ++c) row.push_back(read_column(stmt.get(), c));
        rows.push_back(std::move(row));
    }
    return ExecResult::rows(std::move(rows));
}

bool results_equal(const ExecResult& a, const ExecResult& b) {
    if (!a.ok() || !b.ok()) return false;
    if (a.row_list().size() != b.row_list().size()) return false;
    const auto lhs = normalize_rows(a.row_list());
    const auto rhs = normalize_rows(b.row_list());

    bool sorted_match = true;
    for (std::size_t i = 0; i < lhs.size() && sorted_match; ++i) {
        sorted_match = rows_equal(lhs[i], rhs[i]);
    }
    if (sorted_match) return true;

    // Values within tolerance can sort into different orders; fall back to
    // matching each row against any unused row.
    std::vector<bool> used(rhs.size(), false);
    for (const auto& row : lhs) {
        bool found = false;
        for (std::size_t j = 0; j < rhs.size(); ++j) {
            if (!used[j] && rows_equal(row, rhs[j])) {
                used[j] = true;
                found = true;
                break;
            }
        }
        if (!found) return false;
    }
    return true;
}

const Database& DatabaseCache::get(std::string_view table_id) {
    auto it = cache_.find(std::string(table_id));
    if (it != cache_.end()) return *it->second;
    const Table& tab = tables_->at(table_id);
    auto db = std::make_unique<Database>(materialize(tab));
    return *cache_.emplace(tab.id, std::move(db)).first->second;
}

}  // namespace sqlgen
