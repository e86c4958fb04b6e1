#include "sqlgen/dataset.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include <nlohmann/json.hpp>

namespace sqlgen {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string with_line(const std::string& message, std::size_t line) {
    if (line == 0) return message;
    return "line " + std::to_string(line) + ": " + message;
}

json parse_json_line(std::string_view line, std::size_t line_no) {
    try {
        json j = json::parse(line.begin(), line.end());
        if (!j.is_object()) throw DataError("expected a JSON object", line_no);
        return j;
    } catch (const json::parse_error& e) {
        throw DataError(std::string("malformed JSON: ") + e.what(), line_no);
    }
}

const json& require(const json& obj, const char* key, std::size_t line_no) {
    auto it = obj.find(key);
    if (it == obj.end()) throw DataError(std::string("missing key '") + key + "'", line_no);
    return *it;
}

[[noreturn]] void wrong_type(const char* key, const char* expected, std::size_t line_no) {
    throw DataError(std::string("key '") + key + "' must be " + expected, line_no);
}

int require_int(const json& obj, const char* key, std::size_t line_no) {
    const json& v = require(obj, key, line_no);
    if (!v.is_number_integer()) wrong_type(key, "an integer", line_no);
    return v.get<int>();
}

std::string require_string(const json& obj, const char* key, std::size_t line_no) {
    const json& v = require(obj, key, line_no);
    if (!v.is_string()) wrong_type(key, "a string", line_no);
    return v.get<std::string>();
}

Value to_value(const json& v, const char* what, std::size_t line_no) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number()) return v.get<double>();
    throw DataError(std::string(what) + " must be a string or a number", line_no);
}

ordered_json from_value(const Value& v) {
    if (const auto* s = std::get_if<std::string>(&v)) return *s;
    const double d = std::get<double>(v);
    if (std::floor(d) == d && std::fabs(d) < 9.0e15) return static_cast<std::int64_t>(d);
    return d;
}

template <typename F>
void for_each_line(const std::filesystem::path& path, F&& f) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        f(line, line_no);
    }
}

}  // namespace

DataError::DataError(const std::string& message, std::size_t line)
    : std::runtime_error(with_line(message, line)), line_(line) {}

std::string_view column_type_name(ColumnType type) {
    return type == ColumnType::kReal ? "real" : "text";
}

void Table::check_invariants() const {
    if (id.empty()) throw DataError("table id is empty");
    if (headers.size() != types.size()) {
        throw DataError("table " + id + ": " + std::to_string(headers.size()) + " headers but " +
                        std::to_string(types.size()) + " types");
    }
    for (const auto& h : headers) {
        if (h.empty()) throw DataError("table " + id + ": empty header");
    }
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != headers.size()) {
            throw DataError("table " + id + ": row " + std::to_string(r) + " has " +
                            std::to_string(rows[r].size()) + " cells, expected " +
                            std::to_string(headers.size()));
        }
    }
}

Table parse_table_line(std::string_view line, std::size_t line_no) {
    const json j = parse_json_line(line, line_no);
    Table t;
    t.id = require_string(j, "id", line_no);

    const json& header = require(j, "header", line_no);
    if (!header.is_array()) wrong_type("header", "a list", line_no);
    for (const auto& h : header) {
        if (!h.is_string()) wrong_type("header", "a list of strings", line_no);
        t.headers.push_back(h.get<std::string>());
    }

    const json& types = require(j, "types", line_no);
    if (!types.is_array()) wrong_type("types", "a list", line_no);
    for (const auto& ty : types) {
        if (ty == "text") {
            t.types.push_back(ColumnType::kText);
        } else if (ty == "real") {
            t.types.push_back(ColumnType::kReal);
        } else {
            throw DataError("unknown column type " + ty.dump(), line_no);
        }
    }

    const json& rows = require(j, "rows", line_no);
    if (!rows.is_array()) wrong_type("rows", "a list", line_no);
    t.rows.reserve(rows.size());
    for (const auto& row : rows) {
        if (!row.is_array()) wrong_type("rows", "a list of lists", line_no);
        std::vector<Value> cells;
        cells.reserve(row.size());
        for (const auto& cell : row) cells.push_back(to_value(cell, "cell", line_no));
        t.rows.push_back(std::move(cells));
    }

    try {
        t.check_invariants();
    } catch (const DataError& e) {
        throw DataError(e.what(), line_no);
    }
    return t;
}

QuestionRecord parse_question_line(std::string_view line, std::size_t line_no) {
    const json j = parse_json_line(line, line_no);
    QuestionRecord rec;
    rec.phase = require_int(j, "phase", line_no);
    rec.table_id = require_string(j, "table_id", line_no);
    rec.question = require_string(j, "question", line_no);
    if (rec.question.empty()) throw DataError("question is empty", line_no);

    const json& sql = require(j, "sql", line_no);
    if (!sql.is_object()) wrong_type("sql", "an object", line_no);
    rec.lf.sel = require_int(sql, "sel", line_no);
    rec.lf.agg = require_int(sql, "agg", line_no);
    const json& conds = require(sql, "conds", line_no);
    if (!conds.is_array()) wrong_type("conds", "a list", line_no);
    for (const auto& c : conds) {
        if (!c.is_array() || c.size() != 3 || !c[0].is_number_integer() ||
            !c[1].is_number_integer()) {
            throw DataError("each condition must be [column, operator, value]", line_no);
        }
        rec.lf.conds.push_back(
            Condition{c[0].get<int>(), c[1].get<int>(), to_value(c[2], "condition value", line_no)});
    }
    return rec;
}

std::vector<Table> load_tables(const std::filesystem::path& path) {
    std::vector<Table> tables;
    std::unordered_map<std::string, std::size_t> seen;
    for_each_line(path, [&](const std::string& line, std::size_t line_no) {
        Table t = parse_table_line(line, line_no);
        if (!seen.emplace(t.id, line_no).second) {
            throw DataError("duplicate table id '" + t.id + "' (first seen on line " +
                                std::to_string(seen[t.id]) + ")",
                            line_no);
        }
        tables.push_back(std::move(t));
    });
    return tables;
}

std::vector<QuestionRecord> load_questions(const std::filesystem::path& path) {
    std::vector<QuestionRecord> records;
    for_each_line(path, [&](const std::string& line, std::size_t line_no) {
        records.push_back(parse_question_line(line, line_no));
    });
    return records;
}

std::string dump_table(const Table& table) {
    ordered_json j;
    j["id"] = table.id;
    j["header"] = table.headers;
    ordered_json types = ordered_json::array();
    for (auto ty : table.types) types.push_back(std::string(column_type_name(ty)));
    j["types"] = std::move(types);
    ordered_json rows = ordered_json::array();
    for (const auto& row : table.rows) {
        ordered_json cells = ordered_json::array();
        for (const auto& cell : row) cells.push_back(from_value(cell));
        rows.push_back(std::move(cells));
    }
    j["rows"] = std::move(rows);
    return j.dump();
}

std::string dump_question(const QuestionRecord& record) {
    ordered_json j;
    j["phase"] = record.phase;
    j["table_id"] = record.table_id;
    j["question"] = record.question;
    ordered_json sql;
    sql["sel"] = record.lf.sel;
    sql["agg"] = record.lf.agg;
    ordered_json conds = ordered_json::array();
    for (const auto& c : record.lf.conds) {
        conds.push_back(ordered_json::array({c.col, c.op, from_value(c.value)}));
    }
    sql["conds"] = std::move(conds);
    j["sql"] = std::move(sql);
    return j.dump();
}

TableIndex::TableIndex(std::vector<Table> tables) : tables_(std::move(tables)) {
    for (std::size_t i = 0; i < tables_.size(); ++i) {
        if (!by_id_.emplace(tables_[i].id, i).second) {
            throw DataError("duplicate table id '" + tables_[i].id + "'");
        }
    }
}

const Table* TableIndex::find(std::string_view table_id) const {
    auto it = by_id_.find(std::string(table_id));
    return it == by_id_.end() ? nullptr : &tables_[it->second];
}

const Table& TableIndex::at(std::string_view table_id) const {
    const Table* t = find(table_id);
    if (t == nullptr) throw DataError("unknown table id '" + std::string(table_id) + "'");
    return *t;
}

std::vector<Violation> validate_record(const QuestionRecord& rec, const Table& tab) {
    std::vector<Violation> out;
    const int ncols = static_cast<int>(tab.num_columns());
    if (rec.table_id != tab.id) {
        out.push_back({Violation::Kind::kTableMismatch,
                       "record refers to table '" + rec.table_id + "', got '" + tab.id + "'"});
    }
    const bool sel_ok = rec.lf.sel >= 0 && rec.lf.sel < ncols;
    if (!sel_ok) {
        out.push_back({Violation::Kind::kSelOutOfRange,
                       "sel out of range: " + std::to_string(rec.lf.sel)});
    }
    if (rec.lf.agg < 0 || rec.lf.agg >= 6) {
        out.push_back({Violation::Kind::kAggOutOfRange,
                       "agg out of range: " + std::to_string(rec.lf.agg)});
    } else if (sel_ok && (rec.lf.agg == 4 || rec.lf.agg == 5) &&
               tab.types[static_cast<std::size_t>(rec.lf.sel)] == ColumnType::kText) {
        out.push_back({Violation::Kind::kAggTypeMismatch,
                       "aggregation/type mismatch: numeric aggregation on text column"});
    }
    for (std::size_t i = 0; i < rec.lf.conds.size(); ++i) {
        const auto& c = rec.lf.conds[i];
        if (c.col < 0 || c.col >= ncols) {
            out.push_back({Violation::Kind::kCondColumnOutOfRange,
                           "condition " + std::to_string(i) + " column out of range: " +
                               std::to_string(c.col)});
        }
        if (c.op < 0 || c.op >= 4) {
            out.push_back({Violation::Kind::kOpOutOfRange,
                           "condition " + std::to_string(i) + " operator out of range: " +
                               std::to_string(c.op)});
        }
    }
    return out;
}

}  // namespace sqlgen
