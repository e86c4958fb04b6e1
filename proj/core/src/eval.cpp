#include "sqlgen/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <optional>
#include <set>
#include <stdexcept>
#include <tuple>

#include <nlohmann/json.hpp>

#include "sqlgen/sql.hpp"
#include "sqlgen/text.hpp"

namespace sqlgen {

namespace {

// Display order of the error table rows.
constexpr std::array<Slot, 5> kTableOrder = {Slot::kSelectColumn, Slot::kAggFunction,
                                             Slot::kWhereColumn, Slot::kWhereOper,
                                             Slot::kWhereValue};

std::string_view slot_title(Slot s) {
    switch (s) {
        case Slot::kAggFunction: return "Agg Function";
        case Slot::kSelectColumn: return "Select Column";
        case Slot::kWhereColumn: return "Where Column";
        case Slot::kWhereOper: return "Where Oper";
        case Slot::kWhereValue: return "Where Value";
        case Slot::kNone: return "-";
    }
    return "-";
}

// Text form used both for the "found in question" test and for comparing
// values: quoted '10' and bare 10 agree.
std::string value_key(const Value& v) {
    if (const auto* d = std::get_if<double>(&v)) return format_number(*d);
    std::string text = normalize_text(std::get<std::string>(v));
    if (auto number = parse_number(text)) return format_number(*number);
    return text;
}

std::string value_surface(const Value& v) {
    if (const auto* d = std::get_if<double>(&v)) return format_number(*d);
    return normalize_text(std::get<std::string>(v));
}

std::optional<Slot> invalid_slot(const SlotStatement& s, const Table& tab,
                                 std::string_view question) {
    std::set<std::string> headers;
    for (const auto& h : tab.headers) headers.insert(normalize_text(h));
    const std::string q = normalize_text(question);

    if (!s.agg.empty() && !aggregation_from_name(s.agg)) return Slot::kAggFunction;
    if (!headers.contains(normalize_text(s.select_column))) return Slot::kSelectColumn;
    for (const auto& c : s.conds) {
        if (!headers.contains(normalize_text(c.column))) return Slot::kWhereColumn;
    }
    for (const auto& c : s.conds) {
        if (!operator_from_symbol(c.op)) return Slot::kWhereOper;
    }
    for (const auto& c : s.conds) {
        if (q.find(value_surface(c.value)) == std::string::npos) return Slot::kWhereValue;
    }
    return std::nullopt;
}

template <typename Key>
std::multiset<Key> cond_keys(const SqlStatement& stmt, Key (*key)(const Predicate&)) {
    std::multiset<Key> out;
    for (const auto& p : stmt.conds) out.insert(key(p));
    return out;
}

std::string column_key(const Predicate& p) { return normalize_text(p.column); }

std::pair<std::string, int> column_op_key(const Predicate& p) {
    return {normalize_text(p.column), static_cast<int>(p.op)};
}

std::tuple<std::string, int, std::string> full_key(const Predicate& p) {
    return {normalize_text(p.column), static_cast<int>(p.op), value_key(p.value)};
}

}  // namespace

std::string_view verdict_name(Verdict v) {
    switch (v) {
        case Verdict::kCorrect: return "correct";
        case Verdict::kParseFailure: return "parse_failure";
        case Verdict::kInvalid: return "invalid";
        case Verdict::kWrong: return "wrong";
    }
    return "correct";
}

std::string_view slot_name(Slot s) {
    switch (s) {
        case Slot::kAggFunction: return "agg_function";
        case Slot::kSelectColumn: return "select_column";
        case Slot::kWhereColumn: return "where_column";
        case Slot::kWhereOper: return "where_oper";
        case Slot::kWhereValue: return "where_value";
        case Slot::kNone: return "none";
    }
    return "none";
}

ErrorClass classify_error(std::string_view pred_text, const LogicalForm& gold, const Table& tab,
                          std::string_view question) {
    auto slots = parse_slots(pred_text);
    if (!slots) return {Verdict::kParseFailure, Slot::kNone};
    if (auto slot = invalid_slot(slots.value(), tab, question)) return {Verdict::kInvalid, *slot};

    // Every token is legitimate, so the strict parse succeeds.
    const SqlStatement pred = parse(pred_text).value();
    const SqlStatement ref = compose(gold, tab);

    if (pred.agg != ref.agg) return {Verdict::kWrong, Slot::kAggFunction};
    if (normalize_text(pred.select_column) != normalize_text(ref.select_column)) {
        return {Verdict::kWrong, Slot::kSelectColumn};
    }
    if (cond_keys(pred, column_key) != cond_keys(ref, column_key)) {
        return {Verdict::kWrong, Slot::kWhereColumn};
    }
    if (cond_keys(pred, column_op_key) != cond_keys(ref, column_op_key)) {
        return {Verdict::kWrong, Slot::kWhereOper};
    }
    if (cond_keys(pred, full_key) != cond_keys(ref, full_key)) {
        return {Verdict::kWrong, Slot::kWhereValue};
    }
    return {Verdict::kCorrect, Slot::kNone};
}

bool hallucination_flag(std::string_view pred_text, const Table& tab, std::string_view question) {
    auto slots = parse_slots(pred_text);
    if (!slots) return false;
    const auto slot = invalid_slot(slots.value(), tab, question);
    return slot == Slot::kSelectColumn || slot == Slot::kWhereColumn || slot == Slot::kWhereValue;
}

std::size_t EvalReport::count(Verdict kind) const {
    std::size_t total = 0;
    for (const auto& [cls, n] : error_counts) {
        if (cls.kind == kind) total += n;
    }
    return total;
}

std::size_t EvalReport::count(Verdict kind, Slot slot) const {
    auto it = error_counts.find(ErrorClass{kind, slot});
    return it == error_counts.end() ? 0 : it->second;
}

EvalReport execution_accuracy(std::span<const std::string> preds,
                              std::span<const QuestionRecord> records, DatabaseCache& dbs,
                              const TableIndex& tables) {
    if (preds.size() != records.size()) {
        throw std::invalid_argument("execution_accuracy: " + std::to_string(preds.size()) +
                                    " predictions but " + std::to_string(records.size()) +
                                    " records");
    }
    EvalReport report;
    report.n = preds.size();
    for (std::size_t i = 0; i < preds.size(); ++i) {
        const QuestionRecord& rec = records[i];
        const Table& tab = tables.at(rec.table_id);
        const Database& db = dbs.get(rec.table_id);
        const ExecResult gold = db.execute(render(compose(rec.lf, tab)));
        const ExecResult pred = db.execute(preds[i]);
        if (!pred.ok()) ++report.unexecutable;
        if (results_equal(pred, gold)) ++report.exec_correct;

        ++report.error_counts[classify_error(preds[i], rec.lf, tab, rec.question)];
        if (hallucination_flag(preds[i], tab, rec.question)) ++report.hallucination_count;
    }
    if (report.n > 0) {
        report.exec_accuracy =
            static_cast<double>(report.exec_correct) / static_cast<double>(report.n);
    }
    return report;
}

std::string report_to_json(const EvalReport& report) {
    nlohmann::ordered_json j;
    j["n"] = report.n;
    j["exec_accuracy"] = round_significant(report.exec_accuracy);
    j["exec_correct"] = report.exec_correct;
    j["unexecutable"] = report.unexecutable;
    j["hallucination_count"] = report.hallucination_count;
    nlohmann::ordered_json counts;
    counts["correct"] = report.count(Verdict::kCorrect);
    counts["parse_failure"] = report.count(Verdict::kParseFailure);
    for (Verdict v : {Verdict::kInvalid, Verdict::kWrong}) {
        nlohmann::ordered_json per_slot;
        for (Slot s : kTableOrder) per_slot[std::string(slot_name(s))] = report.count(v, s);
        counts[std::string(verdict_name(v))] = std::move(per_slot);
    }
    j["error_counts"] = std::move(counts);
    return j.dump(2);
}

std::string format_error_table(const EvalReport& report) {
    std::string out;
    char line[96];
    std::snprintf(line, sizeof(line), "%-9s %-15s %12s\n", "Type", "Category", "Total Errors");
    out += line;
    for (Verdict v : {Verdict::kInvalid, Verdict::kWrong}) {
        bool first = true;
        for (Slot s : kTableOrder) {
            std::snprintf(line, sizeof(line), "%-9s %-15s %12zu\n",
                          first ? (v == Verdict::kInvalid ? "Invalid" : "Wrong") : "",
                          std::string(slot_title(s)).c_str(), report.count(v, s));
            out += line;
            first = false;
        }
    }
    std::snprintf(line, sizeof(line), "%-25s %12zu\n", "Parse failures", report.count(Verdict::kParseFailure));
    out += line;
    std::snprintf(line, sizeof(line), "%-25s %12zu\n", "Correct", report.count(Verdict::kCorrect));
    out += line;
    std::snprintf(line, sizeof(line), "%-25s %12zu\n", "Total", report.n);
    out += line;
    return out;
}

}  // namespace sqlgen
