#include "sqlgen/silver.hpp"

#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "sqlgen/text.hpp"

namespace sqlgen {

namespace {

std::optional<double> numeric_cell(const Value& v) {
    if (const auto* d = std::get_if<double>(&v)) return *d;
    return parse_number(std::get<std::string>(v));
}

// Operators whose single-condition query on `cell` matches at least one row.
// "=" always does because the value is a real cell of the column.
std::vector<Operator> satisfiable_operators(const Table& tab, std::size_t col,
                                            const Value& cell) {
    std::vector<Operator> ops = {Operator::kEq};
    if (tab.types[col] != ColumnType::kReal) return ops;
    const auto x = numeric_cell(cell);
    if (!x) return ops;
    bool has_greater = false;
    bool has_less = false;
    for (const auto& row : tab.rows) {
        if (auto y = numeric_cell(row[col])) {
            has_greater = has_greater || *y > *x;
            has_less = has_less || *y < *x;
        }
    }
    if (has_greater) ops.push_back(Operator::kGt);
    if (has_less) ops.push_back(Operator::kLt);
    return ops;
}

std::string value_text(const Value& v) {
    if (const auto* s = std::get_if<std::string>(&v)) return *s;
    return format_number(std::get<double>(v));
}

}  // namespace

LogicalForm sample_logical_form(const Table& tab, Rng& rng, const SamplerConfig& cfg) {
    if (tab.num_rows() == 0 || tab.num_columns() == 0) {
        throw std::invalid_argument("cannot sample from empty table " + tab.id);
    }
    if (cfg.max_conds < 0) throw std::invalid_argument("max_conds must be >= 0");
    const std::size_t ncols = tab.num_columns();

    LogicalForm lf;
    lf.sel = static_cast<int>(rng.below(ncols));
    lf.agg = static_cast<int>(rng.below(kNumAggregations));
    const bool text_sel = tab.types[static_cast<std::size_t>(lf.sel)] == ColumnType::kText;
    if (cfg.numeric_agg_only && text_sel &&
        (lf.agg == static_cast<int>(Aggregation::kSum) ||
         lf.agg == static_cast<int>(Aggregation::kAvg))) {
        lf.agg = static_cast<int>(rng.below(4));  // none, max, min, count
    }

    const auto max_conds = static_cast<std::uint64_t>(cfg.max_conds);
    std::uint64_t n_conds = 0;
    if (cfg.allow_zero_conds) {
        n_conds = rng.below(max_conds + 1);
    } else if (max_conds > 0) {
        n_conds = 1 + rng.below(max_conds);
    }

    for (std::uint64_t i = 0; i < n_conds; ++i) {
        const std::size_t col = rng.below(ncols);
        const std::size_t row = rng.below(tab.num_rows());
        const Value& cell = tab.rows[row][col];
        const auto ops = satisfiable_operators(tab, col, cell);
        const Operator op = ops[rng.below(ops.size())];
        lf.conds.push_back(Condition{static_cast<int>(col), static_cast<int>(op), cell});
    }
    return lf;
}

std::string template_question(const SqlStatement& stmt, const Table& /*tab*/) {
    std::string q;
    switch (stmt.agg) {
        case Aggregation::kNone: q = "what is the "; break;
        case Aggregation::kCount: q = "how many "; break;
        case Aggregation::kMax: q = "what is the highest "; break;
        case Aggregation::kMin: q = "what is the lowest "; break;
        case Aggregation::kSum: q = "what is the total "; break;
        case Aggregation::kAvg: q = "what is the average "; break;
    }
    q += stmt.select_column;
    for (std::size_t i = 0; i < stmt.conds.size(); ++i) {
        const auto& c = stmt.conds[i];
        q += i == 0 ? " when " : " and ";
        q += c.column;
        switch (c.op) {
            case Operator::kGt: q += " is more than "; break;
            case Operator::kLt: q += " is less than "; break;
            default: q += " is "; break;
        }
        q += value_text(c.value);
    }
    return q;
}

SilverResult generate_silver(std::span<const Table> tables, std::size_t n,
                             const QuestionGenerator& qg, const SamplerConfig& cfg) {
    SilverResult result;
    result.report.requested = n;
    if (n == 0) return result;

    std::vector<const Table*> eligible;
    for (const auto& t : tables) {
        if (t.num_rows() > 0 && t.num_columns() > 0) eligible.push_back(&t);
    }
    if (eligible.empty()) throw std::invalid_argument("no table with rows to sample from");

    Rng table_rng(derive_seed(cfg.seed, "silver/tables"));
    std::unordered_map<std::string, Rng> streams;
    std::unordered_set<std::string> seen;
    result.examples.reserve(n);

    for (std::size_t i = 0; i < n; ++i) {
        const Table& tab = *eligible[table_rng.below(eligible.size())];
        auto it = streams.find(tab.id);
        if (it == streams.end()) {
            it = streams.emplace(tab.id, Rng(derive_seed(cfg.seed, tab.id))).first;
        }
        Rng& rng = it->second;

        LogicalForm lf;
        SqlStatement stmt;
        std::string sql;
        for (std::size_t attempt = 0;; ++attempt) {
            lf = sample_logical_form(tab, rng, cfg);
            stmt = compose(lf, tab);
            sql = render(stmt);
            if (!seen.contains(sql)) break;
            if (attempt >= cfg.dedup_retries) {
                ++result.report.duplicates_kept;
                break;
            }
            ++result.report.resamples;
        }
        seen.insert(sql);
        result.examples.push_back(
            SilverExample{qg.question_for(stmt, tab), std::move(sql), tab.id, std::move(lf)});
    }
    result.report.generated = result.examples.size();
    return result;
}

}  // namespace sqlgen
