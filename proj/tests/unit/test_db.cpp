#include <algorithm>
#include <cmath>
#include <optional>

#include <gtest/gtest.h>

#include "sqlgen/db.hpp"
#include "sqlgen/random.hpp"
#include "sqlgen/sql.hpp"
#include "sqlgen/text.hpp"
#include "synthetic.hpp"

namespace sqlgen {
namespace {

using testing::fixture;

const TableIndex& fixtures() {
    static const TableIndex index(load_tables(fixture("tables.jsonl")));
    return index;
}

Row row_of(std::initializer_list<Datum> d) { return Row(d); }

TEST(Db, BackgroundTableHasThreeRows) {
    const Database db = materialize(fixtures().at("1-1000181-1"));
    const auto r = db.execute("select [notes] from [1-1000181-1]");
    ASSERT_TRUE(r.ok()) << r.error_message();
    EXPECT_EQ(r.row_list().size(), 3u);
    const auto c = db.execute("select count([notes]) from [1-1000181-1]");
    ASSERT_TRUE(c.ok());
    EXPECT_TRUE(results_equal(c, ExecResult::rows({row_of({std::int64_t{3}})})));
}

TEST(Db, LabelExecutesToSouthAustraliaRow) {
    const Database db = materialize(fixtures().at("1-1000181-1"));
    const auto r = db.execute(
        "select [notes] from [1-1000181-1] where [state/territory] = 'south australia'");
    ASSERT_TRUE(r.ok()) << r.error_message();
    EXPECT_TRUE(results_equal(r, ExecResult::rows({row_of({std::string("no slogan on current series")})})));
}

TEST(Db, EmptyTableSelectsNothing) {
    const Database db = materialize(fixtures().at("fx-empty"));
    const auto r = db.execute("select [key] from [fx-empty] where [value] > 1");
    ASSERT_TRUE(r.ok());
    EXPECT_TRUE(r.row_list().empty());
}

TEST(Db, RealCellsGivenAsTextSumNumerically) {
    const Database db = materialize(fixtures().at("fx-sum"));
    const auto r = db.execute("select sum([amount]) from [fx-sum]");
    ASSERT_TRUE(r.ok());
    EXPECT_TRUE(results_equal(r, ExecResult::rows({row_of({3.5})})));
}

TEST(Db, QuotedNumberComparesNumericallyOnRealColumn) {
    const Database db = materialize(fixtures().at("2-10301911-6"));
    const auto r = db.execute("select [team] from [2-10301911-6] where [place] > '10'");
    ASSERT_TRUE(r.ok());
    EXPECT_EQ(r.row_list().size(), 2u);
}

TEST(Db, RuntimeErrorsAreValues) {
    const Database db = materialize(fixtures().at("1-1000181-1"));
    const auto unknown_col = db.execute("select [nonexistent] from [1-1000181-1]");
    ASSERT_FALSE(unknown_col.ok());
    EXPECT_EQ(classify_engine_error(unknown_col.error_message()), EngineErrorKind::kUnknownColumn);

    const auto unknown_table = db.execute("select [notes] from [other]");
    ASSERT_FALSE(unknown_table.ok());
    EXPECT_EQ(classify_engine_error(unknown_table.error_message()), EngineErrorKind::kUnknownTable);

    const auto syntax = db.execute("select from where");
    ASSERT_FALSE(syntax.ok());
    EXPECT_EQ(classify_engine_error(syntax.error_message()), EngineErrorKind::kSyntax);

    const auto func = db.execute("select median([notes]) from [1-1000181-1]");
    ASSERT_FALSE(func.ok());
    EXPECT_EQ(classify_engine_error(func.error_message()), EngineErrorKind::kUnknownFunction);
}

TEST(Db, RefusesWritesAndMultipleStatements) {
    const Database db = materialize(fixtures().at("fx-1"));
    EXPECT_FALSE(db.execute("delete from [fx-1]").ok());
    EXPECT_FALSE(db.execute("select 1; select 2").ok());
    EXPECT_FALSE(db.execute("").ok());
    EXPECT_EQ(db.execute("select [cola] from [fx-1]").row_list().size(), 3u);
}

TEST(Db, RejectsHeadersCollidingAfterLowercase) {
    Table t{"dup", {"Name", "NAME"}, {ColumnType::kText, ColumnType::kText}, {}};
    EXPECT_THROW(materialize(t), DbError);
}

TEST(Db, TranslateIdentifiersLeavesLiteralsAlone) {
    EXPECT_EQ(translate_identifiers("select [a]]b] from [t] where [c] = '[x]'"),
              "select \"a]b\" from \"t\" where \"c\" = '[x]'");
    EXPECT_EQ(translate_identifiers("select [say \"hi\"] from [t]"),
              "select \"say \"\"hi\"\"\" from \"t\"");
}

TEST(ResultsEqual, Normalization) {
    const auto a = ExecResult::rows({row_of({std::string("a")})});
    const auto b = ExecResult::rows({row_of({std::string("A ")})});
    EXPECT_TRUE(results_equal(a, b));
    const auto one_two = ExecResult::rows({row_of({1.0}), row_of({2.0})});
    const auto two_one = ExecResult::rows({row_of({std::int64_t{2}}), row_of({std::int64_t{1}})});
    EXPECT_TRUE(results_equal(one_two, two_one));
    EXPECT_FALSE(results_equal(ExecResult::rows({}), ExecResult::error("boom")));
    EXPECT_FALSE(results_equal(ExecResult::error("boom"), ExecResult::error("boom")));
    EXPECT_FALSE(results_equal(one_two, ExecResult::rows({row_of({1.0}), row_of({1.0})})));
    EXPECT_TRUE(results_equal(ExecResult::rows({row_of({0.1 + 0.2})}), ExecResult::rows({row_of({0.3})})));
    EXPECT_TRUE(results_equal(ExecResult::rows({row_of({std::monostate{}})}),
                              ExecResult::rows({row_of({std::monostate{}})})));
}

// Independent evaluator for clean tables (real columns hold only numbers).
std::optional<double> oracle(const Table& t, const LogicalForm& lf, std::size_t* rows_out) {
    std::vector<const std::vector<Value>*> hits;
    for (const auto& row : t.rows) {
        bool keep = true;
        for (const auto& c : lf.conds) {
            const Value& cell = row[c.col];
            if (t.types[c.col] == ColumnType::kReal) {
                const double x = std::get<double>(cell);
                const double v = std::get<double>(c.value);
                keep = keep && (c.op == 0 ? x == v : c.op == 1 ? x > v : x < v);
            } else {
                keep = keep && to_lower(std::get<std::string>(cell)) == to_lower(std::get<std::string>(c.value));
            }
        }
        if (keep) hits.push_back(&row);
    }
    *rows_out = hits.size();
    if (lf.agg == 3) return static_cast<double>(hits.size());
    if (lf.agg == 0 || hits.empty()) return std::nullopt;
    std::vector<double> xs;
    for (const auto* r : hits) xs.push_back(std::get<double>((*r)[lf.sel]));
    double acc = 0.0;
    for (double x : xs) acc += x;
    switch (lf.agg) {
        case 1: return *std::max_element(xs.begin(), xs.end());
        case 2: return *std::min_element(xs.begin(), xs.end());
        case 4: return acc;
        default: return acc / static_cast<double>(xs.size());
    }
}

TEST(Db, MatchesBruteForceEvaluator) {
    Rng rng(2024);
    for (int trial = 0; trial < 300; ++trial) {
        Table t;
        t.id = "clean-" + std::to_string(trial);
        t.headers = {"label", "x", "y"};
        t.types = {ColumnType::kText, ColumnType::kReal, ColumnType::kReal};
        const std::size_t n = 1 + rng.below(6);
        for (std::size_t r = 0; r < n; ++r) {
            t.rows.push_back({Value(std::string(rng.below(2) ? "Aa" : "bB")),
                              Value(static_cast<double>(rng.below(5))),
                              Value(static_cast<double>(rng.below(100)) / 4.0)});
        }
        LogicalForm lf;
        lf.sel = 1 + static_cast<int>(rng.below(2));
        const int aggs[] = {0, 1, 2, 3, 4, 5};
        lf.agg = aggs[rng.below(6)];
        const std::size_t nconds = rng.below(3);
        for (std::size_t i = 0; i < nconds; ++i) {
            const int col = static_cast<int>(rng.below(3));
            if (col == 0) {
                lf.conds.push_back({0, 0, Value(std::string(rng.below(2) ? "aa" : "BB"))});
            } else {
                lf.conds.push_back({col, static_cast<int>(rng.below(3)), Value(static_cast<double>(rng.below(5)))});
            }
        }
        const Database db = materialize(t);
        const auto res = db.execute(render(compose(lf, t)));
        ASSERT_TRUE(res.ok()) << res.error_message();
        std::size_t hits = 0;
        const auto expected = oracle(t, lf, &hits);
        if (lf.agg == 0) {
            EXPECT_EQ(res.row_list().size(), hits);
        } else if (!expected) {
            ASSERT_EQ(res.row_list().size(), 1u);
            EXPECT_TRUE(std::holds_alternative<std::monostate>(res.row_list()[0][0]));
        } else {
            EXPECT_TRUE(results_equal(res, ExecResult::rows({row_of({*expected})})))
                << render(compose(lf, t));
        }
    }
}

TEST(Db, CacheBuildsOncePerTable) {
    DatabaseCache cache(fixtures());
    const Database& a = cache.get("fx-1");
    const Database& b = cache.get("fx-1");
    EXPECT_EQ(&a, &b);
    EXPECT_THROW(cache.get("missing"), DataError);
}

TEST(Db, SyntheticTablesMaterialize) {
    for (const auto& t : testing::synthetic_tables(60, 5)) {
        const Database db = materialize(t);
        const auto r = db.execute(render(SqlStatement{Aggregation::kCount, to_lower(t.headers[0]), t.id, {}}));
        ASSERT_TRUE(r.ok()) << t.id << ": " << r.error_message();
    }
}

}  // namespace
}  // namespace sqlgen
