#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "sqlgen/eval.hpp"
#include "sqlgen/random.hpp"
#include "sqlgen/silver.hpp"
#include "sqlgen/sql.hpp"
#include "synthetic.hpp"

namespace sqlgen {
namespace {

using testing::fixture;

const TableIndex& fixtures() {
    static const TableIndex index(load_tables(fixture("tables.jsonl")));
    return index;
}

const std::vector<QuestionRecord>& records() {
    static const auto r = load_questions(fixture("questions.jsonl"));
    return r;
}

const QuestionRecord& record_for(std::string_view table_id) {
    for (const auto& r : records()) {
        if (r.table_id == table_id) return r;
    }
    throw std::out_of_range("no record");
}

ErrorClass classify(const std::string& pred, const QuestionRecord& rec) {
    return classify_error(pred, rec.lf, fixtures().at(rec.table_id), rec.question);
}

constexpr ErrorClass kCorrect{Verdict::kCorrect, Slot::kNone};

TEST(Classify, GoldRenderingIsCorrect) {
    for (const auto& r : records()) {
        const std::string gold = render(compose(r.lf, fixtures().at(r.table_id)));
        EXPECT_EQ(classify(gold, r), kCorrect) << gold;
        EXPECT_FALSE(hallucination_flag(gold, fixtures().at(r.table_id), r.question));
    }
}

TEST(Classify, HallucinatedValue) {
    const auto& rec = record_for("1-12141496-1");
    const std::string pred = "select count([alt name]) from [1-12141496-1] where [id] = '1962-001a'";
    EXPECT_EQ(classify(pred, rec), (ErrorClass{Verdict::kInvalid, Slot::kWhereValue}));
    EXPECT_TRUE(hallucination_flag(pred, fixtures().at(rec.table_id), rec.question));
}

TEST(Classify, AggregationToggleIsWrongAgg) {
    const auto& rec = record_for("1-1000181-1");
    const std::string pred =
        "select count([notes]) from [1-1000181-1] where [current slogan] = 'south australia'";
    EXPECT_EQ(classify(pred, rec), (ErrorClass{Verdict::kWrong, Slot::kAggFunction}));
    EXPECT_FALSE(hallucination_flag(pred, fixtures().at(rec.table_id), rec.question));
}

TEST(Classify, MissingInformationIsWrongWhereColumn) {
    const auto& rec = record_for("1-16907214-1");
    const std::string pred =
        "select count([publisher]) from [1-16907214-1] where [paperback] = 'isbn 193700788x'";
    EXPECT_EQ(classify(pred, rec), (ErrorClass{Verdict::kWrong, Slot::kWhereColumn}));
}

TEST(Classify, ParaphrasedValueIsHallucination) {
    const auto& rec = record_for("fx-1");
    const std::string pred = "select count([colb]) from [fx-1] where [cola] > 'ten'";
    EXPECT_EQ(classify(pred, rec), (ErrorClass{Verdict::kInvalid, Slot::kWhereValue}));
    EXPECT_TRUE(hallucination_flag(pred, fixtures().at(rec.table_id), rec.question));
}

TEST(Classify, QuotedAndBareNumbersAgree) {
    const auto& rec = record_for("fx-1");
    EXPECT_EQ(classify("select count([colb]) from [fx-1] where [cola] > 10", rec), kCorrect);
    EXPECT_EQ(classify("select count([colb]) from [fx-1] where [cola] < 10", rec),
              (ErrorClass{Verdict::kWrong, Slot::kWhereOper}));
}

TEST(Classify, InvalidTieBreakFollowsSlotOrder) {
    const auto& rec = record_for("1-1000181-1");
    // Unknown function and unknown column: the aggregation slot wins.
    EXPECT_EQ(classify("select median([nope]) from [1-1000181-1]", rec),
              (ErrorClass{Verdict::kInvalid, Slot::kAggFunction}));
    EXPECT_EQ(classify("select [nope] from [1-1000181-1] where [also nope] = 'x'", rec),
              (ErrorClass{Verdict::kInvalid, Slot::kSelectColumn}));
    EXPECT_EQ(classify("select [notes] from [1-1000181-1] where [current slogan] >= 'south australia'", rec),
              (ErrorClass{Verdict::kInvalid, Slot::kWhereOper}));
    EXPECT_EQ(classify("select [notes] from [1-1000181-1] where [nope] = 'zzz'", rec),
              (ErrorClass{Verdict::kInvalid, Slot::kWhereColumn}));
}

TEST(Classify, ConditionsCompareAsMultisets) {
    Table t{"m", {"a", "b", "c"}, {ColumnType::kText, ColumnType::kText, ColumnType::kText}, {}};
    LogicalForm gold{0, 0, {{1, 0, Value(std::string("x"))}, {2, 0, Value(std::string("y"))}}};
    const std::string q = "a for x and y";
    EXPECT_EQ(classify_error("select [a] from [m] where [c] = 'y' and [b] = 'x'", gold, t, q), kCorrect);
    EXPECT_EQ(classify_error("select [a] from [m] where [b] = 'y' and [c] = 'x'", gold, t, q),
              (ErrorClass{Verdict::kWrong, Slot::kWhereValue}));
    EXPECT_EQ(classify_error("select [a] from [m] where [b] = 'x'", gold, t, q),
              (ErrorClass{Verdict::kWrong, Slot::kWhereColumn}));
}

TEST(Classify, ParseFailure) {
    const auto& rec = record_for("fx-1");
    EXPECT_EQ(classify("select [colb] frm [fx-1]", rec), (ErrorClass{Verdict::kParseFailure, Slot::kNone}));
    EXPECT_FALSE(hallucination_flag("select [colb] frm [fx-1]", fixtures().at("fx-1"), rec.question));
}

TEST(Classify, SampledGoldAlwaysCorrect) {
    const auto tables = testing::synthetic_tables(50, 13);
    Rng rng(31);
    for (int i = 0; i < 1500; ++i) {
        const Table& t = tables[rng.below(tables.size())];
        const LogicalForm lf = sample_logical_form(t, rng, {});
        const SqlStatement s = compose(lf, t);
        const std::string q = template_question(s, t);
        ASSERT_EQ(classify_error(render(s), lf, t, q), kCorrect) << render(s) << " | " << q;
    }
}

TEST(ExecutionAccuracy, DataIssueScoredIncorrect) {
    const auto& rec = record_for("2-10301911-6");
    const std::vector<QuestionRecord> recs = {rec};
    const std::vector<std::string> preds = {"select [place] from [2-10301911-6] where [points] > '10'"};
    DatabaseCache dbs(fixtures());
    const auto r = execution_accuracy(preds, recs, dbs, fixtures());
    EXPECT_EQ(r.exec_correct, 0u);
    EXPECT_EQ(r.exec_accuracy, 0.0);
}

TEST(ExecutionAccuracy, DifferentSqlSameResultIsCorrect) {
    // Country of the row whose city is Metanya, reached through the population column.
    const auto& rec = record_for("1-14937957-1");
    const std::vector<QuestionRecord> recs = {rec};
    const std::vector<std::string> preds = {"select [country] from [1-14937957-1] where [population] = 215200"};
    DatabaseCache dbs(fixtures());
    const auto r = execution_accuracy(preds, recs, dbs, fixtures());
    EXPECT_EQ(r.exec_correct, 1u);
    EXPECT_EQ(r.count(Verdict::kInvalid), 1u) << "215200 does not occur in the question";
}

TEST(ExecutionAccuracy, CountsPartitionAndReport) {
    std::vector<std::string> preds;
    for (const auto& r : records()) preds.push_back(render(compose(r.lf, fixtures().at(r.table_id))));
    preds[1] = "select [colb from";
    preds[2] = "select count([alt name]) from [1-12141496-1] where [id] = '1962-001a'";
    preds[3] = "select [nope] from [2-10301911-6]";
    DatabaseCache dbs(fixtures());
    const auto r = execution_accuracy(preds, records(), dbs, fixtures());
    EXPECT_EQ(r.n, records().size());
    std::size_t total = 0;
    for (const auto& [cls, n] : r.error_counts) total += n;
    EXPECT_EQ(total, r.n);
    EXPECT_EQ(r.count(Verdict::kParseFailure), 1u);
    EXPECT_EQ(r.count(Verdict::kInvalid, Slot::kWhereValue), 1u);
    EXPECT_EQ(r.count(Verdict::kInvalid, Slot::kSelectColumn), 1u);
    EXPECT_EQ(r.count(Verdict::kCorrect), r.n - 3);
    EXPECT_EQ(r.unexecutable, 2u);
    EXPECT_EQ(r.hallucination_count, 2u);
    EXPECT_EQ(r.exec_correct, r.n - 3);

    const auto j = nlohmann::json::parse(report_to_json(r));
    EXPECT_EQ(j["n"], r.n);
    EXPECT_EQ(j["error_counts"]["invalid"]["where_value"], 1);
    const std::string table = format_error_table(r);
    EXPECT_NE(table.find("Invalid"), std::string::npos);
    EXPECT_NE(table.find("Where Value"), std::string::npos);
}

TEST(ExecutionAccuracy, MisalignedOrMissingTable) {
    DatabaseCache dbs(fixtures());
    const std::vector<std::string> none;
    EXPECT_THROW(execution_accuracy(none, records(), dbs, fixtures()), std::invalid_argument);
    std::vector<QuestionRecord> recs = {records()[0]};
    recs[0].table_id = "missing";
    const std::vector<std::string> one = {"select [a] from [missing]"};
    EXPECT_THROW(execution_accuracy(one, recs, dbs, fixtures()), DataError);
}

}  // namespace
}  // namespace sqlgen
