#include <gtest/gtest.h>

#include "sqlgen/eg_infer.hpp"
#include "sqlgen/sql.hpp"
#include "synthetic.hpp"

namespace sqlgen {
namespace {

using testing::fixture;

const TableIndex& fixtures() {
    static const TableIndex index(load_tables(fixture("tables.jsonl")));
    return index;
}

const char* kGood = "select [notes] from [1-1000181-1] where [state/territory] = 'south australia'";
const char* kBadColumn = "select [nonexistent] from [1-1000181-1]";
const char* kBadSyntax = "select from [1-1000181-1]";

TEST(EgSelect, FirstCleanCandidateIsReturnedUntouched) {
    const Database db = materialize(fixtures().at("1-1000181-1"));
    const auto sel = eg_select(CandidateList::from_texts({kGood, kBadColumn}), db);
    EXPECT_EQ(sel.chosen_index, 0u);
    EXPECT_EQ(sel.sql, kGood);
    EXPECT_FALSE(sel.all_failed);
    ASSERT_EQ(sel.diagnostics.size(), 1u);
    EXPECT_EQ(sel.diagnostics[0].row_count, 1u);
}

TEST(EgSelect, SkipsErroringCandidate) {
    const Database db = materialize(fixtures().at("1-1000181-1"));
    const auto sel = eg_select(CandidateList::from_texts({kBadColumn, kGood}), db);
    EXPECT_EQ(sel.chosen_index, 1u);
    EXPECT_EQ(sel.sql, kGood);
    ASSERT_EQ(sel.diagnostics.size(), 2u);
    EXPECT_FALSE(sel.diagnostics[0].executed);
    EXPECT_EQ(sel.diagnostics[0].error_kind, EngineErrorKind::kUnknownColumn);
}

TEST(EgSelect, EmptyResultCountsAsClean) {
    const Database db = materialize(fixtures().at("1-1000181-1"));
    const std::string empty = "select [notes] from [1-1000181-1] where [format] = 'zzz'";
    const auto sel = eg_select(CandidateList::from_texts({empty, kGood}), db);
    EXPECT_EQ(sel.chosen_index, 0u);
    EXPECT_EQ(sel.diagnostics[0].row_count, 0u);
}

TEST(EgSelect, AllFailedFallsBackToTop) {
    const Database db = materialize(fixtures().at("1-1000181-1"));
    const auto sel = eg_select(CandidateList::from_texts({kBadColumn, kBadSyntax, "drop table x"}), db);
    EXPECT_TRUE(sel.all_failed);
    EXPECT_EQ(sel.chosen_index, 0u);
    EXPECT_EQ(sel.sql, kBadColumn);
    EXPECT_EQ(sel.diagnostics.size(), 3u);
}

TEST(EgSelect, BeamWidthLimitsSearch) {
    const Database db = materialize(fixtures().at("1-1000181-1"));
    auto list = CandidateList::from_texts({kBadColumn, kBadSyntax, kGood}, 2);
    const auto sel = eg_select(list, db);
    EXPECT_TRUE(sel.all_failed);
    list.beam_width = 3;
    EXPECT_EQ(eg_select(list, db).chosen_index, 2u);
}

TEST(EgSelect, RejectsMalformedLists) {
    const Database db = materialize(fixtures().at("fx-1"));
    EXPECT_THROW(eg_select(CandidateList{}, db), std::invalid_argument);
    CandidateList rising;
    rising.candidates = {{"a", 0.1}, {"b", 0.5}};
    EXPECT_THROW(eg_select(rising, db), std::invalid_argument);
}

// k of n questions have an erroring top candidate whose runner-up executes
// to the gold result; the remainder have clean top candidates.
struct GainFixture {
    std::vector<CandidateList> lists;
    std::vector<GoldQuery> golds;
};

GainFixture make_fixture(std::size_t n, std::size_t k) {
    GainFixture f;
    const auto& t = fixtures().at("2-10301911-6");
    for (std::size_t i = 0; i < n; ++i) {
        const std::string gold = "select [team] from [2-10301911-6] where [place] = " + std::to_string(1 + i % 5);
        const std::string same = "select [team] from [2-10301911-6] where [place] = '" + std::to_string(1 + i % 5) + "'";
        f.golds.push_back({t.id, gold});
        if (i < k) {
            f.lists.push_back(CandidateList::from_texts({"select [tema] from [2-10301911-6]", same}));
        } else {
            f.lists.push_back(CandidateList::from_texts({same, "select [tema] from [2-10301911-6]"}));
        }
    }
    return f;
}

TEST(EgGain, RecoversExactlyTheInvalidTopCandidates) {
    const auto f = make_fixture(10, 2);
    DatabaseCache dbs(fixtures());
    std::vector<EgSelection> sels;
    const auto r = eg_gain(f.lists, f.golds, dbs, &sels);
    EXPECT_EQ(r.n, 10u);
    EXPECT_EQ(r.correct_top1, 8u);
    EXPECT_EQ(r.correct_eg, 10u);
    EXPECT_DOUBLE_EQ(r.delta(), 0.2);
    EXPECT_EQ(r.changed, 2u);
    EXPECT_EQ(r.dropped_by_kind.at(EngineErrorKind::kUnknownColumn), 2u);
    EXPECT_EQ(sels.size(), 10u);
}

TEST(EgGain, AllTopCandidatesCleanMeansNoDelta) {
    const auto f = make_fixture(10, 0);
    DatabaseCache dbs(fixtures());
    const auto r = eg_gain(f.lists, f.golds, dbs);
    EXPECT_EQ(r.delta(), 0.0);
    EXPECT_EQ(r.changed, 0u);
    EXPECT_TRUE(r.dropped_by_kind.empty());
}

TEST(EgGain, EmptyAndMisaligned) {
    DatabaseCache dbs(fixtures());
    const auto r = eg_gain({}, {}, dbs);
    EXPECT_EQ(r.n, 0u);
    EXPECT_EQ(r.accuracy_eg, 0.0);
    const auto f = make_fixture(3, 1);
    EXPECT_THROW(eg_gain(f.lists, std::span<const GoldQuery>(f.golds).first(2), dbs),
                 std::invalid_argument);
}

}  // namespace
}  // namespace sqlgen
