#include <benchmark/benchmark.h>

#include "sqlgen/db.hpp"
#include "sqlgen/linearize.hpp"
#include "sqlgen/random.hpp"
#include "sqlgen/silver.hpp"
#include "sqlgen/sql.hpp"

namespace {

using namespace sqlgen;

Table make_table(std::size_t cols, std::size_t rows) {
    Table t;
    t.id = "bench-" + std::to_string(cols) + "x" + std::to_string(rows);
    for (std::size_t c = 0; c < cols; ++c) {
        t.headers.push_back("column " + std::to_string(c));
        t.types.push_back(c % 2 == 0 ? ColumnType::kReal : ColumnType::kText);
    }
    for (std::size_t r = 0; r < rows; ++r) {
        std::vector<Value> row;
        for (std::size_t c = 0; c < cols; ++c) {
            if (c % 2 == 0) {
                row.emplace_back(static_cast<double>((r * 7 + c) % 50));
            } else {
                row.emplace_back("cell " + std::to_string((r + c) % 13));
            }
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

std::vector<SqlStatement> sample_statements(const Table& t, std::size_t n) {
    Rng rng(5);
    std::vector<SqlStatement> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(compose(sample_logical_form(t, rng, {}), t));
    return out;
}

void BM_RenderParse(benchmark::State& state) {
    const Table t = make_table(6, 20);
    const auto stmts = sample_statements(t, 256);
    std::size_t i = 0;
    for (auto _ : state) {
        auto parsed = parse(render(stmts[i++ % stmts.size()]));
        benchmark::DoNotOptimize(parsed);
    }
}
BENCHMARK(BM_RenderParse);

void BM_Materialize(benchmark::State& state) {
    const Table t = make_table(6, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        auto db = materialize(t);
        benchmark::DoNotOptimize(db);
    }
}
BENCHMARK(BM_Materialize)->Arg(10)->Arg(100)->Arg(1000);

void BM_Execute(benchmark::State& state) {
    const Table t = make_table(6, static_cast<std::size_t>(state.range(0)));
    const Database db = materialize(t);
    std::vector<std::string> sqls;
    for (const auto& s : sample_statements(t, 256)) sqls.push_back(render(s));
    std::size_t i = 0;
    for (auto _ : state) {
        auto r = db.execute(sqls[i++ % sqls.size()]);
        benchmark::DoNotOptimize(r);
    }
}
BENCHMARK(BM_Execute)->Arg(10)->Arg(1000);

void BM_SampleLogicalForm(benchmark::State& state) {
    const Table t = make_table(8, 50);
    Rng rng(9);
    for (auto _ : state) {
        auto lf = sample_logical_form(t, rng, {});
        benchmark::DoNotOptimize(lf);
    }
}
BENCHMARK(BM_SampleLogicalForm);

void BM_LinearizeAugmented(benchmark::State& state) {
    const Table t = make_table(static_cast<std::size_t>(state.range(0)), 10);
    LinearizeConfig cfg;
    cfg.include_types = true;
    cfg.sample_rows = 3;
    for (auto _ : state) {
        auto s = linearize("how many cells are there in column 3 for cell 4", t, cfg);
        benchmark::DoNotOptimize(s);
    }
}
BENCHMARK(BM_LinearizeAugmented)->Arg(4)->Arg(16);

}  // namespace
