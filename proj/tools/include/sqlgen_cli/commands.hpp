#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

#include "sqlgen/eg_infer.hpp"
#include "sqlgen/eval.hpp"
#include "sqlgen/gatenet/copy_task.hpp"
#include "sqlgen/silver.hpp"

namespace sqlgen::cli {

using std::filesystem::path;

/// Bad flag combination; maps to exit code 1.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct LinearizeOptions {
    path tables;
    path questions;
    path out;
    std::string mode = "baseline";        ///< baseline | augmented
    std::optional<std::size_t> samples;   ///< augmented only; default 3
    bool dropout = false;
    std::uint64_t seed = 0;
    bool skip_bad = false;
    std::size_t max_cell_bytes = 32;
};

struct LinearizeSummary {
    std::size_t written = 0;
    std::size_t skipped = 0;
};

/// Writes "input<TAB>target" lines. Tabs, newlines and backslashes inside a
/// field are escaped as \t, \n and \\.
LinearizeSummary cmd_linearize(const LinearizeOptions& opt, std::ostream& log);

struct SilverOptions {
    path tables;
    path out;
    std::optional<path> report;
    std::size_t n = 1000;
    std::uint64_t seed = 0;
    int max_conds = 3;
};

/// Writes silver examples in the questions-file format (phase 99).
SilverReport cmd_silver(const SilverOptions& opt, std::ostream& log);

struct EvalOptions {
    path tables;
    path questions;
    path preds;  ///< one SQL string per line, aligned with the questions file
    path out;    ///< JSON report
    std::optional<path> table_out;
};

EvalReport cmd_eval(const EvalOptions& opt, std::ostream& log);

struct EgOptions {
    path tables;
    path questions;
    path candidates;  ///< JSONL: {"qid": i, "candidates": [sql | {"sql", "score"}, ...]}
    path out;         ///< selections JSONL
    std::optional<path> report;
    std::size_t beam_width = 3;
};

EgGainReport cmd_eg(const EgOptions& opt, std::ostream& log);

struct GateCheckOptions {
    path out;  ///< one JSON line per seed plus a summary line
    std::size_t seeds = 20;
    std::size_t d_model = 8;
    std::size_t vocab_size = 20;
    std::size_t src_len = 5;
    std::size_t tgt_len = 4;
    double epsilon = 1e-5;
    double tolerance = 1e-4;
    std::uint64_t seed = 0;
};

struct GateCheckSummary {
    double max_relative_error = 0.0;
    bool passed = false;
};

GateCheckSummary cmd_gate_check(const GateCheckOptions& opt, std::ostream& log);

struct GateTrainOptions {
    path out;  ///< per-step metrics JSONL, then a final summary line
    std::optional<path> params;  ///< blob; the sidecar goes to <params>.json
    gatenet::CopyTaskConfig task;
    bool generate_only = false;
};

gatenet::CopyTaskMetrics cmd_gate_train(const GateTrainOptions& opt, std::ostream& log);

/// Full command-line entry point; returns the process exit code
/// (0 ok, 1 usage, 2 data, 3 internal).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sqlgen::cli
