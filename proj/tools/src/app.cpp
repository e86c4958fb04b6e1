#include <memory>
#include <ostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sqlgen/dataset.hpp"
#include "sqlgen/db.hpp"
#include "sqlgen_cli/commands.hpp"
#include "sqlgen_cli/json_config.hpp"

namespace sqlgen::cli {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

struct Paths {
    std::string tables, questions, out, report, extra;
};

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Text-to-SQL data, evaluation and gated-extraction toolkit", "sqlgen"};
    app.config_formatter(std::make_shared<JsonConfig>());
    app.set_config("--config", "", "JSON config file; command-line flags take precedence");
    app.require_subcommand(1);

    // linearize
    LinearizeOptions lin;
    Paths lin_paths;
    std::size_t lin_samples = 0;
    auto* lin_cmd = app.add_subcommand("linearize", "Serialize questions and tables into model inputs");
    lin_cmd->add_option("--tables", lin_paths.tables, "Tables JSONL")->required();
    lin_cmd->add_option("--questions", lin_paths.questions, "Questions JSONL")->required();
    lin_cmd->add_option("--out", lin_paths.out, "Output TSV (input, target)")->required();
    lin_cmd->add_option("--mode", lin.mode, "baseline or augmented")
        ->check(CLI::IsMember({"baseline", "augmented"}))
        ->capture_default_str();
    auto* samples_opt =
        lin_cmd->add_option("--samples", lin_samples, "Sample rows per column (augmented; default 3)");
    lin_cmd->add_flag("--dropout", lin.dropout, "Drop one random word from each input");
    lin_cmd->add_option("--seed", lin.seed, "Dropout seed")->capture_default_str();
    lin_cmd->add_flag("--skip-bad", lin.skip_bad, "Skip malformed records instead of failing");
    lin_cmd->add_option("--max-cell-bytes", lin.max_cell_bytes, "Sample cell truncation")
        ->capture_default_str();

    // silver
    SilverOptions sil;
    Paths sil_paths;
    auto* sil_cmd = app.add_subcommand("silver", "Generate silver training data from tables");
    sil_cmd->add_option("--tables", sil_paths.tables, "Tables JSONL")->required();
    sil_cmd->add_option("--out", sil_paths.out, "Output questions JSONL")->required();
    sil_cmd->add_option("--report", sil_paths.report, "Generation report JSON");
    sil_cmd->add_option("--n", sil.n, "Number of examples")->capture_default_str();
    sil_cmd->add_option("--seed", sil.seed, "Master seed")->capture_default_str();
    sil_cmd->add_option("--max-conds", sil.max_conds, "Maximum conditions per query")
        ->capture_default_str();

    // eval
    EvalOptions ev;
    Paths ev_paths;
    auto* ev_cmd = app.add_subcommand("eval", "Execution accuracy and error taxonomy");
    ev_cmd->add_option("--tables", ev_paths.tables, "Tables JSONL")->required();
    ev_cmd->add_option("--questions", ev_paths.questions, "Questions JSONL")->required();
    ev_cmd->add_option("--preds", ev_paths.extra, "Predictions, one SQL per line")->required();
    ev_cmd->add_option("--out", ev_paths.out, "Report JSON")->required();
    ev_cmd->add_option("--table", ev_paths.report, "Error table text file");

    // eg
    EgOptions eg;
    Paths eg_paths;
    auto* eg_cmd = app.add_subcommand("eg", "Execution-guided candidate selection");
    eg_cmd->add_option("--tables", eg_paths.tables, "Tables JSONL")->required();
    eg_cmd->add_option("--questions", eg_paths.questions, "Questions JSONL")->required();
    eg_cmd->add_option("--candidates", eg_paths.extra, "Candidates JSONL")->required();
    eg_cmd->add_option("--out", eg_paths.out, "Selections JSONL")->required();
    eg_cmd->add_option("--report", eg_paths.report, "Gain report JSON");
    eg_cmd->add_option("--beam-width", eg.beam_width, "Candidates considered")
        ->capture_default_str();

    // gate check | train
    auto* gate_cmd = app.add_subcommand("gate", "Gated extraction network utilities");
    gate_cmd->require_subcommand(1);
    GateCheckOptions chk;
    std::string chk_out;
    auto* chk_cmd = gate_cmd->add_subcommand("check", "Finite-difference gradient check");
    chk_cmd->add_option("--out", chk_out, "Per-seed results JSONL")->required();
    chk_cmd->add_option("--seeds", chk.seeds, "Number of random instances")->capture_default_str();
    chk_cmd->add_option("--d-model", chk.d_model)->capture_default_str();
    chk_cmd->add_option("--vocab", chk.vocab_size)->capture_default_str();
    chk_cmd->add_option("--src-len", chk.src_len)->capture_default_str();
    chk_cmd->add_option("--tgt-len", chk.tgt_len)->capture_default_str();
    chk_cmd->add_option("--epsilon", chk.epsilon)->capture_default_str();
    chk_cmd->add_option("--tolerance", chk.tolerance)->capture_default_str();
    chk_cmd->add_option("--seed", chk.seed)->capture_default_str();

    GateTrainOptions trn;
    std::string trn_out, trn_params;
    auto* trn_cmd = gate_cmd->add_subcommand("train", "Train on the synthetic copy task");
    trn_cmd->add_option("--out", trn_out, "Per-step metrics JSONL")->required();
    trn_cmd->add_option("--params", trn_params, "Parameter blob (sidecar at <params>.json)");
    trn_cmd->add_option("--steps", trn.task.steps)->capture_default_str();
    trn_cmd->add_option("--batch", trn.task.batch_size)->capture_default_str();
    trn_cmd->add_option("--lr", trn.task.learning_rate)->capture_default_str();
    trn_cmd->add_option("--lr-decay", trn.task.lr_decay)->capture_default_str();
    trn_cmd->add_option("--clip-norm", trn.task.clip_norm)->capture_default_str();
    trn_cmd->add_option("--d-model", trn.task.d_model)->capture_default_str();
    trn_cmd->add_option("--eval-examples", trn.task.eval_examples)->capture_default_str();
    trn_cmd->add_option("--seed", trn.task.seed)->capture_default_str();
    trn_cmd->add_flag("--generate-only", trn.generate_only, "Ablation: force P_ext to 0");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*lin_cmd) {
            lin.tables = lin_paths.tables;
            lin.questions = lin_paths.questions;
            lin.out = lin_paths.out;
            if (samples_opt->count() > 0) lin.samples = lin_samples;
            cmd_linearize(lin, err);
        } else if (*sil_cmd) {
            sil.tables = sil_paths.tables;
            sil.out = sil_paths.out;
            if (!sil_paths.report.empty()) sil.report = sil_paths.report;
            cmd_silver(sil, err);
        } else if (*ev_cmd) {
            ev.tables = ev_paths.tables;
            ev.questions = ev_paths.questions;
            ev.preds = ev_paths.extra;
            ev.out = ev_paths.out;
            if (!ev_paths.report.empty()) ev.table_out = ev_paths.report;
            cmd_eval(ev, err);
        } else if (*eg_cmd) {
            eg.tables = eg_paths.tables;
            eg.questions = eg_paths.questions;
            eg.candidates = eg_paths.extra;
            eg.out = eg_paths.out;
            if (!eg_paths.report.empty()) eg.report = eg_paths.report;
            cmd_eg(eg, err);
        } else if (*chk_cmd) {
            chk.out = chk_out;
            cmd_gate_check(chk, err);
        } else if (*trn_cmd) {
            trn.out = trn_out;
            if (!trn_params.empty()) trn.params = trn_params;
            cmd_gate_train(trn, err);
        }
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const DbError& e) {
        err << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const nlohmann::json::exception& e) {
        err << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kExitInternal;
    }
    return kExitOk;
}

}  // namespace sqlgen::cli
