#include "sqlgen_cli/commands.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sqlgen/dataset.hpp"
#include "sqlgen/gatenet/grad_check.hpp"
#include "sqlgen/gatenet/serialize.hpp"
#include "sqlgen/linearize.hpp"
#include "sqlgen/random.hpp"
#include "sqlgen/sql.hpp"
#include "sqlgen/text.hpp"

namespace sqlgen::cli {

namespace {

using nlohmann::ordered_json;

std::ofstream open_output(const path& p) {
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + p.string());
    return out;
}

std::vector<std::string> read_lines(const path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw DataError("cannot open " + p.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(std::move(line));
    }
    return lines;
}

std::string escape_tsv(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '\t': out += "\\t"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\\': out += "\\\\"; break;
            default: out += c;
        }
    }
    return out;
}

double r12(double v) { return round_significant(v); }

void write_json_file(const path& p, const ordered_json& j) {
    auto out = open_output(p);
    out << j.dump(2) << '\n';
}

}  // namespace

LinearizeSummary cmd_linearize(const LinearizeOptions& opt, std::ostream& log) {
    LinearizeConfig cfg;
    cfg.dropout_enabled = opt.dropout;
    cfg.max_cell_bytes = opt.max_cell_bytes;
    if (opt.mode == "baseline") {
        if (opt.samples && *opt.samples > 0) {
            throw UsageError("--samples only applies to --mode augmented");
        }
    } else if (opt.mode == "augmented") {
        cfg.include_types = true;
        cfg.sample_rows = opt.samples.value_or(3);
    } else {
        throw UsageError("unknown --mode '" + opt.mode + "' (expected baseline or augmented)");
    }
    cfg.validate();

    const TableIndex tables(load_tables(opt.tables));
    const auto lines = read_lines(opt.questions);
    Rng rng(derive_seed(opt.seed, "linearize/dropout"));
    auto out = open_output(opt.out);
    LinearizeSummary summary;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        const std::size_t line_no = i + 1;
        try {
            const QuestionRecord rec = parse_question_line(lines[i], line_no);
            const Table* tab = tables.find(rec.table_id);
            if (tab == nullptr) throw DataError("unknown table id '" + rec.table_id + "'", line_no);
            LinearizedExample ex;
            try {
                ex = make_example(rec, *tab, cfg);
            } catch (const std::exception& e) {
                throw DataError(e.what(), line_no);
            }
            if (cfg.dropout_enabled) ex.input = token_dropout(ex.input, cfg, rng);
            out << escape_tsv(ex.input) << '\t' << escape_tsv(ex.target) << '\n';
            ++summary.written;
        } catch (const DataError& e) {
            if (!opt.skip_bad) throw;
            log << "skipped: " << e.what() << '\n';
            ++summary.skipped;
        }
    }
    log << "linearize: wrote " << summary.written << " examples to " << opt.out.string();
    if (summary.skipped > 0) log << " (" << summary.skipped << " skipped)";
    log << '\n';
    return summary;
}

SilverReport cmd_silver(const SilverOptions& opt, std::ostream& log) {
    const auto tables = load_tables(opt.tables);
    SamplerConfig cfg;
    cfg.seed = opt.seed;
    cfg.max_conds = opt.max_conds;
    const TemplateQuestionGenerator qg;
    if (opt.max_conds < 0) throw UsageError("--max-conds must be >= 0");
    SilverResult result;
    try {
        result = generate_silver(tables, opt.n, qg, cfg);
    } catch (const std::invalid_argument& e) {
        throw DataError(e.what());
    }

    auto out = open_output(opt.out);
    for (const auto& ex : result.examples) {
        out << dump_question(QuestionRecord{kSilverPhase, ex.table_id, ex.question, ex.lf}) << '\n';
    }
    if (opt.report) {
        ordered_json j;
        j["requested"] = result.report.requested;
        j["generated"] = result.report.generated;
        j["resamples"] = result.report.resamples;
        j["duplicates_kept"] = result.report.duplicates_kept;
        j["seed"] = opt.seed;
        write_json_file(*opt.report, j);
    }
    log << "silver: wrote " << result.report.generated << " examples to " << opt.out.string()
        << '\n';
    return result.report;
}

EvalReport cmd_eval(const EvalOptions& opt, std::ostream& log) {
    const TableIndex tables(load_tables(opt.tables));
    const auto records = load_questions(opt.questions);
    auto preds = read_lines(opt.preds);
    if (preds.size() != records.size()) {
        throw DataError("predictions file has " + std::to_string(preds.size()) +
                        " lines but the questions file has " + std::to_string(records.size()) +
                        " records");
    }
    DatabaseCache dbs(tables);
    EvalReport report;
    try {
        report = execution_accuracy(preds, records, dbs, tables);
    } catch (const ComposeError& e) {
        throw DataError(std::string("gold logical form: ") + e.what());
    }
    {
        auto out = open_output(opt.out);
        out << report_to_json(report) << '\n';
    }
    const std::string table = format_error_table(report);
    if (opt.table_out) {
        auto out = open_output(*opt.table_out);
        out << table;
    }
    log << table;
    return report;
}

EgGainReport cmd_eg(const EgOptions& opt, std::ostream& log) {
    if (opt.beam_width == 0) throw UsageError("--beam-width must be positive");
    const TableIndex tables(load_tables(opt.tables));
    const auto records = load_questions(opt.questions);

    std::vector<CandidateList> lists;
    std::vector<GoldQuery> golds;
    std::vector<std::size_t> qids;
    const auto lines = read_lines(opt.candidates);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        const std::size_t line_no = i + 1;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(lines[i]);
        } catch (const nlohmann::json::exception& e) {
            throw DataError(std::string("invalid JSON: ") + e.what(), line_no);
        }
        if (!j.is_object() || !j.contains("qid") || !j["qid"].is_number_unsigned()) {
            throw DataError("expected a non-negative integer 'qid'", line_no);
        }
        const auto qid = j["qid"].get<std::size_t>();
        if (qid >= records.size()) {
            throw DataError("qid " + std::to_string(qid) + " is past the questions file", line_no);
        }
        if (!j.contains("candidates") || !j["candidates"].is_array() || j["candidates"].empty()) {
            throw DataError("expected a non-empty 'candidates' array", line_no);
        }
        CandidateList list;
        list.beam_width = opt.beam_width;
        double rank_score = 0.0;
        for (const auto& c : j["candidates"]) {
            if (c.is_string()) {
                list.candidates.push_back({c.get<std::string>(), rank_score});
            } else if (c.is_object() && c.contains("sql") && c["sql"].is_string()) {
                const double score = c.contains("score") ? c["score"].get<double>() : rank_score;
                list.candidates.push_back({c["sql"].get<std::string>(), score});
            } else {
                throw DataError("candidate must be a string or {\"sql\", \"score\"}", line_no);
            }
            rank_score -= 1.0;
        }
        try {
            list.validate();
        } catch (const std::invalid_argument& e) {
            throw DataError(e.what(), line_no);
        }
        const QuestionRecord& rec = records[qid];
        std::string gold_sql;
        try {
            gold_sql = render(compose(rec.lf, tables.at(rec.table_id)));
        } catch (const ComposeError& e) {
            throw DataError(std::string("gold logical form: ") + e.what(), line_no);
        }
        lists.push_back(std::move(list));
        golds.push_back({rec.table_id, std::move(gold_sql)});
        qids.push_back(qid);
    }

    DatabaseCache dbs(tables);
    std::vector<EgSelection> selections;
    const EgGainReport report = eg_gain(lists, golds, dbs, &selections);

    auto out = open_output(opt.out);
    for (std::size_t i = 0; i < selections.size(); ++i) {
        const auto& sel = selections[i];
        ordered_json j;
        j["qid"] = qids[i];
        j["chosen_index"] = sel.chosen_index;
        j["sql"] = sel.sql;
        j["all_failed"] = sel.all_failed;
        auto diags = ordered_json::array();
        for (const auto& d : sel.diagnostics) {
            ordered_json dj;
            dj["index"] = d.index;
            dj["executed"] = d.executed;
            if (d.executed) {
                dj["row_count"] = d.row_count;
            } else {
                dj["error_kind"] = std::string(engine_error_kind_name(d.error_kind));
                dj["error"] = d.error_message;
            }
            diags.push_back(std::move(dj));
        }
        j["diagnostics"] = std::move(diags);
        out << j.dump() << '\n';
    }

    ordered_json rj;
    rj["n"] = report.n;
    rj["correct_top1"] = report.correct_top1;
    rj["correct_eg"] = report.correct_eg;
    rj["accuracy_top1"] = r12(report.accuracy_top1);
    rj["accuracy_eg"] = r12(report.accuracy_eg);
    rj["delta"] = r12(report.delta());
    rj["changed"] = report.changed;
    rj["all_failed"] = report.all_failed;
    ordered_json dropped = ordered_json::object();
    for (const auto& [kind, count] : report.dropped_by_kind) {
        dropped[std::string(engine_error_kind_name(kind))] = count;
    }
    rj["dropped_by_kind"] = std::move(dropped);
    if (opt.report) write_json_file(*opt.report, rj);
    log << rj.dump(2) << '\n';
    return report;
}

GateCheckSummary cmd_gate_check(const GateCheckOptions& opt, std::ostream& log) {
    if (opt.seeds == 0 || opt.d_model == 0 || opt.vocab_size == 0 || opt.src_len == 0 ||
        opt.tgt_len == 0 || !(opt.epsilon > 0.0)) {
        throw UsageError("gate check sizes, seed count and epsilon must be positive");
    }
    auto out = open_output(opt.out);
    GateCheckSummary summary;
    for (std::size_t s = 0; s < opt.seeds; ++s) {
        gatenet::GateConfig cfg;
        cfg.d_model = opt.d_model;
        cfg.vocab_size = opt.vocab_size;
        cfg.max_src_len = opt.src_len;
        cfg.max_tgt_len = opt.tgt_len;
        cfg.seed = derive_seed(opt.seed, "gate-check/params/" + std::to_string(s));
        const gatenet::GateModel model(cfg);
        Rng rng(derive_seed(opt.seed, "gate-check/input/" + std::to_string(s)));
        std::vector<int> src(opt.src_len), tgt(opt.tgt_len);
        for (int& t : src) t = static_cast<int>(rng.below(opt.vocab_size));
        for (int& t : tgt) t = static_cast<int>(rng.below(opt.vocab_size));
        const auto r = gatenet::grad_check(model, src, tgt, opt.epsilon);
        summary.max_relative_error = std::max(summary.max_relative_error, r.max_relative_error);
        ordered_json j;
        j["seed_index"] = s;
        j["max_relative_error"] = r12(r.max_relative_error);
        j["worst_parameter"] = r.worst_parameter;
        j["worst_index"] = r.worst_index;
        j["checked"] = r.checked;
        out << j.dump() << '\n';
    }
    summary.passed = summary.max_relative_error <= opt.tolerance;
    ordered_json j;
    j["summary"] = {{"max_relative_error", r12(summary.max_relative_error)},
                    {"tolerance", opt.tolerance},
                    {"passed", summary.passed}};
    out << j.dump() << '\n';
    log << "gate check: max relative error " << r12(summary.max_relative_error)
        << (summary.passed ? " (within " : " (exceeds ") << opt.tolerance << ")\n";
    return summary;
}

gatenet::CopyTaskMetrics cmd_gate_train(const GateTrainOptions& opt, std::ostream& log) {
    gatenet::CopyTaskConfig task = opt.task;
    task.mode = opt.generate_only ? gatenet::GateMode::kGenerateOnly : gatenet::GateMode::kGated;
    if (task.steps == 0 || task.batch_size == 0 || !(task.learning_rate > 0.0)) {
        throw UsageError("--steps, --batch and --lr must be positive");
    }
    auto out = open_output(opt.out);
    const auto result = gatenet::train_copy_task(task, [&](const gatenet::StepMetrics& m) {
        ordered_json j;
        j["step"] = m.step;
        j["loss"] = r12(m.loss);
        j["learning_rate"] = r12(m.learning_rate);
        j["grad_norm"] = r12(m.grad_norm);
        out << j.dump() << '\n';
    });
    const auto& m = result.metrics;
    ordered_json summary;
    summary["mode"] = opt.generate_only ? "generate_only" : "gated";
    summary["final_loss"] = r12(m.final_loss);
    summary["value_exact_match_seen"] = r12(m.value_exact_match_seen);
    summary["value_exact_match_unseen"] = r12(m.value_exact_match_unseen);
    summary["sequence_exact_match_unseen"] = r12(m.sequence_exact_match_unseen);
    summary["mean_p_ext_value"] = r12(m.mean_p_ext_value);
    summary["mean_p_ext_keyword"] = r12(m.mean_p_ext_keyword);
    summary["mean_p_ext_copy"] = r12(m.mean_p_ext_copy);
    ordered_json line;
    line["summary"] = summary;
    out << line.dump() << '\n';
    if (opt.params) {
        path sidecar = *opt.params;
        sidecar += ".json";
        gatenet::save_params(*opt.params, sidecar, result.model_config, result.params);
    }
    log << "gate train: " << summary.dump() << '\n';
    return m;
}

}  // namespace sqlgen::cli
