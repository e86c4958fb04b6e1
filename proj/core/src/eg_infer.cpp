#include "sqlgen/eg_infer.hpp"

#include <algorithm>
#include <stdexcept>

namespace sqlgen {

void CandidateList::validate() const {
    if (candidates.empty()) throw std::invalid_argument("candidate list is empty");
    if (beam_width == 0) throw std::invalid_argument("beam width must be positive");
    for (std::size_t i = 1; i < candidates.size(); ++i) {
        if (candidates[i].score > candidates[i - 1].score) {
            throw std::invalid_argument("candidate scores must be non-increasing");
        }
    }
}

CandidateList CandidateList::from_texts(std::vector<std::string> texts, std::size_t beam_width) {
    CandidateList list;
    list.beam_width = beam_width;
    for (std::size_t i = 0; i < texts.size(); ++i) {
        list.candidates.push_back(Candidate{std::move(texts[i]), -static_cast<double>(i)});
    }
    return list;
}

EgSelection eg_select(const CandidateList& cands, const Database& db) {
    cands.validate();
    EgSelection sel;
    const std::size_t considered = std::min(cands.beam_width, cands.candidates.size());
    for (std::size_t i = 0; i < considered; ++i) {
        const ExecResult res = db.execute(cands.candidates[i].sql);
        CandidateDiagnostic diag;
        diag.index = i;
        diag.executed = res.ok();
        if (res.ok()) {
            diag.row_count = res.row_list().size();
        } else {
            diag.error_message = res.error_message();
            diag.error_kind = classify_engine_error(diag.error_message);
        }
        sel.diagnostics.push_back(std::move(diag));
        if (res.ok()) {
            sel.chosen_index = i;
            sel.sql = cands.candidates[i].sql;
            return sel;
        }
    }
    sel.chosen_index = 0;
    sel.sql = cands.candidates.front().sql;
    sel.all_failed = true;
    return sel;
}

EgGainReport eg_gain(std::span<const CandidateList> pred_sets, std::span<const GoldQuery> golds,
                     DatabaseCache& dbs, std::vector<EgSelection>* selections) {
    if (pred_sets.size() != golds.size()) {
        throw std::invalid_argument("eg_gain: " + std::to_string(pred_sets.size()) +
                                    " candidate lists but " + std::to_string(golds.size()) +
                                    " gold queries");
    }
    EgGainReport report;
    report.n = pred_sets.size();
    for (std::size_t i = 0; i < pred_sets.size(); ++i) {
        const Database& db = dbs.get(golds[i].table_id);
        const ExecResult gold = db.execute(golds[i].sql);
        const ExecResult top1 = db.execute(pred_sets[i].candidates.at(0).sql);
        if (results_equal(top1, gold)) ++report.correct_top1;

        EgSelection sel = eg_select(pred_sets[i], db);
        if (sel.chosen_index != 0) ++report.changed;
        if (sel.all_failed) ++report.all_failed;
        for (const auto& d : sel.diagnostics) {
            if (!d.executed) ++report.dropped_by_kind[d.error_kind];
        }
        const ExecResult chosen =
            sel.chosen_index == 0 ? top1 : db.execute(sel.sql);
        if (results_equal(chosen, gold)) ++report.correct_eg;
        if (selections != nullptr) selections->push_back(std::move(sel));
    }
    if (report.n > 0) {
        report.accuracy_top1 = static_cast<double>(report.correct_top1) / static_cast<double>(report.n);
        report.accuracy_eg = static_cast<double>(report.correct_eg) / static_cast<double>(report.n);
    }
    return report;
}

}  // namespace sqlgen
