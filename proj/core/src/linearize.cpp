#include "sqlgen/linearize.hpp"

#include <stdexcept>

#include "sqlgen/sql.hpp"
#include "sqlgen/text.hpp"

namespace sqlgen {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

std::string question_text(std::string_view question) { return to_lower(trim(question)); }

std::string cell_text(const Value& cell, std::size_t max_bytes) {
    std::string text;
    if (const auto* s = std::get_if<std::string>(&cell)) {
        text = to_lower(*s);
    } else {
        text = format_number(std::get<double>(cell));
    }
    return std::string(utf8_prefix(text, max_bytes));
}

struct Framed {
    std::string_view prefix;
    std::string_view body;
    std::string_view suffix;
};

Framed unframe(std::string_view input, const LinearizeConfig& cfg) {
    Framed f{{}, input, {}};
    if (f.body.starts_with(cfg.bos)) {
        f.prefix = f.body.substr(0, cfg.bos.size());
        f.body.remove_prefix(cfg.bos.size());
    }
    if (f.body.ends_with(cfg.eos)) {
        f.suffix = f.body.substr(f.body.size() - cfg.eos.size());
        f.body.remove_suffix(cfg.eos.size());
    }
    return f;
}

struct Word {
    std::size_t segment;
    std::size_t begin;
    std::size_t end;
};

std::vector<Word> droppable_words(const std::vector<std::string_view>& segments) {
    std::vector<Word> words;
    for (std::size_t s = 0; s < segments.size(); ++s) {
        if (s == 1) continue;  // table id
        const auto seg = segments[s];
        std::size_t i = 0;
        while (i < seg.size()) {
            while (i < seg.size() && is_space(seg[i])) ++i;
            if (i >= seg.size()) break;
            const std::size_t begin = i;
            while (i < seg.size() && !is_space(seg[i])) ++i;
            words.push_back({s, begin, i});
        }
    }
    return words;
}

}  // namespace

void LinearizeConfig::validate() const {
    if (bos.empty() || sep.empty() || eos.empty()) {
        throw std::invalid_argument("bos/sep/eos tokens must be non-empty");
    }
    if (bos == sep || bos == eos || sep == eos) {
        throw std::invalid_argument("bos/sep/eos tokens must be distinct");
    }
}

std::string linearize_baseline(std::string_view question, const Table& tab,
                               const LinearizeConfig& cfg) {
    if (cfg.include_types || cfg.sample_rows != 0) {
        throw std::invalid_argument("baseline linearization takes no types and no samples");
    }
    cfg.validate();
    std::string out = cfg.bos + question_text(question) + cfg.sep + tab.id;
    for (const auto& h : tab.headers) {
        out += cfg.sep;
        out += to_lower(h);
    }
    out += cfg.eos;
    return out;
}

std::string linearize_augmented(std::string_view question, const Table& tab,
                                const LinearizeConfig& cfg) {
    if (!cfg.include_types) {
        throw std::invalid_argument("augmented linearization requires include_types");
    }
    cfg.validate();
    const std::size_t k = std::min(cfg.sample_rows, tab.num_rows());
    std::string out = cfg.bos + question_text(question) + cfg.sep + tab.id;
    for (std::size_t c = 0; c < tab.num_columns(); ++c) {
        out += cfg.sep;
        out += to_lower(tab.headers[c]);
        out += cfg.sep;
        out += column_type_name(tab.types[c]);
        for (std::size_t r = 0; r < k; ++r) {
            out += cfg.sep;
            out += cell_text(tab.rows[r][c], cfg.max_cell_bytes);
        }
    }
    out += cfg.eos;
    return out;
}

std::string linearize(std::string_view question, const Table& tab, const LinearizeConfig& cfg) {
    return cfg.include_types ? linearize_augmented(question, tab, cfg)
                             : linearize_baseline(question, tab, cfg);
}

std::size_t count_droppable_tokens(std::string_view input, const LinearizeConfig& cfg) {
    const Framed f = unframe(input, cfg);
    return droppable_words(split(f.body, cfg.sep)).size();
}

std::string token_dropout(std::string_view input, const LinearizeConfig& cfg, Rng& rng) {
    const Framed f = unframe(input, cfg);
    const auto segments = split(f.body, cfg.sep);
    const auto words = droppable_words(segments);
    if (words.empty()) return std::string(input);

    const Word& w = words[rng.below(words.size())];
    const std::string_view seg = segments[w.segment];
    std::size_t cut_begin = w.begin;
    std::size_t cut_end = w.end;
    // Take the following whitespace run with the word, or the preceding one
    // when the word ends the segment.
    if (cut_end < seg.size()) {
        while (cut_end < seg.size() && is_space(seg[cut_end])) ++cut_end;
    } else {
        while (cut_begin > 0 && is_space(seg[cut_begin - 1])) --cut_begin;
    }

    std::string out(f.prefix);
    for (std::size_t s = 0; s < segments.size(); ++s) {
        if (s > 0) out += cfg.sep;
        if (s == w.segment) {
            out.append(seg.substr(0, cut_begin));
            out.append(seg.substr(cut_end));
        } else {
            out.append(segments[s]);
        }
    }
    out.append(f.suffix);
    return out;
}

std::optional<LinearizedFields> parse_linearized(std::string_view input,
                                                 const LinearizeConfig& cfg,
                                                 std::size_t samples_per_column) {
    const Framed f = unframe(input, cfg);
    if (f.prefix.empty() || f.suffix.empty()) return std::nullopt;
    const auto segments = split(f.body, cfg.sep);
    if (segments.size() < 2) return std::nullopt;

    LinearizedFields out;
    out.question = std::string(segments[0]);
    out.table_id = std::string(segments[1]);
    const std::size_t stride = 1 + (cfg.include_types ? 1 : 0) + samples_per_column;
    const std::size_t rest = segments.size() - 2;
    if (rest % stride != 0) return std::nullopt;
    for (std::size_t i = 2; i < segments.size(); i += stride) {
        out.headers.emplace_back(segments[i]);
        std::size_t j = i + 1;
        if (cfg.include_types) out.types.emplace_back(segments[j++]);
        std::vector<std::string> samples;
        for (std::size_t s = 0; s < samples_per_column; ++s) samples.emplace_back(segments[j++]);
        out.samples.push_back(std::move(samples));
    }
    return out;
}

bool question_contains_marker(std::string_view question, const LinearizeConfig& cfg) {
    const std::string q = question_text(question);
    return q.find(cfg.sep) != std::string::npos || q.find(cfg.bos) != std::string::npos ||
           q.find(cfg.eos) != std::string::npos;
}

LinearizedExample make_example(const QuestionRecord& rec, const Table& tab,
                               const LinearizeConfig& cfg) {
    return LinearizedExample{linearize(rec.question, tab, cfg), render(compose(rec.lf, tab)), cfg};
}

}  // namespace sqlgen
