#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sqlgen/dataset.hpp"
#include "sqlgen/random.hpp"

namespace sqlgen {

struct LinearizeConfig {
    bool include_types = false;
    /// Number of leading table rows sampled per column (clamped to the row count).
    std::size_t sample_rows = 0;
    std::string bos = "<bos>";
    std::string sep = "<sep>";
    std::string eos = "<eos>";
    bool dropout_enabled = false;
    /// Sample cells are cut to this many bytes (on a UTF-8 boundary).
    std::size_t max_cell_bytes = 32;

    /// Throws std::invalid_argument for empty or clashing token strings.
    void validate() const;
};

/// bos question sep table_id sep col1 sep ... coln eos
std::string linearize_baseline(std::string_view question, const Table& tab,
                               const LinearizeConfig& cfg);

/// Like the baseline, but each column is followed by its type tag and by the
/// column's cells from the first k rows.
std::string linearize_augmented(std::string_view question, const Table& tab,
                                const LinearizeConfig& cfg);

/// Dispatches on cfg.include_types.
std::string linearize(std::string_view question, const Table& tab, const LinearizeConfig& cfg);

/// Removes one whitespace-delimited word chosen uniformly among the words
/// outside the table id segment. Separators and markers are preserved; an
/// input with no droppable word is returned unchanged.
std::string token_dropout(std::string_view input, const LinearizeConfig& cfg, Rng& rng);

/// Number of words token_dropout may choose from.
std::size_t count_droppable_tokens(std::string_view input, const LinearizeConfig& cfg);

struct LinearizedFields {
    std::string question;
    std::string table_id;
    std::vector<std::string> headers;
    std::vector<std::string> types;
    std::vector<std::vector<std::string>> samples;  ///< per column

    bool operator==(const LinearizedFields&) const = default;
};

/// Recovers the fields of a linearized string. samples_per_column is the
/// effective (clamped) sample count used when writing it. Returns nullopt
/// when the string does not have the expected shape.
std::optional<LinearizedFields> parse_linearized(std::string_view input,
                                                 const LinearizeConfig& cfg,
                                                 std::size_t samples_per_column);

/// True when the question would make the linearized string ambiguous.
bool question_contains_marker(std::string_view question, const LinearizeConfig& cfg);

struct LinearizedExample {
    std::string input;
    std::string target;
    LinearizeConfig config;
};

/// Linearizes a record and renders its gold SQL as the target.
LinearizedExample make_example(const QuestionRecord& rec, const Table& tab,
                               const LinearizeConfig& cfg);

}  // namespace sqlgen
