#include "sqlgen/sql.hpp"

#include <array>
#include <cctype>

#include "sqlgen/text.hpp"

namespace sqlgen {

namespace {

constexpr std::array<std::string_view, kNumAggregations> kAggNames = {"",    "max", "min",
                                                                      "count", "sum", "avg"};
constexpr std::array<std::string_view, kNumOperators> kOpSymbols = {"=", ">", "<", "OP"};

// ---------------------------------------------------------------------------
// Lexer

enum class TokenKind { kWord, kIdent, kString, kNumber, kLParen, kRParen, kOp, kBad, kEnd };

struct Token {
    TokenKind kind;
    std::size_t offset;
    std::string text;  // decoded identifier/string body, raw text otherwise
    double number = 0.0;
};

bool is_word_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_op_char(char c) { return c == '=' || c == '<' || c == '>' || c == '!'; }

// Reads a quoted body whose closing quote is escaped by doubling. Returns
// false when the input ends first.
bool read_quoted(std::string_view text, std::size_t& i, char close, std::string& out) {
    ++i;  // opening quote
    while (i < text.size()) {
        if (text[i] == close) {
            if (i + 1 < text.size() && text[i + 1] == close) {
                out.push_back(close);
                i += 2;
                continue;
            }
            ++i;
            return true;
        }
        out.push_back(text[i++]);
    }
    return false;
}

std::vector<Token> lex(std::string_view text) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        const char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        const std::size_t start = i;
        if (c == '[' || c == '\'') {
            std::string body;
            const bool closed = read_quoted(text, i, c == '[' ? ']' : '\'', body);
            if (!closed) {
                tokens.push_back({TokenKind::kBad, start, std::string(text.substr(start))});
                break;
            }
            tokens.push_back({c == '[' ? TokenKind::kIdent : TokenKind::kString, start,
                              std::move(body)});
        } else if (is_digit(c) || ((c == '-' || c == '.') && i + 1 < text.size() &&
                                   (is_digit(text[i + 1]) || text[i + 1] == '.'))) {
            if (c == '-') ++i;
            while (i < text.size() && (is_digit(text[i]) || text[i] == '.')) ++i;
            if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
                std::size_t j = i + 1;
                if (j < text.size() && (text[j] == '+' || text[j] == '-')) ++j;
                if (j < text.size() && is_digit(text[j])) {
                    i = j;
                    while (i < text.size() && is_digit(text[i])) ++i;
                }
            }
            std::string raw(text.substr(start, i - start));
            auto value = parse_number(raw);
            if (!value) {
                tokens.push_back({TokenKind::kBad, start, std::move(raw)});
            } else {
                tokens.push_back({TokenKind::kNumber, start, std::move(raw), *value});
            }
        } else if (is_word_start(c)) {
            while (i < text.size() && is_word_char(text[i])) ++i;
            tokens.push_back({TokenKind::kWord, start, std::string(text.substr(start, i - start))});
        } else if (c == '(' || c == ')') {
            ++i;
            tokens.push_back({c == '(' ? TokenKind::kLParen : TokenKind::kRParen, start,
                              std::string(1, c)});
        } else if (is_op_char(c)) {
            while (i < text.size() && is_op_char(text[i])) ++i;
            tokens.push_back({TokenKind::kOp, start, std::string(text.substr(start, i - start))});
        } else {
            ++i;
            tokens.push_back({TokenKind::kBad, start, std::string(1, c)});
        }
    }
    tokens.push_back({TokenKind::kEnd, text.size(), ""});
    return tokens;
}

bool keyword_equals(const Token& t, std::string_view keyword) {
    return t.kind == TokenKind::kWord && to_lower(t.text) == keyword;
}

class SlotParser {
public:
    explicit SlotParser(std::string_view text) : tokens_(lex(text)) {}

    ParseResult<SlotStatement> run() {
        SlotStatement out;
        if (!expect_keyword("select")) return failure_;

        if (peek().kind == TokenKind::kWord && peek(1).kind == TokenKind::kLParen) {
            out.agg_token = pos_;
            out.agg = to_lower(peek().text);
            pos_ += 2;
            if (!expect_ident(out.select_column, "select column")) return failure_;
            if (peek().kind != TokenKind::kRParen) return fail("expected ')'");
            ++pos_;
        } else if (!expect_ident(out.select_column, "select column or aggregation")) {
            return failure_;
        }

        if (!expect_keyword("from")) return failure_;
        if (!expect_ident(out.table_id, "table name")) return failure_;

        if (peek().kind == TokenKind::kEnd) return out;
        if (!expect_keyword("where")) return failure_;
        while (true) {
            SlotStatement::Cond cond;
            if (!expect_ident(cond.column, "condition column")) return failure_;
            const Token& op = peek();
            if (op.kind != TokenKind::kOp &&
                !(op.kind == TokenKind::kWord && !keyword_equals(op, "and"))) {
                return fail("expected comparison operator");
            }
            cond.op = op.kind == TokenKind::kWord ? to_lower(op.text) : op.text;
            cond.op_token = pos_++;
            const Token& value = peek();
            if (value.kind == TokenKind::kString) {
                cond.value = value.text;
            } else if (value.kind == TokenKind::kNumber) {
                cond.value = value.number;
            } else {
                return fail("expected literal value");
            }
            ++pos_;
            out.conds.push_back(std::move(cond));
            if (peek().kind == TokenKind::kEnd) return out;
            if (!expect_keyword("and")) return failure_;
        }
    }

private:
    const Token& peek(std::size_t ahead = 0) const {
        return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
    }

    ParseFailure fail(std::string message) {
        const Token& t = peek();
        std::string where = t.kind == TokenKind::kEnd ? "end of input" : "'" + t.text + "'";
        failure_ = ParseFailure{std::min(pos_, tokens_.size() - 1), t.offset,
                                message + " at token " + std::to_string(pos_) + " (" + where + ")"};
        return failure_;
    }

    bool expect_keyword(std::string_view keyword) {
        if (!keyword_equals(peek(), keyword)) {
            fail("expected '" + std::string(keyword) + "'");
            return false;
        }
        ++pos_;
        return true;
    }

    bool expect_ident(std::string& out, std::string_view what) {
        if (peek().kind != TokenKind::kIdent) {
            fail("expected " + std::string(what));
            return false;
        }
        out = peek().text;
        ++pos_;
        return true;
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    ParseFailure failure_;
};

ParseFailure failure_at(std::string_view text, std::size_t token_index, std::string message) {
    const auto tokens = lex(text);
    const std::size_t offset = tokens[std::min(token_index, tokens.size() - 1)].offset;
    return ParseFailure{token_index, offset, std::move(message)};
}

}  // namespace

std::string_view aggregation_name(Aggregation agg) {
    return kAggNames[static_cast<std::size_t>(agg)];
}

std::optional<Aggregation> aggregation_from_name(std::string_view name) {
    const std::string lower = to_lower(name);
    for (int i = 1; i < kNumAggregations; ++i) {
        if (lower == kAggNames[static_cast<std::size_t>(i)]) return static_cast<Aggregation>(i);
    }
    return std::nullopt;
}

std::string_view operator_symbol(Operator op) { return kOpSymbols[static_cast<std::size_t>(op)]; }

std::optional<Operator> operator_from_symbol(std::string_view symbol) {
    for (int i = 0; i < 3; ++i) {
        if (symbol == kOpSymbols[static_cast<std::size_t>(i)]) return static_cast<Operator>(i);
    }
    return std::nullopt;
}

SqlStatement compose(const LogicalForm& lf, const Table& tab) {
    const int ncols = static_cast<int>(tab.num_columns());
    if (lf.sel < 0 || lf.sel >= ncols) {
        throw ComposeError("select column index out of range: " + std::to_string(lf.sel));
    }
    if (lf.agg < 0 || lf.agg >= kNumAggregations) {
        throw ComposeError("aggregation index out of range: " + std::to_string(lf.agg));
    }
    SqlStatement stmt;
    stmt.agg = static_cast<Aggregation>(lf.agg);
    stmt.select_column = to_lower(tab.headers[static_cast<std::size_t>(lf.sel)]);
    stmt.table_id = tab.id;
    for (const auto& c : lf.conds) {
        if (c.col < 0 || c.col >= ncols) {
            throw ComposeError("condition column index out of range: " + std::to_string(c.col));
        }
        if (c.op == static_cast<int>(Operator::kOp)) throw ComposeError("unsupported operator");
        if (c.op < 0 || c.op >= kNumOperators) {
            throw ComposeError("operator index out of range: " + std::to_string(c.op));
        }
        const auto col = static_cast<std::size_t>(c.col);
        Predicate p;
        p.column = to_lower(tab.headers[col]);
        p.op = static_cast<Operator>(c.op);
        if (const auto* d = std::get_if<double>(&c.value)) {
            if (tab.types[col] == ColumnType::kReal) {
                p.value = *d;
            } else {
                p.value = format_number(*d);
            }
        } else {
            p.value = to_lower(std::get<std::string>(c.value));
        }
        stmt.conds.push_back(std::move(p));
    }
    return stmt;
}

std::string quote_identifier(std::string_view name) {
    std::string out = "[";
    for (char c : name) {
        out.push_back(c);
        if (c == ']') out.push_back(']');
    }
    out.push_back(']');
    return out;
}

std::string quote_string(std::string_view text) {
    std::string out = "'";
    for (char c : text) {
        out.push_back(c);
        if (c == '\'') out.push_back('\'');
    }
    out.push_back('\'');
    return out;
}

std::string render_value(const Value& value) {
    if (const auto* s = std::get_if<std::string>(&value)) return quote_string(*s);
    return format_number(std::get<double>(value));
}

std::string render(const SqlStatement& stmt) {
    std::string out = "select ";
    if (stmt.agg == Aggregation::kNone) {
        out += quote_identifier(stmt.select_column);
    } else {
        out += aggregation_name(stmt.agg);
        out += '(';
        out += quote_identifier(stmt.select_column);
        out += ')';
    }
    out += " from ";
    out += quote_identifier(stmt.table_id);
    for (std::size_t i = 0; i < stmt.conds.size(); ++i) {
        const auto& c = stmt.conds[i];
        out += i == 0 ? " where " : " and ";
        out += quote_identifier(c.column);
        out += ' ';
        out += operator_symbol(c.op);
        out += ' ';
        out += render_value(c.value);
    }
    return out;
}

ParseResult<SlotStatement> parse_slots(std::string_view text) { return SlotParser(text).run(); }

ParseResult<SqlStatement> parse(std::string_view text) {
    auto slots = parse_slots(text);
    if (!slots) return slots.failure();
    const SlotStatement& s = slots.value();

    SqlStatement stmt;
    if (!s.agg.empty()) {
        auto agg = aggregation_from_name(s.agg);
        if (!agg) {
            return failure_at(text, s.agg_token, "unknown aggregation '" + s.agg + "'");
        }
        stmt.agg = *agg;
    }
    stmt.select_column = s.select_column;
    stmt.table_id = s.table_id;
    for (const auto& c : s.conds) {
        auto op = operator_from_symbol(c.op);
        if (!op) return failure_at(text, c.op_token, "unknown operator '" + c.op + "'");
        stmt.conds.push_back(Predicate{c.column, *op, c.value});
    }
    return stmt;
}

}  // namespace sqlgen
