#include "hlmrf/model_file.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <optional>
#include <sstream>

#include "hlmrf/errors.hpp"

namespace hlmrf {

std::vector<bool> ModelFile::learnable() const {
    std::vector<bool> out;
    out.reserve(templates.size());
    for (const auto& t : templates) out.push_back(!t.weight.has_value());
    return out;
}

TemplateWeights ModelFile::weights(double learnable_default) const {
    std::vector<double> w;
    w.reserve(templates.size());
    for (const auto& t : templates) w.push_back(t.weight.value_or(learnable_default));
    return TemplateWeights(std::move(w));
}

namespace {

enum class Tok { Ident, Number, String, LParen, RParen, Comma, Amp, Bar, Tilde, Arrow, NotEq, Colon, Plus, Slash, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    std::size_t column = 0;
};

class LineLexer {
public:
    LineLexer(std::string_view line, std::size_t line_no) : line_(line), line_no_(line_no) {}

    std::vector<Token> tokenize() {
        std::vector<Token> out;
        while (true) {
            skip_space();
            const auto col = pos_ + 1;
            if (pos_ >= line_.size() || line_[pos_] == '#') {
                out.push_back({Tok::End, "", col});
                return out;
            }
            const char c = line_[pos_];
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                const auto start = pos_;
                while (pos_ < line_.size() && (std::isalnum(static_cast<unsigned char>(line_[pos_])) || line_[pos_] == '_')) ++pos_;
                out.push_back({Tok::Ident, std::string(line_.substr(start, pos_ - start)), col});
            } else if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && next_is_digit())) {
                const auto start = pos_;
                while (pos_ < line_.size()) {
                    const char d = line_[pos_];
                    if (std::isalnum(static_cast<unsigned char>(d)) || d == '_' || d == '.') {
                        ++pos_;
                    } else if ((d == '+' || d == '-') && pos_ > start &&
                               (line_[pos_ - 1] == 'e' || line_[pos_ - 1] == 'E') && pos_ + 1 < line_.size() &&
                               std::isdigit(static_cast<unsigned char>(line_[pos_ + 1]))) {
                        ++pos_;
                    } else {
                        break;
                    }
                }
                out.push_back({Tok::Number, std::string(line_.substr(start, pos_ - start)), col});
            } else if (c == '\'' || c == '"') {
                const auto close = line_.find(c, pos_ + 1);
                if (close == std::string_view::npos) throw ParseError("unterminated constant", line_no_, col);
                out.push_back({Tok::String, std::string(line_.substr(pos_ + 1, close - pos_ - 1)), col});
                pos_ = close + 1;
            } else if (c == '-' && peek(1) == '>') {
                out.push_back({Tok::Arrow, "->", col});
                pos_ += 2;
            } else if (c == '!' && peek(1) == '=') {
                out.push_back({Tok::NotEq, "!=", col});
                pos_ += 2;
            } else {
                Tok kind;
                switch (c) {
                    case '(': kind = Tok::LParen; break;
                    case ')': kind = Tok::RParen; break;
                    case ',': kind = Tok::Comma; break;
                    case '&': kind = Tok::Amp; break;
                    case '|': kind = Tok::Bar; break;
                    case '~': kind = Tok::Tilde; break;
                    case ':': kind = Tok::Colon; break;
                    case '+': kind = Tok::Plus; break;
                    case '/': kind = Tok::Slash; break;
                    default: throw ParseError(std::string("unexpected character '") + c + "'", line_no_, col);
                }
                out.push_back({kind, std::string(1, c), col});
                ++pos_;
            }
        }
    }

private:
    void skip_space() {
        while (pos_ < line_.size() && std::isspace(static_cast<unsigned char>(line_[pos_]))) ++pos_;
    }
    char peek(std::size_t ahead) const { return pos_ + ahead < line_.size() ? line_[pos_ + ahead] : '\0'; }
    bool next_is_digit() const { return std::isdigit(static_cast<unsigned char>(peek(1))) != 0; }

    std::string_view line_;
    std::size_t line_no_;
    std::size_t pos_ = 0;
};

// Logic variables start with an uppercase letter or underscore.
bool is_variable_name(const std::string& name) {
    return std::isupper(static_cast<unsigned char>(name.front())) || name.front() == '_';
}

struct RawLiteral {
    std::string predicate;
    std::size_t column = 0;
    std::vector<LogicTerm> arguments;
    std::vector<bool> plus;
    bool negated = false;
};

struct RawRule {
    std::size_t line = 0;
    std::vector<RawLiteral> body;
    std::vector<RawLiteral> head;
    std::vector<InequalityGuard> guards;
    int exponent = 1;
    std::optional<double> weight;
};

struct RawConstraint {
    std::size_t line = 0;
    RawLiteral literal;
};

class LineParser {
public:
    LineParser(std::vector<Token> tokens, std::size_t line_no) : tokens_(std::move(tokens)), line_no_(line_no) {}

    bool at_end() const { return cur().kind == Tok::End; }
    const Token& cur() const { return tokens_[pos_]; }

    [[noreturn]] void fail(const std::string& message) const { throw ParseError(message, line_no_, cur().column); }

    const Token& expect(Tok kind, const char* what) {
        if (cur().kind != kind) fail(std::string("expected ") + what);
        return tokens_[pos_++];
    }

    bool accept(Tok kind) {
        if (cur().kind != kind) return false;
        ++pos_;
        return true;
    }

    bool accept_word(const char* word) {
        if (cur().kind == Tok::Ident && cur().text == word) {
            ++pos_;
            return true;
        }
        return false;
    }

    Predicate predicate_declaration() {
        Predicate pred;
        pred.name = expect(Tok::Ident, "predicate name").text;
        expect(Tok::Slash, "'/' before arity");
        const auto& arity = expect(Tok::Number, "arity");
        std::size_t value = 0;
        auto [ptr, ec] = std::from_chars(arity.text.data(), arity.text.data() + arity.text.size(), value);
        if (ec != std::errc() || ptr != arity.text.data() + arity.text.size() || value == 0) {
            throw ParseError("arity must be a positive integer", line_no_, arity.column);
        }
        pred.arity = value;
        if (accept_word("target")) pred.role = PredicateRole::Target;
        else if (accept_word("observed")) pred.role = PredicateRole::Observed;
        else if (!at_end()) fail("expected 'observed' or 'target'");
        if (!at_end()) fail("unexpected text after predicate declaration");
        return pred;
    }

    RawLiteral literal(bool allow_plus) {
        RawLiteral lit;
        lit.negated = accept(Tok::Tilde);
        lit.column = cur().column;
        lit.predicate = expect(Tok::Ident, "predicate name").text;
        expect(Tok::LParen, "'('");
        do {
            const bool plus = allow_plus && accept(Tok::Plus);
            lit.plus.push_back(plus);
            const auto& tok = cur();
            if (tok.kind == Tok::Ident && is_variable_name(tok.text)) {
                lit.arguments.emplace_back(LogicVariable{tok.text});
            } else if (tok.kind == Tok::String || tok.kind == Tok::Number || tok.kind == Tok::Ident) {
                if (allow_plus) fail("functional constraints take logic variables only");
                lit.arguments.emplace_back(LogicConstant{tok.text});
            } else {
                fail("expected an argument");
            }
            ++pos_;
        } while (accept(Tok::Comma));
        expect(Tok::RParen, "')'");
        return lit;
    }

    void rule(RawRule& rule) {
        if (accept_word("squared")) rule.exponent = 2;
        expect(Tok::Colon, "':'");
        // Body
        if (cur().kind != Tok::Arrow) {
            while (true) {
                if (cur().kind == Tok::Ident && tokens_[pos_ + 1].kind == Tok::NotEq) {
                    InequalityGuard guard;
                    guard.left = tokens_[pos_].text;
                    pos_ += 2;
                    guard.right = expect(Tok::Ident, "logic variable after '!='").text;
                    rule.guards.push_back(std::move(guard));
                } else {
                    rule.body.push_back(literal(false));
                }
                if (cur().kind == Tok::Bar) fail("disjunctive rule bodies are not supported");
                if (!accept(Tok::Amp)) break;
            }
        }
        expect(Tok::Arrow, "'->'");
        if (!at_end()) {
            while (true) {
                rule.head.push_back(literal(false));
                if (cur().kind == Tok::Amp) fail("conjunctive rule heads are not supported");
                if (!accept(Tok::Bar)) break;
            }
        }
        if (!at_end()) fail("unexpected text after rule");
    }

private:
    std::vector<Token> tokens_;
    std::size_t line_no_;
    std::size_t pos_ = 0;
};

std::string format_weight(double w) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", w);
    std::string s(buf);
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    return s;
}

}  // namespace

ModelFile parse_model_file(std::string_view text) {
    std::vector<Predicate> predicates;
    std::vector<std::size_t> predicate_lines;
    std::vector<RawRule> rules;
    std::vector<RawConstraint> constraints;

    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        ++line_no;
        LineParser p(LineLexer(text.substr(start, end - start), line_no).tokenize(), line_no);
        start = end + 1;
        if (p.at_end()) continue;

        if (p.accept_word("predicate")) {
            const auto col = p.cur().column;
            auto pred = p.predicate_declaration();
            for (const auto& existing : predicates) {
                if (existing.name == pred.name) throw ParseError("predicate " + pred.name + " declared twice", line_no, col);
            }
            predicates.push_back(std::move(pred));
            predicate_lines.push_back(line_no);
        } else if (p.accept_word("constraint")) {
            if (!p.accept_word("functional")) p.fail("expected 'functional'");
            p.expect(Tok::Colon, "':'");
            RawConstraint c{line_no, p.literal(true)};
            if (c.literal.negated) p.fail("functional constraints cannot be negated");
            if (!p.at_end()) p.fail("unexpected text after constraint");
            constraints.push_back(std::move(c));
        } else if (p.accept_word("learn")) {
            RawRule r;
            r.line = line_no;
            p.rule(r);
            rules.push_back(std::move(r));
        } else if (p.cur().kind == Tok::Number) {
            const auto& tok = p.cur();
            double w = 0.0;
            auto [ptr, ec] = std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), w);
            if (ec != std::errc() || ptr != tok.text.data() + tok.text.size()) {
                throw ParseError("invalid weight '" + tok.text + "'", line_no, tok.column);
            }
            if (!(w >= 0.0)) throw ParseError("rule weights must be nonnegative", line_no, tok.column);
            p.accept(Tok::Number);
            RawRule r;
            r.line = line_no;
            r.weight = w;
            p.rule(r);
            rules.push_back(std::move(r));
        } else if (p.cur().kind == Tok::Arrow || (p.cur().kind == Tok::Ident && p.cur().text != "squared")) {
            p.fail("expected 'predicate', 'constraint', 'learn' or a weight");
        } else {
            p.fail("expected 'predicate', 'constraint', 'learn' or a weight");
        }
        if (end == text.size()) break;
    }

    auto resolve = [&](const RawLiteral& raw, std::size_t line) -> Literal {
        for (std::size_t i = 0; i < predicates.size(); ++i) {
            if (predicates[i].name != raw.predicate) continue;
            if (predicates[i].arity != raw.arguments.size()) {
                throw ParseError(raw.predicate + " expects " + std::to_string(predicates[i].arity) + " arguments",
                                 line, raw.column);
            }
            return Literal{i, raw.arguments, raw.negated};
        }
        throw ParseError("undeclared predicate " + raw.predicate, line, raw.column);
    };

    ModelFile model;
    model.predicates = predicates;
    for (std::size_t q = 0; q < rules.size(); ++q) {
        const auto& raw = rules[q];
        RuleTemplate rule;
        for (const auto& lit : raw.body) rule.body.push_back(resolve(lit, raw.line));
        for (const auto& lit : raw.head) rule.head.push_back(resolve(lit, raw.line));
        rule.guards = raw.guards;
        rule.template_index = q;
        rule.exponent = raw.exponent;
        rule.weight = raw.weight;
        try {
            validate_rule(rule);
        } catch (const ModelError& e) {
            throw ParseError(e.what(), raw.line, 1);
        }
        model.templates.push_back(std::move(rule));
    }
    for (const auto& raw : constraints) {
        const auto lit = resolve(raw.literal, raw.line);
        if (model.predicates[lit.predicate].role != PredicateRole::Target) {
            throw ParseError("functional constraint on observed predicate " + raw.literal.predicate, raw.line,
                             raw.literal.column);
        }
        model.constraints.push_back(ConstraintSpec{lit.predicate, raw.literal.plus});
    }
    return model;
}

std::string format_model_file(const ModelFile& model) {
    std::ostringstream out;
    for (const auto& pred : model.predicates) {
        out << "predicate " << pred.name << '/' << pred.arity << ' '
            << (pred.role == PredicateRole::Target ? "target" : "observed") << '\n';
    }
    auto term = [](const LogicTerm& t) {
        if (const auto* v = std::get_if<LogicVariable>(&t)) return v->name;
        return "'" + std::get<LogicConstant>(t).value + "'";
    };
    auto literal = [&](const Literal& lit) {
        std::string s = lit.negated ? "~" : "";
        s += model.predicates.at(lit.predicate).name + "(";
        for (std::size_t i = 0; i < lit.arguments.size(); ++i) {
            if (i) s += ", ";
            s += term(lit.arguments[i]);
        }
        return s + ")";
    };
    for (const auto& rule : model.templates) {
        out << (rule.weight ? format_weight(*rule.weight) : std::string("learn"));
        if (rule.exponent == 2) out << " squared";
        out << ':';
        std::vector<std::string> body;
        for (const auto& lit : rule.body) body.push_back(literal(lit));
        for (const auto& g : rule.guards) body.push_back(g.left + " != " + g.right);
        for (std::size_t i = 0; i < body.size(); ++i) out << (i ? " & " : " ") << body[i];
        out << " ->";
        for (std::size_t i = 0; i < rule.head.size(); ++i) out << (i ? " | " : " ") << literal(rule.head[i]);
        out << '\n';
    }
    for (const auto& spec : model.constraints) {
        const auto& pred = model.predicates.at(spec.predicate);
        out << "constraint functional: " << pred.name << '(';
        for (std::size_t i = 0; i < spec.summed.size(); ++i) {
            if (i) out << ", ";
            out << (spec.summed[i] ? "+" : "") << "V" << i;
        }
        out << ")\n";
    }
    return out.str();
}

}  // namespace hlmrf
