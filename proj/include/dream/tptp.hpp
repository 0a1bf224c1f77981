// Copyright (c) 2026, DREAM prover contributors
// SPDX-License-Identifier: Apache-2.0
//
// TPTP reader for the FOF dialect: lexer, recursive-descent parser following
// the published BNF (binary connectives take unit formulas on both sides, so
// mixed chains need parentheses), include resolution, and a serializer whose
// output re-parses to an equal tree.  CNF/TFF/THF inputs are rejected.

#pragma once

#include <cctype>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dream/errors.hpp"
#include "dream/theorem.hpp"

namespace dream::tptp {

struct Term {
    enum class Kind { Variable, Function };
    Kind kind = Kind::Function;
    std::string name;
    std::vector<Term> args;
    bool operator==(const Term&) const = default;
};

enum class Connective { And, Or, Implies, ReverseImplies, Iff, Xor, Nor, Nand };

inline std::string_view connective_text(Connective c) {
    switch (c) {
    case Connective::And: return "&";
    case Connective::Or: return "|";
    case Connective::Implies: return "=>";
    case Connective::ReverseImplies: return "<=";
    case Connective::Iff: return "<=>";
    case Connective::Xor: return "<~>";
    case Connective::Nor: return "~|";
    case Connective::Nand: return "~&";
    }
    return "?";
}

struct Formula {
    enum class Kind { Atom, Equality, Inequality, Not, Forall, Exists, Binary, Assoc };
    Kind kind = Kind::Atom;
    std::vector<Term> terms;           // Atom: [predicate term]; (In)Equality: [lhs, rhs]
    std::vector<std::string> variables; // quantifiers
    Connective op = Connective::And;    // Binary / Assoc
    std::vector<Formula> children;      // Not/quantifiers: 1; Binary: 2; Assoc: >= 2

    bool operator==(const Formula&) const = default;

    static Formula atom(Term t) {
        Formula f;
        f.kind = Kind::Atom;
        f.terms.push_back(std::move(t));
        return f;
    }
};

enum class Role { Axiom, Conjecture, Hypothesis, Other };

struct AnnotatedFormula {
    std::string label;
    Role role = Role::Axiom;
    std::string role_text; // as written, e.g. "definition" for Role::Other
    Formula formula;
    std::string source_text;
};

struct TptpProblem {
    std::string name;
    std::string domain;
    std::vector<AnnotatedFormula> formulas;

    std::vector<const AnnotatedFormula*> with_role(Role r) const {
        std::vector<const AnnotatedFormula*> out;
        for (const auto& f : formulas)
            if (f.role == r)
                out.push_back(&f);
        return out;
    }
};

struct ParseOptions {
    std::filesystem::path tptp_root; // include('Axioms/...') is resolved here
    std::string problem_name;
    int max_include_depth = 8;
};

// ---------------------------------------------------------------------------
// Lexer

namespace detail {

enum class Tok {
    End,
    LowerWord,
    UpperWord,
    DollarWord,
    SingleQuoted,
    DistinctObject,
    Number,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Dot,
    Colon,
    Bang,
    Question,
    Tilde,
    Amp,
    Pipe,
    Eq,
    NotEq,
    Implies,
    RevImplies,
    Iff,
    Xor,
    Nor,
    Nand,
    Sequent,
    Other
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    std::size_t offset = 0;
    int line = 1;
    int column = 1;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> tokenize() {
        std::vector<Token> out;
        while (true) {
            skip_space_and_comments();
            Token t;
            t.offset = pos_;
            t.line = line_;
            t.column = col_;
            if (pos_ >= src_.size()) {
                t.kind = Tok::End;
                out.push_back(t);
                return out;
            }
            lex_one(t);
            out.push_back(std::move(t));
        }
    }

private:
    char peek(std::size_t ahead = 0) const { return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0'; }

    void advance(std::size_t n = 1) {
        for (std::size_t i = 0; i < n && pos_ < src_.size(); ++i) {
            if (src_[pos_] == '\n') {
                ++line_;
                col_ = 1;
            } else {
                ++col_;
            }
            ++pos_;
        }
    }

    void skip_space_and_comments() {
        while (pos_ < src_.size()) {
            char c = peek();
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else if (c == '%') {
                while (pos_ < src_.size() && peek() != '\n')
                    advance();
            } else if (c == '/' && peek(1) == '*') {
                int l = line_, col = col_;
                advance(2);
                while (pos_ < src_.size() && !(peek() == '*' && peek(1) == '/'))
                    advance();
                if (pos_ >= src_.size())
                    throw ParseError("unterminated block comment", l, col);
                advance(2);
            } else {
                return;
            }
        }
    }

    static bool alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

    void lex_one(Token& t) {
        const char c = peek();
        auto take = [&](Tok k, std::size_t n) {
            t.kind = k;
            t.text = std::string(src_.substr(pos_, n));
            advance(n);
        };
        if (std::islower(static_cast<unsigned char>(c))) {
            std::size_t n = 0;
            while (alnum(peek(n)))
                ++n;
            return take(Tok::LowerWord, n);
        }
        if (std::isupper(static_cast<unsigned char>(c))) {
            std::size_t n = 0;
            while (alnum(peek(n)))
                ++n;
            return take(Tok::UpperWord, n);
        }
        if (c == '$') {
            std::size_t n = peek(1) == '$' ? 2 : 1;
            if (!std::islower(static_cast<unsigned char>(peek(n))))
                throw ParseError("malformed $-word", line_, col_);
            while (alnum(peek(n)))
                ++n;
            return take(Tok::DollarWord, n);
        }
        if (c == '\'' || c == '"') {
            std::size_t n = 1;
            while (pos_ + n < src_.size() && peek(n) != c) {
                if (peek(n) == '\\')
                    ++n;
                ++n;
            }
            if (pos_ + n >= src_.size())
                throw ParseError(c == '\'' ? "unterminated quoted atom" : "unterminated distinct object", line_, col_);
            return take(c == '\'' ? Tok::SingleQuoted : Tok::DistinctObject, n + 1);
        }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            ((c == '-' || c == '+') && std::isdigit(static_cast<unsigned char>(peek(1))))) {
            std::size_t n = 1;
            while (std::isdigit(static_cast<unsigned char>(peek(n))))
                ++n;
            if (peek(n) == '/' || (peek(n) == '.' && std::isdigit(static_cast<unsigned char>(peek(n + 1))))) {
                ++n;
                while (std::isdigit(static_cast<unsigned char>(peek(n))))
                    ++n;
            }
            if ((peek(n) == 'E' || peek(n) == 'e') &&
                (std::isdigit(static_cast<unsigned char>(peek(n + 1))) ||
                 ((peek(n + 1) == '-' || peek(n + 1) == '+') && std::isdigit(static_cast<unsigned char>(peek(n + 2)))))) {
                n += 2;
                while (std::isdigit(static_cast<unsigned char>(peek(n))))
                    ++n;
            }
            return take(Tok::Number, n);
        }
        auto starts = [&](std::string_view s) { return src_.substr(pos_, s.size()) == s; };
        if (starts("<=>"))
            return take(Tok::Iff, 3);
        if (starts("<~>"))
            return take(Tok::Xor, 3);
        if (starts("-->"))
            return take(Tok::Sequent, 3);
        if (starts("=>"))
            return take(Tok::Implies, 2);
        if (starts("<="))
            return take(Tok::RevImplies, 2);
        if (starts("!="))
            return take(Tok::NotEq, 2);
        if (starts("~|"))
            return take(Tok::Nor, 2);
        if (starts("~&"))
            return take(Tok::Nand, 2);
        switch (c) {
        case '(': return take(Tok::LParen, 1);
        case ')': return take(Tok::RParen, 1);
        case '[': return take(Tok::LBracket, 1);
        case ']': return take(Tok::RBracket, 1);
        case ',': return take(Tok::Comma, 1);
        case '.': return take(Tok::Dot, 1);
        case ':': return take(Tok::Colon, 1);
        case '!': return take(Tok::Bang, 1);
        case '?': return take(Tok::Question, 1);
        case '~': return take(Tok::Tilde, 1);
        case '&': return take(Tok::Amp, 1);
        case '|': return take(Tok::Pipe, 1);
        case '=': return take(Tok::Eq, 1);
        default: break;
        }
        return take(Tok::Other, 1);
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

// ---------------------------------------------------------------------------
// Parser

class Parser {
public:
    Parser(std::string_view src, std::vector<Token> toks) : src_(src), toks_(std::move(toks)) {}

    bool at_end() const { return cur().kind == Tok::End; }
    const Token& cur() const { return toks_[i_]; }
    const Token& next() const { return toks_[std::min(i_ + 1, toks_.size() - 1)]; }

    [[noreturn]] void fail(const std::string& what) const {
        const auto& t = cur();
        throw ParseError(what + (t.kind == Tok::End ? " (found end of input)" : " (found '" + t.text + "')"), t.line,
                         t.column);
    }

    Token expect(Tok k, const char* what) {
        if (cur().kind != k)
            fail(std::string("expected ") + what);
        return toks_[i_++];
    }

    bool accept(Tok k) {
        if (cur().kind == k) {
            ++i_;
            return true;
        }
        return false;
    }

    std::string take_name() {
        const auto& t = cur();
        if (t.kind == Tok::LowerWord || t.kind == Tok::SingleQuoted || t.kind == Tok::Number) {
            ++i_;
            return t.text;
        }
        fail("expected a formula name");
    }

    Term parse_term() {
        const auto& t = cur();
        if (t.kind == Tok::UpperWord) {
            ++i_;
            return {Term::Kind::Variable, t.text, {}};
        }
        if (t.kind == Tok::LowerWord || t.kind == Tok::SingleQuoted || t.kind == Tok::DollarWord) {
            ++i_;
            Term fn{Term::Kind::Function, t.text, {}};
            if (accept(Tok::LParen)) {
                do {
                    fn.args.push_back(parse_term());
                } while (accept(Tok::Comma));
                expect(Tok::RParen, "')' closing argument list");
            }
            return fn;
        }
        if (t.kind == Tok::Number || t.kind == Tok::DistinctObject) {
            ++i_;
            return {Term::Kind::Function, t.text, {}};
        }
        fail("expected a term");
    }

    static std::optional<Connective> nonassoc(Tok k) {
        switch (k) {
        case Tok::Implies: return Connective::Implies;
        case Tok::RevImplies: return Connective::ReverseImplies;
        case Tok::Iff: return Connective::Iff;
        case Tok::Xor: return Connective::Xor;
        case Tok::Nor: return Connective::Nor;
        case Tok::Nand: return Connective::Nand;
        default: return std::nullopt;
        }
    }

    Formula parse_logic_formula() {
        Formula lhs = parse_unit();
        if (cur().kind == Tok::Sequent)
            throw UnsupportedDialect("sequent (-->)");
        if (auto op = nonassoc(cur().kind)) {
            ++i_;
            Formula f;
            f.kind = Formula::Kind::Binary;
            f.op = *op;
            f.children.push_back(std::move(lhs));
            f.children.push_back(parse_unit());
            if (nonassoc(cur().kind) || cur().kind == Tok::Amp || cur().kind == Tok::Pipe)
                fail("binary connectives must be parenthesized");
            return f;
        }
        if (cur().kind == Tok::Amp || cur().kind == Tok::Pipe) {
            const Tok chain = cur().kind;
            Formula f;
            f.kind = Formula::Kind::Assoc;
            f.op = chain == Tok::Amp ? Connective::And : Connective::Or;
            f.children.push_back(std::move(lhs));
            while (accept(chain))
                f.children.push_back(parse_unit());
            if (cur().kind == Tok::Amp || cur().kind == Tok::Pipe || nonassoc(cur().kind))
                fail("mixed connectives must be parenthesized");
            return f;
        }
        return lhs;
    }

    Formula parse_unit() {
        const auto& t = cur();
        if (t.kind == Tok::Tilde) {
            ++i_;
            Formula f;
            f.kind = Formula::Kind::Not;
            f.children.push_back(parse_unit());
            return f;
        }
        if (t.kind == Tok::Bang || t.kind == Tok::Question) {
            ++i_;
            Formula f;
            f.kind = t.kind == Tok::Bang ? Formula::Kind::Forall : Formula::Kind::Exists;
            expect(Tok::LBracket, "'[' after quantifier");
            do {
                if (cur().kind != Tok::UpperWord)
                    fail("expected a variable in quantifier list");
                f.variables.push_back(cur().text);
                ++i_;
                if (cur().kind == Tok::Colon)
                    throw UnsupportedDialect("typed variable (tff)");
            } while (accept(Tok::Comma));
            expect(Tok::RBracket, "']' closing variable list");
            expect(Tok::Colon, "':' after quantifier variables");
            f.children.push_back(parse_unit());
            return f;
        }
        if (t.kind == Tok::LParen) {
            ++i_;
            Formula f = parse_logic_formula();
            expect(Tok::RParen, "')'");
            return f;
        }
        const auto start = cur();
        Term lhs = parse_term();
        if (cur().kind == Tok::Eq || cur().kind == Tok::NotEq) {
            Formula f;
            f.kind = cur().kind == Tok::Eq ? Formula::Kind::Equality : Formula::Kind::Inequality;
            ++i_;
            f.terms.push_back(std::move(lhs));
            f.terms.push_back(parse_term());
            return f;
        }
        if (lhs.kind == Term::Kind::Variable)
            throw ParseError("a variable cannot stand alone as a formula", start.line, start.column);
        return Formula::atom(std::move(lhs));
    }

    // skip an annotation (general term list) up to the closing ')' of fof(...)
    void skip_annotations() {
        int depth = 0;
        while (!at_end()) {
            auto k = cur().kind;
            if (depth == 0 && k == Tok::RParen)
                return;
            if (k == Tok::LParen || k == Tok::LBracket)
                ++depth;
            else if (k == Tok::RParen || k == Tok::RBracket)
                --depth;
            ++i_;
        }
        fail("unterminated annotation");
    }

    std::string_view slice(std::size_t from, std::size_t to) const { return src_.substr(from, to - from); }
    std::size_t end_offset_of_prev() const {
        const auto& t = toks_[i_ - 1];
        return t.offset + t.text.size();
    }

    std::string_view src_;
    std::vector<Token> toks_;
    std::size_t i_ = 0;
};

inline Role role_from_text(std::string_view r) {
    if (r == "axiom")
        return Role::Axiom;
    if (r == "conjecture")
        return Role::Conjecture;
    if (r == "hypothesis")
        return Role::Hypothesis;
    return Role::Other;
}

inline std::string domain_of(std::string_view name) {
    std::string d;
    for (char c : name) {
        if (!std::isalpha(static_cast<unsigned char>(c)))
            break;
        d += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    }
    return d.size() == 3 ? d : std::string();
}

void parse_into(TptpProblem& problem, std::string_view text, const ParseOptions& opt, int depth,
                const std::vector<std::string>* selection);

inline void parse_into(TptpProblem& problem, std::string_view text, const ParseOptions& opt, int depth,
                       const std::vector<std::string>* selection) {
    Parser p(text, Lexer(text).tokenize());
    while (!p.at_end()) {
        const auto head = p.cur();
        if (head.kind != Tok::LowerWord)
            p.fail("expected an annotated formula or include directive");
        if (head.text == "cnf" || head.text == "tff" || head.text == "thf" || head.text == "tcf" ||
            head.text == "tpi")
            throw UnsupportedDialect(head.text);
        if (head.text == "include") {
            p.i_++;
            p.expect(Tok::LParen, "'(' after include");
            auto file = p.expect(Tok::SingleQuoted, "quoted include path").text;
            file = file.substr(1, file.size() - 2);
            std::vector<std::string> names;
            bool has_selection = false;
            if (p.accept(Tok::Comma)) {
                has_selection = true;
                p.expect(Tok::LBracket, "'[' starting include selection");
                if (p.cur().kind != Tok::RBracket) {
                    do {
                        names.push_back(p.take_name());
                    } while (p.accept(Tok::Comma));
                }
                p.expect(Tok::RBracket, "']' closing include selection");
            }
            p.expect(Tok::RParen, "')' closing include");
            p.expect(Tok::Dot, "'.' ending include");
            if (depth >= opt.max_include_depth)
                throw ParseError("include nesting too deep", head.line, head.column);
            auto path = opt.tptp_root.empty() ? std::filesystem::path(file) : opt.tptp_root / file;
            std::string inc;
            try {
                inc = read_text_file(path);
            } catch (const EnvironmentError&) {
                throw EnvironmentError("cannot resolve include '" + file + "' (looked for " + path.string() + ")");
            }
            parse_into(problem, inc, opt, depth + 1, has_selection ? &names : nullptr);
            continue;
        }
        if (head.text != "fof")
            p.fail("unknown directive");
        p.i_++;
        p.expect(Tok::LParen, "'(' after fof");
        AnnotatedFormula af;
        af.label = p.take_name();
        p.expect(Tok::Comma, "',' after formula name");
        auto role_tok = p.expect(Tok::LowerWord, "formula role");
        af.role_text = role_tok.text;
        af.role = role_from_text(role_tok.text);
        p.expect(Tok::Comma, "',' after formula role");
        af.formula = p.parse_logic_formula();
        if (p.accept(Tok::Comma))
            p.skip_annotations();
        p.expect(Tok::RParen, "')' closing fof");
        p.expect(Tok::Dot, "'.' ending fof");
        af.source_text = std::string(p.slice(head.offset, p.end_offset_of_prev()));
        if (selection && std::find(selection->begin(), selection->end(), af.label) == selection->end())
            continue;
        problem.formulas.push_back(std::move(af));
    }
}

} // namespace detail

inline TptpProblem parse_tptp(std::string_view text, const ParseOptions& opt = {}) {
    TptpProblem problem;
    problem.name = opt.problem_name;
    problem.domain = detail::domain_of(opt.problem_name);
    detail::parse_into(problem, text, opt, 0, nullptr);
    return problem;
}

inline TptpProblem parse_tptp_file(const std::filesystem::path& path, ParseOptions opt = {}) {
    if (opt.problem_name.empty())
        opt.problem_name = path.stem().string();
    return parse_tptp(read_text_file(path), opt);
}

/// Exactly one conjecture, as the dataset pipeline requires.
inline void validate_problem(const TptpProblem& p) {
    auto n = p.with_role(Role::Conjecture).size();
    if (n != 1)
        throw ValidationError("TPTP problem '" + p.name + "' has " + std::to_string(n) +
                              " conjectures, expected exactly one");
}

// ---------------------------------------------------------------------------
// Serializer

inline std::string to_string(const Term& t) {
    if (t.args.empty())
        return t.name;
    std::string s = t.name + "(";
    for (std::size_t i = 0; i < t.args.size(); ++i) {
        if (i)
            s += ",";
        s += to_string(t.args[i]);
    }
    return s + ")";
}

std::string to_string(const Formula& f);

inline std::string unit_string(const Formula& f) {
    auto s = to_string(f);
    if (f.kind == Formula::Kind::Binary || f.kind == Formula::Kind::Assoc)
        return "(" + s + ")";
    return s;
}

inline std::string to_string(const Formula& f) {
    switch (f.kind) {
    case Formula::Kind::Atom: return to_string(f.terms.at(0));
    case Formula::Kind::Equality: return to_string(f.terms.at(0)) + " = " + to_string(f.terms.at(1));
    case Formula::Kind::Inequality: return to_string(f.terms.at(0)) + " != " + to_string(f.terms.at(1));
    case Formula::Kind::Not: return "~ " + unit_string(f.children.at(0));
    case Formula::Kind::Forall:
    case Formula::Kind::Exists: {
        std::string s = f.kind == Formula::Kind::Forall ? "! [" : "? [";
        for (std::size_t i = 0; i < f.variables.size(); ++i) {
            if (i)
                s += ",";
            s += f.variables[i];
        }
        return s + "] : " + unit_string(f.children.at(0));
    }
    case Formula::Kind::Binary:
        return unit_string(f.children.at(0)) + " " + std::string(connective_text(f.op)) + " " +
               unit_string(f.children.at(1));
    case Formula::Kind::Assoc: {
        std::string s;
        for (std::size_t i = 0; i < f.children.size(); ++i) {
            if (i)
                s += " " + std::string(connective_text(f.op)) + " ";
            s += unit_string(f.children[i]);
        }
        return s;
    }
    }
    return {};
}

inline std::string to_string(const AnnotatedFormula& af) {
    return "fof(" + af.label + ", " + af.role_text + ", " + to_string(af.formula) + ").";
}

inline std::string to_string(const TptpProblem& p) {
    std::string out;
    for (const auto& f : p.formulas)
        out += to_string(f) + "\n";
    return out;
}

} // namespace dream::tptp
