#include "scl/dsl.hpp"
#include "scl/time.hpp"

#include <cctype>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace scl {

namespace {

// ---------------------------------------------------------------- lexing

enum class Tok {
    Ident,
    Number,    // integer, p/q rational, or decimal; optional leading minus
    LBrace,
    RBrace,
    LParen,
    RParen,
    Assign,    // =  (also the comparison operator; context decides)
    Comma,
    Semi,
    Colon,
    Dot,
    Pipe,
    At,
    Question,
    Lt,
    Le,
    Gt,
    Ge,
    Ne,
    End,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    SourceSpan span;
};

const std::set<std::string>& reserved_words() {
    static const std::set<std::string> words = {
        "contract", "sort",     "fluent",   "action",      "at",       "poss",
        "causes",   "when",     "init",     "program",     "property", "on",
        "pick",     "star",     "test",     "if",          "then",     "else",
        "while",    "do",       "nil",      "oblige",      "release",  "deadline",
        "not",      "and",      "or",       "implies",     "forall",   "exists",
        "true",     "false",    "Obl",      "pending",     "fulfilled", "violated",
        "absent",   "termination", "execution", "always",  "no",       "obligations",
        "all",      "subtraces", "Action",  "Time",        "now",
    };
    return words;
}

struct Lexer {
    std::string_view text;
    std::size_t pos = 0;
    int line = 1;
    int col = 1;
    std::vector<Diagnostic>& diags;

    explicit Lexer(std::string_view t, std::vector<Diagnostic>& d) : text(t), diags(d) {}

    SourceSpan here() const {
        return {static_cast<int>(pos), static_cast<int>(pos), line, col};
    }

    void advance() {
        if (pos >= text.size()) return;
        if (text[pos] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
        ++pos;
    }

    bool skip_trivia() {
        for (;;) {
            if (pos >= text.size()) return true;
            char c = text[pos];
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
                continue;
            }
            if (c == '/' && pos + 1 < text.size() && text[pos + 1] == '/') {
                while (pos < text.size() && text[pos] != '\n') advance();
                continue;
            }
            if (c == '/' && pos + 1 < text.size() && text[pos + 1] == '*') {
                SourceSpan open = here();
                advance();
                advance();
                bool closed = false;
                while (pos < text.size()) {
                    if (text[pos] == '*' && pos + 1 < text.size() && text[pos + 1] == '/') {
                        advance();
                        advance();
                        closed = true;
                        break;
                    }
                    advance();
                }
                if (!closed) {
                    diags.push_back({"unterminated block comment", open});
                    return false;
                }
                continue;
            }
            return true;
        }
    }

    std::vector<Token> lex() {
        std::vector<Token> out;
        while (skip_trivia() && pos < text.size()) {
            SourceSpan start = here();
            char c = text[pos];
            auto push = [&](Tok k, std::size_t len) {
                Token t;
                t.kind = k;
                t.text = std::string(text.substr(pos, len));
                for (std::size_t i = 0; i < len; ++i) advance();
                t.span = start;
                t.span.end = static_cast<int>(pos);
                out.push_back(std::move(t));
            };
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                std::size_t n = 1;
                while (pos + n < text.size() &&
                       (std::isalnum(static_cast<unsigned char>(text[pos + n])) ||
                        text[pos + n] == '_'))
                    ++n;
                push(Tok::Ident, n);
                continue;
            }
            if (std::isdigit(static_cast<unsigned char>(c)) ||
                (c == '-' && pos + 1 < text.size() &&
                 std::isdigit(static_cast<unsigned char>(text[pos + 1])))) {
                std::size_t n = c == '-' ? 2 : 1;
                while (pos + n < text.size() &&
                       std::isdigit(static_cast<unsigned char>(text[pos + n])))
                    ++n;
                if (pos + n + 1 < text.size() &&
                    (text[pos + n] == '/' || text[pos + n] == '.') &&
                    std::isdigit(static_cast<unsigned char>(text[pos + n + 1]))) {
                    n += 2;
                    while (pos + n < text.size() &&
                           std::isdigit(static_cast<unsigned char>(text[pos + n])))
                        ++n;
                }
                push(Tok::Number, n);
                continue;
            }
            switch (c) {
                case '{': push(Tok::LBrace, 1); continue;
                case '}': push(Tok::RBrace, 1); continue;
                case '(': push(Tok::LParen, 1); continue;
                case ')': push(Tok::RParen, 1); continue;
                case ',': push(Tok::Comma, 1); continue;
                case ';': push(Tok::Semi, 1); continue;
                case ':': push(Tok::Colon, 1); continue;
                case '.': push(Tok::Dot, 1); continue;
                case '|': push(Tok::Pipe, 1); continue;
                case '@': push(Tok::At, 1); continue;
                case '?': push(Tok::Question, 1); continue;
                case '=':
                    if (pos + 1 < text.size() && text[pos + 1] == '=')
                        push(Tok::Assign, 2);  // == is accepted as =
                    else
                        push(Tok::Assign, 1);
                    continue;
                case '<':
                    if (pos + 1 < text.size() && text[pos + 1] == '=')
                        push(Tok::Le, 2);
                    else
                        push(Tok::Lt, 1);
                    continue;
                case '>':
                    if (pos + 1 < text.size() && text[pos + 1] == '=')
                        push(Tok::Ge, 2);
                    else
                        push(Tok::Gt, 1);
                    continue;
                case '!':
                    if (pos + 1 < text.size() && text[pos + 1] == '=') {
                        push(Tok::Ne, 2);
                        continue;
                    }
                    [[fallthrough]];
                default:
                    diags.push_back({std::string("unexpected character '") + c + "'", start});
                    advance();
            }
        }
        Token end;
        end.kind = Tok::End;
        end.span = here();
        out.push_back(end);
        return out;
    }
};

// ------------------------------------------------------------- resolving

// The signature the term/formula/program grammar resolves against, built
// incrementally during a spec parse or wholesale from a ContractTheory.
struct Env {
    std::map<std::string, std::vector<std::string>> fluents;  // name -> arg sorts
    std::map<std::string, std::vector<std::string>> actions;  // name -> param sorts
    std::map<std::string, std::string> constants;             // name -> sort
    std::set<std::string> sort_names;

    static Env from_theory(const ContractTheory& t) {
        Env env;
        for (const SortDecl& s : t.sorts) {
            env.sort_names.insert(s.name);
            for (const std::string& c : s.constants) env.constants[c] = s.name;
        }
        for (const FluentDecl& f : t.fluents)
            if (f.name != kOblFluent) env.fluents[f.name] = f.arg_sorts;
        for (const ActionDecl& a : t.actions)
            if (a.name != kObligeAction && a.name != kReleaseAction)
                env.actions[a.name] = a.arg_sorts;
        return env;
    }
};

// ---------------------------------------------------------------- parser

// Closed from the DSL's point of view: no free variables besides the
// distinguished `now` situation placeholder.
bool closed_formula(const Formula& f) {
    for (const auto& [name, sort] : free_vars(f))
        if (sort != kSortSituation) return false;
    return true;
}

struct Parser {
    const std::vector<Token>& toks;
    std::size_t pos = 0;
    std::vector<Diagnostic>& diags;
    Env env;
    // When set, wildcard/omitted occurrence times in positions that need a
    // literal resolve to this value (interactive `@?` support).
    std::optional<Time> default_time;
    // lexical scope: params, time variables, quantifier and pick variables
    std::vector<std::pair<std::string, std::string>> scope;

    Parser(const std::vector<Token>& t, std::vector<Diagnostic>& d) : toks(t), diags(d) {}

    const Token& peek(std::size_t ahead = 0) const {
        std::size_t i = pos + ahead;
        return i < toks.size() ? toks[i] : toks.back();
    }
    const Token& prev() const { return toks[pos == 0 ? 0 : pos - 1]; }
    bool at(Tok k) const { return peek().kind == k; }
    bool at_kw(const char* w) const { return at(Tok::Ident) && peek().text == w; }
    const Token& take() {
        const Token& t = peek();
        if (pos + 1 < toks.size()) ++pos;
        return t;
    }
    bool accept(Tok k) {
        if (!at(k)) return false;
        take();
        return true;
    }
    bool accept_kw(const char* w) {
        if (!at_kw(w)) return false;
        take();
        return true;
    }

    void error(const std::string& message, const SourceSpan& span) {
        diags.push_back({message, span});
    }
    void error_here(const std::string& message) { error(message, peek().span); }

    bool expect(Tok k, const char* what) {
        if (accept(k)) return true;
        error_here(std::string("expected ") + what);
        return false;
    }
    bool expect_kw(const char* w) {
        if (accept_kw(w)) return true;
        error_here(std::string("expected '") + w + "'");
        return false;
    }

    // Declared name or in-scope variable lookup.
    const std::string* scope_sort(const std::string& name) const {
        for (auto it = scope.rbegin(); it != scope.rend(); ++it)
            if (it->first == name) return &it->second;
        return nullptr;
    }

    // ---- terms ---------------------------------------------------------

    // A term in a slot of known object sort: an in-scope variable or a
    // declared constant of that sort.
    std::optional<Term> object_term(const std::string& want_sort) {
        if (!at(Tok::Ident)) {
            error_here("expected a constant or variable");
            return std::nullopt;
        }
        Token t = take();
        if (const std::string* s = scope_sort(t.text)) {
            if (*s != want_sort) {
                error("variable '" + t.text + "' has sort " + *s + ", expected " + want_sort,
                      t.span);
                return std::nullopt;
            }
            return Term::var(t.text, *s);
        }
        auto it = env.constants.find(t.text);
        if (it == env.constants.end()) {
            error("unknown identifier '" + t.text + "'", t.span);
            return std::nullopt;
        }
        if (it->second != want_sort) {
            error("constant '" + t.text + "' has sort " + it->second + ", expected " +
                      want_sort,
                  t.span);
            return std::nullopt;
        }
        return Term::constant(t.text, it->second);
    }

    // Agent-style slot: any object-sorted variable or constant.
    std::optional<Term> any_object_term() {
        if (!at(Tok::Ident)) {
            error_here("expected a constant or variable");
            return std::nullopt;
        }
        Token t = take();
        if (const std::string* s = scope_sort(t.text)) {
            if (*s == kSortTime || *s == kSortAction) {
                error("variable '" + t.text + "' is not object-sorted", t.span);
                return std::nullopt;
            }
            return Term::var(t.text, *s);
        }
        auto it = env.constants.find(t.text);
        if (it == env.constants.end()) {
            error("unknown identifier '" + t.text + "'", t.span);
            return std::nullopt;
        }
        return Term::constant(t.text, it->second);
    }

    std::optional<Term> time_literal(const char* what) {
        if (!at(Tok::Number)) {
            error_here(std::string("expected ") + what);
            return std::nullopt;
        }
        Token t = take();
        auto parsed = parse_time(t.text);
        if (!parsed) {
            error("malformed time '" + t.text + "'", t.span);
            return std::nullopt;
        }
        return Term::time_lit(*parsed);
    }

    // A comparison operand: number literal, in-scope variable, or constant.
    std::optional<Term> comparison_term() {
        if (at(Tok::Number)) return time_literal("a time");
        return any_term_or_time_var();
    }

    std::optional<Term> any_term_or_time_var() {
        if (!at(Tok::Ident)) {
            error_here("expected a term");
            return std::nullopt;
        }
        Token t = take();
        if (const std::string* s = scope_sort(t.text)) return Term::var(t.text, *s);
        auto it = env.constants.find(t.text);
        if (it == env.constants.end()) {
            error("unknown identifier '" + t.text + "'", t.span);
            return std::nullopt;
        }
        return Term::constant(t.text, it->second);
    }

    // `[not] fluent(args)` as a reified condition literal.
    std::optional<Term> cond_literal() {
        bool positive = !accept_kw("not");
        if (!at(Tok::Ident)) {
            error_here("expected a fluent literal");
            return std::nullopt;
        }
        Token name = take();
        auto it = env.fluents.find(name.text);
        if (it == env.fluents.end()) {
            error("unknown fluent '" + name.text + "'", name.span);
            return std::nullopt;
        }
        auto args = sorted_args(it->second, name.text);
        if (!args) return std::nullopt;
        return Term::cond_literal(name.text, *args, positive);
    }

    // `( t1, ..., tn )` with slot sorts taken from the signature.
    std::optional<std::vector<Term>> sorted_args(const std::vector<std::string>& slots,
                                                 const std::string& owner) {
        if (!expect(Tok::LParen, "'('")) return std::nullopt;
        std::vector<Term> out;
        if (!at(Tok::RParen)) {
            do {
                if (out.size() >= slots.size()) {
                    error_here("too many arguments to '" + owner + "'");
                    return std::nullopt;
                }
                auto term = object_term(slots[out.size()]);
                if (!term) return std::nullopt;
                out.push_back(*term);
            } while (accept(Tok::Comma));
        }
        if (!expect(Tok::RParen, "')'")) return std::nullopt;
        if (out.size() != slots.size()) {
            error("'" + owner + "' takes " + std::to_string(slots.size()) + " argument(s), got " +
                      std::to_string(out.size()),
                  prev().span);
            return std::nullopt;
        }
        return out;
    }

    // Ground action literal `a(args)@time` (oblige/release included); used
    // by poss() atoms and action lists, where the time must be a literal.
    std::optional<Term> ground_action_literal() {
        auto action = action_literal(/*require_literal_time=*/true);
        return action;
    }

    // `a(args)[@ time|@?]`, `oblige(agent, lit, [deadline] d)[@...]`.
    std::optional<Term> action_literal(bool require_literal_time) {
        if (!at(Tok::Ident)) {
            error_here("expected an action");
            return std::nullopt;
        }
        Token name = take();
        std::vector<Term> args;
        if (name.text == kObligeAction || name.text == kReleaseAction) {
            if (!expect(Tok::LParen, "'('")) return std::nullopt;
            auto agent = any_object_term();
            if (!agent) return std::nullopt;
            if (!expect(Tok::Comma, "','")) return std::nullopt;
            auto lit = cond_literal();
            if (!lit) return std::nullopt;
            if (!expect(Tok::Comma, "','")) return std::nullopt;
            accept_kw("deadline");  // optional keyword sugar
            auto deadline = time_literal("a deadline");
            if (!deadline) return std::nullopt;
            if (!expect(Tok::RParen, "')'")) return std::nullopt;
            args = {*agent, *lit, *deadline};
        } else {
            auto it = env.actions.find(name.text);
            if (it == env.actions.end()) {
                error("unknown action '" + name.text + "'", name.span);
                return std::nullopt;
            }
            auto sorted = sorted_args(it->second, name.text);
            if (!sorted) return std::nullopt;
            args = std::move(*sorted);
        }
        Term when = Term::var(kTimeWildcard, kSortTime);
        if (accept(Tok::At)) {
            if (at(Tok::Question)) {
                Token q = take();
                if (require_literal_time) {
                    if (!default_time) {
                        error("this position needs a literal occurrence time", q.span);
                        return std::nullopt;
                    }
                    when = Term::time_lit(*default_time);
                }
            } else {
                auto lit = time_literal("an occurrence time");
                if (!lit) return std::nullopt;
                when = *lit;
            }
        } else if (require_literal_time) {
            if (!default_time) {
                error("action '" + name.text + "' needs an explicit @time here", prev().span);
                return std::nullopt;
            }
            when = Term::time_lit(*default_time);
        }
        return Term::action(name.text, std::move(args), std::move(when));
    }

    // ---- formulas ------------------------------------------------------

    std::optional<ObligationState> status_keyword() {
        if (at_kw("pending")) return ObligationState::Pending;
        if (at_kw("fulfilled")) return ObligationState::Fulfilled;
        if (at_kw("violated")) return ObligationState::Violated;
        if (at_kw("absent")) return ObligationState::Absent;
        return std::nullopt;
    }

    std::optional<Formula> formula() {
        if (at_kw("forall") || at_kw("exists")) return quantified();
        auto lhs = or_expr();
        if (!lhs) return std::nullopt;
        if (accept_kw("implies")) {
            auto rhs = formula();
            if (!rhs) return std::nullopt;
            return Formula::implies(std::move(*lhs), std::move(*rhs));
        }
        return lhs;
    }

    std::optional<Formula> quantified() {
        bool universal = peek().text == "forall";
        take();
        if (!at(Tok::Ident)) {
            error_here("expected a variable name");
            return std::nullopt;
        }
        Token var = take();
        if (!expect(Tok::Colon, "':'")) return std::nullopt;
        if (!at(Tok::Ident)) {
            error_here("expected a sort name");
            return std::nullopt;
        }
        Token sort = take();
        if (!env.sort_names.count(sort.text)) {
            error("quantifiers range over declared sorts, not '" + sort.text + "'", sort.span);
            return std::nullopt;
        }
        if (!declarable_var(var)) return std::nullopt;
        if (!expect(Tok::Dot, "'.'")) return std::nullopt;
        scope.emplace_back(var.text, sort.text);
        // The body extends over and/or; a nested quantifier may follow bare.
        std::optional<Formula> body;
        if (at_kw("forall") || at_kw("exists"))
            body = quantified();
        else
            body = or_expr();
        scope.pop_back();
        if (!body) return std::nullopt;
        return universal ? Formula::forall(var.text, sort.text, std::move(*body))
                         : Formula::exists(var.text, sort.text, std::move(*body));
    }

    bool declarable_var(const Token& var) {
        if (reserved_words().count(var.text)) {
            error("'" + var.text + "' is a reserved word", var.span);
            return false;
        }
        if (env.constants.count(var.text)) {
            error("variable '" + var.text + "' shadows a declared constant", var.span);
            return false;
        }
        if (scope_sort(var.text)) {
            error("variable '" + var.text + "' is already bound here", var.span);
            return false;
        }
        return true;
    }

    std::optional<Formula> or_expr() {
        auto lhs = and_expr();
        if (!lhs) return std::nullopt;
        while (accept_kw("or")) {
            auto rhs = and_expr();
            if (!rhs) return std::nullopt;
            lhs = Formula::disj(std::move(*lhs), std::move(*rhs));
        }
        return lhs;
    }

    std::optional<Formula> and_expr() {
        auto lhs = not_expr();
        if (!lhs) return std::nullopt;
        while (accept_kw("and")) {
            auto rhs = not_expr();
            if (!rhs) return std::nullopt;
            lhs = Formula::conj(std::move(*lhs), std::move(*rhs));
        }
        return lhs;
    }

    std::optional<Formula> not_expr() {
        if (accept_kw("not")) {
            auto inner = not_expr();
            if (!inner) return std::nullopt;
            return Formula::negation(std::move(*inner));
        }
        return atom();
    }

    std::optional<Formula> atom() {
        if (accept_kw("true")) return Formula::truth();
        if (accept_kw("false")) return Formula::falsity();
        if (accept(Tok::LParen)) {
            auto inner = formula();
            if (!inner) return std::nullopt;
            if (!expect(Tok::RParen, "')'")) return std::nullopt;
            return inner;
        }
        if (at_kw("poss")) {
            take();
            if (!expect(Tok::LParen, "'('")) return std::nullopt;
            auto action = ground_action_literal();
            if (!action) return std::nullopt;
            if (!expect(Tok::RParen, "')'")) return std::nullopt;
            return Formula::poss(std::move(*action), now_situation());
        }
        if (auto state = status_keyword()) {
            Token kw = take();
            if (!expect(Tok::LParen, "'('")) return std::nullopt;
            auto agent = any_object_term();
            if (!agent) return std::nullopt;
            if (!expect(Tok::Comma, "','")) return std::nullopt;
            auto lit = cond_literal();
            if (!lit) return std::nullopt;
            if (!expect(Tok::Comma, "','")) return std::nullopt;
            auto deadline = time_literal("a deadline");
            if (!deadline) return std::nullopt;
            if (!expect(Tok::RParen, "')'")) return std::nullopt;
            return Formula::status(*state, std::move(*agent), std::move(*lit),
                                   std::move(*deadline), now_situation());
        }
        if (at_kw("Obl")) {
            take();
            if (!expect(Tok::LParen, "'('")) return std::nullopt;
            auto agent = any_object_term();
            if (!agent) return std::nullopt;
            if (!expect(Tok::Comma, "','")) return std::nullopt;
            auto lit = cond_literal();
            if (!lit) return std::nullopt;
            if (!expect(Tok::Comma, "','")) return std::nullopt;
            auto deadline = time_literal("a deadline");
            if (!deadline) return std::nullopt;
            if (!expect(Tok::RParen, "')'")) return std::nullopt;
            return Formula::fluent(kOblFluent, {*agent, *lit, *deadline}, now_situation());
        }
        if (at(Tok::Ident) && peek(1).kind == Tok::LParen) {
            Token name = take();
            auto it = env.fluents.find(name.text);
            if (it == env.fluents.end()) {
                if (env.actions.count(name.text))
                    error("'" + name.text + "' is an action; use poss(...) for executability",
                          name.span);
                else
                    error("unknown fluent '" + name.text + "'", name.span);
                return std::nullopt;
            }
            auto args = sorted_args(it->second, name.text);
            if (!args) return std::nullopt;
            return Formula::fluent(name.text, std::move(*args), now_situation());
        }
        if (!at(Tok::Ident) && !at(Tok::Number)) {
            error_here("expected a formula");
            return std::nullopt;
        }
        return comparison();
    }

    std::optional<Formula> comparison() {
        SourceSpan start = peek().span;
        auto lhs = comparison_term();
        if (!lhs) return std::nullopt;
        Tok op = peek().kind;
        if (op != Tok::Assign && op != Tok::Ne && op != Tok::Lt && op != Tok::Le &&
            op != Tok::Gt && op != Tok::Ge) {
            error_here("expected a comparison operator");
            return std::nullopt;
        }
        take();
        auto rhs = comparison_term();
        if (!rhs) return std::nullopt;

        const bool lhs_time = lhs->sort_of() == kSortTime;
        const bool rhs_time = rhs->sort_of() == kSortTime;
        if (lhs_time != rhs_time) {
            error("comparison mixes a time with an object term", start);
            return std::nullopt;
        }
        if (lhs_time) {
            switch (op) {
                case Tok::Assign: return Formula::time_cmp(TimeOp::Eq, *lhs, *rhs);
                case Tok::Ne:
                    return Formula::negation(Formula::time_cmp(TimeOp::Eq, *lhs, *rhs));
                case Tok::Lt: return Formula::time_cmp(TimeOp::Less, *lhs, *rhs);
                case Tok::Le: return Formula::time_cmp(TimeOp::LessEq, *lhs, *rhs);
                case Tok::Gt: return Formula::time_cmp(TimeOp::Less, *rhs, *lhs);
                case Tok::Ge: return Formula::time_cmp(TimeOp::LessEq, *rhs, *lhs);
                default: break;
            }
        }
        if (lhs->sort_of() != rhs->sort_of()) {
            error("comparison between different sorts " + lhs->sort_of() + " and " +
                      rhs->sort_of(),
                  start);
            return std::nullopt;
        }
        switch (op) {
            case Tok::Assign: return Formula::eq(*lhs, *rhs);
            case Tok::Ne: return Formula::negation(Formula::eq(*lhs, *rhs));
            default:
                error("ordering comparisons apply to time terms only", start);
                return std::nullopt;
        }
    }

    // ---- programs ------------------------------------------------------

    std::optional<Program> program() {
        if (at_kw("pick")) {
            take();
            if (!at(Tok::Ident)) {
                error_here("expected a variable name");
                return std::nullopt;
            }
            Token var = take();
            if (!expect(Tok::Colon, "':'")) return std::nullopt;
            if (!at(Tok::Ident)) {
                error_here("expected a sort name");
                return std::nullopt;
            }
            Token sort = take();
            if (!env.sort_names.count(sort.text) && sort.text != kSortAction) {
                error("pick ranges over declared sorts or Action, not '" + sort.text + "'",
                      sort.span);
                return std::nullopt;
            }
            if (!declarable_var(var)) return std::nullopt;
            if (!expect(Tok::Dot, "'.'")) return std::nullopt;
            scope.emplace_back(var.text, sort.text);
            auto body = program();
            scope.pop_back();
            if (!body) return std::nullopt;
            return Program::pick(var.text, sort.text, std::move(*body));
        }
        if (at_kw("while")) {
            take();
            auto cond = formula();
            if (!cond) return std::nullopt;
            if (!expect_kw("do")) return std::nullopt;
            auto body = program();
            if (!body) return std::nullopt;
            return Program::while_loop(std::move(*cond), std::move(*body));
        }
        if (at_kw("if")) {
            take();
            auto cond = formula();
            if (!cond) return std::nullopt;
            if (!expect_kw("then")) return std::nullopt;
            auto then_branch = program_unit();
            if (!then_branch) return std::nullopt;
            if (!expect_kw("else")) return std::nullopt;
            auto else_branch = program();
            if (!else_branch) return std::nullopt;
            return Program::if_else(std::move(*cond), std::move(*then_branch),
                                    std::move(*else_branch));
        }
        auto lhs = seq_chain();
        if (!lhs) return std::nullopt;
        if (accept(Tok::Pipe)) {
            auto rhs = program();
            if (!rhs) return std::nullopt;
            return Program::choice(std::move(*lhs), std::move(*rhs));
        }
        return lhs;
    }

    std::optional<Program> seq_chain() {
        auto head = program_unit();
        if (!head) return std::nullopt;
        if (at(Tok::Semi) && starts_program_unit_at(pos + 1)) {
            take();  // ';'
            // A prefix form after ';' extends the tail as far as it reaches.
            std::optional<Program> rest;
            if (at_kw("pick") || at_kw("if") || at_kw("while"))
                rest = program();
            else
                rest = seq_chain();
            if (!rest) return std::nullopt;
            return Program::seq(std::move(*head), std::move(*rest));
        }
        return head;
    }

    bool starts_program_unit_at(std::size_t i) const {
        const Token& t = i < toks.size() ? toks[i] : toks.back();
        if (t.kind == Tok::LParen) return true;
        if (t.kind != Tok::Ident) return false;
        static const std::set<std::string> starters = {"pick", "star", "test",   "if",
                                                       "while", "nil", "oblige", "release"};
        if (starters.count(t.text)) return true;
        return !reserved_words().count(t.text);
    }

    std::optional<Program> program_unit() {
        if (accept_kw("nil")) return Program::nil();
        if (at_kw("star")) {
            take();
            if (!expect(Tok::LParen, "'('")) return std::nullopt;
            auto body = program();
            if (!body) return std::nullopt;
            if (!expect(Tok::RParen, "')'")) return std::nullopt;
            return Program::star(std::move(*body));
        }
        if (at_kw("test")) {
            take();
            if (!expect(Tok::LParen, "'('")) return std::nullopt;
            auto cond = formula();
            if (!cond) return std::nullopt;
            if (!expect(Tok::RParen, "')'")) return std::nullopt;
            return Program::test(std::move(*cond));
        }
        if (accept(Tok::LParen)) {
            auto inner = program();
            if (!inner) return std::nullopt;
            if (!expect(Tok::RParen, "')'")) return std::nullopt;
            return inner;
        }
        if (!at(Tok::Ident)) {
            error_here("expected a program");
            return std::nullopt;
        }
        // A bare identifier is an Action-sorted pick variable.
        if (peek(1).kind != Tok::LParen) {
            Token name = take();
            if (const std::string* s = scope_sort(name.text)) {
                if (*s == kSortAction) return Program::prim(Term::var(name.text, *s));
                error("variable '" + name.text + "' is not Action-sorted", name.span);
                return std::nullopt;
            }
            error("expected a program", name.span);
            return std::nullopt;
        }
        // Action literal, or a call of a named program (resolved later).
        const std::string& name = peek().text;
        if (name == kObligeAction || name == kReleaseAction || env.actions.count(name)) {
            auto action = action_literal(/*require_literal_time=*/false);
            if (!action) return std::nullopt;
            return Program::prim(std::move(*action));
        }
        Token callee = take();
        take();  // '('
        if (!at(Tok::RParen)) {
            error("unknown action '" + callee.text + "' (named programs take no arguments)",
                  callee.span);
            return std::nullopt;
        }
        take();  // ')'
        if (accept(Tok::At)) {
            error("program calls take no occurrence time", prev().span);
            return std::nullopt;
        }
        return Program::call(callee.text, {});
    }

    // ---- declarations ----------------------------------------------------

    std::set<std::string> declared;  // one global namespace for all decl kinds

    bool declare(const Token& name, const char* kind) {
        if (reserved_words().count(name.text)) {
            error(std::string("'") + name.text + "' is a reserved word", name.span);
            return false;
        }
        if (!declared.insert(name.text).second) {
            error(std::string("duplicate identifier '") + name.text + "'", name.span);
            return false;
        }
        (void)kind;
        return true;
    }

    void synchronize() {
        while (!at(Tok::End) && !at(Tok::Semi) && !at(Tok::RBrace)) take();
        accept(Tok::Semi);
    }

    SourceSpan span_from(const SourceSpan& start) const {
        SourceSpan s = start;
        s.end = prev().span.end;
        return s;
    }

    void parse_sort(ContractSpec& spec) {
        SourceSpan start = take().span;  // 'sort'
        if (!at(Tok::Ident)) {
            error_here("expected a sort name");
            synchronize();
            return;
        }
        Token name = take();
        bool ok = declare(name, "sort");
        SortDecl decl;
        decl.name = name.text;
        if (!expect(Tok::Assign, "'='") || !expect(Tok::LBrace, "'{'")) {
            synchronize();
            return;
        }
        if (!at(Tok::RBrace)) {
            do {
                if (!at(Tok::Ident)) {
                    error_here("expected a constant name");
                    synchronize();
                    return;
                }
                Token c = take();
                if (declare(c, "constant")) {
                    decl.constants.push_back(c.text);
                    env.constants[c.text] = decl.name;
                }
            } while (accept(Tok::Comma));
        }
        if (!expect(Tok::RBrace, "'}'") || !expect(Tok::Semi, "';'")) {
            synchronize();
            return;
        }
        decl.span = span_from(start);
        if (ok) {
            env.sort_names.insert(decl.name);
            spec.sorts.push_back(std::move(decl));
        }
    }

    void parse_fluent(ContractSpec& spec) {
        SourceSpan start = take().span;  // 'fluent'
        if (!at(Tok::Ident)) {
            error_here("expected a fluent name");
            synchronize();
            return;
        }
        Token name = take();
        bool ok = declare(name, "fluent");
        FluentDecl decl;
        decl.name = name.text;
        if (!expect(Tok::LParen, "'('")) {
            synchronize();
            return;
        }
        if (!at(Tok::RParen)) {
            do {
                if (!at(Tok::Ident)) {
                    error_here("expected a sort name");
                    synchronize();
                    return;
                }
                Token s = take();
                if (!env.sort_names.count(s.text)) {
                    error("unknown sort " + s.text, s.span);
                    ok = false;
                }
                decl.arg_sorts.push_back(s.text);
            } while (accept(Tok::Comma));
        }
        if (!expect(Tok::RParen, "')'") || !expect(Tok::Semi, "';'")) {
            synchronize();
            return;
        }
        decl.span = span_from(start);
        if (ok) {
            env.fluents[decl.name] = decl.arg_sorts;
            spec.fluents.push_back(std::move(decl));
        }
    }

    void parse_action(ContractSpec& spec) {
        SourceSpan start = take().span;  // 'action'
        if (!at(Tok::Ident)) {
            error_here("expected an action name");
            synchronize();
            return;
        }
        Token name = take();
        bool ok = declare(name, "action");
        ActionSyntax decl;
        decl.name = name.text;
        if (!expect(Tok::LParen, "'('")) {
            synchronize();
            return;
        }
        std::vector<std::string> param_sorts;
        if (!at(Tok::RParen)) {
            do {
                if (!at(Tok::Ident)) {
                    error_here("expected a parameter name");
                    synchronize();
                    return;
                }
                Token pname = take();
                if (!expect(Tok::Colon, "':'")) {
                    synchronize();
                    return;
                }
                if (!at(Tok::Ident)) {
                    error_here("expected a sort name");
                    synchronize();
                    return;
                }
                Token psort = take();
                if (!env.sort_names.count(psort.text)) {
                    error("unknown sort " + psort.text, psort.span);
                    ok = false;
                }
                ParamDecl p;
                p.name = pname.text;
                p.sort = psort.text;
                p.span = span_from(pname.span);
                if (reserved_words().count(pname.text) || env.constants.count(pname.text)) {
                    error("parameter '" + pname.text + "' shadows a reserved or declared name",
                          pname.span);
                    ok = false;
                }
                for (const ParamDecl& other : decl.params)
                    if (other.name == pname.text) {
                        error("duplicate parameter '" + pname.text + "'", pname.span);
                        ok = false;
                    }
                decl.params.push_back(std::move(p));
                param_sorts.push_back(psort.text);
            } while (accept(Tok::Comma));
        }
        if (!expect(Tok::RParen, "')'") || !expect_kw("at")) {
            synchronize();
            return;
        }
        if (!at(Tok::Ident)) {
            error_here("expected a time variable name");
            synchronize();
            return;
        }
        Token tvar = take();
        if (reserved_words().count(tvar.text) || env.constants.count(tvar.text)) {
            error("time variable '" + tvar.text + "' shadows a reserved or declared name",
                  tvar.span);
            ok = false;
        }
        for (const ParamDecl& other : decl.params)
            if (other.name == tvar.text) {
                error("time variable '" + tvar.text + "' duplicates a parameter", tvar.span);
                ok = false;
            }
        decl.time_var = tvar.text;

        // Params and the time variable scope the poss and when formulas.
        std::size_t scope_base = scope.size();
        for (const ParamDecl& p : decl.params) scope.emplace_back(p.name, p.sort);
        scope.emplace_back(decl.time_var, kSortTime);

        if (accept_kw("poss")) {
            if (!expect(Tok::Colon, "':'")) {
                scope.resize(scope_base);
                synchronize();
                return;
            }
            auto f = formula();
            if (!f) {
                scope.resize(scope_base);
                synchronize();
                return;
            }
            decl.poss = std::move(*f);
        }
        if (accept_kw("causes")) {
            if (!expect(Tok::Colon, "':'")) {
                scope.resize(scope_base);
                synchronize();
                return;
            }
            do {
                auto clause = parse_clause(decl);
                if (!clause) {
                    scope.resize(scope_base);
                    synchronize();
                    return;
                }
                decl.clauses.push_back(std::move(*clause));
            } while (accept(Tok::Comma));
        }
        scope.resize(scope_base);
        if (!expect(Tok::Semi, "';'")) {
            synchronize();
            return;
        }
        decl.span = span_from(start);
        if (ok) {
            env.actions[decl.name] = param_sorts;
            spec.actions.push_back(std::move(decl));
        }
    }

    std::optional<EffectClause> parse_clause(const ActionSyntax& action) {
        SourceSpan start = peek().span;
        bool makes_true = !accept_kw("not");
        if (!at(Tok::Ident)) {
            error_here("expected a fluent name");
            return std::nullopt;
        }
        Token fname = take();
        auto it = env.fluents.find(fname.text);
        if (it == env.fluents.end()) {
            error("unknown fluent '" + fname.text + "'", fname.span);
            return std::nullopt;
        }
        auto args = sorted_args(it->second, fname.text);
        if (!args) return std::nullopt;

        EffectClause clause;
        clause.action = action.name;
        for (const ParamDecl& p : action.params)
            clause.action_params.push_back(Term::var(p.name, p.sort));
        clause.time_var = Term::var(action.time_var, kSortTime);
        clause.makes_true = makes_true;
        clause.fluent = fname.text;
        clause.fluent_args = std::move(*args);
        if (accept_kw("when")) {
            auto guard = formula();
            if (!guard) return std::nullopt;
            clause.guard = std::move(*guard);
        }
        clause.span = span_from(start);
        return clause;
    }

    bool saw_init = false;

    void parse_init(ContractSpec& spec) {
        SourceSpan start = take().span;  // 'init'
        if (saw_init) error("duplicate init block", start);
        saw_init = true;
        if (!expect(Tok::LBrace, "'{'")) {
            synchronize();
            return;
        }
        if (!at(Tok::RBrace)) {
            do {
                SourceSpan aspan = peek().span;
                if (!at(Tok::Ident)) {
                    error_here("expected a fluent atom");
                    synchronize();
                    return;
                }
                Token fname = take();
                auto it = env.fluents.find(fname.text);
                if (it == env.fluents.end()) {
                    error("unknown fluent '" + fname.text + "'", fname.span);
                    synchronize();
                    return;
                }
                auto args = sorted_args(it->second, fname.text);
                if (!args) {
                    synchronize();
                    return;
                }
                for (const Term& a : *args)
                    if (!a.is_ground()) error("init atoms must be ground", aspan);
                InitAtom atom;
                atom.atom.fluent = fname.text;
                atom.atom.args = std::move(*args);
                atom.span = span_from(aspan);
                spec.init.push_back(std::move(atom));
            } while (accept(Tok::Comma));
        }
        if (!expect(Tok::RBrace, "'}'") || !expect(Tok::Semi, "';'")) synchronize();
    }

    void parse_program(ContractSpec& spec) {
        SourceSpan start = take().span;  // 'program'
        if (!at(Tok::Ident)) {
            error_here("expected a program name");
            synchronize();
            return;
        }
        Token name = take();
        bool ok = declare(name, "program");
        if (!expect(Tok::Assign, "'='")) {
            synchronize();
            return;
        }
        auto body = program();
        if (!body) {
            synchronize();
            return;
        }
        if (!expect(Tok::Semi, "';'")) {
            synchronize();
            return;
        }
        if (!ok) return;
        NamedProgram p;
        p.name = name.text;
        p.body = std::move(*body);
        p.span = span_from(start);
        spec.programs.push_back(std::move(p));
    }

    void parse_property(ContractSpec& spec) {
        SourceSpan start = take().span;  // 'property'
        if (!at(Tok::Ident)) {
            error_here("expected a property name");
            synchronize();
            return;
        }
        Token name = take();
        bool ok = declare(name, "property");
        PropertyDecl decl;
        decl.name = name.text;
        if (accept_kw("on")) {
            if (!at(Tok::Ident)) {
                error_here("expected a program name");
                synchronize();
                return;
            }
            decl.program = take().text;
        }
        if (!expect(Tok::Assign, "'='")) {
            synchronize();
            return;
        }
        std::optional<Formula> f;
        if (accept_kw("at")) {
            if (!expect_kw("termination")) {
                synchronize();
                return;
            }
            decl.property.kind = Property::Kind::AtTermination;
            f = formula();
        } else if (accept_kw("always")) {
            decl.property.kind = Property::Kind::Always;
            f = formula();
        } else if (accept_kw("exists")) {
            if (!expect_kw("execution")) {
                synchronize();
                return;
            }
            decl.property.kind = Property::Kind::ExistsExecution;
            f = formula();
        } else if (accept_kw("no")) {
            if (!expect_kw("violated") || !expect_kw("obligations")) {
                synchronize();
                return;
            }
            decl.property.kind = Property::Kind::NoViolatedObligations;
            f = Formula::truth();
        } else if (accept_kw("all")) {
            if (!expect_kw("subtraces")) {
                synchronize();
                return;
            }
            decl.property.kind = Property::Kind::SubtraceAll;
            f = formula();
        } else {
            error_here("expected a property form (at termination / always / "
                       "exists execution / no violated obligations / all subtraces)");
            synchronize();
            return;
        }
        if (!f) {
            synchronize();
            return;
        }
        if (!closed_formula(*f)) {
            error("property formula must be closed", start);
            ok = false;
        }
        decl.property.formula = std::move(*f);
        if (!expect(Tok::Semi, "';'")) {
            synchronize();
            return;
        }
        decl.span = span_from(start);
        if (ok) spec.properties.push_back(std::move(decl));
    }

    // After the whole document: calls and property targets may reference
    // programs declared later, so they are resolved here.
    void check_references(const ContractSpec& spec) {
        std::set<std::string> program_names;
        for (const NamedProgram& p : spec.programs) program_names.insert(p.name);
        for (const NamedProgram& p : spec.programs) check_calls(p.body, program_names, p.span);
        for (const PropertyDecl& d : spec.properties)
            if (!program_names.count(d.program))
                error("property '" + d.name + "' names unknown program '" + d.program + "'",
                      d.span);
    }

    void check_calls(const Program& p, const std::set<std::string>& programs,
                     const SourceSpan& where) {
        switch (p.kind()) {
            case Program::Kind::Call:
                if (!programs.count(p.proc()))
                    error("call to unknown program '" + p.proc() + "'", where);
                return;
            case Program::Kind::Seq:
            case Program::Kind::Choice:
                check_calls(p.first(), programs, where);
                check_calls(p.second(), programs, where);
                return;
            case Program::Kind::Pick:
            case Program::Kind::Star:
            case Program::Kind::While:
                check_calls(p.body(), programs, where);
                return;
            case Program::Kind::If:
                check_calls(p.then_branch(), programs, where);
                check_calls(p.else_branch(), programs, where);
                return;
            default:
                return;
        }
    }

    ContractSpec parse_document() {
        ContractSpec spec;
        SourceSpan start = peek().span;
        if (!expect_kw("contract")) return spec;
        if (!at(Tok::Ident)) {
            error_here("expected a contract name");
            return spec;
        }
        spec.name = take().text;
        if (reserved_words().count(spec.name))
            error("'" + spec.name + "' is a reserved word", prev().span);
        if (!expect(Tok::LBrace, "'{'")) return spec;
        while (!at(Tok::RBrace) && !at(Tok::End)) {
            if (at_kw("sort")) {
                parse_sort(spec);
            } else if (at_kw("fluent")) {
                parse_fluent(spec);
            } else if (at_kw("action")) {
                parse_action(spec);
            } else if (at_kw("init")) {
                parse_init(spec);
            } else if (at_kw("program")) {
                parse_program(spec);
            } else if (at_kw("property")) {
                parse_property(spec);
            } else {
                error_here("expected a declaration (sort, fluent, action, init, "
                           "program, or property)");
                synchronize();
            }
        }
        if (!expect(Tok::RBrace, "'}'")) return spec;
        if (!at(Tok::End)) error_here("unexpected text after the contract");
        spec.span = span_from(start);
        check_references(spec);
        return spec;
    }
};

}  // namespace

ParseResult parse(std::string_view text) {
    ParseResult result;
    Lexer lexer(text, result.diagnostics);
    std::vector<Token> toks = lexer.lex();
    Parser parser(toks, result.diagnostics);
    ContractSpec spec = parser.parse_document();
    if (result.diagnostics.empty()) result.spec = std::move(spec);
    return result;
}

FormulaResult parse_formula(std::string_view text, const ContractTheory& t) {
    FormulaResult result;
    Lexer lexer(text, result.diagnostics);
    std::vector<Token> toks = lexer.lex();
    Parser parser(toks, result.diagnostics);
    parser.env = Env::from_theory(t);
    auto f = parser.formula();
    if (f && !parser.at(Tok::End)) parser.error_here("unexpected trailing text");
    if (f && result.diagnostics.empty() && !closed_formula(*f)) {
        result.diagnostics.push_back({"formula must be closed", {0, 0, 1, 1}});
    }
    if (result.diagnostics.empty()) result.formula = std::move(*f);
    return result;
}

ActionListResult parse_action_list(std::string_view text, const ContractTheory& t,
                                   std::optional<Time> wildcard_time) {
    ActionListResult result;
    Lexer lexer(text, result.diagnostics);
    std::vector<Token> toks = lexer.lex();
    Parser parser(toks, result.diagnostics);
    parser.env = Env::from_theory(t);
    parser.default_time = wildcard_time;
    std::vector<Term> actions;
    if (!parser.at(Tok::End)) {
        do {
            auto a = parser.ground_action_literal();
            if (!a) break;
            actions.push_back(std::move(*a));
        } while (parser.accept(Tok::Comma));
        if (result.diagnostics.empty() && !parser.at(Tok::End))
            parser.error_here("unexpected trailing text");
    }
    if (result.diagnostics.empty()) result.actions = std::move(actions);
    return result;
}

}  // namespace scl
