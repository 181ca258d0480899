#include "scl/golog.hpp"

#include "scl/errors.hpp"
#include "scl/simplify.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <set>

namespace scl {

struct Program::Rep {
    Kind kind = Kind::Nil;
    std::optional<Term> action;         // Prim
    std::optional<Formula> condition;   // Test, If, While
    std::vector<Program> children;      // Seq/Choice: first, second; Pick/Star/While: body;
                                        // If: then, else
    std::string var;                    // Pick
    std::string sort;                   // Pick
    std::string proc;                   // Call
    std::vector<Term> call_args;        // Call
};

Program Program::nil() {
    Rep rep;
    rep.kind = Kind::Nil;
    return Program(std::make_shared<const Rep>(std::move(rep)));
}

Program Program::prim(Term action) {
    // an Action-sorted variable is allowed so pick can range over actions;
    // it must be substituted away before execution
    assert(action.sort_of() == kSortAction);
    Rep rep;
    rep.kind = Kind::Prim;
    rep.action = std::move(action);
    return Program(std::make_shared<const Rep>(std::move(rep)));
}

Program Program::test(Formula condition) {
    Rep rep;
    rep.kind = Kind::Test;
    rep.condition = std::move(condition);
    return Program(std::make_shared<const Rep>(std::move(rep)));
}

Program Program::seq(Program first, Program second) {
    Rep rep;
    rep.kind = Kind::Seq;
    rep.children = {std::move(first), std::move(second)};
    return Program(std::make_shared<const Rep>(std::move(rep)));
}

Program Program::choice(Program first, Program second) {
    Rep rep;
    rep.kind = Kind::Choice;
    rep.children = {std::move(first), std::move(second)};
    return Program(std::make_shared<const Rep>(std::move(rep)));
}

Program Program::pick(std::string var, std::string sort, Program body) {
    Rep rep;
    rep.kind = Kind::Pick;
    rep.var = std::move(var);
    rep.sort = std::move(sort);
    rep.children = {std::move(body)};
    return Program(std::make_shared<const Rep>(std::move(rep)));
}

Program Program::star(Program body) {
    Rep rep;
    rep.kind = Kind::Star;
    rep.children = {std::move(body)};
    return Program(std::make_shared<const Rep>(std::move(rep)));
}

Program Program::if_else(Formula condition, Program then_branch, Program else_branch) {
    Rep rep;
    rep.kind = Kind::If;
    rep.condition = std::move(condition);
    rep.children = {std::move(then_branch), std::move(else_branch)};
    return Program(std::make_shared<const Rep>(std::move(rep)));
}

Program Program::while_loop(Formula condition, Program body) {
    Rep rep;
    rep.kind = Kind::While;
    rep.condition = std::move(condition);
    rep.children = {std::move(body)};
    return Program(std::make_shared<const Rep>(std::move(rep)));
}

Program Program::call(std::string proc, std::vector<Term> args) {
    Rep rep;
    rep.kind = Kind::Call;
    rep.proc = std::move(proc);
    rep.call_args = std::move(args);
    return Program(std::make_shared<const Rep>(std::move(rep)));
}

Program::Kind Program::kind() const { return rep_->kind; }

const Term& Program::action() const {
    assert(rep_->kind == Kind::Prim);
    return *rep_->action;
}

const Formula& Program::condition() const {
    assert(rep_->kind == Kind::Test || rep_->kind == Kind::If || rep_->kind == Kind::While);
    return *rep_->condition;
}

const Program& Program::first() const {
    assert(rep_->kind == Kind::Seq || rep_->kind == Kind::Choice);
    return rep_->children[0];
}

const Program& Program::second() const {
    assert(rep_->kind == Kind::Seq || rep_->kind == Kind::Choice);
    return rep_->children[1];
}

const Program& Program::body() const {
    assert(rep_->kind == Kind::Pick || rep_->kind == Kind::Star ||
           rep_->kind == Kind::While);
    return rep_->children[0];
}

const Program& Program::then_branch() const {
    assert(rep_->kind == Kind::If);
    return rep_->children[0];
}

const Program& Program::else_branch() const {
    assert(rep_->kind == Kind::If);
    return rep_->children[1];
}

const std::string& Program::var() const {
    assert(rep_->kind == Kind::Pick);
    return rep_->var;
}

const std::string& Program::var_sort() const {
    assert(rep_->kind == Kind::Pick);
    return rep_->sort;
}

const std::string& Program::proc() const {
    assert(rep_->kind == Kind::Call);
    return rep_->proc;
}

const std::vector<Term>& Program::args() const {
    assert(rep_->kind == Kind::Call);
    return rep_->call_args;
}

Program substitute(const Program& p, const Substitution& sub) {
    if (sub.empty()) return p;
    switch (p.kind()) {
        case Program::Kind::Nil:
            return p;
        case Program::Kind::Prim:
            return Program::prim(substitute(p.action(), sub));
        case Program::Kind::Test:
            return Program::test(substitute(p.condition(), sub));
        case Program::Kind::Seq:
            return Program::seq(substitute(p.first(), sub), substitute(p.second(), sub));
        case Program::Kind::Choice:
            return Program::choice(substitute(p.first(), sub), substitute(p.second(), sub));
        case Program::Kind::Pick: {
            // the binder shadows its variable; bound values are ground terms,
            // so no capture is possible
            Substitution inner;
            for (const auto& [name, value] : sub.entries())
                if (name != p.var()) inner.bind(name, value);
            return Program::pick(p.var(), p.var_sort(), substitute(p.body(), inner));
        }
        case Program::Kind::Star:
            return Program::star(substitute(p.body(), sub));
        case Program::Kind::If:
            return Program::if_else(substitute(p.condition(), sub),
                                    substitute(p.then_branch(), sub),
                                    substitute(p.else_branch(), sub));
        case Program::Kind::While:
            return Program::while_loop(substitute(p.condition(), sub),
                                       substitute(p.body(), sub));
        case Program::Kind::Call: {
            std::vector<Term> args;
            for (const Term& a : p.args()) args.push_back(substitute(a, sub));
            return Program::call(p.proc(), std::move(args));
        }
    }
    return p;
}

namespace {

// Rendering precedence: choice 1, seq 2, prefix forms whose body extends to
// the end (pick, if, while) also 1, everything else atomic.
void render_into(const Program& p, int parent_prec, std::string& out) {
    const auto wrapped = [&](int prec, const std::function<void()>& emit) {
        const bool parens = prec < parent_prec;
        if (parens) out += "(";
        emit();
        if (parens) out += ")";
    };
    switch (p.kind()) {
        case Program::Kind::Nil:
            out += "nil";
            return;
        case Program::Kind::Prim:
            out += render(p.action());
            return;
        case Program::Kind::Test:
            out += "test(" + render(p.condition()) + ")";
            return;
        case Program::Kind::Seq:
            wrapped(2, [&] {
                render_into(p.first(), 3, out);
                out += "; ";
                render_into(p.second(), 2, out);
            });
            return;
        case Program::Kind::Choice:
            wrapped(1, [&] {
                render_into(p.first(), 2, out);
                out += " | ";
                render_into(p.second(), 1, out);
            });
            return;
        case Program::Kind::Pick:
            wrapped(1, [&] {
                out += "pick " + p.var() + ": " + p.var_sort() + ". ";
                render_into(p.body(), 1, out);
            });
            return;
        case Program::Kind::Star:
            out += "star(";
            render_into(p.body(), 1, out);
            out += ")";
            return;
        case Program::Kind::If:
            wrapped(1, [&] {
                out += "if " + render(p.condition()) + " then ";
                render_into(p.then_branch(), 3, out);
                out += " else ";
                render_into(p.else_branch(), 1, out);
            });
            return;
        case Program::Kind::While:
            wrapped(1, [&] {
                out += "while " + render(p.condition()) + " do ";
                render_into(p.body(), 1, out);
            });
            return;
        case Program::Kind::Call: {
            out += p.proc() + "(";
            bool comma = false;
            for (const Term& a : p.args()) {
                if (comma) out += ",";
                out += render(a);
                comma = true;
            }
            out += ")";
            return;
        }
    }
}

Time action_start(const Term& action) { return action_time(action); }

// Programs may leave the occurrence time as the wildcard `?`; it becomes the
// current start time when the action is executed.
Term instantiate_time(const Term& action, const Time& start) {
    const Term& when = action.when();
    if (when.kind() == Term::Kind::TimeLit) return action;
    if (when.kind() == Term::Kind::Var && when.name() == kTimeWildcard) {
        std::vector<Term> object_args(action.args().begin(), action.args().end() - 1);
        return Term::action(action.name(), std::move(object_args), Term::time_lit(start));
    }
    throw ProgramError("primitive action '" + render(action) +
                       "' has a symbolic occurrence time");
}

std::vector<std::pair<ObligationLiteral, ObligationState>> snapshot(const State& st) {
    std::vector<std::pair<ObligationLiteral, ObligationState>> out;
    for (const GroundAtom& atom : st.atoms) {
        if (atom.fluent != kOblFluent) continue;
        ObligationLiteral o = obligation_from_atom(atom);
        ObligationState state = status_in_state(st, o);
        out.emplace_back(std::move(o), state);
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return render(a.first) < render(b.first);
    });
    return out;
}

// The values a pick variable ranges over: the declared extension for object
// sorts; for the Action sort, every ground instantiation of the finitely
// enumerable declared actions with a wildcard occurrence time.
std::vector<Term> pick_extension(const std::string& sort, const ContractTheory& t) {
    if (sort != kSortAction) return t.constants_of(sort);
    std::vector<Term> out;
    for (const ActionDecl& a : t.actions) {
        std::vector<std::vector<Term>> tuples{{}};
        bool enumerable = true;
        for (const std::string& arg_sort : a.arg_sorts) {
            const std::vector<Term> range = t.constants_of(arg_sort);
            if (range.empty()) {
                enumerable = false;
                break;
            }
            std::vector<std::vector<Term>> next;
            for (const std::vector<Term>& prefix : tuples) {
                for (const Term& c : range) {
                    std::vector<Term> row = prefix;
                    row.push_back(c);
                    next.push_back(row);
                }
            }
            tuples = next;
        }
        if (!enumerable) continue;  // oblige/release: no finite instance space
        for (const std::vector<Term>& row : tuples)
            out.push_back(Term::action(a.name, row, Term::var(kTimeWildcard, kSortTime)));
    }
    return out;
}

Program expand_call(const Program& p, const ProcTable& procs) {
    auto it = procs.find(p.proc());
    if (it == procs.end()) throw ProgramError("undeclared procedure '" + p.proc() + "'");
    const Proc& proc = it->second;
    if (proc.params.size() != p.args().size())
        throw ProgramError("procedure '" + p.proc() + "' expects " +
                           std::to_string(proc.params.size()) + " arguments, got " +
                           std::to_string(p.args().size()));
    Substitution sub;
    for (std::size_t i = 0; i < proc.params.size(); ++i)
        sub.bind(proc.params[i].name(), p.args()[i]);
    return substitute(proc.body, sub);
}

void check_bounds(const ExecBounds& bounds) {
    if (bounds.max_steps < 1 || bounds.max_star_unrollings < 1 || bounds.max_results < 0)
        throw ProgramError("execution bounds must be positive");
}

struct Search {
    const ContractTheory& theory;
    const ProcTable& procs;
    const ExecBounds& bounds;
    bool truncated = false;
    bool stop = false;
    // guards against non-progressing recursion (e.g. a procedure that calls
    // itself without acting): fuel bounds total work, depth bounds the
    // evaluation stack before the process stack overflows
    long fuel;
    int depth = 0;
    static constexpr int kMaxExecDepth = 2048;

    struct DepthGuard {
        int& d;
        explicit DepthGuard(int& dd) : d(dd) { ++d; }
        ~DepthGuard() { --d; }
    };

    using Log = std::vector<ObligationSnapshot>;
    using K = std::function<void(const Term&, const State&, int, const Log&)>;

    Search(const ContractTheory& t, const ProcTable& p, const ExecBounds& b)
        : theory(t), procs(p), bounds(b) {
        fuel = 10000L + 1000L * static_cast<long>(bounds.max_steps);
    }

    void exec(const Program& p, const Term& s, const State& st, int steps_left,
              const Log& log, const K& done) {
        if (stop) return;
        DepthGuard guard(depth);
        if (depth > kMaxExecDepth || --fuel <= 0) {
            truncated = true;
            stop = true;
            return;
        }
        switch (p.kind()) {
            case Program::Kind::Nil:
                done(s, st, steps_left, log);
                return;
            case Program::Kind::Prim: {
                if (p.action().kind() == Term::Kind::Var)
                    throw ProgramError("action variable '" + p.action().name() +
                                       "' is unbound");
                const Term a = instantiate_time(p.action(), st.start);
                if (!a.is_ground())
                    throw ProgramError("primitive action '" + render(a) +
                                       "' has unbound variables");
                if (action_start(a) < st.start) return;  // time must not run backwards
                if (!poss_at(st, a, theory)) return;     // precondition refused
                if (steps_left <= 0) {
                    truncated = true;
                    return;
                }
                State next = progress(st, a, theory);
                Log extended = log;
                extended.push_back({a, snapshot(next)});
                done(Term::make_do(a, s), next, steps_left - 1, extended);
                return;
            }
            case Program::Kind::Test:
                if (evaluate_state(st, p.condition(), now_situation(), theory))
                    done(s, st, steps_left, log);
                return;
            case Program::Kind::Seq:
                exec(p.first(), s, st, steps_left, log,
                     [&](const Term& s2, const State& st2, int n2, const Log& log2) {
                         exec(p.second(), s2, st2, n2, log2, done);
                     });
                return;
            case Program::Kind::Choice:
                exec(p.first(), s, st, steps_left, log, done);
                exec(p.second(), s, st, steps_left, log, done);
                return;
            case Program::Kind::Pick:
                for (const Term& c : pick_extension(p.var_sort(), theory)) {
                    Substitution sub;
                    sub.bind(p.var(), c);
                    exec(substitute(p.body(), sub), s, st, steps_left, log, done);
                }
                return;
            case Program::Kind::Star:
                star_exec(p.body(), s, st, steps_left, log, bounds.max_star_unrollings,
                          done);
                return;
            case Program::Kind::If:
                exec(evaluate_state(st, p.condition(), now_situation(), theory)
                         ? p.then_branch()
                         : p.else_branch(),
                     s, st, steps_left, log, done);
                return;
            case Program::Kind::While:
                while_exec(p, s, st, steps_left, log, bounds.max_star_unrollings, done);
                return;
            case Program::Kind::Call:
                exec(expand_call(p, procs), s, st, steps_left, log, done);
                return;
        }
    }

    void star_exec(const Program& body, const Term& s, const State& st, int steps_left,
                   const Log& log, int unrollings_left, const K& done) {
        if (stop) return;
        done(s, st, steps_left, log);  // zero further repetitions first
        if (unrollings_left <= 0) {
            truncated = true;
            return;
        }
        exec(body, s, st, steps_left, log,
             [&, unrollings_left](const Term& s2, const State& st2, int n2,
                                  const Log& log2) {
                 star_exec(body, s2, st2, n2, log2, unrollings_left - 1, done);
             });
    }

    void while_exec(const Program& loop, const Term& s, const State& st, int steps_left,
                    const Log& log, int unrollings_left, const K& done) {
        if (stop) return;
        if (!evaluate_state(st, loop.condition(), now_situation(), theory)) {
            done(s, st, steps_left, log);
            return;
        }
        if (unrollings_left <= 0) {
            truncated = true;
            return;
        }
        exec(loop.body(), s, st, steps_left, log,
             [&, unrollings_left](const Term& s2, const State& st2, int n2,
                                  const Log& log2) {
                 while_exec(loop, s2, st2, n2, log2, unrollings_left - 1, done);
             });
    }

};

}  // namespace

std::string render(const Program& p) {
    std::string out;
    render_into(p, 1, out);
    return out;
}

RunOutcome run(const Program& p, const Term& situation, const ContractTheory& t,
               const ProcTable& procs, const ExecBounds& bounds) {
    check_bounds(bounds);
    if (!executable(situation, t))
        throw ProgramError("run requires an executable starting situation");
    const State start = state_at(situation, t);

    Search search(t, procs, bounds);
    RunOutcome out;
    std::set<std::string> seen;
    Search::K done = [&](const Term& s, const State&, int, const Search::Log& log) {
        if (!seen.insert(render_situation(s)).second) return;
        // The result cap is lazy: the search stops at the first distinct
        // result past the cap, so truncation means results were dropped.
        if (bounds.max_results > 0 &&
            out.results.size() >= static_cast<std::size_t>(bounds.max_results)) {
            search.truncated = true;
            search.stop = true;
            return;
        }
        ExecutionResult r;
        r.situation = s;
        r.steps = log;
        out.results.push_back(std::move(r));
    };
    search.exec(p, situation, start, bounds.max_steps, {}, done);
    out.truncated = search.truncated;
    for (ExecutionResult& r : out.results) r.truncated = out.truncated;
    return out;
}

namespace {

constexpr int kMaxProcDepth = 256;

bool is_final(const Program& p, const State& st, const ContractTheory& t,
              const ProcTable& procs, int depth) {
    if (depth <= 0) throw ProgramError("procedure expansion too deep");
    switch (p.kind()) {
        case Program::Kind::Nil:
        case Program::Kind::Star:
            return true;
        case Program::Kind::Prim:
        case Program::Kind::Test:
            return false;
        case Program::Kind::Seq:
            return is_final(p.first(), st, t, procs, depth - 1) &&
                   is_final(p.second(), st, t, procs, depth - 1);
        case Program::Kind::Choice:
            return is_final(p.first(), st, t, procs, depth - 1) ||
                   is_final(p.second(), st, t, procs, depth - 1);
        case Program::Kind::Pick: {
            for (const Term& c : pick_extension(p.var_sort(), t)) {
                Substitution sub;
                sub.bind(p.var(), c);
                if (is_final(substitute(p.body(), sub), st, t, procs, depth - 1))
                    return true;
            }
            return false;
        }
        case Program::Kind::If:
            return is_final(evaluate_state(st, p.condition(), now_situation(), t)
                                ? p.then_branch()
                                : p.else_branch(),
                            st, t, procs, depth - 1);
        case Program::Kind::While:
            return !evaluate_state(st, p.condition(), now_situation(), t) ||
                   is_final(p.body(), st, t, procs, depth - 1);
        case Program::Kind::Call:
            return is_final(expand_call(p, procs), st, t, procs, depth - 1);
    }
    return false;
}

void trans(const Program& p, const Term& s, const State& st, const ContractTheory& t,
           const ProcTable& procs, int depth,
           std::vector<std::pair<Program, Term>>& out) {
    if (depth <= 0) throw ProgramError("procedure expansion too deep");
    switch (p.kind()) {
        case Program::Kind::Nil:
            return;
        case Program::Kind::Prim: {
            if (p.action().kind() == Term::Kind::Var)
                throw ProgramError("action variable '" + p.action().name() +
                                   "' is unbound");
            const Term a = instantiate_time(p.action(), st.start);
            if (!a.is_ground())
                throw ProgramError("primitive action '" + render(a) +
                                   "' has unbound variables");
            if (action_start(a) < st.start) return;
            if (!poss_at(st, a, t)) return;
            out.emplace_back(Program::nil(), Term::make_do(a, s));
            return;
        }
        case Program::Kind::Test:
            if (evaluate_state(st, p.condition(), now_situation(), t))
                out.emplace_back(Program::nil(), s);
            return;
        case Program::Kind::Seq: {
            std::vector<std::pair<Program, Term>> head;
            trans(p.first(), s, st, t, procs, depth - 1, head);
            for (auto& [rest, s2] : head)
                out.emplace_back(Program::seq(rest, p.second()), s2);
            if (is_final(p.first(), st, t, procs, depth - 1))
                trans(p.second(), s, st, t, procs, depth - 1, out);
            return;
        }
        case Program::Kind::Choice:
            trans(p.first(), s, st, t, procs, depth - 1, out);
            trans(p.second(), s, st, t, procs, depth - 1, out);
            return;
        case Program::Kind::Pick:
            for (const Term& c : pick_extension(p.var_sort(), t)) {
                Substitution sub;
                sub.bind(p.var(), c);
                trans(substitute(p.body(), sub), s, st, t, procs, depth - 1, out);
            }
            return;
        case Program::Kind::Star: {
            out.emplace_back(Program::nil(), s);  // zero unrollings first
            std::vector<std::pair<Program, Term>> body;
            trans(p.body(), s, st, t, procs, depth - 1, body);
            for (auto& [rest, s2] : body) out.emplace_back(Program::seq(rest, p), s2);
            return;
        }
        case Program::Kind::If:
            trans(evaluate_state(st, p.condition(), now_situation(), t) ? p.then_branch()
                                                                        : p.else_branch(),
                  s, st, t, procs, depth - 1, out);
            return;
        case Program::Kind::While: {
            if (!evaluate_state(st, p.condition(), now_situation(), t)) return;
            std::vector<std::pair<Program, Term>> body;
            trans(p.body(), s, st, t, procs, depth - 1, body);
            for (auto& [rest, s2] : body) out.emplace_back(Program::seq(rest, p), s2);
            return;
        }
        case Program::Kind::Call:
            trans(expand_call(p, procs), s, st, t, procs, depth - 1, out);
            return;
    }
}

}  // namespace

StepResult step(const Program& p, const Term& situation, const ContractTheory& t,
                const ProcTable& procs) {
    const State st = state_at(situation, t);
    StepResult result;
    std::vector<std::pair<Program, Term>> raw;
    trans(p, situation, st, t, procs, kMaxProcDepth, raw);
    std::set<std::string> seen;
    for (auto& c : raw) {
        if (seen.insert(render(c.first) + " @ " + render_situation(c.second)).second)
            result.continuations.push_back(std::move(c));
    }
    result.final = is_final(p, st, t, procs, kMaxProcDepth);
    return result;
}

std::optional<ExecutionResult> first_solution(const Program& p, const ContractTheory& t,
                                              const ProcTable& procs,
                                              const ExecBounds& bounds) {
    ExecBounds first = bounds;
    first.max_results = 1;
    RunOutcome outcome = run(p, Term::s0(), t, procs, first);
    if (outcome.results.empty()) return std::nullopt;
    return outcome.results.front();
}

}  // namespace scl
