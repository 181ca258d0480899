#include "scl/formula.hpp"

#include "scl/errors.hpp"

#include <cassert>
#include <sstream>

namespace scl {

const char* to_string(ObligationState s) {
    switch (s) {
        case ObligationState::Pending:
            return "pending";
        case ObligationState::Fulfilled:
            return "fulfilled";
        case ObligationState::Violated:
            return "violated";
        case ObligationState::Absent:
            return "absent";
    }
    return "?";
}

Formula Formula::make(Rep rep) { return Formula(std::make_shared<const Rep>(std::move(rep))); }

Formula Formula::truth() {
    Rep rep;
    rep.kind = Kind::True;
    return make(std::move(rep));
}

Formula Formula::falsity() {
    Rep rep;
    rep.kind = Kind::False;
    return make(std::move(rep));
}

Formula Formula::fluent(std::string symbol, std::vector<Term> args, Term situation) {
    Rep rep;
    rep.kind = Kind::Fluent;
    rep.symbol = std::move(symbol);
    rep.terms = std::move(args);
    rep.situation = {std::move(situation)};
    return make(std::move(rep));
}

Formula Formula::rigid(std::string symbol, std::vector<Term> args) {
    Rep rep;
    rep.kind = Kind::Rigid;
    rep.symbol = std::move(symbol);
    rep.terms = std::move(args);
    return make(std::move(rep));
}

Formula Formula::eq(Term lhs, Term rhs) {
    Rep rep;
    rep.kind = Kind::Eq;
    rep.terms = {std::move(lhs), std::move(rhs)};
    return make(std::move(rep));
}

Formula Formula::time_cmp(TimeOp op, Term lhs, Term rhs) {
    Rep rep;
    rep.kind = Kind::TimeCmp;
    rep.op = op;
    rep.terms = {std::move(lhs), std::move(rhs)};
    return make(std::move(rep));
}

Formula Formula::poss(Term action, Term situation) {
    Rep rep;
    rep.kind = Kind::Poss;
    rep.action = {std::move(action)};
    rep.situation = {std::move(situation)};
    return make(std::move(rep));
}

Formula Formula::precedes_atom(Term earlier, Term later) {
    Rep rep;
    rep.kind = Kind::Precedes;
    rep.terms = {std::move(earlier), std::move(later)};
    return make(std::move(rep));
}

Formula Formula::negation(Formula f) {
    Rep rep;
    rep.kind = Kind::Not;
    rep.children = {std::move(f)};
    return make(std::move(rep));
}

Formula Formula::conj(Formula lhs, Formula rhs) {
    Rep rep;
    rep.kind = Kind::And;
    rep.children = {std::move(lhs), std::move(rhs)};
    return make(std::move(rep));
}

Formula Formula::disj(Formula lhs, Formula rhs) {
    Rep rep;
    rep.kind = Kind::Or;
    rep.children = {std::move(lhs), std::move(rhs)};
    return make(std::move(rep));
}

Formula Formula::implies(Formula lhs, Formula rhs) {
    Rep rep;
    rep.kind = Kind::Implies;
    rep.children = {std::move(lhs), std::move(rhs)};
    return make(std::move(rep));
}

Formula Formula::forall(std::string var, std::string sort, Formula body) {
    Rep rep;
    rep.kind = Kind::ForAll;
    rep.var_name = std::move(var);
    rep.var_sort = std::move(sort);
    rep.children = {std::move(body)};
    return make(std::move(rep));
}

Formula Formula::exists(std::string var, std::string sort, Formula body) {
    Rep rep;
    rep.kind = Kind::Exists;
    rep.var_name = std::move(var);
    rep.var_sort = std::move(sort);
    rep.children = {std::move(body)};
    return make(std::move(rep));
}

Formula Formula::status(ObligationState state, Term agent, Term condition, Term deadline,
                        Term situation) {
    Rep rep;
    rep.kind = Kind::Status;
    rep.state = state;
    rep.terms = {std::move(agent), std::move(condition), std::move(deadline)};
    rep.situation = {std::move(situation)};
    return make(std::move(rep));
}

const std::string& Formula::symbol() const { return rep_->symbol; }

const std::vector<Term>& Formula::args() const { return rep_->terms; }

const Term& Formula::situation() const {
    assert(!rep_->situation.empty());
    return rep_->situation[0];
}

const Term& Formula::action() const {
    assert(!rep_->action.empty());
    return rep_->action[0];
}

const Term& Formula::lhs_term() const { return rep_->terms[0]; }

const Term& Formula::rhs_term() const { return rep_->terms[1]; }

TimeOp Formula::time_op() const { return rep_->op; }

const Formula& Formula::child(int i) const { return rep_->children[static_cast<std::size_t>(i)]; }

const std::string& Formula::var_name() const { return rep_->var_name; }

const std::string& Formula::var_sort() const { return rep_->var_sort; }

ObligationState Formula::status_state() const { return rep_->state; }

int Formula::compare(const Formula& a, const Formula& b) {
    if (a.rep_ == b.rep_) return 0;
    if (a.rep_->kind != b.rep_->kind)
        return static_cast<int>(a.rep_->kind) < static_cast<int>(b.rep_->kind) ? -1 : 1;
    const Rep& x = *a.rep_;
    const Rep& y = *b.rep_;
    if (int c = x.symbol.compare(y.symbol); c != 0) return c < 0 ? -1 : 1;
    if (x.op != y.op) return static_cast<int>(x.op) < static_cast<int>(y.op) ? -1 : 1;
    if (x.state != y.state) return static_cast<int>(x.state) < static_cast<int>(y.state) ? -1 : 1;
    if (int c = x.var_name.compare(y.var_name); c != 0) return c < 0 ? -1 : 1;
    if (int c = x.var_sort.compare(y.var_sort); c != 0) return c < 0 ? -1 : 1;
    auto cmp_terms = [](const std::vector<Term>& u, const std::vector<Term>& v) {
        if (u.size() != v.size()) return u.size() < v.size() ? -1 : 1;
        for (std::size_t i = 0; i < u.size(); ++i) {
            if (int c = Term::compare(u[i], v[i]); c != 0) return c;
        }
        return 0;
    };
    if (int c = cmp_terms(x.terms, y.terms); c != 0) return c;
    if (int c = cmp_terms(x.situation, y.situation); c != 0) return c;
    if (int c = cmp_terms(x.action, y.action); c != 0) return c;
    if (x.children.size() != y.children.size())
        return x.children.size() < y.children.size() ? -1 : 1;
    for (std::size_t i = 0; i < x.children.size(); ++i) {
        if (int c = compare(x.children[i], y.children[i]); c != 0) return c;
    }
    return 0;
}

void collect_free_vars(const Term& t, std::set<std::pair<std::string, std::string>>& out) {
    switch (t.kind()) {
        case Term::Kind::Var:
            out.emplace(t.name(), t.sort_name());
            break;
        case Term::Kind::Action:
        case Term::Kind::Do:
        case Term::Kind::CondLit:
            for (const Term& arg : t.args()) collect_free_vars(arg, out);
            break;
        default:
            break;
    }
}

namespace {

void collect_free(const Formula& f, std::set<std::string> bound,
                  std::set<std::pair<std::string, std::string>>& out) {
    auto add_term = [&](const Term& t) {
        std::set<std::pair<std::string, std::string>> vars;
        collect_free_vars(t, vars);
        for (auto& v : vars) {
            if (!bound.count(v.first)) out.insert(v);
        }
    };
    switch (f.kind()) {
        case Formula::Kind::True:
        case Formula::Kind::False:
            break;
        case Formula::Kind::Fluent:
        case Formula::Kind::Status:
            for (const Term& t : f.args()) add_term(t);
            add_term(f.situation());
            break;
        case Formula::Kind::Rigid:
        case Formula::Kind::Eq:
        case Formula::Kind::TimeCmp:
        case Formula::Kind::Precedes:
            for (const Term& t : f.args()) add_term(t);
            break;
        case Formula::Kind::Poss:
            add_term(f.action());
            add_term(f.situation());
            break;
        case Formula::Kind::Not:
            collect_free(f.child(), bound, out);
            break;
        case Formula::Kind::And:
        case Formula::Kind::Or:
        case Formula::Kind::Implies:
            collect_free(f.child(0), bound, out);
            collect_free(f.child(1), bound, out);
            break;
        case Formula::Kind::ForAll:
        case Formula::Kind::Exists: {
            bound.insert(f.var_name());
            collect_free(f.child(), bound, out);
            break;
        }
    }
}

}  // namespace

std::set<std::pair<std::string, std::string>> free_vars(const Formula& f) {
    std::set<std::pair<std::string, std::string>> out;
    collect_free(f, {}, out);
    return out;
}

bool is_closed(const Formula& f) { return free_vars(f).empty(); }

namespace {

std::set<std::string> term_var_names(const Term& t) {
    std::set<std::pair<std::string, std::string>> vars;
    collect_free_vars(t, vars);
    std::set<std::string> names;
    for (auto& v : vars) names.insert(v.first);
    return names;
}

bool formula_mentions_var(const Formula& f, const std::string& name) {
    auto fv = free_vars(f);
    for (auto& v : fv) {
        if (v.first == name) return true;
    }
    return false;
}

}  // namespace

Formula substitute(const Formula& f, const Substitution& b) {
    auto sub_terms = [&](const std::vector<Term>& ts) {
        std::vector<Term> out;
        out.reserve(ts.size());
        for (const Term& t : ts) out.push_back(substitute(t, b));
        return out;
    };
    switch (f.kind()) {
        case Formula::Kind::True:
        case Formula::Kind::False:
            return f;
        case Formula::Kind::Fluent:
            return Formula::fluent(f.symbol(), sub_terms(f.args()), substitute(f.situation(), b));
        case Formula::Kind::Rigid:
            return Formula::rigid(f.symbol(), sub_terms(f.args()));
        case Formula::Kind::Eq:
            return Formula::eq(substitute(f.lhs_term(), b), substitute(f.rhs_term(), b));
        case Formula::Kind::TimeCmp:
            return Formula::time_cmp(f.time_op(), substitute(f.lhs_term(), b),
                                     substitute(f.rhs_term(), b));
        case Formula::Kind::Poss:
            return Formula::poss(substitute(f.action(), b), substitute(f.situation(), b));
        case Formula::Kind::Precedes:
            return Formula::precedes_atom(substitute(f.lhs_term(), b),
                                          substitute(f.rhs_term(), b));
        case Formula::Kind::Not:
            return Formula::negation(substitute(f.child(), b));
        case Formula::Kind::And:
            return Formula::conj(substitute(f.child(0), b), substitute(f.child(1), b));
        case Formula::Kind::Or:
            return Formula::disj(substitute(f.child(0), b), substitute(f.child(1), b));
        case Formula::Kind::Implies:
            return Formula::implies(substitute(f.child(0), b), substitute(f.child(1), b));
        case Formula::Kind::ForAll:
        case Formula::Kind::Exists: {
            // Bound occurrences shadow the binding.
            Substitution inner;
            for (auto& [var, value] : b.entries()) {
                if (var == f.var_name()) continue;
                inner.bind(var, value);
            }
            if (inner.empty()) return f;
            // Rename the binder apart if an incoming term mentions its name.
            std::string binder = f.var_name();
            Formula body = f.child();
            bool collides = false;
            for (auto& [var, value] : inner.entries()) {
                (void)var;
                if (term_var_names(value).count(binder)) {
                    collides = true;
                    break;
                }
            }
            if (collides) {
                int counter = 0;
                std::string fresh;
                for (;;) {
                    fresh = binder + "$" + std::to_string(counter++);
                    bool clash = formula_mentions_var(body, fresh);
                    for (auto& [var, value] : inner.entries()) {
                        (void)var;
                        clash = clash || term_var_names(value).count(fresh) > 0;
                    }
                    if (!clash) break;
                }
                Substitution rename;
                rename.bind(binder, Term::var(fresh, f.var_sort()));
                body = substitute(body, rename);
                binder = fresh;
            }
            Formula new_body = inner.empty() ? body : substitute(body, inner);
            return f.kind() == Formula::Kind::ForAll
                       ? Formula::forall(binder, f.var_sort(), std::move(new_body))
                       : Formula::exists(binder, f.var_sort(), std::move(new_body));
        }
        case Formula::Kind::Status: {
            auto ts = sub_terms(f.args());
            return Formula::status(f.status_state(), ts[0], ts[1], ts[2],
                                   substitute(f.situation(), b));
        }
    }
    return f;
}

namespace {

bool term_mentions_situation(const Term& t) {
    switch (t.kind()) {
        case Term::Kind::S0:
        case Term::Kind::Do:
            return true;
        case Term::Kind::Var:
            return t.sort_name() == kSortSituation;
        case Term::Kind::Action:
        case Term::Kind::CondLit:
            for (const Term& arg : t.args()) {
                if (term_mentions_situation(arg)) return true;
            }
            return false;
        default:
            return false;
    }
}

bool check_uniform(const Formula& f, const Term& sit, bool strict) {
    switch (f.kind()) {
        case Formula::Kind::True:
        case Formula::Kind::False:
            return true;
        case Formula::Kind::Fluent: {
            if (f.situation() != sit) return false;
            for (const Term& t : f.args()) {
                if (term_mentions_situation(t)) return false;
            }
            return true;
        }
        case Formula::Kind::Rigid:
        case Formula::Kind::Eq:
        case Formula::Kind::TimeCmp:
            for (const Term& t : f.args()) {
                if (term_mentions_situation(t)) return false;
            }
            return true;
        case Formula::Kind::Poss:
            if (strict) return false;
            return f.situation() == sit && !term_mentions_situation(f.action());
        case Formula::Kind::Precedes:
            return false;
        case Formula::Kind::Status:
            if (strict) return false;
            return f.situation() == sit;
        case Formula::Kind::Not:
            return check_uniform(f.child(), sit, strict);
        case Formula::Kind::And:
        case Formula::Kind::Or:
        case Formula::Kind::Implies:
            return check_uniform(f.child(0), sit, strict) &&
                   check_uniform(f.child(1), sit, strict);
        case Formula::Kind::ForAll:
        case Formula::Kind::Exists:
            if (f.var_sort() == kSortSituation) return false;
            return check_uniform(f.child(), sit, strict);
    }
    return false;
}

}  // namespace

bool uniform_in(const Formula& f, const Term& sit) { return check_uniform(f, sit, true); }

bool situations_all_equal(const Formula& f, const Term& sit) {
    return check_uniform(f, sit, false);
}

namespace {

// Rendering precedence: implies < or < and < not < atom.
int precedence(const Formula& f) {
    switch (f.kind()) {
        case Formula::Kind::Implies:
            return 1;
        case Formula::Kind::Or:
            return 2;
        case Formula::Kind::And:
            return 3;
        case Formula::Kind::Not:
            return 4;
        case Formula::Kind::ForAll:
        case Formula::Kind::Exists:
            return 1;  // body extends maximally right; parenthesized when nested
        default:
            return 5;
    }
}

void render_into(const Formula& f, std::ostream& out, int parent_prec);

void render_child(const Formula& f, std::ostream& out, int parent_prec) {
    bool parens = precedence(f) < parent_prec;
    if (parens) out << "(";
    render_into(f, out, parens ? 0 : parent_prec);
    if (parens) out << ")";
}

void render_into(const Formula& f, std::ostream& out, int parent_prec) {
    switch (f.kind()) {
        case Formula::Kind::True:
            out << "true";
            break;
        case Formula::Kind::False:
            out << "false";
            break;
        case Formula::Kind::Fluent:
        case Formula::Kind::Rigid: {
            out << f.symbol() << "(";
            for (std::size_t i = 0; i < f.args().size(); ++i) {
                if (i) out << ",";
                out << render(f.args()[i]);
            }
            out << ")";
            if (f.kind() == Formula::Kind::Fluent &&
                !(f.situation().kind() == Term::Kind::Var && f.situation().name() == kNowVar)) {
                out << " in " << render_situation(f.situation());
            }
            break;
        }
        case Formula::Kind::Eq:
            out << render(f.lhs_term()) << " = " << render(f.rhs_term());
            break;
        case Formula::Kind::TimeCmp: {
            const char* op = f.time_op() == TimeOp::Less ? "<"
                             : f.time_op() == TimeOp::LessEq ? "<="
                                                             : "=";
            out << render(f.lhs_term()) << " " << op << " " << render(f.rhs_term());
            break;
        }
        case Formula::Kind::Poss:
            out << "poss(" << render(f.action()) << ")";
            if (!(f.situation().kind() == Term::Kind::Var && f.situation().name() == kNowVar)) {
                out << " in " << render_situation(f.situation());
            }
            break;
        case Formula::Kind::Precedes:
            out << render_situation(f.lhs_term()) << " precedes "
                << render_situation(f.rhs_term());
            break;
        case Formula::Kind::Not:
            out << "not ";
            render_child(f.child(), out, precedence(f));
            break;
        case Formula::Kind::And: {
            // and/or parse left-associatively; right-nested trees keep parens
            render_child(f.child(0), out, precedence(f));
            out << " and ";
            render_child(f.child(1), out, precedence(f) + 1);
            break;
        }
        case Formula::Kind::Or: {
            render_child(f.child(0), out, precedence(f));
            out << " or ";
            render_child(f.child(1), out, precedence(f) + 1);
            break;
        }
        case Formula::Kind::Implies: {
            // implies is right-associative
            render_child(f.child(0), out, precedence(f) + 1);
            out << " implies ";
            render_child(f.child(1), out, precedence(f));
            break;
        }
        case Formula::Kind::ForAll:
        case Formula::Kind::Exists: {
            out << (f.kind() == Formula::Kind::ForAll ? "forall " : "exists ");
            out << f.var_name() << ": " << f.var_sort() << ". ";
            render_child(f.child(), out, 2);
            break;
        }
        case Formula::Kind::Status: {
            out << to_string(f.status_state()) << "(" << render(f.args()[0]) << ","
                << render(f.args()[1]) << "," << render(f.args()[2]) << ")";
            if (!(f.situation().kind() == Term::Kind::Var && f.situation().name() == kNowVar)) {
                out << " in " << render_situation(f.situation());
            }
            break;
        }
    }
    (void)parent_prec;
}

}  // namespace

std::string render(const Formula& f) {
    std::ostringstream out;
    render_into(f, out, 0);
    return out.str();
}

}  // namespace scl
