#include "scl/term.hpp"

#include "scl/errors.hpp"

#include <cassert>
#include <sstream>

namespace scl {

bool is_builtin_sort(const std::string& sort) {
    return sort == kSortAction || sort == kSortSituation || sort == kSortTime;
}

bool is_object_sort(const std::string& sort) {
    return !is_builtin_sort(sort) && !sort.empty() && sort[0] != '$';
}

Term Term::var(std::string name, std::string sort) {
    Rep rep;
    rep.kind = Kind::Var;
    rep.name = std::move(name);
    rep.sort = std::move(sort);
    return Term(std::make_shared<const Rep>(std::move(rep)));
}

Term Term::constant(std::string name, std::string sort) {
    Rep rep;
    rep.kind = Kind::Const;
    rep.name = std::move(name);
    rep.sort = std::move(sort);
    return Term(std::make_shared<const Rep>(std::move(rep)));
}

Term Term::time_lit(Time value) {
    Rep rep;
    rep.kind = Kind::TimeLit;
    rep.time = value;
    return Term(std::make_shared<const Rep>(std::move(rep)));
}

Term Term::action(std::string symbol, std::vector<Term> args, Term when) {
    Rep rep;
    rep.kind = Kind::Action;
    rep.name = std::move(symbol);
    rep.args = std::move(args);
    rep.args.push_back(std::move(when));  // occurrence time stored last
    return Term(std::make_shared<const Rep>(std::move(rep)));
}

Term Term::s0() {
    Rep rep;
    rep.kind = Kind::S0;
    return Term(std::make_shared<const Rep>(std::move(rep)));
}

Term Term::make_do(Term action, Term prev) {
    assert(action.sort_of() == kSortAction);
    assert(prev.is_situation() || prev.kind() == Kind::Var);
    Rep rep;
    rep.kind = Kind::Do;
    rep.args = {std::move(action), std::move(prev)};
    return Term(std::make_shared<const Rep>(std::move(rep)));
}

Term Term::cond_literal(std::string fluent, std::vector<Term> args, bool positive) {
    Rep rep;
    rep.kind = Kind::CondLit;
    rep.name = std::move(fluent);
    rep.args = std::move(args);
    rep.positive = positive;
    return Term(std::make_shared<const Rep>(std::move(rep)));
}

const std::string& Term::sort_name() const {
    assert(rep_->kind == Kind::Var || rep_->kind == Kind::Const);
    return rep_->sort;
}

const Time& Term::time_value() const {
    assert(rep_->kind == Kind::TimeLit);
    return rep_->time;
}

const Term& Term::when() const {
    assert(rep_->kind == Kind::Action);
    return rep_->args.back();
}

bool Term::positive() const {
    assert(rep_->kind == Kind::CondLit);
    return rep_->positive;
}

const Term& Term::action_term() const {
    assert(rep_->kind == Kind::Do);
    return rep_->args[0];
}

const Term& Term::prev() const {
    assert(rep_->kind == Kind::Do);
    return rep_->args[1];
}

bool Term::is_situation() const {
    return rep_->kind == Kind::S0 || rep_->kind == Kind::Do ||
           (rep_->kind == Kind::Var && rep_->sort == kSortSituation);
}

bool Term::is_ground() const {
    switch (rep_->kind) {
        case Kind::Var:
            return false;
        case Kind::Const:
        case Kind::TimeLit:
        case Kind::S0:
            return true;
        case Kind::Action:
        case Kind::Do:
        case Kind::CondLit:
            for (const Term& t : rep_->args) {
                if (!t.is_ground()) return false;
            }
            return true;
    }
    return false;
}

std::string Term::sort_of() const {
    switch (rep_->kind) {
        case Kind::Var:
        case Kind::Const:
            return rep_->sort;
        case Kind::TimeLit:
            return kSortTime;
        case Kind::Action:
            return kSortAction;
        case Kind::S0:
        case Kind::Do:
            return kSortSituation;
        case Kind::CondLit:
            return kSortCondLiteral;
    }
    return {};
}

int Term::compare(const Term& a, const Term& b) {
    if (a.rep_ == b.rep_) return 0;
    if (a.rep_->kind != b.rep_->kind)
        return static_cast<int>(a.rep_->kind) < static_cast<int>(b.rep_->kind) ? -1 : 1;
    const Rep& x = *a.rep_;
    const Rep& y = *b.rep_;
    if (int c = x.name.compare(y.name); c != 0) return c < 0 ? -1 : 1;
    if (int c = x.sort.compare(y.sort); c != 0) return c < 0 ? -1 : 1;
    if (x.time != y.time) return x.time < y.time ? -1 : 1;
    if (x.positive != y.positive) return x.positive ? 1 : -1;
    if (x.args.size() != y.args.size()) return x.args.size() < y.args.size() ? -1 : 1;
    for (std::size_t i = 0; i < x.args.size(); ++i) {
        if (int c = compare(x.args[i], y.args[i]); c != 0) return c;
    }
    return 0;
}

Term now_situation() { return Term::var(kNowVar, kSortSituation); }

Time action_time(const Term& ground_action) {
    if (ground_action.kind() != Term::Kind::Action)
        throw GroundnessError("action_time: not an action term: " + render(ground_action));
    const Term& when = ground_action.when();
    if (when.kind() != Term::Kind::TimeLit)
        throw GroundnessError("action_time: occurrence time is not a literal in " +
                              render(ground_action));
    return when.time_value();
}

std::vector<Term> situation_actions(const Term& situation) {
    std::vector<Term> reversed;
    const Term* cur = &situation;
    while (cur->kind() == Term::Kind::Do) {
        reversed.push_back(cur->action_term());
        cur = &cur->prev();
    }
    if (cur->kind() != Term::Kind::S0)
        throw GroundnessError("situation_actions: term is not a ground situation: " +
                              render(situation));
    return {reversed.rbegin(), reversed.rend()};
}

int situation_depth(const Term& situation) {
    int depth = 0;
    const Term* cur = &situation;
    while (cur->kind() == Term::Kind::Do) {
        ++depth;
        cur = &cur->prev();
    }
    return depth;
}

bool precedes(const Term& s1, const Term& s2) {
    if (!s1.is_ground() || !s2.is_ground())
        throw GroundnessError("precedes: both situations must be ground");
    std::vector<Term> a = situation_actions(s1);
    std::vector<Term> b = situation_actions(s2);
    if (a.size() >= b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] != b[i]) return false;
    }
    return true;
}

Substitution::Substitution(std::initializer_list<std::pair<std::string, Term>> items) {
    for (auto& [var, value] : items) map_.emplace(var, value);
}

Substitution& Substitution::bind(std::string var, Term value) {
    map_.insert_or_assign(std::move(var), std::move(value));
    return *this;
}

const Term* Substitution::lookup(const std::string& var) const {
    auto it = map_.find(var);
    return it == map_.end() ? nullptr : &it->second;
}

namespace {

// $any variables accept any object-sorted term; everything else matches by
// exact sort name.
bool sort_matches(const std::string& var_sort, const std::string& value_sort) {
    if (var_sort == value_sort) return true;
    if (var_sort == kSortAnyObject) return is_object_sort(value_sort);
    return false;
}

}  // namespace

Term substitute(const Term& t, const Substitution& b) {
    switch (t.kind()) {
        case Term::Kind::Var: {
            const Term* value = b.lookup(t.name());
            if (!value) return t;
            if (!sort_matches(t.sort_name(), value->sort_of()))
                throw SortError("substitute: binding for " + t.name() + ":" + t.sort_name() +
                                " has sort " + value->sort_of());
            return *value;
        }
        case Term::Kind::Const:
        case Term::Kind::TimeLit:
        case Term::Kind::S0:
            return t;
        case Term::Kind::Action: {
            std::vector<Term> args;
            args.reserve(t.args().size() - 1);
            for (std::size_t i = 0; i + 1 < t.args().size(); ++i)
                args.push_back(substitute(t.args()[i], b));
            return Term::action(t.name(), std::move(args), substitute(t.when(), b));
        }
        case Term::Kind::Do:
            return Term::make_do(substitute(t.action_term(), b), substitute(t.prev(), b));
        case Term::Kind::CondLit: {
            std::vector<Term> args;
            args.reserve(t.args().size());
            for (const Term& arg : t.args()) args.push_back(substitute(arg, b));
            return Term::cond_literal(t.name(), std::move(args), t.positive());
        }
    }
    return t;
}

std::string render(const Term& t) {
    std::ostringstream out;
    switch (t.kind()) {
        case Term::Kind::Var:
            out << t.name();
            break;
        case Term::Kind::Const:
            out << t.name();
            break;
        case Term::Kind::TimeLit:
            out << render_time(t.time_value());
            break;
        case Term::Kind::Action: {
            out << t.name() << "(";
            for (std::size_t i = 0; i + 1 < t.args().size(); ++i) {
                if (i) out << ",";
                out << render(t.args()[i]);
            }
            out << ")@" << render(t.when());
            break;
        }
        case Term::Kind::S0:
        case Term::Kind::Do:
            out << render_situation(t);
            break;
        case Term::Kind::CondLit: {
            if (!t.positive()) out << "not ";
            out << t.name() << "(";
            for (std::size_t i = 0; i < t.args().size(); ++i) {
                if (i) out << ",";
                out << render(t.args()[i]);
            }
            out << ")";
            break;
        }
    }
    return out.str();
}

std::string render_situation(const Term& situation) {
    if (situation.kind() == Term::Kind::Var) return situation.name();
    std::vector<Term> reversed;
    const Term* cur = &situation;
    while (cur->kind() == Term::Kind::Do) {
        reversed.push_back(cur->action_term());
        cur = &cur->prev();
    }
    std::ostringstream out;
    out << "[";
    for (std::size_t i = reversed.size(); i > 0; --i) {
        if (i != reversed.size()) out << ", ";
        out << render(reversed[i - 1]);
    }
    if (cur->kind() == Term::Kind::Var) out << " | " << cur->name();
    out << "]";
    return out.str();
}

}  // namespace scl
