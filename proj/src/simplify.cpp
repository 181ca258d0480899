#include "scl/simplify.hpp"

namespace scl {

namespace {

bool sorts_compatible(const std::string& a, const std::string& b) {
    if (a == b) return true;
    if (a == kSortAnyObject && is_object_sort(b)) return true;
    if (b == kSortAnyObject && is_object_sort(a)) return true;
    return false;
}

Formula boolean(bool v) { return v ? Formula::truth() : Formula::falsity(); }

// Equality decided under unique names: distinct constants and distinct
// function symbols are unequal, matching applications decompose into
// argument equalities. Anything hinging on a variable stays symbolic
// unless the sorts rule every instantiation out.
Formula decide_eq(const Term& l, const Term& r);

Formula decompose_args(const std::vector<Term>& ls, const std::vector<Term>& rs) {
    Formula acc = Formula::truth();
    for (std::size_t i = 0; i < ls.size(); ++i) {
        Formula piece = simplify(Formula::eq(ls[i], rs[i]));
        if (piece.kind() == Formula::Kind::False) return Formula::falsity();
        if (piece.kind() == Formula::Kind::True) continue;
        acc = acc.kind() == Formula::Kind::True ? piece : Formula::conj(acc, piece);
    }
    return acc;
}

Formula decide_eq(const Term& l, const Term& r) {
    if (l == r) return Formula::truth();
    if (l.kind() == Term::Kind::Var || r.kind() == Term::Kind::Var) {
        if (!sorts_compatible(l.sort_of(), r.sort_of())) return Formula::falsity();
        return Formula::eq(l, r);
    }
    if (l.kind() != r.kind()) return Formula::falsity();
    switch (l.kind()) {
        case Term::Kind::Const:
            return Formula::falsity();  // identical case returned above
        case Term::Kind::TimeLit:
            return boolean(l.time_value() == r.time_value());
        case Term::Kind::Action: {
            if (l.name() != r.name() || l.args().size() != r.args().size())
                return Formula::falsity();
            Formula args = decompose_args(l.args(), r.args());
            if (args.kind() == Formula::Kind::False) return args;
            Formula when = simplify(Formula::time_cmp(TimeOp::Eq, l.when(), r.when()));
            if (when.kind() == Formula::Kind::False) return when;
            if (args.kind() == Formula::Kind::True) return when;
            if (when.kind() == Formula::Kind::True) return args;
            return Formula::conj(args, when);
        }
        case Term::Kind::CondLit: {
            if (l.positive() != r.positive() || l.name() != r.name() ||
                l.args().size() != r.args().size())
                return Formula::falsity();
            return decompose_args(l.args(), r.args());
        }
        case Term::Kind::S0:
            return Formula::truth();  // unreachable: identical case above
        case Term::Kind::Do: {
            Formula act = decide_eq(l.action_term(), r.action_term());
            if (act.kind() == Formula::Kind::False) return act;
            Formula prev = decide_eq(l.prev(), r.prev());
            if (prev.kind() == Formula::Kind::False) return prev;
            if (act.kind() == Formula::Kind::True) return prev;
            if (prev.kind() == Formula::Kind::True) return act;
            return Formula::conj(act, prev);
        }
        case Term::Kind::Var:
            return Formula::eq(l, r);  // unreachable
    }
    return Formula::eq(l, r);
}

bool mentions(const Term& t, const std::string& var) {
    std::set<std::pair<std::string, std::string>> vs;
    collect_free_vars(t, vs);
    for (const auto& v : vs)
        if (v.first == var) return true;
    return false;
}

bool mentions(const Formula& f, const std::string& var) {
    for (const auto& v : free_vars(f))
        if (v.first == var) return true;
    return false;
}

// A conjunct of the form v = t (either orientation, Eq or time equality)
// with t free of v pins the bound variable; returns t if this one does.
const Term* pinning_value(const Formula& c, const std::string& var, const Term** out) {
    bool is_eq = c.kind() == Formula::Kind::Eq ||
                 (c.kind() == Formula::Kind::TimeCmp && c.time_op() == TimeOp::Eq);
    if (!is_eq) return nullptr;
    const Term& l = c.lhs_term();
    const Term& r = c.rhs_term();
    if (l.kind() == Term::Kind::Var && l.name() == var && !mentions(r, var)) return *out = &r;
    if (r.kind() == Term::Kind::Var && r.name() == var && !mentions(l, var)) return *out = &l;
    return nullptr;
}

Formula simplify_quantifier(const Formula& f) {
    bool universal = f.kind() == Formula::Kind::ForAll;
    Formula body = simplify(f.child());
    if (body.kind() == Formula::Kind::True || body.kind() == Formula::Kind::False)
        return body;  // sorts are nonempty
    if (!mentions(body, f.var_name())) return body;
    // Quantifiers distribute over their dual-free connective, which exposes
    // pinning equalities disjunct by disjunct.
    if (!universal && body.kind() == Formula::Kind::Or)
        return simplify(Formula::disj(Formula::exists(f.var_name(), f.var_sort(), body.child(0)),
                                      Formula::exists(f.var_name(), f.var_sort(), body.child(1))));
    if (universal && body.kind() == Formula::Kind::And)
        return simplify(Formula::conj(Formula::forall(f.var_name(), f.var_sort(), body.child(0)),
                                      Formula::forall(f.var_name(), f.var_sort(), body.child(1))));
    if (!universal) {
        // One-point rule: exists v. (... and v = t and ...) reduces to the
        // body with t for v.
        for (const Formula& c : conjuncts(body)) {
            const Term* value = nullptr;
            if (pinning_value(c, f.var_name(), &value)) {
                Substitution sub;
                sub.bind(f.var_name(), *value);
                return simplify(substitute(body, sub));
            }
        }
    }
    if (body == f.child()) return f;
    return universal ? Formula::forall(f.var_name(), f.var_sort(), body)
                     : Formula::exists(f.var_name(), f.var_sort(), body);
}

}  // namespace

std::vector<Formula> conjuncts(const Formula& f) {
    std::vector<Formula> out;
    if (f.kind() == Formula::Kind::And) {
        for (const Formula& c : conjuncts(f.child(0))) out.push_back(c);
        for (const Formula& c : conjuncts(f.child(1))) out.push_back(c);
    } else {
        out.push_back(f);
    }
    return out;
}

std::vector<Formula> disjuncts(const Formula& f) {
    std::vector<Formula> out;
    if (f.kind() == Formula::Kind::Or) {
        for (const Formula& c : disjuncts(f.child(0))) out.push_back(c);
        for (const Formula& c : disjuncts(f.child(1))) out.push_back(c);
    } else {
        out.push_back(f);
    }
    return out;
}

Formula simplify(const Formula& f) {
    using K = Formula::Kind;
    switch (f.kind()) {
        case K::True:
        case K::False:
        case K::Fluent:
        case K::Rigid:
        case K::Poss:
        case K::Status:
            return f;
        case K::Eq:
            return decide_eq(f.lhs_term(), f.rhs_term());
        case K::TimeCmp: {
            const Term& l = f.lhs_term();
            const Term& r = f.rhs_term();
            if (l.kind() == Term::Kind::TimeLit && r.kind() == Term::Kind::TimeLit) {
                const Time& a = l.time_value();
                const Time& b = r.time_value();
                switch (f.time_op()) {
                    case TimeOp::Less: return boolean(a < b);
                    case TimeOp::LessEq: return boolean(a <= b);
                    case TimeOp::Eq: return boolean(a == b);
                }
            }
            if (l == r) return boolean(f.time_op() != TimeOp::Less);
            return f;
        }
        case K::Precedes: {
            const Term& l = f.lhs_term();
            const Term& r = f.rhs_term();
            if (l == r) return Formula::falsity();  // the order is strict
            if (l.is_ground() && r.is_ground() && l.is_situation() && r.is_situation())
                return boolean(precedes(l, r));
            return f;
        }
        case K::Not: {
            Formula c = simplify(f.child());
            if (c.kind() == K::True) return Formula::falsity();
            if (c.kind() == K::False) return Formula::truth();
            if (c.kind() == K::Not) return c.child();
            if (c == f.child()) return f;
            return Formula::negation(c);
        }
        case K::And: {
            Formula a = simplify(f.child(0));
            if (a.kind() == K::False) return a;
            Formula b = simplify(f.child(1));
            if (b.kind() == K::False) return b;
            if (a.kind() == K::True) return b;
            if (b.kind() == K::True) return a;
            if (a == b) return a;
            if (a == f.child(0) && b == f.child(1)) return f;
            return Formula::conj(a, b);
        }
        case K::Or: {
            Formula a = simplify(f.child(0));
            if (a.kind() == K::True) return a;
            Formula b = simplify(f.child(1));
            if (b.kind() == K::True) return b;
            if (a.kind() == K::False) return b;
            if (b.kind() == K::False) return a;
            if (a == b) return a;
            if (a == f.child(0) && b == f.child(1)) return f;
            return Formula::disj(a, b);
        }
        case K::Implies: {
            Formula a = simplify(f.child(0));
            if (a.kind() == K::False) return Formula::truth();
            Formula b = simplify(f.child(1));
            if (a.kind() == K::True) return b;
            if (b.kind() == K::True) return b;
            if (b.kind() == K::False) return simplify(Formula::negation(a));
            if (a == b) return Formula::truth();
            if (a == f.child(0) && b == f.child(1)) return f;
            return Formula::implies(a, b);
        }
        case K::ForAll:
        case K::Exists:
            return simplify_quantifier(f);
    }
    return f;
}

}  // namespace scl
