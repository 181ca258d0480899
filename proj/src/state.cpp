#include "scl/state.hpp"

#include "scl/errors.hpp"
#include "scl/obligation.hpp"
#include "scl/simplify.hpp"

#include <functional>

namespace scl {

State initial_state(const ContractTheory& t) { return State{t.init.atoms, t.init.start}; }

namespace {

// Enumerates all ground argument tuples of a fluent over its sort
// extensions.
void enumerate_tuples(const ContractTheory& t, const std::vector<std::string>& sorts,
                      std::vector<Term>& prefix,
                      const std::function<void(const std::vector<Term>&)>& fn) {
    if (prefix.size() == sorts.size()) {
        fn(prefix);
        return;
    }
    for (const Term& c : t.constants_of(sorts[prefix.size()])) {
        prefix.push_back(c);
        enumerate_tuples(t, sorts, prefix, fn);
        prefix.pop_back();
    }
}

bool is_oblige_like(const Term& action, const char* symbol, const GroundAtom& obl) {
    if (action.name() != symbol) return false;
    for (std::size_t i = 0; i < 3; ++i) {
        if (action.args()[i] != obl.args[i]) return false;
    }
    return true;
}

}  // namespace

State progress(const State& st, const Term& ground_action, const ContractTheory& t) {
    if (ground_action.kind() != Term::Kind::Action || !ground_action.is_ground())
        throw GroundnessError("progress requires a ground action, got " + render(ground_action));
    State next;
    next.start = action_time(ground_action);
    Term now = now_situation();
    for (const FluentDecl& decl : t.fluents) {
        if (decl.name == kOblFluent) continue;
        const SuccessorStateAxiom* ssa = t.ssa_for(decl.name);
        if (!ssa) throw TheoryError("no successor state axiom for fluent '" + decl.name + "'");
        std::vector<Term> prefix;
        enumerate_tuples(t, decl.arg_sorts, prefix, [&](const std::vector<Term>& args) {
            Substitution sub;
            for (std::size_t i = 0; i < args.size(); ++i)
                sub.bind(ssa->params[i].name(), args[i]);
            sub.bind(ssa->action_var.name(), ground_action);
            bool plus = evaluate_state(st, simplify(substitute(ssa->gamma_plus, sub)), now, t);
            bool minus = evaluate_state(st, simplify(substitute(ssa->gamma_minus, sub)), now, t);
            GroundAtom atom{decl.name, args};
            if (plus && minus)
                throw InconsistentEffect("action " + render(ground_action) +
                                         " both causes and cancels " + render(atom));
            bool was = st.atoms.count(atom) > 0;
            if (plus || (was && !minus)) next.atoms.insert(std::move(atom));
        });
    }
    // The obligation fluent's axiom, applied directly: candidates are the
    // atoms already in force plus the instance named by an oblige action.
    for (const GroundAtom& atom : st.atoms) {
        if (atom.fluent != kOblFluent) continue;
        if (!is_oblige_like(ground_action, kReleaseAction, atom)) next.atoms.insert(atom);
    }
    if (ground_action.name() == kObligeAction) {
        next.atoms.insert(GroundAtom{
            kOblFluent,
            {ground_action.args()[0], ground_action.args()[1], ground_action.args()[2]}});
    }
    return next;
}

namespace {

bool eval(const State& st, const Formula& f, const Term& at, const ContractTheory& t);

bool eval_quantifier(const State& st, const Formula& f, const Term& at,
                     const ContractTheory& t) {
    bool universal = f.kind() == Formula::Kind::ForAll;
    if (!is_object_sort(f.var_sort()) && f.var_sort() != kSortAnyObject)
        throw EvaluationError("quantifier over non-enumerable sort '" + f.var_sort() + "'");
    std::vector<Term> range = t.constants_of(f.var_sort());
    if (range.empty())
        throw EvaluationError("quantifier over unknown or empty sort '" + f.var_sort() + "'");
    for (const Term& c : range) {
        Substitution sub;
        sub.bind(f.var_name(), c);
        bool v = eval(st, substitute(f.child(), sub), at, t);
        if (universal && !v) return false;
        if (!universal && v) return true;
    }
    return universal;
}

bool eval(const State& st, const Formula& f, const Term& at, const ContractTheory& t) {
    switch (f.kind()) {
        case Formula::Kind::True:
            return true;
        case Formula::Kind::False:
            return false;
        case Formula::Kind::Fluent: {
            if (f.situation() != at)
                throw EvaluationError("fluent atom '" + f.symbol() +
                                      "' refers to a different situation than the evaluation "
                                      "point");
            GroundAtom atom{f.symbol(), f.args()};
            for (const Term& arg : atom.args) {
                if (!arg.is_ground())
                    throw EvaluationError("non-ground atom in evaluation: " + render(atom));
            }
            return st.atoms.count(atom) > 0;
        }
        case Formula::Kind::Rigid:
            throw EvaluationError("unknown predicate '" + f.symbol() + "'");
        case Formula::Kind::Eq:
        case Formula::Kind::TimeCmp: {
            Formula decided = simplify(f);
            if (decided.kind() == Formula::Kind::True) return true;
            if (decided.kind() == Formula::Kind::False) return false;
            throw EvaluationError("undecided comparison: " + render(f));
        }
        case Formula::Kind::Poss: {
            if (f.situation() != at)
                throw EvaluationError("poss atom refers to a different situation than the "
                                      "evaluation point");
            return poss_at(st, f.action(), t);
        }
        case Formula::Kind::Precedes:
            throw EvaluationError("subtrace atoms cannot be evaluated at a single situation");
        case Formula::Kind::Status: {
            if (f.situation() != at)
                throw EvaluationError("status atom refers to a different situation than the "
                                      "evaluation point");
            const Term& agent = f.args()[0];
            const Term& cond = f.args()[1];
            const Term& deadline = f.args()[2];
            if (!agent.is_ground() || !cond.is_ground() ||
                deadline.kind() != Term::Kind::TimeLit)
                throw EvaluationError("status atom must be ground: " + render(f));
            ObligationLiteral o{agent, cond, deadline.time_value()};
            return status_in_state(st, o) == f.status_state();
        }
        case Formula::Kind::Not:
            return !eval(st, f.child(), at, t);
        case Formula::Kind::And:
            return eval(st, f.child(0), at, t) && eval(st, f.child(1), at, t);
        case Formula::Kind::Or:
            return eval(st, f.child(0), at, t) || eval(st, f.child(1), at, t);
        case Formula::Kind::Implies:
            return !eval(st, f.child(0), at, t) || eval(st, f.child(1), at, t);
        case Formula::Kind::ForAll:
        case Formula::Kind::Exists:
            return eval_quantifier(st, f, at, t);
    }
    throw EvaluationError("unhandled formula kind");
}

}  // namespace

bool evaluate_state(const State& st, const Formula& f, const Term& at,
                    const ContractTheory& t) {
    return eval(st, f, at, t);
}

bool evaluate_initial(const Formula& f, const ContractTheory& t) {
    return evaluate_state(initial_state(t), f, Term::s0(), t);
}

State state_at(const Term& situation, const ContractTheory& t) {
    State st = initial_state(t);
    for (const Term& a : situation_actions(situation)) st = progress(st, a, t);
    return st;
}

bool poss_at(const State& st, const Term& ground_action, const ContractTheory& t) {
    if (ground_action.kind() != Term::Kind::Action || !ground_action.is_ground())
        throw GroundnessError("poss requires a ground action, got " + render(ground_action));
    const PreconditionAxiom* pre = t.precondition_for(ground_action.name());
    if (!pre)
        throw TheoryError("no precondition axiom for action '" + ground_action.name() + "'");
    if (pre->params.size() != ground_action.args().size())
        throw TheoryError("arity mismatch instantiating precondition for '" +
                          ground_action.name() + "'");
    Substitution sub;
    for (std::size_t i = 0; i + 1 < pre->params.size(); ++i)
        sub.bind(pre->params[i].name(), ground_action.args()[i]);
    sub.bind(pre->params.back().name(), ground_action.when());
    return evaluate_state(st, simplify(substitute(pre->rhs, sub)), now_situation(), t);
}

bool executable(const Term& situation, const ContractTheory& t) {
    State st = initial_state(t);
    for (const Term& a : situation_actions(situation)) {
        if (action_time(a) < st.start) return false;
        if (!poss_at(st, a, t)) return false;
        st = progress(st, a, t);
    }
    return true;
}

}  // namespace scl
