#include "scl/regress.hpp"

#include "scl/errors.hpp"
#include "scl/simplify.hpp"

#include <algorithm>

namespace scl {

namespace {

bool ground_situation(const Term& t) {
    return t.is_ground() && (t.kind() == Term::Kind::S0 || t.kind() == Term::Kind::Do);
}

bool term_situation_free(const Term& t) {
    switch (t.kind()) {
        case Term::Kind::S0:
        case Term::Kind::Do:
            return false;
        case Term::Kind::Var:
            return t.sort_name() != kSortSituation;
        case Term::Kind::Action:
        case Term::Kind::CondLit:
            return std::all_of(t.args().begin(), t.args().end(), term_situation_free);
        default:
            return true;
    }
}

}  // namespace

bool is_regressable(const Formula& f) {
    switch (f.kind()) {
        case Formula::Kind::True:
        case Formula::Kind::False:
        case Formula::Kind::Rigid:
            return true;
        case Formula::Kind::Fluent:
            return ground_situation(f.situation()) &&
                   std::all_of(f.args().begin(), f.args().end(), term_situation_free);
        case Formula::Kind::Poss:
            return f.action().kind() == Term::Kind::Action && ground_situation(f.situation()) &&
                   term_situation_free(f.action());
        case Formula::Kind::Eq:
        case Formula::Kind::TimeCmp:
            return term_situation_free(f.lhs_term()) && term_situation_free(f.rhs_term());
        case Formula::Kind::Precedes:
        case Formula::Kind::Status:
            return false;
        case Formula::Kind::Not:
            return is_regressable(f.child());
        case Formula::Kind::And:
        case Formula::Kind::Or:
        case Formula::Kind::Implies:
            return is_regressable(f.child(0)) && is_regressable(f.child(1));
        case Formula::Kind::ForAll:
        case Formula::Kind::Exists:
            return f.var_sort() != kSortSituation && is_regressable(f.child());
    }
    return false;
}

int regression_measure(const Formula& f) {
    switch (f.kind()) {
        case Formula::Kind::Fluent:
            return situation_depth(f.situation());
        case Formula::Kind::Poss:
            return situation_depth(f.situation()) + 1;
        case Formula::Kind::Not:
        case Formula::Kind::ForAll:
        case Formula::Kind::Exists:
            return regression_measure(f.child());
        case Formula::Kind::And:
        case Formula::Kind::Or:
        case Formula::Kind::Implies:
            return std::max(regression_measure(f.child(0)), regression_measure(f.child(1)));
        default:
            return 0;
    }
}

Formula expand_status(const Formula& f, const ContractTheory& t) {
    switch (f.kind()) {
        case Formula::Kind::Status: {
            const Term& sit = f.situation();
            if (!ground_situation(sit))
                throw EvaluationError("status atom at a non-ground situation: " + render(f));
            const Term& agent = f.args()[0];
            const Term& cond = f.args()[1];
            const Term& deadline = f.args()[2];
            if (!agent.is_ground() || cond.kind() != Term::Kind::CondLit || !cond.is_ground() ||
                deadline.kind() != Term::Kind::TimeLit)
                throw EvaluationError("status atom must be ground: " + render(f));
            Formula obl = Formula::fluent(kOblFluent, {agent, cond, deadline}, sit);
            Formula held = Formula::fluent(cond.name(), cond.args(), sit);
            if (!cond.positive()) held = Formula::negation(held);
            Term start = Term::time_lit(start_time(sit, t));
            switch (f.status_state()) {
                case ObligationState::Absent:
                    return Formula::negation(obl);
                case ObligationState::Fulfilled:
                    return Formula::conj(obl, held);
                case ObligationState::Violated:
                    return Formula::conj(
                        Formula::conj(obl, Formula::negation(held)),
                        Formula::time_cmp(TimeOp::Less, deadline, start));
                case ObligationState::Pending:
                    return Formula::conj(
                        Formula::conj(obl, Formula::negation(held)),
                        Formula::time_cmp(TimeOp::LessEq, start, deadline));
            }
            throw EvaluationError("unhandled status");
        }
        case Formula::Kind::Not:
            return Formula::negation(expand_status(f.child(), t));
        case Formula::Kind::And:
            return Formula::conj(expand_status(f.child(0), t), expand_status(f.child(1), t));
        case Formula::Kind::Or:
            return Formula::disj(expand_status(f.child(0), t), expand_status(f.child(1), t));
        case Formula::Kind::Implies:
            return Formula::implies(expand_status(f.child(0), t), expand_status(f.child(1), t));
        case Formula::Kind::ForAll:
            return Formula::forall(f.var_name(), f.var_sort(), expand_status(f.child(), t));
        case Formula::Kind::Exists:
            return Formula::exists(f.var_name(), f.var_sort(), expand_status(f.child(), t));
        default:
            return f;
    }
}

namespace {

Formula step(const Formula& f, const ContractTheory& t) {
    switch (f.kind()) {
        case Formula::Kind::Fluent: {
            if (f.situation().kind() != Term::Kind::Do) return f;
            const Term& alpha = f.situation().action_term();
            const Term& sigma = f.situation().prev();
            const SuccessorStateAxiom* ssa = t.ssa_for(f.symbol());
            if (!ssa)
                throw TheoryError("no successor state axiom for fluent '" + f.symbol() + "'");
            if (ssa->params.size() != f.args().size())
                throw TheoryError("arity mismatch regressing fluent '" + f.symbol() + "'");
            Substitution sub;
            for (std::size_t i = 0; i < f.args().size(); ++i)
                sub.bind(ssa->params[i].name(), f.args()[i]);
            sub.bind(ssa->action_var.name(), alpha);
            sub.bind(kNowVar, sigma);
            Formula frame = Formula::conj(
                Formula::fluent(f.symbol(), f.args(), sigma),
                Formula::negation(substitute(ssa->gamma_minus, sub)));
            return Formula::disj(substitute(ssa->gamma_plus, sub), std::move(frame));
        }
        case Formula::Kind::Poss: {
            const Term& alpha = f.action();
            const PreconditionAxiom* pre = t.precondition_for(alpha.name());
            if (!pre)
                throw TheoryError("no precondition axiom for action '" + alpha.name() + "'");
            if (pre->params.size() != alpha.args().size())
                throw TheoryError("arity mismatch regressing poss of '" + alpha.name() + "'");
            Substitution sub;
            for (std::size_t i = 0; i + 1 < pre->params.size(); ++i)
                sub.bind(pre->params[i].name(), alpha.args()[i]);
            sub.bind(pre->params.back().name(), alpha.when());
            sub.bind(kNowVar, f.situation());
            return substitute(pre->rhs, sub);
        }
        case Formula::Kind::Not:
            return Formula::negation(step(f.child(), t));
        case Formula::Kind::And:
            return Formula::conj(step(f.child(0), t), step(f.child(1), t));
        case Formula::Kind::Or:
            return Formula::disj(step(f.child(0), t), step(f.child(1), t));
        case Formula::Kind::Implies:
            return Formula::implies(step(f.child(0), t), step(f.child(1), t));
        case Formula::Kind::ForAll:
            return Formula::forall(f.var_name(), f.var_sort(), step(f.child(), t));
        case Formula::Kind::Exists:
            return Formula::exists(f.var_name(), f.var_sort(), step(f.child(), t));
        default:
            return f;
    }
}

}  // namespace

Formula regress_step(const Formula& f, const ContractTheory& t) { return simplify(step(f, t)); }

Formula regress(const Formula& f, const ContractTheory& t) {
    Formula cur = simplify(f);
    int measure = regression_measure(cur);
    while (measure > 0) {
        cur = regress_step(cur, t);
        int next = regression_measure(cur);
        if (next >= measure)
            throw TheoryError("regression failed to make progress on " + render(cur));
        measure = next;
    }
    return cur;
}

bool holds(const Formula& f, const Term& situation, const ContractTheory& t, Method m) {
    if (!ground_situation(situation))
        throw GroundnessError("holds requires a ground situation, got " + render(situation));
    if (m == Method::Progression) {
        return evaluate_state(state_at(situation, t), f, now_situation(), t);
    }
    Substitution sub;
    sub.bind(kNowVar, situation);
    Formula grounded = expand_status(substitute(f, sub), t);
    if (!is_regressable(grounded))
        throw EvaluationError("formula is not regressable: " + render(grounded));
    return evaluate_initial(regress(grounded, t), t);
}

}  // namespace scl
