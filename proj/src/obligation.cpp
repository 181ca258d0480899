#include "scl/obligation.hpp"

#include "scl/errors.hpp"

#include <algorithm>

namespace scl {

bool operator==(const ObligationLiteral& a, const ObligationLiteral& b) {
    return a.agent == b.agent && a.condition == b.condition && a.deadline == b.deadline;
}

GroundAtom obligation_atom(const ObligationLiteral& o) {
    return GroundAtom{kOblFluent, {o.agent, o.condition, Term::time_lit(o.deadline)}};
}

ObligationLiteral obligation_from_atom(const GroundAtom& atom) {
    if (atom.fluent != kOblFluent || atom.args.size() != 3 ||
        atom.args[2].kind() != Term::Kind::TimeLit)
        throw TheoryError("malformed obligation atom: " + render(atom));
    return ObligationLiteral{atom.args[0], atom.args[1], atom.args[2].time_value()};
}

std::string render(const ObligationLiteral& o) { return render(obligation_atom(o)); }

SuccessorStateAxiom obligation_ssa() {
    SuccessorStateAxiom ssa;
    ssa.fluent = kOblFluent;
    ssa.params = {Term::var("$x0", kSortAnyObject), Term::var("$x1", kSortCondLiteral),
                  Term::var("$x2", kSortTime)};
    ssa.action_var = Term::var("$a", kSortAction);
    Term tvar = Term::var("$t", kSortTime);
    auto match = [&](const char* symbol) {
        return Formula::exists(
            "$t", kSortTime,
            Formula::eq(ssa.action_var, Term::action(symbol, ssa.params, tvar)));
    };
    ssa.gamma_plus = match(kObligeAction);
    ssa.gamma_minus = match(kReleaseAction);
    return ssa;
}

void install_obligation_schema(ContractTheory& t) {
    const std::vector<std::string> signature = {kSortAnyObject, kSortCondLiteral, kSortTime};
    if (!t.find_fluent(kOblFluent)) t.fluents.push_back(FluentDecl{kOblFluent, signature, {}});
    for (const char* action : {kObligeAction, kReleaseAction}) {
        if (!t.find_action(action)) t.actions.push_back(ActionDecl{action, signature, {}});
        if (!t.precondition_for(action)) {
            PreconditionAxiom pre;
            pre.action = action;
            pre.params = {Term::var("$y0", kSortAnyObject), Term::var("$y1", kSortCondLiteral),
                          Term::var("$y2", kSortTime), Term::var("$yt", kSortTime)};
            pre.rhs = Formula::truth();
            t.preconditions.push_back(std::move(pre));
        }
    }
    if (!t.ssa_for(kOblFluent)) t.ssas.push_back(obligation_ssa());
}

ObligationState status_in_state(const State& st, const ObligationLiteral& o) {
    if (!st.atoms.count(obligation_atom(o))) return ObligationState::Absent;
    bool cond = st.atoms.count(GroundAtom{o.condition.name(), o.condition.args()}) > 0;
    if (!o.condition.positive()) cond = !cond;
    if (cond) return ObligationState::Fulfilled;
    if (st.start > o.deadline) return ObligationState::Violated;
    return ObligationState::Pending;
}

ObligationState status(const ObligationLiteral& o, const Term& situation,
                       const ContractTheory& t) {
    return status_in_state(state_at(situation, t), o);
}

std::vector<std::pair<ObligationLiteral, ObligationState>> obligations_at(
    const Term& situation, const ContractTheory& t) {
    State st = state_at(situation, t);
    std::vector<std::pair<ObligationLiteral, ObligationState>> out;
    for (const GroundAtom& atom : st.atoms) {
        if (atom.fluent != kOblFluent) continue;
        ObligationLiteral o = obligation_from_atom(atom);
        out.emplace_back(o, status_in_state(st, o));
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return render(a.first) < render(b.first);
    });
    return out;
}

}  // namespace scl
