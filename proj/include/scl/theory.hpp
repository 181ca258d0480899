#pragma once

#include "scl/diagnostics.hpp"
#include "scl/formula.hpp"

#include <set>
#include <string>
#include <vector>

namespace scl {

// User-declared object sort with its finite extension of constants.
struct SortDecl {
    std::string name;
    std::vector<std::string> constants;
    SourceSpan span;
};

// Fluent signature. Obl is installed with the internal signature
// ($any, $literal, Time); user fluents take object sorts only, so ground
// instances are enumerable.
struct FluentDecl {
    std::string name;
    std::vector<std::string> arg_sorts;
    SourceSpan span;
};

// Action signature; the occurrence time is implicit and not listed here.
struct ActionDecl {
    std::string name;
    std::vector<std::string> arg_sorts;
    SourceSpan span;
};

// Poss(A(params)@t, s) ≡ rhs, with rhs uniform in the distinguished
// situation variable `now`. params holds the object variables followed by
// the time variable.
struct PreconditionAxiom {
    std::string action;
    std::vector<Term> params;
    Formula rhs = Formula::truth();
    SourceSpan span;
};

// F(params, do(a, now)) ≡ gamma_plus ∨ (F(params, now) ∧ ¬gamma_minus).
// Both gammas are uniform in `now` and mention the action variable only
// through equalities with action patterns.
struct SuccessorStateAxiom {
    std::string fluent;
    std::vector<Term> params;
    Term action_var = Term::var("$a", kSortAction);
    Formula gamma_plus = Formula::falsity();
    Formula gamma_minus = Formula::falsity();
    SourceSpan span;
};

// `A(action_params)@time_var [makes-true|makes-false] F(fluent_args) when
// guard`. Fluent-argument variables either come from the action pattern or
// stand free and get existentially closed over their finite slot sort.
struct EffectClause {
    std::string action;
    std::vector<Term> action_params;
    Term time_var = Term::var("t", kSortTime);
    bool makes_true = true;
    std::string fluent;
    std::vector<Term> fluent_args;
    Formula guard = Formula::truth();
    SourceSpan span;
};

// Ground fluent instance; the situation is implicit in the containing
// database or state.
struct GroundAtom {
    std::string fluent;
    std::vector<Term> args;
};

bool operator==(const GroundAtom& a, const GroundAtom& b);
bool operator<(const GroundAtom& a, const GroundAtom& b);
std::string render(const GroundAtom& atom);

// Closed-world initial database: listed atoms are true at S0, everything
// else is false. Never contains Obl atoms.
struct InitialDatabase {
    std::set<GroundAtom> atoms;
    Time start{0};
};

// A basic contractual theory: sorted signature, one precondition axiom per
// action, one successor state axiom per fluent (including the installed
// Obl axiom), and the initial database. Frozen after validation.
struct ContractTheory {
    std::string name;
    std::vector<SortDecl> sorts;
    std::vector<FluentDecl> fluents;
    std::vector<ActionDecl> actions;
    std::vector<PreconditionAxiom> preconditions;
    std::vector<SuccessorStateAxiom> ssas;
    std::vector<EffectClause> clauses;  // user clauses, kept for validation
    InitialDatabase init;

    const SortDecl* find_sort(const std::string& name) const;
    const FluentDecl* find_fluent(const std::string& name) const;
    const ActionDecl* find_action(const std::string& name) const;
    const PreconditionAxiom* precondition_for(const std::string& action) const;
    const SuccessorStateAxiom* ssa_for(const std::string& fluent) const;

    // Extension of a sort as constant terms; $any yields every object
    // constant. Empty for builtin sorts.
    std::vector<Term> constants_of(const std::string& sort) const;

    // Sort owning a constant name, or nullptr.
    const SortDecl* sort_of_constant(const std::string& name) const;
};

// Reiter-style causal completion: per fluent, γ⁺ collects the makes-true
// clauses as existentially closed action-match disjuncts, γ⁻ the
// makes-false ones; fluents without clauses get False/False (pure frame).
// Clauses are assumed validated.
std::vector<SuccessorStateAxiom> compile_effects(const std::vector<EffectClause>& clauses,
                                                 const std::vector<FluentDecl>& fluents);

// Well-formedness report; empty iff the theory satisfies every structural
// invariant (signature consistency, axiom coverage, uniformity, sorting,
// reserved-symbol rules, ground sorted init).
std::vector<Diagnostic> validate(const ContractTheory& t);

// Occurrence time projection for ground actions lives in term.hpp
// (action_time). start(S0) is the database start; start(do(a,s)) is a's
// occurrence time.
Time start_time(const Term& situation, const ContractTheory& t);

// True iff every prefix do(a, s') of s has Poss(a, s') and
// action_time(a) ≥ start(s'): the executability + time-monotonicity check.
// Implemented by progression.
bool executable(const Term& situation, const ContractTheory& t);

}  // namespace scl
