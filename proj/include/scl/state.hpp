#pragma once

#include "scl/theory.hpp"

namespace scl {

// Ground progression state: the set of fluent atoms true "now" (reified
// Obl instances included) plus the start time of the current situation.
// The independent forward oracle for regression.
struct State {
    std::set<GroundAtom> atoms;
    Time start{0};
};

State initial_state(const ContractTheory& t);

// Forward application of the successor state axioms: an instance F(x⃗) is
// true afterwards iff γ⁺ holds now, or it held and γ⁻ does not. Obl
// follows its fixed axiom: oblige adds the instance, release removes it.
// Throws InconsistentEffect when both gammas fire on one instance.
State progress(const State& st, const Term& ground_action, const ContractTheory& t);

// Closed-world evaluation at a single situation. Every situation slot of f
// must equal `at`; quantifiers enumerate finite sort extensions and
// anything infinite raises EvaluationError.
bool evaluate_state(const State& st, const Formula& f, const Term& at, const ContractTheory& t);

// Evaluation of a closed formula uniform in S0 against the initial
// database.
bool evaluate_initial(const Formula& f, const ContractTheory& t);

// The state reached from S0 by the action sequence of a ground situation.
State state_at(const Term& situation, const ContractTheory& t);

// Poss for a ground action at a state: the precondition axiom instantiated
// and evaluated.
bool poss_at(const State& st, const Term& ground_action, const ContractTheory& t);

}  // namespace scl
