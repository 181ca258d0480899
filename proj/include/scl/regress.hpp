#pragma once

#include "scl/state.hpp"
#include "scl/theory.hpp"

namespace scl {

// The two evaluation routes for holds(). They must agree on every query;
// the CLI treats disagreement as a fatal bug sentinel.
enum class Method { Regression, Progression };

// A formula is regressable when every situation it mentions is a ground
// prefix built from S0, every poss atom names a concrete action, and no
// subtrace or status atoms remain (statuses are expanded first).
bool is_regressable(const Formula& f);

// Termination measure: the maximum situation depth over fluent atoms, with
// poss atoms counting one extra step for their precondition rewrite.
// Strictly decreases at each regress_step until zero.
int regression_measure(const Formula& f);

// Replaces status atoms at ground situations by their definition: Obl
// membership, the condition literal, and the start-versus-deadline
// comparison. The result is regressable where the input otherwise was.
Formula expand_status(const Formula& f, const ContractTheory& t);

// One regression pass: every fluent atom at do(α,σ) is rewritten through
// its successor state axiom to γ⁺ ∨ (F(σ) ∧ ¬γ⁻), every poss atom through
// its precondition axiom; connectives and quantifiers are descended; the
// result is simplified.
Formula regress_step(const Formula& f, const ContractTheory& t);

// Iterated regression down to a formula uniform in S0.
Formula regress(const Formula& f, const ContractTheory& t);

// Truth of a closed formula (uniform in `now`) at a ground situation,
// answered by the chosen route: regression rewrites back to S0 and
// evaluates the initial database; progression replays the trace forward
// and evaluates the final state.
bool holds(const Formula& f, const Term& situation, const ContractTheory& t, Method m);

}  // namespace scl
