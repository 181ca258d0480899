#pragma once

#include "scl/state.hpp"
#include "scl/theory.hpp"

#include <utility>
#include <vector>

namespace scl {

// Reified obligation instance: the agent, the ground condition literal it
// must bring about, and the deadline.
struct ObligationLiteral {
    Term agent;
    Term condition;
    Time deadline{0};
};

bool operator==(const ObligationLiteral& a, const ObligationLiteral& b);

// The Obl fluent atom recording the literal, and back.
GroundAtom obligation_atom(const ObligationLiteral& o);
ObligationLiteral obligation_from_atom(const GroundAtom& atom);
std::string render(const ObligationLiteral& o);

// The fixed successor state axiom for Obl:
//   Obl(ag,l,d,do(a,s)) ≡ (∃t. a = oblige(ag,l,d)@t)
//                        ∨ (Obl(ag,l,d,s) ∧ ¬∃t. a = release(ag,l,d)@t)
// Obligation-producing actions affect no other fluent, and no user action
// affects Obl; validation enforces both directions.
SuccessorStateAxiom obligation_ssa();

// Adds the Obl fluent, the oblige/release actions with default-True
// preconditions, and the Obl axiom to a theory, where missing. Run before
// validate; user-supplied poss: overrides for oblige/release are kept.
void install_obligation_schema(ContractTheory& t);

// Derived status classification at a state: absent without the Obl atom;
// fulfilled when the condition holds; violated when the condition fails
// past the deadline; pending otherwise.
ObligationState status_in_state(const State& st, const ObligationLiteral& o);

// Status at a ground situation, computed by progression.
ObligationState status(const ObligationLiteral& o, const Term& situation,
                       const ContractTheory& t);

// All obligations in force at a situation with their statuses, ordered
// lexicographically by rendering for stable output.
std::vector<std::pair<ObligationLiteral, ObligationState>> obligations_at(
    const Term& situation, const ContractTheory& t);

}  // namespace scl
