#pragma once

#include <stdexcept>
#include <string>

namespace scl {

// Base class for all engine errors. Validation and parse problems are
// reported as Diagnostic values instead; these exceptions cover API misuse
// and conditions discovered during evaluation.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A term or substitution violates the sort discipline.
struct SortError : Error {
    using Error::Error;
};

// An operation that requires ground input received a term with variables.
struct GroundnessError : Error {
    using Error::Error;
};

// The theory is missing an axiom the operation needs (e.g. no SSA for a
// fluent mentioned in a regressed formula).
struct TheoryError : Error {
    using Error::Error;
};

// A formula cannot be evaluated in the finite-domain fragment (free
// variables, quantifier over an infinite sort, unresolved symbolic term).
struct EvaluationError : Error {
    using Error::Error;
};

// Both effect directions fired for the same ground fluent instance in one
// step. Reiter's consistency assumption is the contract author's burden;
// execution surfaces the conflict instead of picking a side.
struct InconsistentEffect : Error {
    using Error::Error;
};

// A complex-action program is ill-formed at execution time (undeclared
// procedure, unbound variable in a primitive action).
struct ProgramError : Error {
    using Error::Error;
};

}  // namespace scl
