#pragma once

#include "scl/golog.hpp"

#include <optional>
#include <vector>

namespace scl {

// A bounded-exhaustive claim about the executions of a program.
struct Property {
    enum class Kind {
        AtTermination,          // formula holds at every terminating situation
        Always,                 // formula holds at every prefix, endpoints included
        ExistsExecution,        // some execution terminates with the formula true
        NoViolatedObligations,  // no obligation is violated at any termination
        SubtraceAll,            // formula holds at every proper prefix of each execution
    };
    Kind kind = Kind::AtTermination;
    Formula formula = Formula::truth();  // unused by NoViolatedObligations
};

// Outcome of one property check. A false universal verdict carries the
// counterexample execution; a true existential verdict carries the witness.
// For determinism the reported trace is the lexicographically least
// qualifying one (by rendered situation). A truncated verdict only speaks
// for the executions within bounds.
struct Verdict {
    bool holds = false;
    std::optional<ExecutionResult> trace;
    long executions = 0;
    bool truncated = false;
};

// Checks the property over every execution of p from S0 within bounds.
// Formulas are evaluated by progression along each trace. An execution
// whose evaluation raises an engine error counts as a property failure
// with that execution as the counterexample.
Verdict verify(const Property& prop, const Program& p, const ContractTheory& t,
               const ProcTable& procs, const ExecBounds& bounds);

// S0 through the terminating situation, in execution order; the list has
// one more entry than the trace has actions and is totally ordered by the
// subtrace relation.
std::vector<Term> enumerate_prefixes(const ExecutionResult& r);

}  // namespace scl
