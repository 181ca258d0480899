#pragma once

#include "scl/diagnostics.hpp"
#include "scl/obligation.hpp"
#include "scl/state.hpp"
#include "scl/theory.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace scl {

// Complex-action programs over a contract theory. Immutable trees shared by
// value, like Term and Formula.
//
//   nil                      the empty program
//   prim(a)                  a primitive timed action; its occurrence time may
//                            be the wildcard variable `?`, instantiated to
//                            the current start time on execution
//   test(f)                  succeeds without acting iff f holds now
//   seq(p, q)                p then q
//   choice(p, q)             p or q, p enumerated first
//   pick(x, S, p)            nondeterministic argument choice over S
//   star(p)                  zero or more repetitions, fewest first
//   if_else(f, p, q)         conditional
//   while_loop(f, p)         iteration while f holds
//   call(name, args)         named procedure invocation
class Program {
public:
    enum class Kind { Nil, Prim, Test, Seq, Choice, Pick, Star, If, While, Call };

    static Program nil();
    static Program prim(Term action);
    static Program test(Formula condition);
    static Program seq(Program first, Program second);
    static Program choice(Program first, Program second);
    static Program pick(std::string var, std::string sort, Program body);
    static Program star(Program body);
    static Program if_else(Formula condition, Program then_branch, Program else_branch);
    static Program while_loop(Formula condition, Program body);
    static Program call(std::string proc, std::vector<Term> args);

    Kind kind() const;
    const Term& action() const;             // Prim
    const Formula& condition() const;       // Test, If, While
    const Program& first() const;           // Seq, Choice
    const Program& second() const;          // Seq, Choice
    const Program& body() const;            // Pick, Star, While
    const Program& then_branch() const;     // If
    const Program& else_branch() const;     // If
    const std::string& var() const;         // Pick
    const std::string& var_sort() const;    // Pick
    const std::string& proc() const;        // Call
    const std::vector<Term>& args() const;  // Call

private:
    struct Rep;
    explicit Program(std::shared_ptr<const Rep> rep) : rep_(std::move(rep)) {}
    std::shared_ptr<const Rep> rep_;
};

// A named procedure: distinct object-sorted parameters and a body closed
// except for those parameters.
struct Proc {
    std::string name;
    std::vector<Term> params;
    Program body = Program::nil();
    SourceSpan span;
};

using ProcTable = std::map<std::string, Proc>;

// Execution limits. max_steps bounds primitive actions per execution,
// max_star_unrollings bounds each star/while node, max_results caps the
// number of enumerated executions (0 = unlimited). Searches that get cut by
// any bound mark their outcome truncated; the result cap only counts as a
// cut when a further distinct execution actually existed.
struct ExecBounds {
    int max_steps = 64;
    int max_star_unrollings = 16;
    int max_results = 0;
};

// The obligations in force after one executed step, in render order.
struct ObligationSnapshot {
    Term action;
    std::vector<std::pair<ObligationLiteral, ObligationState>> obligations;
};

struct ExecutionResult {
    Term situation = Term::s0();
    std::vector<ObligationSnapshot> steps;
    bool truncated = false;
};

struct RunOutcome {
    std::vector<ExecutionResult> results;
    bool truncated = false;
};

// Applies a substitution to every term and formula in the program.
// Pick binders shadow their variable.
Program substitute(const Program& p, const Substitution& sub);

// Canonical concrete syntax: `|` binds loosest, then `;`; both associate to
// the right. pick/if/while bodies extend as far as possible.
std::string render(const Program& p);

// Macro-expansion execution: enumerates the terminating situations of p
// from a ground executable situation, depth-first, left branch of a choice
// first, pick iterating its sort extension in declaration order, star
// trying fewer unrollings first. Duplicate terminating situations are
// dropped. Tests and conditions are evaluated by progression.
RunOutcome run(const Program& p, const Term& situation, const ContractTheory& t,
               const ProcTable& procs, const ExecBounds& bounds);

// Single transitions of p at a ground situation, for interactive stepping:
// each continuation pairs the remaining program with the situation after
// the transition (unchanged for test transitions). final is true when p may
// terminate here. run() equals the closure of step() restricted to final
// configurations.
struct StepResult {
    std::vector<std::pair<Program, Term>> continuations;
    bool final = false;
};

StepResult step(const Program& p, const Term& situation, const ContractTheory& t,
                const ProcTable& procs);

// First execution of p from the initial situation, if any.
std::optional<ExecutionResult> first_solution(const Program& p, const ContractTheory& t,
                                              const ProcTable& procs,
                                              const ExecBounds& bounds);

}  // namespace scl
