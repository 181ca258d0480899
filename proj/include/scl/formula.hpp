#pragma once

#include "scl/term.hpp"

#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace scl {

enum class TimeOp { Less, LessEq, Eq };

// Derived classification of an obligation at a situation.
enum class ObligationState { Pending, Fulfilled, Violated, Absent };

const char* to_string(ObligationState s);

// Sorted first-order formulas over the term language.
//
//   Fluent     F(args..., situation)
//   Rigid      situation-independent predicate atom
//   Eq         term equality, decided syntactically under unique names
//   TimeCmp    comparison of time-sorted terms
//   Poss       Poss(action, situation)
//   Precedes   proper-subtrace atom between situation terms
//   Status     derived obligation-status atom (pending/fulfilled/...);
//              evaluable at a concrete situation, expanded away before
//              regression
//   quantifiers range over finite sorts only; the evaluator enumerates
//   object-sort extensions and rejects anything infinite
class Formula {
  public:
    enum class Kind {
        True,
        False,
        Fluent,
        Rigid,
        Eq,
        TimeCmp,
        Poss,
        Precedes,
        Not,
        And,
        Or,
        Implies,
        ForAll,
        Exists,
        Status,
    };

    static Formula truth();
    static Formula falsity();
    static Formula fluent(std::string symbol, std::vector<Term> args, Term situation);
    static Formula rigid(std::string symbol, std::vector<Term> args);
    static Formula eq(Term lhs, Term rhs);
    static Formula time_cmp(TimeOp op, Term lhs, Term rhs);
    static Formula poss(Term action, Term situation);
    static Formula precedes_atom(Term earlier, Term later);
    static Formula negation(Formula f);
    static Formula conj(Formula lhs, Formula rhs);
    static Formula disj(Formula lhs, Formula rhs);
    static Formula implies(Formula lhs, Formula rhs);
    static Formula forall(std::string var, std::string sort, Formula body);
    static Formula exists(std::string var, std::string sort, Formula body);
    static Formula status(ObligationState state, Term agent, Term condition, Term deadline,
                          Term situation);

    Kind kind() const { return rep_->kind; }

    const std::string& symbol() const;            // Fluent/Rigid predicate symbol
    const std::vector<Term>& args() const;        // Fluent/Rigid/Status(agent,cond,deadline)
    const Term& situation() const;                // Fluent/Poss/Status
    const Term& action() const;                   // Poss
    const Term& lhs_term() const;                 // Eq/TimeCmp/Precedes
    const Term& rhs_term() const;                 // Eq/TimeCmp/Precedes
    TimeOp time_op() const;                       // TimeCmp
    const Formula& child(int i = 0) const;        // Not(0), binary(0,1), quantifier body(0)
    const std::string& var_name() const;          // ForAll/Exists
    const std::string& var_sort() const;          // ForAll/Exists
    ObligationState status_state() const;         // Status

    friend bool operator==(const Formula& a, const Formula& b) { return compare(a, b) == 0; }
    friend bool operator!=(const Formula& a, const Formula& b) { return compare(a, b) != 0; }

    static int compare(const Formula& a, const Formula& b);

  private:
    struct Rep {
        Kind kind;
        std::string symbol;
        std::vector<Term> terms;          // atom args / Eq-TimeCmp-Precedes operands
        std::vector<Term> situation;      // one entry where applicable
        std::vector<Term> action;         // Poss
        TimeOp op = TimeOp::Eq;
        std::vector<Formula> children;
        std::string var_name;
        std::string var_sort;
        ObligationState state = ObligationState::Absent;
    };
    explicit Formula(std::shared_ptr<const Rep> rep) : rep_(std::move(rep)) {}
    static Formula make(Rep rep);
    std::shared_ptr<const Rep> rep_;
};

// Free variables as (name, sort) pairs.
std::set<std::pair<std::string, std::string>> free_vars(const Formula& f);
void collect_free_vars(const Term& t, std::set<std::pair<std::string, std::string>>& out);

bool is_closed(const Formula& f);

// Free-variable substitution with quantifier shadowing: bound occurrences
// are untouched. Binders that would capture a variable of an incoming term
// are renamed apart deterministically.
Formula substitute(const Formula& f, const Substitution& b);

// Every situation slot (Fluent/Poss/Status) holds exactly `sit`, no Do/S0
// appears anywhere else, and no Poss/Precedes/Status atoms occur: the
// uniformity condition required of axiom right-hand sides.
bool uniform_in(const Formula& f, const Term& sit);

// All situation slots structurally equal to `sit` (Poss/Status allowed);
// used to check "uniform in S0" after regression.
bool situations_all_equal(const Formula& f, const Term& sit);

// Canonical rendering with minimal parentheses; infix connectives, bounded
// quantifiers as `forall x: S. body`.
std::string render(const Formula& f);

}  // namespace scl
