#pragma once

#include "scl/time.hpp"

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace scl {

// Built-in sort names. Everything else is a user-declared object sort with
// a finite extension of constants.
inline constexpr const char* kSortAction = "Action";
inline constexpr const char* kSortSituation = "Situation";
inline constexpr const char* kSortTime = "Time";

// Internal pseudo-sorts used by the obligation schema: the agent slot of
// Obl accepts a constant of any object sort, and the condition slot holds a
// reified fluent literal. User identifiers cannot start with '$'.
inline constexpr const char* kSortAnyObject = "$any";
inline constexpr const char* kSortCondLiteral = "$literal";

// Reserved symbols of the obligation machinery.
inline constexpr const char* kOblFluent = "Obl";
inline constexpr const char* kObligeAction = "oblige";
inline constexpr const char* kReleaseAction = "release";

// The distinguished situation variable user-level formulas are uniform in.
inline constexpr const char* kNowVar = "now";
// The symbolic time marker: an action literal written a(x)@? carries
// Term::var(kTimeWildcard, Time) until the interpreter instantiates it.
inline constexpr const char* kTimeWildcard = "?";

bool is_builtin_sort(const std::string& sort);
bool is_object_sort(const std::string& sort);  // not builtin, not internal

// Sorted first-order terms. Immutable; copies share structure.
//
// Variants:
//   Var       named variable with a declared sort
//   Const     object constant (its sort is the declaring user sort)
//   TimeLit   rational time point
//   Action    action function application; `when` is the occurrence time,
//             kept apart from the object arguments
//   S0        the empty execution trace
//   Do        Do(action, prev): prev extended by one action
//   CondLit   reified ground fluent literal, the condition slot of Obl
class Term {
  public:
    enum class Kind { Var, Const, TimeLit, Action, S0, Do, CondLit };

    static Term var(std::string name, std::string sort);
    static Term constant(std::string name, std::string sort);
    static Term time_lit(Time value);
    static Term action(std::string symbol, std::vector<Term> args, Term when);
    static Term s0();
    static Term make_do(Term action, Term prev);
    static Term cond_literal(std::string fluent, std::vector<Term> args, bool positive);

    Kind kind() const { return rep_->kind; }

    // Var / Const name, Action / CondLit symbol.
    const std::string& name() const { return rep_->name; }
    // Declared sort of a Var; owning sort of a Const.
    const std::string& sort_name() const;
    const Time& time_value() const;
    const std::vector<Term>& args() const { return rep_->args; }
    // Occurrence time of an Action term.
    const Term& when() const;
    bool positive() const;  // CondLit polarity
    const Term& action_term() const;  // Do
    const Term& prev() const;         // Do

    bool is_situation() const;
    bool is_ground() const;

    // Sort of the term itself: Var/Const sorts, Time, Action, Situation,
    // or the internal literal pseudo-sort.
    std::string sort_of() const;

    friend bool operator==(const Term& a, const Term& b) { return compare(a, b) == 0; }
    friend bool operator!=(const Term& a, const Term& b) { return compare(a, b) != 0; }
    friend bool operator<(const Term& a, const Term& b) { return compare(a, b) < 0; }

    // Total structural order; also the basis of deterministic rendering order.
    static int compare(const Term& a, const Term& b);

  private:
    struct Rep {
        Kind kind;
        std::string name;
        std::string sort;  // Var/Const only
        Time time{0};
        std::vector<Term> args;     // Action/CondLit args; Do stores {action, prev}
        bool positive = true;
    };
    explicit Term(std::shared_ptr<const Rep> rep) : rep_(std::move(rep)) {}
    std::shared_ptr<const Rep> rep_;
};

// The distinguished situation variable `now` that axiom and program
// formulas are uniform in.
Term now_situation();

// Occurrence time of a ground action term. GroundnessError if the time slot
// is not a literal.
Time action_time(const Term& ground_action);

// The action sequence denoted by a ground situation term, oldest first.
std::vector<Term> situation_actions(const Term& situation);

// Number of Do applications wrapping S0.
int situation_depth(const Term& situation);

// Proper-subtrace order on ground situations: true iff the action sequence
// of s1 is a strict prefix of that of s2. GroundnessError on non-ground input.
bool precedes(const Term& s1, const Term& s2);

// Finite map from variables to terms. Bindings are sort-checked when
// applied (SortError on mismatch); a binding for a variable of the $any
// pseudo-sort accepts any object-sort term.
class Substitution {
  public:
    Substitution() = default;
    Substitution(std::initializer_list<std::pair<std::string, Term>> items);

    Substitution& bind(std::string var, Term value);
    const Term* lookup(const std::string& var) const;
    bool empty() const { return map_.empty(); }

    const std::map<std::string, Term>& entries() const { return map_; }

  private:
    std::map<std::string, Term> map_;
};

// Replace free occurrences of bound variables. A variable occurrence is
// replaced only if the binding's value sort matches the variable's sort.
Term substitute(const Term& t, const Substitution& b);

// Canonical text rendering: name(arg,...)@time for actions, [a1, a2, ...]
// for situations, p/q for times, `not f(args)` for negated condition
// literals.
std::string render(const Term& t);
std::string render_situation(const Term& situation);

}  // namespace scl
