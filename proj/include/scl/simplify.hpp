#pragma once

#include "scl/formula.hpp"

namespace scl {

// Logic-preserving simplification under unique names and boolean laws:
// ground equalities are decided syntactically (distinct constants or action
// symbols are unequal; matching applications decompose into argument
// equalities), ground time comparisons are evaluated arithmetically,
// True/False are absorbed through connectives, and quantifiers collapse via
// the one-point rule when a conjunct pins the bound variable. Equalities
// involving variables whose value is not forced stay symbolic; every rule
// is sound for all instantiations. Sort extensions are assumed nonempty
// (validation guarantees it).
Formula simplify(const Formula& f);

// Conjunction spine of a formula, flattened left to right.
std::vector<Formula> conjuncts(const Formula& f);

// Disjunction spine, flattened left to right.
std::vector<Formula> disjuncts(const Formula& f);

}  // namespace scl
