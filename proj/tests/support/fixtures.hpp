#pragma once

#include "scl/obligation.hpp"
#include "scl/theory.hpp"

#include <vector>

namespace scl_test {

inline scl::Term situation_of(const std::vector<scl::Term>& actions) {
    scl::Term s = scl::Term::s0();
    for (const scl::Term& a : actions) s = scl::Term::make_do(a, s);
    return s;
}

// The sale domain: a buyer pays for an item, the seller becomes obliged to
// deliver it by a deadline, delivery fulfills the obligation. `noop` lets
// traces idle past the deadline.
inline scl::ContractTheory sale_theory() {
    using namespace scl;
    ContractTheory t;
    t.name = "Sale";
    t.sorts = {{"Agent", {"buyer", "seller"}, {}}, {"Item", {"widget"}, {}}};
    t.fluents = {{"paid", {"Item"}, {}}, {"delivered", {"Item"}, {}}};
    t.actions = {{"pay", {"Item"}, {}}, {"deliver", {"Item"}, {}}, {"noop", {}, {}}};

    Term i = Term::var("i", "Item");
    Term tv = Term::var("t", kSortTime);
    t.preconditions.push_back({"pay", {i, tv}, Formula::truth(), {}});
    t.preconditions.push_back(
        {"deliver", {i, tv}, Formula::fluent("paid", {i}, now_situation()), {}});
    t.preconditions.push_back({"noop", {tv}, Formula::truth(), {}});

    EffectClause paid;
    paid.action = "pay";
    paid.action_params = {i};
    paid.time_var = tv;
    paid.makes_true = true;
    paid.fluent = "paid";
    paid.fluent_args = {i};
    EffectClause delivered = paid;
    delivered.action = "deliver";
    delivered.fluent = "delivered";
    t.clauses = {paid, delivered};

    t.ssas = compile_effects(t.clauses, t.fluents);
    install_obligation_schema(t);
    return t;
}

inline scl::Term widget() { return scl::Term::constant("widget", "Item"); }
inline scl::Term seller() { return scl::Term::constant("seller", "Agent"); }

inline scl::Term pay_at(long long when) {
    return scl::Term::action("pay", {widget()}, scl::Term::time_lit(scl::Time(when)));
}
inline scl::Term deliver_at(long long when) {
    return scl::Term::action("deliver", {widget()}, scl::Term::time_lit(scl::Time(when)));
}
inline scl::Term noop_at(long long when) {
    return scl::Term::action("noop", {}, scl::Term::time_lit(scl::Time(when)));
}
inline scl::Term delivered_lit() {
    return scl::Term::cond_literal("delivered", {widget()}, true);
}
inline scl::Term oblige_at(long long when, long long deadline = 10) {
    return scl::Term::action(scl::kObligeAction,
                             {seller(), delivered_lit(), scl::Term::time_lit(scl::Time(deadline))},
                             scl::Term::time_lit(scl::Time(when)));
}
inline scl::Term release_at(long long when, long long deadline = 10) {
    return scl::Term::action(scl::kReleaseAction,
                             {seller(), delivered_lit(), scl::Term::time_lit(scl::Time(deadline))},
                             scl::Term::time_lit(scl::Time(when)));
}

inline scl::ObligationLiteral sale_obligation() {
    return scl::ObligationLiteral{seller(), delivered_lit(), scl::Time(10)};
}

// [pay(widget)@1, oblige(seller,delivered(widget),10)@2, deliver(widget)@5]
inline scl::Term sale_trace() {
    return situation_of({pay_at(1), oblige_at(2), deliver_at(5)});
}

// [pay(widget)@1, oblige(seller,delivered(widget),10)@2, noop()@11]
inline scl::Term late_trace() {
    return situation_of({pay_at(1), oblige_at(2), noop_at(11)});
}

}  // namespace scl_test
