#include "scl/theory.hpp"

#include "scl/errors.hpp"
#include "scl/simplify.hpp"

#include <algorithm>
#include <sstream>

namespace scl {

std::string format_diagnostic(const std::string& path, const Diagnostic& d) {
    std::ostringstream out;
    out << path << ":" << d.span.line << ":" << d.span.col << ": error: " << d.message;
    return out.str();
}

bool operator==(const GroundAtom& a, const GroundAtom& b) {
    if (a.fluent != b.fluent || a.args.size() != b.args.size()) return false;
    for (std::size_t i = 0; i < a.args.size(); ++i) {
        if (a.args[i] != b.args[i]) return false;
    }
    return true;
}

bool operator<(const GroundAtom& a, const GroundAtom& b) {
    if (int c = a.fluent.compare(b.fluent); c != 0) return c < 0;
    if (a.args.size() != b.args.size()) return a.args.size() < b.args.size();
    for (std::size_t i = 0; i < a.args.size(); ++i) {
        if (int c = Term::compare(a.args[i], b.args[i]); c != 0) return c < 0;
    }
    return false;
}

std::string render(const GroundAtom& atom) {
    std::ostringstream out;
    out << atom.fluent << "(";
    for (std::size_t i = 0; i < atom.args.size(); ++i) {
        if (i) out << ",";
        out << render(atom.args[i]);
    }
    out << ")";
    return out.str();
}

const SortDecl* ContractTheory::find_sort(const std::string& n) const {
    for (const SortDecl& s : sorts) {
        if (s.name == n) return &s;
    }
    return nullptr;
}

const FluentDecl* ContractTheory::find_fluent(const std::string& n) const {
    for (const FluentDecl& f : fluents) {
        if (f.name == n) return &f;
    }
    return nullptr;
}

const ActionDecl* ContractTheory::find_action(const std::string& n) const {
    for (const ActionDecl& a : actions) {
        if (a.name == n) return &a;
    }
    return nullptr;
}

const PreconditionAxiom* ContractTheory::precondition_for(const std::string& action) const {
    for (const PreconditionAxiom& p : preconditions) {
        if (p.action == action) return &p;
    }
    return nullptr;
}

const SuccessorStateAxiom* ContractTheory::ssa_for(const std::string& fluent) const {
    for (const SuccessorStateAxiom& s : ssas) {
        if (s.fluent == fluent) return &s;
    }
    return nullptr;
}

std::vector<Term> ContractTheory::constants_of(const std::string& sort) const {
    std::vector<Term> out;
    if (sort == kSortAnyObject) {
        for (const SortDecl& s : sorts) {
            for (const std::string& c : s.constants) out.push_back(Term::constant(c, s.name));
        }
        return out;
    }
    const SortDecl* s = find_sort(sort);
    if (!s) return out;
    for (const std::string& c : s->constants) out.push_back(Term::constant(c, s->name));
    return out;
}

const SortDecl* ContractTheory::sort_of_constant(const std::string& name) const {
    for (const SortDecl& s : sorts) {
        if (std::find(s.constants.begin(), s.constants.end(), name) != s.constants.end())
            return &s;
    }
    return nullptr;
}

Time start_time(const Term& situation, const ContractTheory& t) {
    switch (situation.kind()) {
        case Term::Kind::S0:
            return t.init.start;
        case Term::Kind::Do:
            return action_time(situation.action_term());
        default:
            throw GroundnessError("start time requires a ground situation, got " +
                                  render(situation));
    }
}

std::vector<SuccessorStateAxiom> compile_effects(const std::vector<EffectClause>& clauses,
                                                 const std::vector<FluentDecl>& fluents) {
    std::vector<SuccessorStateAxiom> out;
    for (const FluentDecl& decl : fluents) {
        if (decl.name == kOblFluent) continue;  // installed separately
        SuccessorStateAxiom ssa;
        ssa.fluent = decl.name;
        for (std::size_t i = 0; i < decl.arg_sorts.size(); ++i)
            ssa.params.push_back(Term::var("$x" + std::to_string(i), decl.arg_sorts[i]));
        ssa.action_var = Term::var("$a", kSortAction);
        Formula plus = Formula::falsity();
        Formula minus = Formula::falsity();
        for (const EffectClause& c : clauses) {
            if (c.fluent != decl.name) continue;
            // a = A(params)@t ∧ x_i = u_i ∧ guard, existentially closed
            // over the clause's variables with the time innermost.
            Formula body = Formula::eq(
                ssa.action_var, Term::action(c.action, c.action_params, c.time_var));
            for (std::size_t i = 0; i < c.fluent_args.size(); ++i)
                body = Formula::conj(body, Formula::eq(ssa.params[i], c.fluent_args[i]));
            if (c.guard.kind() != Formula::Kind::True) body = Formula::conj(body, c.guard);
            std::vector<Term> binders = c.action_params;
            for (const Term& u : c.fluent_args) {
                std::set<std::pair<std::string, std::string>> vars;
                collect_free_vars(u, vars);
                for (const auto& [vn, vs] : vars) {
                    auto named = [&](const Term& b) {
                        return b.kind() == Term::Kind::Var && b.name() == vn;
                    };
                    if (std::none_of(binders.begin(), binders.end(), named) &&
                        vn != c.time_var.name())
                        binders.push_back(Term::var(vn, vs));
                }
            }
            binders.push_back(c.time_var);
            for (auto it = binders.rbegin(); it != binders.rend(); ++it)
                body = Formula::exists(it->name(), it->sort_name(), std::move(body));
            Formula& side = c.makes_true ? plus : minus;
            side = side.kind() == Formula::Kind::False ? body : Formula::disj(side, body);
        }
        ssa.gamma_plus = simplify(plus);
        ssa.gamma_minus = simplify(minus);
        out.push_back(std::move(ssa));
    }
    return out;
}

namespace {

bool canonical_obligation_signature(const std::vector<std::string>& arg_sorts) {
    return arg_sorts.size() == 3 && arg_sorts[0] == kSortAnyObject &&
           arg_sorts[1] == kSortCondLiteral && arg_sorts[2] == kSortTime;
}

bool sorts_compatible(const std::string& a, const std::string& b) {
    if (a == b) return true;
    if (a == kSortAnyObject && is_object_sort(b)) return true;
    if (b == kSortAnyObject && is_object_sort(a)) return true;
    return false;
}

class Validator {
  public:
    explicit Validator(const ContractTheory& t) : t_(t) {}

    std::vector<Diagnostic> run() {
        check_sorts();
        check_fluents();
        check_actions();
        check_schema_presence();
        check_preconditions();
        check_ssas();
        check_clauses();
        check_init();
        return std::move(diags_);
    }

  private:
    void report(const std::string& message, const SourceSpan& span) {
        diags_.push_back({message, span});
    }

    void check_sorts() {
        std::set<std::string> seen_sorts;
        std::set<std::string> seen_constants;
        for (const SortDecl& s : t_.sorts) {
            if (!is_object_sort(s.name))
                report("sort name '" + s.name + "' is reserved", s.span);
            if (!seen_sorts.insert(s.name).second)
                report("duplicate sort '" + s.name + "'", s.span);
            if (s.constants.empty())
                report("sort '" + s.name + "' has an empty extension", s.span);
            std::set<std::string> local;
            for (const std::string& c : s.constants) {
                if (!local.insert(c).second)
                    report("duplicate constant '" + c + "' in sort '" + s.name + "'", s.span);
                else if (!seen_constants.insert(c).second)
                    report("constant '" + c + "' already belongs to another sort", s.span);
            }
        }
    }

    void check_fluents() {
        std::set<std::string> seen;
        for (const FluentDecl& f : t_.fluents) {
            if (!seen.insert(f.name).second) report("duplicate fluent '" + f.name + "'", f.span);
            if (f.name == kOblFluent) {
                if (!canonical_obligation_signature(f.arg_sorts))
                    report("fluent name 'Obl' is reserved for the obligation fluent", f.span);
                continue;
            }
            if (!f.name.empty() && f.name[0] == '$')
                report("fluent name '" + f.name + "' is reserved", f.span);
            for (const std::string& s : f.arg_sorts) {
                if (!t_.find_sort(s))
                    report("fluent '" + f.name + "' uses unknown sort '" + s + "'", f.span);
            }
        }
    }

    void check_actions() {
        std::set<std::string> seen;
        for (const ActionDecl& a : t_.actions) {
            if (!seen.insert(a.name).second) report("duplicate action '" + a.name + "'", a.span);
            if (a.name == kObligeAction || a.name == kReleaseAction) {
                if (!canonical_obligation_signature(a.arg_sorts))
                    report("action name '" + a.name + "' is reserved for the obligation schema",
                           a.span);
                continue;
            }
            if (!a.name.empty() && a.name[0] == '$')
                report("action name '" + a.name + "' is reserved", a.span);
            for (const std::string& s : a.arg_sorts) {
                if (!t_.find_sort(s))
                    report("action '" + a.name + "' uses unknown sort '" + s + "'", a.span);
            }
        }
    }

    void check_schema_presence() {
        const FluentDecl* obl = t_.find_fluent(kOblFluent);
        const ActionDecl* ob = t_.find_action(kObligeAction);
        const ActionDecl* rel = t_.find_action(kReleaseAction);
        if (!obl || !ob || !rel || !t_.ssa_for(kOblFluent))
            report("obligation schema is not installed", {});
    }

    // Declared-variable context for formula checking.
    struct Scope {
        std::map<std::string, std::string> vars;  // name -> sort
        bool allow_time_quantifier = false;
    };

    void check_term(const Term& term, const std::string& expected, Scope& scope,
                    const SourceSpan& span) {
        switch (term.kind()) {
            case Term::Kind::Var: {
                auto it = scope.vars.find(term.name());
                if (it == scope.vars.end()) {
                    report("unbound variable '" + term.name() + "'", span);
                    return;
                }
                if (it->second != term.sort_name())
                    report("variable '" + term.name() + "' used at sort '" + term.sort_name() +
                               "' but declared at '" + it->second + "'",
                           span);
                if (!sorts_compatible(expected, term.sort_name()))
                    report("variable '" + term.name() + "' of sort '" + term.sort_name() +
                               "' used where '" + expected + "' is required",
                           span);
                return;
            }
            case Term::Kind::Const: {
                const SortDecl* owner = t_.sort_of_constant(term.name());
                if (!owner) {
                    report("unknown constant '" + term.name() + "'", span);
                    return;
                }
                if (owner->name != term.sort_name())
                    report("constant '" + term.name() + "' tagged with wrong sort '" +
                               term.sort_name() + "'",
                           span);
                if (!sorts_compatible(expected, owner->name))
                    report("constant '" + term.name() + "' of sort '" + owner->name +
                               "' used where '" + expected + "' is required",
                           span);
                return;
            }
            case Term::Kind::TimeLit:
                if (expected != kSortTime)
                    report("time literal used where '" + expected + "' is required", span);
                return;
            case Term::Kind::Action:
                if (expected != kSortAction)
                    report("action term used where '" + expected + "' is required", span);
                check_action_term(term, scope, span);
                return;
            case Term::Kind::S0:
            case Term::Kind::Do:
                if (expected != kSortSituation)
                    report("situation term used where '" + expected + "' is required", span);
                if (term.kind() == Term::Kind::Do) {
                    check_term(term.action_term(), kSortAction, scope, span);
                    check_term(term.prev(), kSortSituation, scope, span);
                }
                return;
            case Term::Kind::CondLit: {
                if (expected != kSortCondLiteral)
                    report("condition literal used where '" + expected + "' is required", span);
                const FluentDecl* f = t_.find_fluent(term.name());
                if (!f) {
                    report("condition literal uses unknown fluent '" + term.name() + "'", span);
                    return;
                }
                if (term.name() == kOblFluent) {
                    report("obligation conditions cannot mention Obl", span);
                    return;
                }
                if (f->arg_sorts.size() != term.args().size()) {
                    report("condition literal '" + term.name() + "' has wrong arity", span);
                    return;
                }
                if (!term.is_ground())
                    report("condition literal '" + render(term) + "' must be ground", span);
                for (std::size_t i = 0; i < term.args().size(); ++i)
                    check_term(term.args()[i], f->arg_sorts[i], scope, span);
                return;
            }
        }
    }

    void check_action_term(const Term& term, Scope& scope, const SourceSpan& span) {
        const ActionDecl* a = t_.find_action(term.name());
        if (!a) {
            report("unknown action '" + term.name() + "'", span);
            return;
        }
        if (a->arg_sorts.size() + 1 != term.args().size()) {
            report("action '" + term.name() + "' has wrong arity", span);
            return;
        }
        for (std::size_t i = 0; i < a->arg_sorts.size(); ++i)
            check_term(term.args()[i], a->arg_sorts[i], scope, span);
        check_term(term.when(), kSortTime, scope, span);
    }

    void check_formula(const Formula& f, Scope scope, const SourceSpan& span) {
        switch (f.kind()) {
            case Formula::Kind::True:
            case Formula::Kind::False:
                return;
            case Formula::Kind::Fluent: {
                const FluentDecl* decl = t_.find_fluent(f.symbol());
                if (!decl) {
                    report("unknown fluent '" + f.symbol() + "'", span);
                    return;
                }
                if (decl->arg_sorts.size() != f.args().size()) {
                    report("fluent '" + f.symbol() + "' has wrong arity", span);
                    return;
                }
                for (std::size_t i = 0; i < f.args().size(); ++i)
                    check_term(f.args()[i], decl->arg_sorts[i], scope, span);
                check_situation_slot(f.situation(), scope, span);
                return;
            }
            case Formula::Kind::Rigid:
                report("unknown predicate '" + f.symbol() + "'", span);
                return;
            case Formula::Kind::Eq: {
                std::string ls = term_sort(f.lhs_term(), scope);
                std::string rs = term_sort(f.rhs_term(), scope);
                check_term(f.lhs_term(), ls, scope, span);
                check_term(f.rhs_term(), rs, scope, span);
                if (!sorts_compatible(ls, rs))
                    report("equality between incompatible sorts '" + ls + "' and '" + rs + "'",
                           span);
                return;
            }
            case Formula::Kind::TimeCmp:
                check_term(f.lhs_term(), kSortTime, scope, span);
                check_term(f.rhs_term(), kSortTime, scope, span);
                return;
            case Formula::Kind::Poss:
                check_term(f.action(), kSortAction, scope, span);
                check_situation_slot(f.situation(), scope, span);
                return;
            case Formula::Kind::Precedes:
                report("subtrace atoms are not allowed in theory formulas", span);
                return;
            case Formula::Kind::Status: {
                check_term(f.args()[0], kSortAnyObject, scope, span);
                check_term(f.args()[1], kSortCondLiteral, scope, span);
                check_term(f.args()[2], kSortTime, scope, span);
                check_situation_slot(f.situation(), scope, span);
                return;
            }
            case Formula::Kind::Not:
                check_formula(f.child(), scope, span);
                return;
            case Formula::Kind::And:
            case Formula::Kind::Or:
            case Formula::Kind::Implies:
                check_formula(f.child(0), scope, span);
                check_formula(f.child(1), scope, span);
                return;
            case Formula::Kind::ForAll:
            case Formula::Kind::Exists: {
                bool time_ok = scope.allow_time_quantifier && f.var_sort() == kSortTime;
                if (!time_ok && !(t_.find_sort(f.var_sort()) ||
                                  (f.var_sort() == kSortAnyObject && !t_.sorts.empty())))
                    report("quantifier over non-enumerable sort '" + f.var_sort() + "'", span);
                if (f.var_name() == kNowVar)
                    report("variable name 'now' is reserved", span);
                Scope inner = scope;
                inner.vars[f.var_name()] = f.var_sort();
                check_formula(f.child(), inner, span);
                return;
            }
        }
    }

    std::string term_sort(const Term& term, const Scope& scope) {
        if (term.kind() == Term::Kind::Var) {
            auto it = scope.vars.find(term.name());
            if (it != scope.vars.end()) return it->second;
        }
        return term.sort_of();
    }

    void check_situation_slot(const Term& sit, Scope& scope, const SourceSpan& span) {
        if (sit.kind() == Term::Kind::Var) {
            if (sit.sort_name() != kSortSituation)
                report("situation slot holds non-situation variable '" + sit.name() + "'", span);
            return;  // `now` and friends are implicitly in scope
        }
        check_term(sit, kSortSituation, scope, span);
    }

    // Params must be distinct variables of the declared sorts followed by a
    // time variable. Returns the scope they induce, or nullopt on error.
    bool check_params(const std::vector<Term>& params, const std::vector<std::string>& sorts,
                      const std::string& owner, const SourceSpan& span, Scope& scope,
                      bool with_time) {
        std::size_t expected = sorts.size() + (with_time ? 1 : 0);
        if (params.size() != expected) {
            report(owner + " declares " + std::to_string(params.size()) +
                       " parameters, expected " + std::to_string(expected),
                   span);
            return false;
        }
        for (std::size_t i = 0; i < params.size(); ++i) {
            const Term& p = params[i];
            if (p.kind() != Term::Kind::Var) {
                report(owner + " parameter " + std::to_string(i) + " is not a variable", span);
                return false;
            }
            std::string want = i < sorts.size() ? sorts[i] : kSortTime;
            if (p.sort_name() != want) {
                report(owner + " parameter '" + p.name() + "' has sort '" + p.sort_name() +
                           "', expected '" + want + "'",
                       span);
                return false;
            }
            if (p.name() == kNowVar) {
                report("variable name 'now' is reserved", span);
                return false;
            }
            if (!scope.vars.emplace(p.name(), p.sort_name()).second) {
                report(owner + " repeats parameter '" + p.name() + "'", span);
                return false;
            }
        }
        return true;
    }

    void check_free_vars(const Formula& f, const Scope& scope, const std::string& owner,
                         const SourceSpan& span) {
        for (const auto& [name, sort] : free_vars(f)) {
            if (name == kNowVar && sort == kSortSituation) continue;
            if (!scope.vars.count(name))
                report(owner + " mentions unbound variable '" + name + "'", span);
        }
    }

    void check_preconditions() {
        std::set<std::string> covered;
        for (const PreconditionAxiom& p : t_.preconditions) {
            const ActionDecl* decl = t_.find_action(p.action);
            if (!decl) {
                report("precondition axiom for unknown action '" + p.action + "'", p.span);
                continue;
            }
            if (!covered.insert(p.action).second) {
                report("duplicate precondition axiom for action '" + p.action + "'", p.span);
                continue;
            }
            Scope scope;
            if (!check_params(p.params, decl->arg_sorts, "precondition for '" + p.action + "'",
                              p.span, scope, true))
                continue;
            if (!uniform_in(p.rhs, now_situation()))
                report("precondition for '" + p.action + "' is not uniform in the current situation",
                       p.span);
            check_formula(p.rhs, scope, p.span);
            check_free_vars(p.rhs, scope, "precondition for '" + p.action + "'", p.span);
        }
        for (const ActionDecl& a : t_.actions) {
            if (!covered.count(a.name))
                report("action '" + a.name + "' has no precondition axiom", a.span);
        }
    }

    void check_ssas() {
        std::set<std::string> covered;
        for (const SuccessorStateAxiom& s : t_.ssas) {
            const FluentDecl* decl = t_.find_fluent(s.fluent);
            if (!decl) {
                report("successor state axiom for unknown fluent '" + s.fluent + "'", s.span);
                continue;
            }
            if (!covered.insert(s.fluent).second) {
                report("duplicate successor state axiom for fluent '" + s.fluent + "'", s.span);
                continue;
            }
            Scope scope;
            scope.allow_time_quantifier = true;
            if (!check_params(s.params, decl->arg_sorts, "successor state axiom for '" + s.fluent + "'",
                              s.span, scope, false))
                continue;
            if (s.action_var.kind() != Term::Kind::Var ||
                s.action_var.sort_name() != kSortAction) {
                report("successor state axiom for '" + s.fluent + "' lacks an action variable",
                       s.span);
                continue;
            }
            scope.vars.emplace(s.action_var.name(), kSortAction);
            for (const Formula* g : {&s.gamma_plus, &s.gamma_minus}) {
                if (!uniform_in(*g, now_situation()))
                    report("effect condition for '" + s.fluent +
                               "' is not uniform in the current situation",
                           s.span);
                check_formula(*g, scope, s.span);
                check_free_vars(*g, scope, "effect condition for '" + s.fluent + "'", s.span);
            }
        }
        for (const FluentDecl& f : t_.fluents) {
            if (!covered.count(f.name))
                report("fluent '" + f.name + "' has no successor state axiom", f.span);
        }
    }

    void check_clauses() {
        for (const EffectClause& c : t_.clauses) {
            if (c.action == kObligeAction || c.action == kReleaseAction) {
                report("reserved action '" + c.action + "' in effect clause", c.span);
                continue;
            }
            if (c.fluent == kOblFluent) {
                report("reserved fluent 'Obl' in effect clause", c.span);
                continue;
            }
            const ActionDecl* action = t_.find_action(c.action);
            const FluentDecl* fluent = t_.find_fluent(c.fluent);
            if (!action) {
                report("effect clause for unknown action '" + c.action + "'", c.span);
                continue;
            }
            if (!fluent) {
                report("effect clause affects unknown fluent '" + c.fluent + "'", c.span);
                continue;
            }
            Scope scope;
            if (!check_params(c.action_params, action->arg_sorts,
                              "effect clause for '" + c.action + "'", c.span, scope, false))
                continue;
            if (c.time_var.kind() != Term::Kind::Var || c.time_var.sort_name() != kSortTime) {
                report("effect clause for '" + c.action + "' lacks a time variable", c.span);
                continue;
            }
            scope.vars.emplace(c.time_var.name(), kSortTime);
            if (fluent->arg_sorts.size() != c.fluent_args.size()) {
                report("effect clause for '" + c.action + "' uses fluent '" + c.fluent +
                           "' at wrong arity",
                       c.span);
                continue;
            }
            for (std::size_t i = 0; i < c.fluent_args.size(); ++i) {
                const Term& u = c.fluent_args[i];
                // Variables not bound by the action pattern range over the
                // slot's finite sort; admit them into scope.
                if (u.kind() == Term::Kind::Var && !scope.vars.count(u.name()))
                    scope.vars.emplace(u.name(), u.sort_name());
                check_term(u, fluent->arg_sorts[i], scope, c.span);
            }
            if (!uniform_in(c.guard, now_situation()))
                report("guard of effect clause for '" + c.action +
                           "' is not uniform in the current situation",
                       c.span);
            check_formula(c.guard, scope, c.span);
            check_free_vars(c.guard, scope, "guard of effect clause for '" + c.action + "'",
                            c.span);
        }
    }

    void check_init() {
        for (const GroundAtom& atom : t_.init.atoms) {
            if (atom.fluent == kOblFluent) {
                report("obligations cannot be asserted in the initial database", {});
                continue;
            }
            const FluentDecl* decl = t_.find_fluent(atom.fluent);
            if (!decl) {
                report("initial database mentions unknown fluent '" + atom.fluent + "'", {});
                continue;
            }
            if (decl->arg_sorts.size() != atom.args.size()) {
                report("initial atom '" + render(atom) + "' has wrong arity", {});
                continue;
            }
            Scope scope;
            for (std::size_t i = 0; i < atom.args.size(); ++i) {
                if (!atom.args[i].is_ground()) {
                    report("initial atom '" + render(atom) + "' is not ground", {});
                    break;
                }
                check_term(atom.args[i], decl->arg_sorts[i], scope, {});
            }
        }
    }

    const ContractTheory& t_;
    std::vector<Diagnostic> diags_;
};

}  // namespace

std::vector<Diagnostic> validate(const ContractTheory& t) { return Validator(t).run(); }

}  // namespace scl
