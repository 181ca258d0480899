#include "scl/verify.hpp"
#include "scl/errors.hpp"
#include "scl/obligation.hpp"
#include "scl/regress.hpp"

#include <algorithm>

namespace scl {

std::vector<Term> enumerate_prefixes(const ExecutionResult& r) {
    std::vector<Term> out;
    Term s = r.situation;
    for (;;) {
        out.push_back(s);
        if (s.kind() != Term::Kind::Do) break;
        s = s.prev();
    }
    std::reverse(out.begin(), out.end());
    return out;
}

namespace {

// Whether one execution satisfies the property's per-execution requirement.
bool execution_passes(const Property& prop, const ExecutionResult& r,
                      const ContractTheory& t) {
    switch (prop.kind) {
        case Property::Kind::AtTermination:
        case Property::Kind::ExistsExecution:
            return holds(prop.formula, r.situation, t, Method::Progression);
        case Property::Kind::Always: {
            for (const Term& s : enumerate_prefixes(r))
                if (!holds(prop.formula, s, t, Method::Progression)) return false;
            return true;
        }
        case Property::Kind::SubtraceAll: {
            std::vector<Term> prefixes = enumerate_prefixes(r);
            prefixes.pop_back();  // proper subtraces only
            for (const Term& s : prefixes)
                if (!holds(prop.formula, s, t, Method::Progression)) return false;
            return true;
        }
        case Property::Kind::NoViolatedObligations: {
            for (const auto& [lit, state] : obligations_at(r.situation, t))
                if (state == ObligationState::Violated) return false;
            return true;
        }
    }
    return false;
}

}  // namespace

Verdict verify(const Property& prop, const Program& p, const ContractTheory& t,
               const ProcTable& procs, const ExecBounds& bounds) {
    RunOutcome outcome = run(p, Term::s0(), t, procs, bounds);

    // Witness/counterexample choice must not depend on search order, so
    // executions are examined in rendered-situation order.
    std::vector<const ExecutionResult*> ordered;
    ordered.reserve(outcome.results.size());
    for (const ExecutionResult& r : outcome.results) ordered.push_back(&r);
    std::sort(ordered.begin(), ordered.end(),
              [](const ExecutionResult* a, const ExecutionResult* b) {
                  return render_situation(a->situation) < render_situation(b->situation);
              });

    Verdict verdict;
    verdict.executions = static_cast<long>(outcome.results.size());
    verdict.truncated = outcome.truncated;

    const bool existential = prop.kind == Property::Kind::ExistsExecution;
    verdict.holds = !existential;
    for (const ExecutionResult* r : ordered) {
        bool passes;
        try {
            passes = execution_passes(prop, *r, t);
        } catch (const Error&) {
            // An execution the theory cannot even evaluate must not verify.
            passes = false;
        }
        if (existential && passes) {
            verdict.holds = true;
            verdict.trace = *r;
            break;
        }
        if (!existential && !passes) {
            verdict.holds = false;
            verdict.trace = *r;
            break;
        }
    }
    return verdict;
}

}  // namespace scl
