#pragma once

#include "scl/golog.hpp"
#include "scl/theory.hpp"
#include "scl/verify.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace scl {

// The `.scl` contract language: declarations of sorts, fluents, timed
// actions with preconditions and effect clauses, an initial database,
// named programs, and named properties. parse() turns text into the AST
// below, lower() assembles the executable theory, render() emits the
// canonical form (parse ∘ render ∘ parse = parse).

struct ParamDecl {
    std::string name;
    std::string sort;
    SourceSpan span;
};

// `action pay(i: Item) at t poss: F causes: paid(i) when G, ...;`
// poss defaults to true; the clause list may be empty.
struct ActionSyntax {
    std::string name;
    std::vector<ParamDecl> params;
    std::string time_var = "t";
    Formula poss = Formula::truth();
    std::vector<EffectClause> clauses;
    SourceSpan span;
};

struct InitAtom {
    GroundAtom atom;
    SourceSpan span;
};

struct NamedProgram {
    std::string name;
    Program body = Program::nil();
    SourceSpan span;
};

struct PropertyDecl {
    std::string name;
    std::string program = "main";  // the program the property ranges over
    Property property;
    SourceSpan span;
};

struct ContractSpec {
    std::string name;
    SourceSpan span;
    std::vector<SortDecl> sorts;
    std::vector<FluentDecl> fluents;
    std::vector<ActionSyntax> actions;
    std::vector<InitAtom> init;
    std::vector<NamedProgram> programs;
    std::vector<PropertyDecl> properties;
};

// Parses one UTF-8 document. Either a spec with no diagnostics or a
// non-empty list of located diagnostics — never a partial success.
struct ParseResult {
    std::optional<ContractSpec> spec;
    std::vector<Diagnostic> diagnostics;
};

ParseResult parse(std::string_view text);

// Canonical rendering: items grouped and emitted as sorts, fluents,
// actions, init, programs, properties, in declaration order within each
// group, with fixed spacing; defaulted pieces (poss: true, empty causes,
// empty init, `on main`) are omitted.
std::string render(const ContractSpec& spec);

// Structural AST equality, the round-trip law's comparator.
bool structurally_equal(const ContractSpec& a, const ContractSpec& b);

// Assembled executable form of a parsed spec: the validated theory with
// the obligation machinery installed, the named programs as a zero-
// parameter procedure table, and the property declarations.
struct LoweredContract {
    ContractTheory theory;
    ProcTable procs;
    std::vector<PropertyDecl> properties;
};

struct LowerResult {
    std::optional<LoweredContract> contract;
    std::vector<Diagnostic> diagnostics;
};

LowerResult lower(const ContractSpec& spec);

// Parses a closed formula / a comma-separated ground action list against a
// lowered theory's signature, for queries and interactive use. An empty or
// blank action list is the empty trace.
struct FormulaResult {
    std::optional<Formula> formula;
    std::vector<Diagnostic> diagnostics;
};

FormulaResult parse_formula(std::string_view text, const ContractTheory& t);

struct ActionListResult {
    std::optional<std::vector<Term>> actions;
    std::vector<Diagnostic> diagnostics;
};

// Occurrence times must be literals; with wildcard_time set, omitted times
// and `@?` resolve to that value instead of being rejected.
ActionListResult parse_action_list(std::string_view text, const ContractTheory& t,
                                   std::optional<Time> wildcard_time = std::nullopt);

}  // namespace scl
