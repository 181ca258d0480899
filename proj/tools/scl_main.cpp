#include "scl/dsl.hpp"
#include "scl/errors.hpp"
#include "scl/obligation.hpp"
#include "scl/regress.hpp"
#include "scl/state.hpp"
#include "scl/verify.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

namespace {

using nlohmann::json;
using namespace scl;

// Exit codes: 0 success/true/pass, 1 false/none/fail, 2 errors,
// 3 regression-progression disagreement (a bug sentinel).
constexpr int kExitOk = 0;
constexpr int kExitNegative = 1;
constexpr int kExitError = 2;
constexpr int kExitDisagreement = 3;

bool use_color() {
    if (const char* v = std::getenv("SCL_COLOR")) return std::string(v) == "1";
    return isatty(fileno(stdout)) != 0;
}

std::string paint(const std::string& text, const char* code) {
    if (!use_color()) return text;
    return std::string("\x1b[") + code + "m" + text + "\x1b[0m";
}

std::string green(const std::string& s) { return paint(s, "32"); }
std::string red(const std::string& s) { return paint(s, "31"); }

void print_diagnostics(const std::string& path, const std::vector<Diagnostic>& diags) {
    for (const Diagnostic& d : diags) std::cerr << format_diagnostic(path, d) << "\n";
}

struct LoadedSpec {
    ContractSpec spec;
    LoweredContract contract;
};

// Reads, parses, and lowers a contract file; diagnostics go to stderr.
std::optional<LoadedSpec> load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        std::cerr << "scl: cannot read '" << path << "'\n";
        return std::nullopt;
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    ParseResult parsed = parse(buffer.str());
    if (!parsed.spec) {
        print_diagnostics(path, parsed.diagnostics);
        return std::nullopt;
    }
    LowerResult lowered = lower(*parsed.spec);
    if (!lowered.contract) {
        print_diagnostics(path, lowered.diagnostics);
        return std::nullopt;
    }
    return LoadedSpec{std::move(*parsed.spec), std::move(*lowered.contract)};
}

std::vector<Term> actions_of(const Term& situation) {
    std::vector<Term> out;
    Term s = situation;
    while (s.kind() == Term::Kind::Do) {
        out.push_back(s.action_term());
        s = s.prev();
    }
    std::reverse(out.begin(), out.end());
    return out;
}

json trace_json(const Term& situation) {
    json trace = json::array();
    for (const Term& a : actions_of(situation)) trace.push_back(render(a));
    return trace;
}

json obligations_json(const Term& situation, const ContractTheory& t) {
    json out = json::array();
    for (const auto& [lit, state] : obligations_at(situation, t)) {
        out.push_back({{"agent", render(lit.agent)},
                       {"condition", render(lit.condition)},
                       {"deadline", render_time(lit.deadline)},
                       {"status", to_string(state)}});
    }
    return out;
}

void print_trace_human(const ExecutionResult& r, const ContractTheory& t) {
    std::cout << render_situation(r.situation) << "\n";
    for (const auto& [lit, state] : obligations_at(r.situation, t))
        std::cout << "  " << render(lit) << " -- " << to_string(state) << "\n";
}

int cmd_check(const std::string& path, bool as_json) {
    std::optional<LoadedSpec> loaded = load(path);
    if (as_json) std::cout << json{{"ok", loaded.has_value()}}.dump() << "\n";
    return loaded ? kExitOk : kExitError;
}

int cmd_run(const std::string& path, const std::string& program, bool first,
            const ExecBounds& bounds, bool as_json) {
    std::optional<LoadedSpec> loaded = load(path);
    if (!loaded) return kExitError;
    const ContractTheory& t = loaded->contract.theory;
    auto proc = loaded->contract.procs.find(program);
    if (proc == loaded->contract.procs.end()) {
        std::cerr << "scl: unknown program '" << program << "'\n";
        return kExitError;
    }
    ExecBounds effective = bounds;
    if (first) effective.max_results = 1;
    RunOutcome outcome =
        run(proc->second.body, Term::s0(), t, loaded->contract.procs, effective);

    for (const ExecutionResult& r : outcome.results) {
        if (as_json) {
            json line = {{"trace", trace_json(r.situation)},
                         {"obligations", obligations_json(r.situation, t)},
                         {"truncated", outcome.truncated}};
            std::cout << line.dump() << "\n";
        } else {
            print_trace_human(r, t);
        }
    }
    if (outcome.results.empty()) {
        if (as_json)
            std::cerr << "scl: no executions found\n";
        else
            std::cout << "no executions found"
                      << (outcome.truncated ? " (search truncated by bounds)" : "") << "\n";
        return kExitNegative;
    }
    if (outcome.truncated && !as_json)
        std::cout << "search truncated: more executions may exist\n";
    return kExitOk;
}

// Walks the action list forward, validating executability step by step;
// returns the final situation or reports the failing step.
std::optional<Term> replay(const std::vector<Term>& actions, const ContractTheory& t) {
    State st = initial_state(t);
    Term situation = Term::s0();
    for (std::size_t i = 0; i < actions.size(); ++i) {
        const Term& a = actions[i];
        if (action_time(a) < st.start || !poss_at(st, a, t)) {
            std::cerr << "scl: step " << i + 1 << " (" << render(a)
                      << ") is not executable\n";
            return std::nullopt;
        }
        st = progress(st, a, t);
        situation = Term::make_do(a, situation);
    }
    return situation;
}

int cmd_query(const std::string& path, const std::string& after, const std::string& formula,
              const std::string& method, bool as_json) {
    std::optional<LoadedSpec> loaded = load(path);
    if (!loaded) return kExitError;
    const ContractTheory& t = loaded->contract.theory;

    ActionListResult actions = parse_action_list(after, t);
    if (!actions.actions) {
        print_diagnostics("<after>", actions.diagnostics);
        return kExitError;
    }
    std::optional<Term> situation = replay(*actions.actions, t);
    if (!situation) return kExitError;

    FormulaResult parsed = parse_formula(formula, t);
    if (!parsed.formula) {
        print_diagnostics("<formula>", parsed.diagnostics);
        return kExitError;
    }

    bool result = false;
    if (method == "regression") {
        result = holds(*parsed.formula, *situation, t, Method::Regression);
    } else if (method == "progression") {
        result = holds(*parsed.formula, *situation, t, Method::Progression);
    } else {
        bool by_regression = holds(*parsed.formula, *situation, t, Method::Regression);
        bool by_progression = holds(*parsed.formula, *situation, t, Method::Progression);
        if (by_regression != by_progression) {
            std::cerr << "scl: internal error: regression and progression disagree on '"
                      << formula << "'\n";
            return kExitDisagreement;
        }
        result = by_regression;
    }
    if (as_json)
        std::cout << json{{"holds", result}}.dump() << "\n";
    else
        std::cout << (result ? green("true") : red("false")) << "\n";
    return result ? kExitOk : kExitNegative;
}

int cmd_verify(const std::string& path, const std::string& property, bool all_properties,
               const ExecBounds& bounds, bool as_json) {
    std::optional<LoadedSpec> loaded = load(path);
    if (!loaded) return kExitError;
    const ContractTheory& t = loaded->contract.theory;

    std::vector<const PropertyDecl*> selected;
    for (const PropertyDecl& d : loaded->contract.properties)
        if (all_properties || d.name == property) selected.push_back(&d);
    if (!all_properties && selected.empty()) {
        std::cerr << "scl: unknown property '" << property << "'\n";
        return kExitError;
    }
    if (selected.empty()) {
        std::cerr << "scl: the contract declares no properties\n";
        return kExitError;
    }

    bool all_pass = true;
    for (const PropertyDecl* d : selected) {
        const Program& body = loaded->contract.procs.at(d->program).body;
        Verdict v = verify(d->property, body, t, loaded->contract.procs, bounds);
        all_pass = all_pass && v.holds;
        if (as_json) {
            json line = {{"property", d->name},
                         {"holds", v.holds},
                         {"executions", v.executions},
                         {"truncated", v.truncated}};
            if (v.trace) line["trace"] = trace_json(v.trace->situation);
            std::cout << line.dump() << "\n";
            continue;
        }
        std::cout << (v.holds ? green("PASS") : red("FAIL")) << " " << d->name << "\n";
        if (v.trace)
            std::cout << "  " << (v.holds ? "witness: " : "counterexample: ")
                      << render_situation(v.trace->situation) << "\n";
        if (v.truncated)
            std::cout << "  (checked " << v.executions << " executions within bounds)\n";
    }
    return all_pass ? kExitOk : kExitNegative;
}

// ---------------------------------------------------------------- repl

void repl_show(const Term& situation, const ContractTheory& t) {
    State st = state_at(situation, t);
    std::cout << "situation: " << render_situation(situation) << "\n";
    std::cout << "start: " << render_time(st.start) << "\n";
    std::cout << "fluents:\n";
    bool any = false;
    for (const GroundAtom& atom : st.atoms) {
        if (atom.fluent == kOblFluent) continue;
        std::cout << "  " << render(atom) << "\n";
        any = true;
    }
    if (!any) std::cout << "  (none)\n";
    std::cout << "obligations:\n";
    auto obligations = obligations_at(situation, t);
    for (const auto& [lit, state] : obligations)
        std::cout << "  " << render(lit) << " -- " << to_string(state) << "\n";
    if (obligations.empty()) std::cout << "  (none)\n";
}

void repl_actions(const Term& situation, const ContractTheory& t) {
    State st = state_at(situation, t);
    Time when = st.start + Time(1);
    bool any = false;
    for (const ActionDecl& decl : t.actions) {
        if (decl.name == kObligeAction || decl.name == kReleaseAction) continue;
        std::vector<std::vector<Term>> tuples = {{}};
        for (const std::string& sort : decl.arg_sorts) {
            std::vector<std::vector<Term>> next;
            for (const std::vector<Term>& tuple : tuples)
                for (const Term& c : t.constants_of(sort)) {
                    std::vector<Term> extended = tuple;
                    extended.push_back(c);
                    next.push_back(std::move(extended));
                }
            tuples = std::move(next);
        }
        for (std::vector<Term>& args : tuples) {
            Term candidate = Term::action(decl.name, std::move(args), Term::time_lit(when));
            if (poss_at(st, candidate, t)) {
                std::cout << "  " << render(candidate) << "\n";
                any = true;
            }
        }
    }
    if (!any) std::cout << "  (none)\n";
}

int cmd_repl(const std::string& path) {
    std::optional<LoadedSpec> loaded = load(path);
    if (!loaded) return kExitError;
    const ContractTheory& t = loaded->contract.theory;
    const bool interactive = isatty(fileno(stdin)) != 0;

    Term situation = Term::s0();
    std::string line;
    for (;;) {
        if (interactive) std::cout << "scl> " << std::flush;
        if (!std::getline(std::cin, line)) break;
        std::istringstream words(line);
        std::string command;
        words >> command;
        std::string rest;
        std::getline(words, rest);
        if (!rest.empty() && rest.front() == ' ') rest.erase(0, 1);

        try {
            if (command.empty()) continue;
            if (command == "quit" || command == "exit") break;
            if (command == "show") {
                repl_show(situation, t);
            } else if (command == "actions") {
                repl_actions(situation, t);
            } else if (command == "undo") {
                if (situation.kind() == Term::Kind::Do) {
                    situation = situation.prev();
                    std::cout << render_situation(situation) << "\n";
                } else {
                    std::cout << "already at the initial situation\n";
                }
            } else if (command == "do") {
                State st = state_at(situation, t);
                ActionListResult parsed = parse_action_list(rest, t, st.start + Time(1));
                if (!parsed.actions) {
                    for (const Diagnostic& d : parsed.diagnostics)
                        std::cout << "error: " << d.message << "\n";
                    continue;
                }
                if (parsed.actions->size() != 1) {
                    std::cout << "do takes exactly one action\n";
                    continue;
                }
                const Term& action = parsed.actions->front();
                if (action_time(action) < st.start) {
                    std::cout << "not possible: " << render(action)
                              << " (time moves backwards)\n";
                } else if (!poss_at(st, action, t)) {
                    std::cout << "not possible: " << render(action) << "\n";
                } else {
                    situation = Term::make_do(action, situation);
                    std::cout << render_situation(situation) << "\n";
                }
            } else if (command == "holds") {
                FormulaResult parsed = parse_formula(rest, t);
                if (!parsed.formula) {
                    for (const Diagnostic& d : parsed.diagnostics)
                        std::cout << "error: " << d.message << "\n";
                    continue;
                }
                bool result = holds(*parsed.formula, situation, t, Method::Progression);
                std::cout << (result ? green("true") : red("false")) << "\n";
            } else {
                std::cout << "unknown command; try: actions, do <action>, undo, show, "
                             "holds <formula>, quit\n";
            }
        } catch (const Error& e) {
            std::cout << "error: " << e.what() << "\n";
        }
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"situation-calculus contract engine"};
    app.require_subcommand(1);
    bool as_json = false;
    app.add_flag("--json", as_json, "line-delimited JSON output");

    std::string path;
    std::string program = "main";
    std::string after;
    std::string formula;
    std::string method = "both";
    std::string property;
    bool all_properties = false;
    bool first = false;
    bool all = false;
    ExecBounds bounds;

    CLI::App* check = app.add_subcommand("check", "parse and validate a contract");
    check->add_option("path", path, "contract file")->required();
    check->add_flag("--json", as_json, "line-delimited JSON output");

    CLI::App* run_cmd = app.add_subcommand("run", "enumerate executions of a program");
    run_cmd->add_option("path", path, "contract file")->required();
    run_cmd->add_option("--program", program, "program name (default main)");
    CLI::Option* first_flag = run_cmd->add_flag("--first", first, "stop at one execution");
    run_cmd->add_flag("--all", all, "enumerate all executions (default)")
        ->excludes(first_flag);
    run_cmd->add_option("--max-steps", bounds.max_steps, "action budget per execution");
    run_cmd->add_option("--max-star", bounds.max_star_unrollings,
                        "unrolling budget per loop");
    run_cmd->add_flag("--json", as_json, "line-delimited JSON output");

    CLI::App* query = app.add_subcommand("query", "evaluate a formula after a trace");
    query->add_option("path", path, "contract file")->required();
    query->add_option("--after", after, "comma-separated timed actions (default empty)");
    query->add_option("--formula", formula, "closed formula")->required();
    query->add_option("--method", method, "regression|progression|both (default both)")
        ->check(CLI::IsMember({"regression", "progression", "both"}));
    query->add_flag("--json", as_json, "line-delimited JSON output");

    CLI::App* verify_cmd = app.add_subcommand("verify", "check declared properties");
    verify_cmd->add_option("path", path, "contract file")->required();
    CLI::Option* prop_opt =
        verify_cmd->add_option("--property", property, "property name");
    verify_cmd->add_flag("--all-properties", all_properties, "check every property")
        ->excludes(prop_opt);
    verify_cmd->add_option("--max-steps", bounds.max_steps, "action budget per execution");
    verify_cmd->add_option("--max-star", bounds.max_star_unrollings,
                           "unrolling budget per loop");
    verify_cmd->add_flag("--json", as_json, "line-delimited JSON output");

    CLI::App* repl = app.add_subcommand("repl", "step a contract interactively");
    repl->add_option("path", path, "contract file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitError;
    }

    try {
        if (check->parsed()) return cmd_check(path, as_json);
        if (run_cmd->parsed()) return cmd_run(path, program, first, bounds, as_json);
        if (query->parsed()) return cmd_query(path, after, formula, method, as_json);
        if (verify_cmd->parsed()) {
            if (!all_properties && property.empty()) {
                std::cerr << "scl: pass --property NAME or --all-properties\n";
                return kExitError;
            }
            return cmd_verify(path, property, all_properties, bounds, as_json);
        }
        if (repl->parsed()) return cmd_repl(path);
    } catch (const Error& e) {
        std::cerr << "scl: error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
