#include "scl/dsl.hpp"
#include "scl/obligation.hpp"

#include <sstream>

namespace scl {

namespace {

void render_clause(const EffectClause& c, std::ostream& out) {
    if (!c.makes_true) out << "not ";
    out << c.fluent << "(";
    for (std::size_t i = 0; i < c.fluent_args.size(); ++i) {
        if (i) out << ",";
        out << render(c.fluent_args[i]);
    }
    out << ")";
    std::string guard = render(c.guard);
    if (guard != "true") out << " when " << guard;
}

void render_property_body(const Property& p, std::ostream& out) {
    switch (p.kind) {
        case Property::Kind::AtTermination:
            out << "at termination " << render(p.formula);
            return;
        case Property::Kind::Always:
            out << "always " << render(p.formula);
            return;
        case Property::Kind::ExistsExecution:
            out << "exists execution " << render(p.formula);
            return;
        case Property::Kind::NoViolatedObligations:
            out << "no violated obligations";
            return;
        case Property::Kind::SubtraceAll:
            out << "all subtraces " << render(p.formula);
            return;
    }
}

}  // namespace

std::string render(const ContractSpec& spec) {
    std::ostringstream out;
    out << "contract " << spec.name << " {\n";
    for (const SortDecl& s : spec.sorts) {
        out << "    sort " << s.name << " = { ";
        for (std::size_t i = 0; i < s.constants.size(); ++i) {
            if (i) out << ", ";
            out << s.constants[i];
        }
        out << (s.constants.empty() ? "};\n" : " };\n");
    }
    for (const FluentDecl& f : spec.fluents) {
        out << "    fluent " << f.name << "(";
        for (std::size_t i = 0; i < f.arg_sorts.size(); ++i) {
            if (i) out << ",";
            out << f.arg_sorts[i];
        }
        out << ");\n";
    }
    for (const ActionSyntax& a : spec.actions) {
        out << "    action " << a.name << "(";
        for (std::size_t i = 0; i < a.params.size(); ++i) {
            if (i) out << ", ";
            out << a.params[i].name << ": " << a.params[i].sort;
        }
        out << ") at " << a.time_var;
        std::string poss = render(a.poss);
        if (poss != "true") out << " poss: " << poss;
        if (!a.clauses.empty()) {
            out << " causes: ";
            for (std::size_t i = 0; i < a.clauses.size(); ++i) {
                if (i) out << ", ";
                render_clause(a.clauses[i], out);
            }
        }
        out << ";\n";
    }
    if (!spec.init.empty()) {
        out << "    init { ";
        for (std::size_t i = 0; i < spec.init.size(); ++i) {
            if (i) out << ", ";
            out << render(spec.init[i].atom);
        }
        out << " };\n";
    }
    for (const NamedProgram& p : spec.programs)
        out << "    program " << p.name << " = " << render(p.body) << ";\n";
    for (const PropertyDecl& d : spec.properties) {
        out << "    property " << d.name;
        if (d.program != "main") out << " on " << d.program;
        out << " = ";
        render_property_body(d.property, out);
        out << ";\n";
    }
    out << "}\n";
    return out.str();
}

namespace {

std::string clause_key(const EffectClause& c) {
    std::ostringstream out;
    out << c.action << "@" << render(c.time_var) << " ";
    render_clause(c, out);
    return out.str();
}

}  // namespace

bool structurally_equal(const ContractSpec& a, const ContractSpec& b) {
    if (a.name != b.name) return false;
    if (a.sorts.size() != b.sorts.size() || a.fluents.size() != b.fluents.size() ||
        a.actions.size() != b.actions.size() || a.init.size() != b.init.size() ||
        a.programs.size() != b.programs.size() || a.properties.size() != b.properties.size())
        return false;
    for (std::size_t i = 0; i < a.sorts.size(); ++i)
        if (a.sorts[i].name != b.sorts[i].name ||
            a.sorts[i].constants != b.sorts[i].constants)
            return false;
    for (std::size_t i = 0; i < a.fluents.size(); ++i)
        if (a.fluents[i].name != b.fluents[i].name ||
            a.fluents[i].arg_sorts != b.fluents[i].arg_sorts)
            return false;
    for (std::size_t i = 0; i < a.actions.size(); ++i) {
        const ActionSyntax& x = a.actions[i];
        const ActionSyntax& y = b.actions[i];
        if (x.name != y.name || x.time_var != y.time_var ||
            x.params.size() != y.params.size() || x.clauses.size() != y.clauses.size())
            return false;
        for (std::size_t j = 0; j < x.params.size(); ++j)
            if (x.params[j].name != y.params[j].name || x.params[j].sort != y.params[j].sort)
                return false;
        if (render(x.poss) != render(y.poss)) return false;
        for (std::size_t j = 0; j < x.clauses.size(); ++j)
            if (clause_key(x.clauses[j]) != clause_key(y.clauses[j])) return false;
    }
    for (std::size_t i = 0; i < a.init.size(); ++i)
        if (!(a.init[i].atom == b.init[i].atom)) return false;
    for (std::size_t i = 0; i < a.programs.size(); ++i)
        if (a.programs[i].name != b.programs[i].name ||
            render(a.programs[i].body) != render(b.programs[i].body))
            return false;
    for (std::size_t i = 0; i < a.properties.size(); ++i) {
        const PropertyDecl& x = a.properties[i];
        const PropertyDecl& y = b.properties[i];
        if (x.name != y.name || x.program != y.program ||
            x.property.kind != y.property.kind ||
            render(x.property.formula) != render(y.property.formula))
            return false;
    }
    return true;
}

LowerResult lower(const ContractSpec& spec) {
    LowerResult out;
    for (const FluentDecl& f : spec.fluents)
        if (f.name == kOblFluent)
            out.diagnostics.push_back(
                {"fluent '" + f.name + "' is reserved for the obligation schema", f.span});
    for (const ActionSyntax& a : spec.actions) {
        if (a.name == kObligeAction || a.name == kReleaseAction)
            out.diagnostics.push_back(
                {"action '" + a.name + "' is reserved and cannot be redeclared", a.span});
        for (const EffectClause& c : a.clauses)
            if (c.fluent == kOblFluent)
                out.diagnostics.push_back(
                    {"only the reserved oblige/release actions may affect Obl", c.span});
    }
    if (!out.diagnostics.empty()) return out;

    ContractTheory t;
    t.name = spec.name;
    t.sorts = spec.sorts;
    t.fluents = spec.fluents;
    for (const ActionSyntax& a : spec.actions) {
        ActionDecl decl;
        decl.name = a.name;
        for (const ParamDecl& p : a.params) decl.arg_sorts.push_back(p.sort);
        decl.span = a.span;
        t.actions.push_back(std::move(decl));

        PreconditionAxiom pre;
        pre.action = a.name;
        for (const ParamDecl& p : a.params) pre.params.push_back(Term::var(p.name, p.sort));
        pre.params.push_back(Term::var(a.time_var, kSortTime));
        pre.rhs = a.poss;
        pre.span = a.span;
        t.preconditions.push_back(std::move(pre));

        for (const EffectClause& c : a.clauses) t.clauses.push_back(c);
    }
    for (const InitAtom& atom : spec.init) t.init.atoms.insert(atom.atom);
    t.init.start = Time(0);
    t.ssas = compile_effects(t.clauses, t.fluents);
    install_obligation_schema(t);

    out.diagnostics = validate(t);
    if (!out.diagnostics.empty()) return out;

    LoweredContract lowered;
    lowered.theory = std::move(t);
    for (const NamedProgram& p : spec.programs) {
        Proc proc;
        proc.name = p.name;
        proc.body = p.body;
        proc.span = p.span;
        lowered.procs[p.name] = std::move(proc);
    }
    lowered.properties = spec.properties;
    out.contract = std::move(lowered);
    return out;
}

}  // namespace scl
