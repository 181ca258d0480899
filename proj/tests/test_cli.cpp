// Golden tests for the command-line front end: exit codes, human output,
// JSON schemas, and the interactive repl, all exercised through the real
// binary.
#include "doctest.h"

#include "json.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

struct CliResult {
    int code = -1;
    std::string out;
    std::string err;
};

// Runs the real binary through the shell with stdin/stderr redirected to
// temp files; SCL_COLOR defaults to 0 so golden output has no ANSI codes.
CliResult run_cli(const std::string& args, const std::string& input = "",
                  const std::string& env = "SCL_COLOR=0") {
    static int counter = 0;
    ++counter;
    fs::path dir = fs::temp_directory_path();
    fs::path in_file = dir / ("scl_cli_in_" + std::to_string(counter));
    fs::path err_file = dir / ("scl_cli_err_" + std::to_string(counter));
    {
        std::ofstream f(in_file, std::ios::binary);
        f << input;
    }
    std::string cmd = env + (env.empty() ? "" : " ") + SCL_CLI_PATH + " " + args + " <" +
                      in_file.string() + " 2>" + err_file.string();
    CliResult r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    std::size_t n = 0;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
    int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.err = slurp(err_file);
    fs::remove(in_file);
    fs::remove(err_file);
    return r;
}

std::string fixture(const std::string& rel) {
    return std::string(SCL_FIXTURE_DIR) + "/" + rel;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) out.push_back(line);
    return out;
}

// `path:line:col: error: message` with positive line/col.
bool located_diagnostic(const std::string& line, const std::string& path) {
    if (line.rfind(path + ":", 0) != 0) return false;
    std::size_t i = path.size() + 1;
    std::size_t digits = 0;
    while (i < line.size() && isdigit(line[i])) ++i, ++digits;
    if (digits == 0 || i >= line.size() || line[i] != ':') return false;
    ++i;
    digits = 0;
    while (i < line.size() && isdigit(line[i])) ++i, ++digits;
    if (digits == 0) return false;
    return line.compare(i, 9, ": error: ") == 0 && line.size() > i + 9;
}

std::vector<fs::path> fixture_files(const std::string& sub) {
    std::vector<fs::path> out;
    for (const auto& entry : fs::directory_iterator(fs::path(SCL_FIXTURE_DIR) / sub))
        if (entry.path().extension() == ".scl") out.push_back(entry.path());
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

TEST_CASE("check: exit codes and JSON across the fixture corpus") {
    std::vector<fs::path> valid = fixture_files("valid");
    REQUIRE(valid.size() >= 20);
    for (const fs::path& f : valid) {
        CAPTURE(f.string());
        CliResult r = run_cli("check " + f.string());
        CHECK(r.code == 0);
        CHECK(r.out.empty());
        CHECK(r.err.empty());
        CliResult j = run_cli("check " + f.string() + " --json");
        CHECK(j.code == 0);
        CHECK(j.out == "{\"ok\":true}\n");
    }
    std::vector<fs::path> invalid = fixture_files("invalid");
    REQUIRE(invalid.size() >= 10);
    for (const fs::path& f : invalid) {
        CAPTURE(f.string());
        CliResult r = run_cli("check " + f.string());
        CHECK(r.code == 2);
        std::vector<std::string> diags = lines_of(r.err);
        REQUIRE(!diags.empty());
        for (const std::string& line : diags) {
            CAPTURE(line);
            CHECK(located_diagnostic(line, f.string()));
        }
        CliResult j = run_cli("check " + f.string() + " --json");
        CHECK(j.code == 2);
        CHECK(j.out == "{\"ok\":false}\n");
    }
    CliResult missing = run_cli("check " + fixture("no_such.scl"));
    CHECK(missing.code == 2);
    CHECK(!missing.err.empty());
}

TEST_CASE("run: sale trace, obligation statuses, and bounds") {
    const std::string sale = fixture("sale.scl");
    CliResult first = run_cli("run " + sale + " --first");
    CHECK(first.code == 0);
    CHECK(first.out ==
          "[pay(widget)@1, oblige(seller,delivered(widget),10)@2, deliver(widget)@5]\n"
          "  Obl(seller,delivered(widget),10) -- fulfilled\n");

    CliResult all = run_cli("run " + sale + " --all");
    CHECK(all.code == 0);
    CHECK(all.out == first.out);

    CliResult js = run_cli("run " + sale + " --first --json");
    CHECK(js.code == 0);
    json line = json::parse(js.out);
    CHECK(line["trace"] ==
          json::array({"pay(widget)@1", "oblige(seller,delivered(widget),10)@2",
                       "deliver(widget)@5"}));
    REQUIRE(line["obligations"].size() == 1);
    CHECK(line["obligations"][0]["agent"] == "seller");
    CHECK(line["obligations"][0]["condition"] == "delivered(widget)");
    CHECK(line["obligations"][0]["deadline"] == "10");
    CHECK(line["obligations"][0]["status"] == "fulfilled");
    CHECK(line["truncated"] == false);

    CliResult again = run_cli("run " + sale + " --first --json");
    CHECK(again.out == js.out);  // schema-stable across runs

    CliResult bounded = run_cli("run " + sale + " --max-steps 1");
    CHECK(bounded.code == 1);
    CHECK(bounded.out == "no executions found (search truncated by bounds)\n");

    CliResult unknown = run_cli("run " + sale + " --program nope");
    CHECK(unknown.code == 2);
    CHECK(unknown.err == "scl: unknown program 'nope'\n");

    // A program whose guard fails at S0 yields no executions without truncation.
    CliResult blocked =
        run_cli("run " + fixture("valid/18_choice_test_nil.scl") + " --program guarded");
    CHECK(blocked.code == 1);
    CHECK(blocked.out == "no executions found\n");
}

TEST_CASE("query: truth values, methods, and failing prefixes") {
    const std::string sale = fixture("sale.scl");
    CliResult t = run_cli("query " + sale + " --after \"pay(widget)@1\" --formula \"paid(widget)\"");
    CHECK(t.code == 0);
    CHECK(t.out == "true\n");

    CliResult f = run_cli("query " + sale + " --formula \"paid(widget)\"");
    CHECK(f.code == 1);
    CHECK(f.out == "false\n");

    CliResult js = run_cli("query " + sale + " --formula \"paid(widget)\" --json");
    CHECK(js.code == 1);
    CHECK(js.out == "{\"holds\":false}\n");

    for (const std::string method : {"regression", "progression", "both"}) {
        CliResult m = run_cli("query " + sale + " --after \"pay(widget)@1\" --formula \"paid(widget)\" --method " + method);
        CAPTURE(method);
        CHECK(m.code == 0);
        CHECK(m.out == "true\n");
    }

    CliResult bad = run_cli("query " + sale + " --after \"deliver(widget)@1\" --formula \"true\"");
    CHECK(bad.code == 2);
    CHECK(bad.err == "scl: step 1 (deliver(widget)@1) is not executable\n");

    CliResult open = run_cli("query " + sale + " --formula \"paid(i)\"");
    CHECK(open.code == 2);
    CHECK(!open.err.empty());
}

TEST_CASE("query: --method both never reaches the disagreement sentinel") {
    const std::string sale = fixture("sale.scl");
    const std::vector<std::string> afters = {
        "", "pay(widget)@1", "pay(widget)@1, oblige(seller,delivered(widget),10)@2",
        "pay(widget)@1, oblige(seller,delivered(widget),10)@2, deliver(widget)@5"};
    const std::vector<std::string> formulas = {
        "paid(widget)",
        "delivered(widget)",
        "Obl(seller, delivered(widget), 10)",
        "pending(seller, delivered(widget), 10)",
        "fulfilled(seller, delivered(widget), 10)",
        "violated(seller, delivered(widget), 4)",
        "poss(deliver(widget)@6)",
        "forall i: Item. (paid(i) implies delivered(i))",
        "exists i: Item. paid(i) and not delivered(i)",
    };
    for (const std::string& after : afters)
        for (const std::string& formula : formulas) {
            CliResult r = run_cli("query " + sale + " --after \"" + after +
                                  "\" --formula \"" + formula + "\" --method both");
            CAPTURE(after);
            CAPTURE(formula);
            CHECK((r.code == 0 || r.code == 1));
        }
}

TEST_CASE("verify: verdict lines, counterexamples, and selection") {
    CliResult pass = run_cli("verify " + fixture("sale.scl") + " --property done");
    CHECK(pass.code == 0);
    CHECK(pass.out == "PASS done\n");

    CliResult fail = run_cli("verify " + fixture("sale_late.scl") + " --property safe");
    CHECK(fail.code == 1);
    CHECK(fail.out ==
          "FAIL safe\n"
          "  counterexample: [pay(widget)@1, oblige(seller,delivered(widget),10)@2, "
          "noop()@11]\n");

    CliResult js = run_cli("verify " + fixture("sale_late.scl") + " --all-properties --json");
    CHECK(js.code == 1);
    json line = json::parse(js.out);
    CHECK(line["property"] == "safe");
    CHECK(line["holds"] == false);
    CHECK(line["executions"] >= 1);
    CHECK(line["truncated"] == false);
    CHECK(line["trace"] ==
          json::array({"pay(widget)@1", "oblige(seller,delivered(widget),10)@2",
                       "noop()@11"}));

    CliResult unknown = run_cli("verify " + fixture("sale.scl") + " --property nope");
    CHECK(unknown.code == 2);
    CHECK(unknown.err == "scl: unknown property 'nope'\n");

    CliResult none = run_cli("verify " + fixture("sale.scl"));
    CHECK(none.code == 2);

    // Aggregation: every fixture property was designed to hold.
    for (const fs::path& f : fixture_files("valid")) {
        CliResult r = run_cli("verify " + f.string() + " --all-properties");
        CAPTURE(f.string());
        if (r.code == 2) continue;  // fixtures that declare no properties
        CHECK(r.code == 0);
    }
}

TEST_CASE("repl: stepping, refusal, undo, and byte-identical show") {
    const std::string sale = fixture("sale.scl");

    CliResult refuse = run_cli("repl " + sale, "do deliver(widget)@1\nshow\nquit\n");
    CHECK(refuse.code == 0);
    std::vector<std::string> out = lines_of(refuse.out);
    REQUIRE(!out.empty());
    CHECK(out[0] == "not possible: deliver(widget)@1");
    CHECK(out[1] == "situation: []");  // state unchanged

    CliResult actions = run_cli("repl " + sale, "actions\nquit\n");
    CHECK(actions.out == "  pay(widget)@1\n  noop()@1\n");

    CliResult at_s0 = run_cli("repl " + sale, "undo\nquit\n");
    CHECK(at_s0.out == "already at the initial situation\n");

    CliResult base = run_cli("repl " + sale, "show\nquit\n");
    CliResult round = run_cli("repl " + sale, "do pay(widget)@1\nundo\nshow\nquit\n");
    CHECK(round.out == "[pay(widget)@1]\n[]\n" + base.out);

    CliResult stepped = run_cli("repl " + sale, "do pay(widget)@1\nshow\nquit\n");
    std::vector<std::string> shown = lines_of(stepped.out);
    REQUIRE(shown.size() >= 5);
    CHECK(shown[0] == "[pay(widget)@1]");
    CHECK(shown[1] == "situation: [pay(widget)@1]");
    CHECK(shown[2] == "start: 1");
    CHECK(shown[3] == "fluents:");
    CHECK(shown[4] == "  paid(widget)");

    // Wildcard occurrence times advance the clock by one.
    CliResult wild = run_cli("repl " + sale, "do pay(widget)\ndo deliver(widget)@?\nquit\n");
    std::vector<std::string> steps = lines_of(wild.out);
    REQUIRE(steps.size() == 2);
    CHECK(steps[0] == "[pay(widget)@1]");
    CHECK(steps[1] == "[pay(widget)@1, deliver(widget)@2]");

    CliResult held = run_cli("repl " + sale, "do pay(widget)@1\nholds paid(widget)\nquit\n");
    CHECK(lines_of(held.out)[1] == "true");

    CliResult junk = run_cli("repl " + sale, "frobnicate\nquit\n");
    CHECK(lines_of(junk.out)[0].rfind("unknown command", 0) == 0);
}

TEST_CASE("color honors SCL_COLOR and defaults off in pipes") {
    const std::string cmd = "verify " + fixture("sale.scl") + " --property done";
    CliResult forced = run_cli(cmd, "", "SCL_COLOR=1");
    CHECK(forced.out == "\x1b[32mPASS\x1b[0m done\n");
    CliResult plain = run_cli(cmd, "", "");
    CHECK(plain.out == "PASS done\n");  // stdout is a pipe here, so no color
    CliResult off = run_cli(cmd, "", "SCL_COLOR=0");
    CHECK(off.out == "PASS done\n");
}
