#include <doctest.h>

#include "vessiot/problem.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

using namespace vessiot;

namespace {

std::string corpus(const std::string& name) { return std::string(VESSIOT_SOURCE_DIR) + "/corpus/" + name; }

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ProblemError parse_error(const std::string& text) {
    try {
        parse_problem(text);
    } catch (const ProblemError& e) {
        return e;
    }
    FAIL("expected a parse error");
    return ProblemError("", "", {});
}

const char* kSmall = R"J({
  "contexts": {"c": {"independents": ["x"], "dependents": {"u": ["x"]}, "order": 2,
                     "definitions": {"a": "u[x]^2", "b": "2*a"}}},
  "objects": {"s": {"type": "system", "equations": ["u[x,x] = 0"]}},
  "checks": [
    {"id": "id_zero", "op": "identity", "expr": "b - 2*u[x]^2"},
    {"id": "id_nonzero", "op": "identity", "lhs": "a", "rhs": "u[x]", "status": "FAIL"},
    {"id": "dim", "op": "fiber_dimension", "system": "s", "expect": {"value": 2}},
    {"id": "canon", "op": "canonical", "expr": "(x^2 - 1)/(x - 1)", "expect": {"text": "x + 1"}}
  ]
})J";

}  // namespace

TEST_CASE("shipped surface file parses with seven checks") {
    auto f = load_problem(corpus("shell_monkey_saddle.json"));
    CHECK(f.name() == "shell_monkey_saddle");
    CHECK(f.check_ids().size() == 7);
}

TEST_CASE("empty check list gives an empty report") {
    auto f = parse_problem(R"({"contexts": {"c": {"independents": ["x"]}}, "checks": []})");
    auto r = run(f);
    CHECK(r.checks.empty());
    CHECK(r.all_matched());
    CHECK(report_json({r})["summary"]["checks"] == 0);
}

TEST_CASE("small file runs with definitions, expectations and statuses") {
    auto r = run(parse_problem(kSmall));
    REQUIRE(r.checks.size() == 4);
    CHECK(r.checks[0].status == "OK");
    CHECK(r.checks[1].status == "FAIL");
    CHECK(r.checks[1].matched);
    CHECK_FALSE(r.checks[1].witness.empty());
    CHECK(r.checks[2].numbers["value"] == 2);
    CHECK(r.checks[3].status == "OK");
    CHECK(r.all_matched());
}

TEST_CASE("unknown identifiers are reported with their location") {
    auto e = parse_error("{\"contexts\": {\"c\": {\"independents\": [\"x\"]}},\n\"checks\": [\n  {\"id\": \"a\", \"op\": "
                         "\"identity\", \"expr\": \"x + q\"}]}");
    CHECK(e.kind() == "UnknownReference");
    CHECK(e.where.path == "/checks/0/expr");
    CHECK(e.where.line == 3);
    CHECK(e.where.column == 42);
}

TEST_CASE("parse error kinds") {
    auto json = parse_error("{\"contexts\": {},\n \"checks\": [,]}");
    CHECK(json.kind() == "SyntaxError");
    CHECK(json.where.line == 2);
    auto expr = parse_error(R"({"contexts": {"c": {"independents": ["x"]}}, "checks": [{"id": "a", "op": "identity", "expr": "x +* 1"}]})");
    CHECK(expr.kind() == "SyntaxError");
    CHECK(expr.where.column > 90);
    auto obj = parse_error(R"({"contexts": {"c": {"independents": ["x"]}}, "checks": [{"id": "a", "op": "cartan", "system": "nope"}]})");
    CHECK(obj.kind() == "UnknownReference");
    auto op = parse_error(R"({"contexts": {"c": {}}, "checks": [{"id": "a", "op": "frobnicate"}]})");
    CHECK(op.kind() == "SyntaxError");
    auto dup = parse_error(R"({"contexts": {"c": {}}, "checks": [{"id": "a", "op": "canonical", "expr": "1"},
                                                                  {"id": "a", "op": "canonical", "expr": "2"}]})");
    CHECK(dup.kind() == "SyntaxError");
    auto cyc = parse_error(R"({"contexts": {"c": {"definitions": {"a": "b", "b": "a + 1"}}}, "checks": []})");
    CHECK(cyc.kind() == "UnknownReference");
    auto mismatch = parse_error(R"({"contexts": {"c": {"independents": ["x"], "dependents": {"u": ["x"]}},
                                                 "d": {"independents": ["y"]}},
                                    "objects": {"s": {"type": "system", "context": "c", "equations": ["u[x] = 0"]}},
                                    "checks": [{"id": "a", "op": "cartan", "system": "s", "context": "d"}]})");
    CHECK(mismatch.kind() == "ContextMismatch");
    auto ext = parse_error(R"({"contexts": {"c": {"independents": ["x"], "dependents": {"u": ["x"]}},
                                            "d": {"independents": ["x"], "dependents": {"u": ["x"]}}},
                               "objects": {"s": {"type": "system", "context": "c", "equations": ["u[x] = 0"]},
                                           "t": {"type": "system", "context": "d", "extends": "s", "prolong": 1}},
                               "checks": []})");
    CHECK(ext.kind() == "ContextMismatch");
    auto deep = parse_error(R"({"contexts": {"c": {"independents": ["x"], "dependents": {"u": ["x"]}, "order": 1}},
                                "checks": [{"id": "a", "op": "canonical", "expr": "u[x,x]"}]})");
    CHECK(deep.kind() == "UnknownReference");
    auto field = parse_error(R"({"contexts": {"c": {}}, "checks": [{"id": "a", "op": "canonical", "expr": "1", "bogus": 1}]})");
    CHECK(field.kind() == "SyntaxError");
    CHECK(field.where.path == "/checks/0/bogus");
}

TEST_CASE("render round trip") {
    for (const char* name : {"shell_monkey_saddle.json", "hamilton_jacobi.json", "lie_invariants.json"}) {
        auto f = load_problem(corpus(name));
        auto g = parse_problem(render(f), f.source());
        CHECK(f == g);
        CHECK(render(g) == render(f));
    }
    auto s = parse_problem(kSmall);
    CHECK(parse_problem(render(s)) == s);
}

TEST_CASE("only filter and errors inside checks") {
    auto f = load_problem(corpus("hamilton_jacobi.json"));
    auto boards = run(f, {"*_board", 0});
    CHECK(boards.checks.size() == 7);
    for (const auto& c : boards.checks) CHECK(c.op == "janet_board");
    auto none = run(f, {"shell_*", 0});
    CHECK(none.checks.empty());
    auto capped = run(f, {"hj_four_form", 1});
    REQUIRE(capped.checks.size() == 1);
    CHECK(capped.checks[0].status == "ERROR");
    CHECK(capped.checks[0].error_kind == "OrderOverflow");
    CHECK_FALSE(capped.all_matched());
}

TEST_CASE("a mutated sign turns exactly one check red") {
    std::string text = slurp(corpus("chain_frenet.json"));
    auto k = text.find("\"-1/ch\"", text.find("\"Q\": ["));
    REQUIRE(k != std::string::npos);
    text.replace(k, 7, "\"1/ch\"");
    auto r = run(parse_problem(text));
    int red = 0;
    for (const auto& c : r.checks) red += c.matched ? 0 : 1;
    CHECK(red == 1);
    CHECK_FALSE(r.all_matched());
}

TEST_CASE("json report is byte stable for a fixed seed") {
    auto f = load_problem(corpus("shell_systems.json"));
    std::string a = report_json({run(f)}).dump(2);
    std::string b = report_json({run(load_problem(corpus("shell_systems.json")))}).dump(2);
    CHECK(a == b);
    CHECK(report_json({run(f)}, true)["files"][0]["checks"][0].contains("timing_ms"));
}

TEST_CASE("ops table covers every module") {
    auto ops = op_names();
    for (const char* op : {"identity", "spencer", "invariant", "characters", "janet_board", "gauss_codazzi",
                           "syzygy", "hj_closure", "phs", "automorphic"})
        CHECK(std::find(ops.begin(), ops.end(), op) != ops.end());
}
