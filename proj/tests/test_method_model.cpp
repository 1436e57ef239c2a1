#include <catch_amalgamated.hpp>

#include <json.hpp>

#include "support/files.hpp"
#include "xmethod/method_model.hpp"
#include "xmethod/tokenizer.hpp"

using namespace xmethod;
using testsupport::fixture;
using testsupport::slurp;

namespace {

LongMethod motivating() {
    const auto path = fixture("motivating/AllStoreHolder.java");
    return parse_method(slurp(path), {150, 166}, path);
}

LongMethod whole_file(const std::string& rel) {
    const auto text = slurp(fixture(rel));
    return parse_method(text, {1, static_cast<int>(split_lines(text).size())}, fixture(rel));
}

}  // namespace

TEST_CASE("motivating method: length, statements and depths") {
    const auto m = motivating();
    CHECK(m.length() == 16);
    CHECK(m.name == "entityGetProperties");
    CHECK(m.return_type == "Value[]");
    CHECK(m.throws_clause == "EntityNotFoundException");
    REQUIRE(m.parameters.size() == 3);
    CHECK(m.parameters[1].type_text == "int[]");
    CHECK(m.parameters[1].name == "propertyKeys");
    CHECK(!m.doc_comment);

    REQUIRE(m.statements.size() == 14);
    CHECK(m.countable_statements() == 13);
    for (const auto& s : m.statements) {
        const bool in_loop = s.start_line == 161 || s.start_line == 162;
        CHECK(s.scope_depth == (in_loop ? 1 : 0));
        CHECK(s.start_line >= 151);
        CHECK(s.end_line <= 165);
    }
    CHECK(m.statement_at(159) == -1);
    CHECK(m.statements[static_cast<std::size_t>(m.statement_at(160))].loop_header);
    CHECK(m.statements[static_cast<std::size_t>(m.statement_at(163))].kind == StatementKind::block_close);
    CHECK(m.statements[static_cast<std::size_t>(m.statement_at(157))].kind == StatementKind::declaration);
    CHECK(m.statements[static_cast<std::size_t>(m.statement_at(157))].defs == std::set<std::string>{"values"});
    CHECK(m.statements[static_cast<std::size_t>(m.statement_at(165))].kind == StatementKind::return_stmt);
}

TEST_CASE("motivating method: values is live after 157-158") {
    const auto m = motivating();
    CHECK(live_out(m, {157, 158}) == std::set<std::string>{"values"});
    CHECK(live_out(m, m.body()).empty());

    const auto chains = def_use(m);
    const auto* values = chains.find("values");
    REQUIRE(values);
    const int after = m.statement_at(158);
    CHECK(std::any_of(values->events.begin(), values->events.end(),
                      [&](const DefUseEvent& e) { return !e.def && e.statement > after; }));
}

TEST_CASE("scope_depth_at") {
    const auto m = motivating();
    CHECK(scope_depth_at(m, 151) == 0);
    CHECK(scope_depth_at(m, 161) == 1);
    CHECK(scope_depth_at(m, 159) == 0);
    CHECK_THROWS_MATCHES(scope_depth_at(m, 150), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) { return e.code() == Errc::line_not_in_body; }));
    CHECK_THROWS_AS(scope_depth_at(m, 166), Error);

    const auto nested = whole_file("model/Nested.java");
    CHECK(scope_depth_at(nested, 2) == 0);
    CHECK(scope_depth_at(nested, 4) == 1);
    CHECK(scope_depth_at(nested, 5) == 2);
    CHECK(scope_depth_at(nested, 6) == 3);
    CHECK(scope_depth_at(nested, 8) == 1);
    CHECK(scope_depth_at(nested, 10) == 0);
}

TEST_CASE("empty and unbalanced methods") {
    auto code_of = [](std::string_view src, LineRange r) {
        try {
            parse_method(src, r);
        } catch (const Error& e) {
            return e.code();
        }
        return Errc::bad_input;
    };
    CHECK(code_of("void f() { }\n", {1, 1}) == Errc::empty_body);
    CHECK(code_of("void f()\n{\n}\n", {1, 3}) == Errc::empty_body);
    CHECK(code_of("void f() {\n  // nothing\n}\n", {1, 3}) == Errc::empty_body);
    CHECK(code_of("void f() {\n  if (x) {\n    y();\n}\n", {1, 4}) == Errc::unbalanced_braces);
    CHECK(code_of("void f() {\n  y();\n}\n}\n", {1, 4}) == Errc::unbalanced_braces);
    CHECK(code_of("void f() {\n  y();\n}\n", {2, 9}) == Errc::invalid_range);
}

TEST_CASE("def_use on a two-statement body") {
    const auto m = parse_method("void f() {\n    int x = 0; \n    y = x + 1;\n}\n", {1, 4});
    const auto chains = def_use(m);
    const auto* x = chains.find("x");
    const auto* y = chains.find("y");
    REQUIRE(x);
    REQUIRE(y);
    REQUIRE(x->events.size() == 2);
    CHECK((x->events[0].statement == 0 && x->events[0].def));
    CHECK((x->events[1].statement == 1 && !x->events[1].def));
    REQUIRE(y->events.size() == 1);
    CHECK((y->events[0].statement == 1 && y->events[0].def));
    CHECK(y->external);
    CHECK(!x->external);
}

TEST_CASE("while-loop fixture matches its hand oracle") {
    const auto oracle = nlohmann::json::parse(slurp(fixture("model/WhileLoop.oracle.json")));
    const auto m = parse_method(slurp(fixture("model/WhileLoop.java")),
                                {oracle["start_line"].get<int>(), oracle["end_line"].get<int>()});
    const auto& expected = oracle["statements"];
    REQUIRE(m.statements.size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
        INFO("statement " << i);
        const auto& s = m.statements[i];
        const auto& e = expected[i];
        CHECK(s.start_line == e["start"].get<int>());
        CHECK(s.end_line == e["end"].get<int>());
        CHECK(s.scope_depth == e["depth"].get<int>());
        CHECK(std::string(to_string(s.kind)) == e["kind"].get<std::string>());
        CHECK(s.defs == e["defs"].get<std::set<std::string>>());
        CHECK(s.uses == e["uses"].get<std::set<std::string>>());
    }
}

TEST_CASE("shadowed names resolve to the innermost declaration") {
    const auto oracle = nlohmann::json::parse(slurp(fixture("model/Shadowing.oracle.json")));
    const auto m = parse_method(slurp(fixture("model/Shadowing.java")),
                                {oracle["method"][0].get<int>(), oracle["method"][1].get<int>()});
    const auto chains = def_use(m);
    for (const auto& c : oracle["chains"]) {
        const auto name = c["name"].get<std::string>();
        INFO(name);
        const DefUseChain* chain = nullptr;
        if (c["decl_line"].is_null()) {
            chain = chains.find(name, -1);
        } else {
            chain = chains.find(name, m.statement_at(c["decl_line"].get<int>()));
        }
        REQUIRE(chain);
        CHECK(chain->external == c["decl_line"].is_null());
        std::vector<std::pair<int, bool>> got;
        for (const auto& e : chain->events) got.emplace_back(m.statements[static_cast<std::size_t>(e.statement)].start_line, e.def);
        std::vector<std::pair<int, bool>> want;
        for (const auto& e : c["events"]) want.emplace_back(e[0].get<int>(), e[1].get<std::string>() == "def");
        CHECK(got == want);
    }
    for (const auto& [line, depth] : oracle["depths"].items()) {
        CHECK(scope_depth_at(m, std::stoi(line)) == depth.get<int>());
    }
    CHECK(unresolved_accesses(m).empty());
}

TEST_CASE("live_out matches an exhaustive later-use scan") {
    const auto m = parse_method(
        "void f(int seed) {\n"
        "    int a = seed;\n"
        "    int b = 0;\n"
        "    a = a * 2;\n"
        "    b = a + 1;\n"
        "    int unused = b;\n"
        "    print(a, b);\n"
        "}\n",
        {1, 8});
    const LineRange frag{4, 5};
    CHECK(live_out(m, frag) == std::set<std::string>{"a", "b"});

    // Independent scan: names with a def in the fragment and a textual use after it.
    std::set<std::string> brute;
    for (int l = frag.start; l <= frag.end; ++l) {
        for (const auto& d : m.statements[static_cast<std::size_t>(m.statement_at(l))].defs) {
            for (int k = frag.end + 1; k < m.end_line; ++k) {
                const int s = m.statement_at(k);
                if (s >= 0 && m.statements[static_cast<std::size_t>(s)].uses.count(d)) brute.insert(d);
            }
        }
    }
    CHECK(brute == live_out(m, frag));
    CHECK(live_in(m, frag) == std::set<std::string>{"a"});
}

TEST_CASE("loop-carried values are live out") {
    const auto m = parse_method(
        "int f(int n) {\n"
        "    int acc = 0;\n"
        "    for (int i = 0; i < n; i++) {\n"
        "        int prev = acc;\n"
        "        acc = prev + i;\n"
        "    }\n"
        "    return 1;\n"
        "}\n",
        {1, 8});
    CHECK(live_out(m, {5, 5}) == std::set<std::string>{"acc"});
}

TEST_CASE("lambda and anonymous bodies stay opaque") {
    const auto m = parse_method(
        "void f(List<String> xs) {\n"
        "    List<String> out = new ArrayList<>();\n"
        "    xs.forEach(x -> {\n"
        "        String y = x.trim();\n"
        "        out.add(y);\n"
        "    });\n"
        "    Runnable r = new Runnable() {\n"
        "        public void run() { out.clear(); }\n"
        "    };\n"
        "    r.run();\n"
        "}\n",
        {1, 11});
    REQUIRE(m.statements.size() == 4);
    CHECK(m.statements[1].start_line == 3);
    CHECK(m.statements[1].end_line == 6);
    CHECK(m.statements[1].scope_depth == 0);
    CHECK(m.statements[1].uses == std::set<std::string>{"out", "xs"});
    CHECK(m.statements[2].kind == StatementKind::declaration);
    CHECK(m.statements[2].defs == std::set<std::string>{"r"});
    CHECK(unresolved_accesses(m).empty());
}

TEST_CASE("control-flow bookkeeping") {
    const auto m = parse_method(
        "void f(int[] xs) {\n"
        "    outer:\n"
        "    for (int x : xs) {\n"
        "        try {\n"
        "            if (x < 0) break outer;\n"
        "            if (x == 0) continue;\n"
        "            if (x > 9) throw new IllegalStateException();\n"
        "        } catch (RuntimeException e) {\n"
        "            return;\n"
        "        }\n"
        "        do {\n"
        "            x--;\n"
        "        } while (x > 0);\n"
        "    }\n"
        "}\n",
        {1, 15});
    auto at = [&](int line) -> const Statement& { return m.statements[static_cast<std::size_t>(m.statement_at(line))]; };
    CHECK(at(5).jump_targets == std::vector<int>{m.statement_at(3)});
    CHECK(at(6).jump_targets == std::vector<int>{m.statement_at(3)});
    CHECK(at(7).throw_trys == std::vector<int>{m.statement_at(4)});
    CHECK(at(8).continuation);
    CHECK(at(8).kind == StatementKind::try_boundary);
    CHECK(at(9).has_return);
    CHECK(at(13).continuation);
    CHECK(at(11).loop_header);
    CHECK(at(12).enclosing_loops.size() == 2);
    CHECK(at(3).defs == std::set<std::string>{"x"});
    CHECK(unresolved_accesses(m).empty());
}

TEST_CASE("names used outside their block are unresolved") {
    const auto m = parse_method(
        "void f() {\n"
        "    {\n"
        "        int a = 1;\n"
        "    }\n"
        "    a = 2;\n"
        "}\n",
        {1, 6});
    REQUIRE(unresolved_accesses(m).size() == 1);
    CHECK(m.variables[static_cast<std::size_t>(unresolved_accesses(m)[0])].name == "a");
}

TEST_CASE("find_methods and locate_method") {
    const auto text = slurp(fixture("motivating/AllStoreHolder.java"));
    const auto methods = find_methods(text);
    const auto it = std::find_if(methods.begin(), methods.end(),
                                 [](const MethodLocation& m) { return m.name == "entityGetProperties"; });
    REQUIRE(it != methods.end());
    CHECK(it->start_line == 150);
    CHECK(it->end_line == 166);
    const auto at = locate_method(text, 160);
    REQUIRE(at);
    CHECK(at->name == "entityGetProperties");
    CHECK(locate_method(text, "assertOpen"));
    CHECK(!locate_method(text, 3));
}

TEST_CASE("doc comments above annotations are captured") {
    const std::string src =
        "class A {\n"
        "    /**\n"
        "     * Sums things.\n"
        "     */\n"
        "    @Override\n"
        "    int sum(int a) {\n"
        "        return a;\n"
        "    }\n"
        "}\n";
    const auto loc = locate_method(src, "sum");
    REQUIRE(loc);
    CHECK(loc->start_line == 6);
    const auto m = parse_method(src, {loc->start_line, loc->end_line});
    REQUIRE(m.doc_comment);
    CHECK(m.doc_comment->find("Sums things.") != std::string::npos);
}
