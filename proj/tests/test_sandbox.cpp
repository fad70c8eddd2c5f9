#include "support.hpp"

#include "toolflow/sandbox.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <fstream>
#include <thread>

using namespace toolflow;
using testing::make_instruction;
using testing::make_tool;

namespace {

const char* kTwoTools = R"({
  "id": "two",
  "instruction": "weather and flights",
  "tools": [
    {"name": "weather", "description": "w", "params": [{"name": "city", "required": true}]},
    {"name": "flights", "description": "f"}
  ],
  "behaviors": {
    "weather": [
      {"kind": "error", "code": 500, "message": "server error", "repeat": "once"},
      {"kind": "success", "payload": "sunny 29C", "repeat": "forever"}
    ],
    "flights": [{"kind": "verbose", "payload": "flight UA123 $240", "filler_chars": 8000}]
  },
  "pass_condition": {"contains-all": ["29", "sunny"]}
})";

Args city(const std::string& c) { return {{"city", c}}; }

Episode finished_with(const Scenario& s, const std::string& answer) {
    auto e = new_episode(s.instruction, s.tools, 30, "sum2act");
    e.steps.push_back({Action::finish(answer), std::nullopt, {}, 0, ""});
    e.terminal = Terminal{TerminalKind::Finished, answer, {}};
    return e;
}

}  // namespace

TEST_CASE("a two-tool scenario loads") {
    auto s = parse_scenario(kTwoTools);
    CHECK(s.id == "two");
    CHECK(s.instruction.id == "two");
    CHECK(s.instruction.text == "weather and flights");
    CHECK(s.tools.size() == 2);
    CHECK(s.behaviors.size() == 2);
    CHECK(s.behaviors.at("weather").size() == 2);
    CHECK(s.pass_condition == PassCondition{PassKind::ContainsAll, {"29", "sunny"}, ""});
    CHECK_FALSE(s.policy);
}

TEST_CASE("behaviors for an undeclared tool name it") {
    auto j = nlohmann::json::parse(kTwoTools);
    j["behaviors"]["x"] = nlohmann::json::array({{{"kind", "success"}, {"payload", "p"}}});
    try {
        parse_scenario(j.dump());
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("'x'") != std::string::npos);
    }
}

TEST_CASE("scenario schema errors") {
    auto j = nlohmann::json::parse(kTwoTools);
    auto bad_kind = j;
    bad_kind["behaviors"]["flights"][0]["kind"] = "explode";
    CHECK_THROWS_AS(parse_scenario(bad_kind.dump()), ParseError);

    auto empty_list = j;
    empty_list["behaviors"]["flights"] = nlohmann::json::array();
    CHECK_THROWS_AS(parse_scenario(empty_list.dump()), ValidationError);

    auto short_filler = j;
    short_filler["behaviors"]["flights"][0]["filler_chars"] = 3;
    CHECK_THROWS_AS(parse_scenario(short_filler.dump()), ValidationError);

    auto no_condition = j;
    no_condition.erase("pass_condition");
    CHECK_THROWS_AS(parse_scenario(no_condition.dump()), ParseError);

    CHECK_THROWS_AS(parse_scenario("{"), ParseError);
}

TEST_CASE("pass conditions of each kind") {
    PassCondition all{PassKind::ContainsAll, {"sunny", "29"}, ""};
    CHECK(all.matches("It is sunny, 29°C in Miami"));
    CHECK_FALSE(all.matches("unknown"));
    PassCondition re{PassKind::Regex, {}, R"(\b29\s*C\b)"};
    CHECK(re.matches("sunny 29 C"));
    CHECK_FALSE(re.matches("sunny 290C"));
    PassCondition exact{PassKind::Exact, {}, "42"};
    CHECK(exact.matches("42"));
    CHECK_FALSE(exact.matches("42 "));

    auto j = nlohmann::json::parse(kTwoTools);
    j["pass_condition"] = {{"regex", "sunny"}};
    CHECK(parse_scenario(j.dump()).pass_condition.kind == PassKind::Regex);
    j["pass_condition"] = {{"exact", "x"}};
    CHECK(parse_scenario(j.dump()).pass_condition.text == "x");
}

TEST_CASE("behaviors are consumed in order") {
    auto s = parse_scenario(kTwoTools);
    SandboxSession session(s);
    auto first = session.invoke("weather", city("Miami"));
    CHECK(first.status == ObservationStatus::ToolError);
    CHECK(first.error_code == 500);
    CHECK(first.error_descriptor() == "code 500: server error");
    auto second = session.invoke("weather", city("Miami"));
    CHECK(second.ok());
    CHECK(second.payload == "sunny 29C");
    CHECK(session.invoke("weather", city("Miami")).payload == "sunny 29C");
    CHECK(session.consumed("weather") == 1);
}

TEST_CASE("a missing required parameter does not consume a behavior") {
    auto s = parse_scenario(kTwoTools);
    SandboxSession session(s);
    auto o = session.invoke("weather", {});
    CHECK(o.status == ObservationStatus::ToolError);
    CHECK(o.error == "missing required parameter: city");
    CHECK(session.consumed("weather") == 0);
    CHECK(session.invoke("weather", city("Miami")).status == ObservationStatus::ToolError);
}

TEST_CASE("unknown tools are reported, not thrown") {
    auto s = parse_scenario(kTwoTools);
    SandboxSession session(s);
    auto o = session.invoke("nope", {});
    CHECK(o.status == ObservationStatus::ToolError);
    CHECK(o.error == "unknown tool: nope");
}

TEST_CASE("verbose payloads embed the relevant text") {
    auto s = parse_scenario(kTwoTools);
    SandboxSession session(s);
    auto o = session.invoke("flights", {});
    CHECK(o.ok());
    CHECK(o.payload.size() == 8000);
    const auto at = o.payload.find("flight UA123 $240");
    REQUIRE(at != std::string::npos);
    CHECK(at > 1000);
    CHECK(verbose_payload("abc", 2) == "abc");
    CHECK(verbose_payload("abc", 500) == verbose_payload("abc", 500));
}

TEST_CASE("timeouts report the simulated latency") {
    Scenario s;
    s.id = "t";
    s.instruction = make_instruction("q", "t");
    s.tools = {make_tool("slow", "")};
    s.behaviors["slow"] = {Behavior{BehaviorKind::Timeout, "", 500, "", 0, Repeat::Forever}};
    validate_scenario(s);
    SandboxSession session(s);
    auto o = session.invoke("slow", {});
    CHECK(o.status == ObservationStatus::Timeout);
    CHECK(o.latency == kSimulatedTimeout);
}

TEST_CASE("check_pass requires a finished episode with a matching answer") {
    auto s = parse_scenario(kTwoTools);
    CHECK(check_pass(s, finished_with(s, "It is sunny, 29°C in Miami")));
    CHECK_FALSE(check_pass(s, finished_with(s, "unknown")));

    std::mt19937 rng(4);
    for (int i = 0; i < 200; ++i) {
        auto e = testing::random_episode(rng);
        if (!e.finished()) CHECK_FALSE(check_pass(s, e));
    }
    auto exhausted = new_episode(s.instruction, s.tools, 30, "sum2act");
    exhausted.terminal = Terminal{TerminalKind::BudgetExhausted, "sunny 29", {}};
    CHECK_FALSE(check_pass(s, exhausted));
}

TEST_CASE("two sessions with the same calls see the same observations") {
    auto s = parse_scenario(kTwoTools);
    std::mt19937 rng(8);
    std::vector<std::pair<std::string, Args>> calls;
    for (int i = 0; i < 60; ++i) {
        switch (rng() % 3) {
            case 0: calls.push_back({"weather", city("Miami")}); break;
            case 1: calls.push_back({"weather", {}}); break;
            default: calls.push_back({"flights", {}}); break;
        }
    }
    SandboxSession a(s), b(s);
    for (const auto& [tool, args] : calls) CHECK(a.invoke(tool, args) == b.invoke(tool, args));
}

TEST_CASE("once-behaviors are consumed one per valid call") {
    std::mt19937 rng(9);
    for (int trial = 0; trial < 100; ++trial) {
        Scenario s;
        s.id = "c";
        s.instruction = make_instruction("q", "c");
        s.tools = {make_tool("a", "", {"k"}), make_tool("b", "")};
        const std::size_t once_a = 1 + rng() % 6;
        const std::size_t once_b = 1 + rng() % 6;
        for (std::size_t i = 0; i < once_a; ++i) s.behaviors["a"].push_back({BehaviorKind::Success, "a" + std::to_string(i), 500, "", 0, Repeat::Once});
        s.behaviors["a"].push_back({BehaviorKind::Success, "rest", 500, "", 0, Repeat::Forever});
        for (std::size_t i = 0; i < once_b; ++i) s.behaviors["b"].push_back({BehaviorKind::Error, "", 503, "e", 0, Repeat::Once});
        validate_scenario(s);

        SandboxSession session(s);
        std::size_t valid_a = 0, valid_b = 0;
        for (int i = 0; i < 20; ++i) {
            switch (rng() % 3) {
                case 0:
                    session.invoke("a", {{"k", std::string("v")}});
                    ++valid_a;
                    break;
                case 1: session.invoke("a", {}); break;  // invalid: missing k
                default:
                    session.invoke("b", {});
                    ++valid_b;
                    break;
            }
            CHECK(session.consumed("a") == std::min(valid_a, once_a));
            CHECK(session.consumed("b") == std::min(valid_b, once_b));
        }
    }
}

TEST_CASE("concurrent sessions over one scenario do not interfere") {
    const auto s = parse_scenario(kTwoTools);
    std::vector<std::vector<Observation>> results(8);
    std::vector<std::thread> threads;
    for (std::size_t t = 0; t < results.size(); ++t) {
        threads.emplace_back([&, t] {
            SandboxSession session(s);
            for (int i = 0; i < 200; ++i) results[t].push_back(session.invoke("weather", city("Miami")));
        });
    }
    for (auto& th : threads) th.join();
    for (const auto& r : results) {
        REQUIRE(r.size() == 200);
        CHECK(r[0].status == ObservationStatus::ToolError);
        for (std::size_t i = 1; i < r.size(); ++i) CHECK(r[i].payload == "sunny 29C");
    }
}

TEST_CASE("the shipped corpus loads") {
    auto suite = load_scenario_dir(testing::scenarios_dir() / "suite");
    CHECK(suite.size() >= 20);
    for (const auto& s : suite) {
        CAPTURE(s.id);
        REQUIRE(s.policy);
        CHECK(std::filesystem::exists(*s.policy));
        CHECK(s.instruction.subset_label);
    }
    CHECK(load_scenario_dir(testing::scenarios_dir() / "long_horizon").size() == 5);
}

TEST_CASE("a broken file aborts loading the directory") {
    auto dir = testing::temp_dir("sandbox");
    std::ofstream(dir / "a.json") << kTwoTools;
    std::ofstream(dir / "b.json") << "{";
    CHECK_THROWS_AS(load_scenario_dir(dir), ParseError);
    std::filesystem::remove_all(dir);
}

TEST_CASE("endpoint specs") {
    auto spec = parse_endpoint_spec(R"({"timeout_ms": 2000, "tools": {
        "weather": {"url": "http://127.0.0.1:9/w/{city}", "auth_env": "WEATHER_TOKEN"},
        "post": {"url": "https://example.com/p", "method": "POST"}}})");
    CHECK(spec.timeout.count() == 2000);
    CHECK(spec.tools.at("weather").method == "GET");
    CHECK(spec.tools.at("post").method == "POST");
    CHECK_THROWS_AS(parse_endpoint_spec(R"({"tools": {"x": {"url": "http://a", "method": "PUT"}}})"), ParseError);
    CHECK_THROWS_AS(parse_endpoint_spec(R"({"tools": {"x": {}}})"), ParseError);
    CHECK(invoke_live(spec, "missing", {}).error == "unknown tool: missing");
}
