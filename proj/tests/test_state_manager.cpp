#include "support.hpp"

#include "toolflow/state_manager.hpp"

#include <doctest.h>

using namespace toolflow;
using testing::literal;
using testing::make_instruction;
using testing::regex;
using testing::scripted;

namespace {

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

Observation weather_ok(std::string payload = "Miami: sunny, 29C") {
    return Observation::success("get_weather", {{"city", std::string("Miami")}}, std::move(payload));
}

Observation weather_500() {
    return Observation::failure(ObservationStatus::ToolError, "get_weather", {{"city", std::string("Miami")}},
                                "internal server error", 500);
}

}  // namespace

TEST_CASE("payload truncation") {
    const std::string small(200, 'a');
    CHECK(truncate_payload(small, 4096) == small);

    const std::string big(10000, 'b');
    const auto t = truncate_payload(big, 4096);
    CHECK(t == std::string(4096, 'b') + "[truncated 5904 chars]");

    // Never cuts inside a multi-byte character.
    const std::string wide = "\xE4\xB8\xAD\xE4\xB8\xAD";  // two 3-byte characters
    CHECK(truncate_payload(wide, 4) == "\xE4\xB8\xAD[truncated 3 chars]");
}

TEST_CASE("state prompt contents") {
    State s;
    s.current_results.push_back({"earlier fact", 1});
    const auto small = build_state_prompt(make_instruction("weather?"), s, weather_ok(std::string(200, 'x')));
    CHECK(small.rfind(std::string(kStateUpdateHeader), 0) == 0);
    CHECK(contains(small, "weather?"));
    CHECK(contains(small, "earlier fact"));
    CHECK(contains(small, std::string(200, 'x')));
    CHECK_FALSE(contains(small, "[truncated"));
    CHECK(contains(small, std::string(kLatestObservationLabel)));
    // The observation is the final section.
    CHECK(small.find(std::string(kLatestObservationLabel)) > small.find("earlier fact"));

    const auto big = build_state_prompt(make_instruction("q"), State{}, weather_ok(std::string(10000, 'y')));
    CHECK(contains(big, "[truncated 5904 chars]"));
    CHECK_FALSE(contains(big, std::string(4097, 'y')));

    const auto failed = build_state_prompt(make_instruction("q"), State{}, weather_500());
    CHECK(contains(failed, "code 500: internal server error"));
    CHECK(contains(failed, "ToolError"));
}

TEST_CASE("a success verdict adds one result") {
    auto p = scripted({literal(std::string(kStateUpdateHeader), R"({"verdict":"Success","summary":"Miami: sunny, 29°C"})")});
    auto out = update(p, make_instruction("q"), State{}, weather_ok(), 1);
    CHECK_FALSE(out.used_fallback);
    REQUIRE(out.state.current_results.size() == 1);
    CHECK(out.state.current_results[0].text == "Miami: sunny, 29°C");
    CHECK(out.state.current_results[0].step == 1);
    CHECK(out.state.failure_history.empty());
}

TEST_CASE("a failure verdict records the tool, digest and reason") {
    auto p = scripted({literal(std::string(kStateUpdateHeader),
                               R"({"verdict":"failure","reason":"endpoint returned server error"})")});
    auto obs = weather_500();
    auto out = update(p, make_instruction("q"), State{}, obs, 1);
    CHECK(out.state.current_results.empty());
    REQUIRE(out.state.failure_history.size() == 1);
    const auto& f = out.state.failure_history[0];
    CHECK(f.tool_name == "get_weather");
    CHECK(f.args_digest == args_digest(obs.args_echo));
    CHECK(f.reason == "endpoint returned server error");
    CHECK(f.step == 1);
}

TEST_CASE("the same failed call is recorded once") {
    auto p = scripted({literal(std::string(kStateUpdateHeader), R"({"verdict":"Failure","reason":"down"})")});
    auto first = update(p, make_instruction("q"), State{}, weather_500(), 1);
    auto second = update(p, make_instruction("q"), first.state, weather_500(), 2);
    CHECK(second.state.failure_history.size() == 1);

    auto other = weather_500();
    other.args_echo["city"] = std::string("Tampa");
    auto third = update(p, make_instruction("q"), second.state, other, 3);
    CHECK(third.state.failure_history.size() == 2);
}

TEST_CASE("update leaves its input state untouched") {
    auto p = scripted({regex(R"(Latest observation:[\s\S]*ToolError)", R"({"verdict":"Failure","reason":"r"})"),
                       literal(std::string(kStateUpdateHeader), R"({"verdict":"Success","summary":"s"})")});
    std::mt19937 rng(1);
    State s;
    for (int step = 1; step <= 40; ++step) {
        const State before = s;
        auto obs = (rng() % 2) ? weather_ok(testing::random_text(rng, 30)) : weather_500();
        obs.args_echo["n"] = static_cast<std::int64_t>(rng() % 5);
        auto out = update(p, make_instruction("q"), s, obs, step);
        CHECK(s == before);
        CHECK(out.state.failure_history.size() >= s.failure_history.size());
        s = out.state;
    }
}

TEST_CASE("unusable model output falls back to the transport status") {
    auto p = scripted({}, "I am not sure");
    auto ok = update(p, make_instruction("q"), State{}, weather_ok(std::string(300, 'z')), 1);
    CHECK(ok.used_fallback);
    CHECK(ok.retries == 2);
    REQUIRE(ok.state.current_results.size() == 1);
    CHECK(ok.state.current_results[0].text == std::string(200, 'z'));

    auto bad = update(p, make_instruction("q"), State{}, weather_500(), 1);
    REQUIRE(bad.state.failure_history.size() == 1);
    CHECK(bad.state.failure_history[0].reason == "code 500: internal server error");

    auto empty = fallback_update(weather_ok(""));
    CHECK(empty.verdict == Verdict::Success);
    CHECK(empty.result_entry == std::optional<std::string>("get_weather returned an empty response"));
}

TEST_CASE("a provider failure also falls back") {
    auto p = scripted({});
    auto out = update(p, make_instruction("q"), State{}, weather_500(), 1);
    CHECK(out.used_fallback);
    CHECK(out.retries == 0);
    CHECK(out.state.failure_history.size() == 1);
}

TEST_CASE("parse_state_update requires matching fields") {
    auto obs = weather_ok();
    CHECK_THROWS_AS(parse_state_update(R"({"verdict":"Success"})", obs), MalformedOutput);
    CHECK_THROWS_AS(parse_state_update(R"({"verdict":"Failure","summary":"x"})", obs), MalformedOutput);
    CHECK_THROWS_AS(parse_state_update(R"({"verdict":"Maybe","summary":"x"})", obs), MalformedOutput);
    auto u = parse_state_update(R"(ok: {"verdict":"SUCCESS","summary":"x"})", obs);
    CHECK(u.verdict == Verdict::Success);
}

TEST_CASE("enforce_cap is the identity when the state fits") {
    auto p = scripted({});
    State s;
    for (int i = 1; i <= 9; ++i) s.current_results.push_back({std::string(80, 'a' + i), i});
    REQUIRE(render_state(s).size() < 4096);
    CHECK(enforce_cap(p, s, 4096) == s);
    CHECK_THROWS_AS(enforce_cap(p, s, 511), ConfigError);
}

TEST_CASE("enforce_cap compresses many results below the cap") {
    std::mt19937 rng(2);
    for (bool model_helps : {true, false}) {
        auto p = model_helps ? scripted({literal(std::string(kStateCompressionHeader), R"({"summary":"merged facts"})")})
                             : scripted({}, "garbage");
        State s;
        std::size_t total = 0;
        for (int i = 1; i <= 20; ++i) {
            std::string text;
            while (text.size() < 450) text += testing::random_text(rng, 20) + " ";
            text = std::string(utf8_prefix(text, 450));
            total += text.size();
            s.current_results.push_back({text, i});
        }
        s.failure_history.push_back({"t", "0000000000000001", "boom", 3});
        CHECK(total > 8000);
        auto capped = enforce_cap(p, s, 4096);
        CHECK(render_state(capped).size() <= 4096);
        CHECK(capped.failure_history.size() == s.failure_history.size());
        CHECK_NOTHROW(validate_state(capped));
        // With a usable model summary the merge stops early and the newest result survives.
        if (model_helps) CHECK(capped.current_results.back() == s.current_results.back());
    }
}

TEST_CASE("long failure reasons are shortened without dropping entries") {
    auto p = scripted({});
    State s;
    for (int i = 1; i <= 10; ++i) {
        s.failure_history.push_back({"tool" + std::to_string(i), "000000000000000" + std::to_string(i % 10),
                                     std::string(500, 'r'), i});
    }
    REQUIRE(render_state(s).size() > 4096);
    auto capped = enforce_cap(p, s, 4096);
    REQUIRE(capped.failure_history.size() == 10);
    for (const auto& f : capped.failure_history) CHECK(f.reason.size() <= 120);
    CHECK(render_state(capped).size() <= 4096);
}

TEST_CASE("a single oversized result is hard-truncated") {
    auto p = scripted({});
    State s;
    s.current_results.push_back({std::string(3000, 'a') + std::string(3000, 'b'), 4});
    auto capped = enforce_cap(p, s, 1024);
    CHECK(render_state(capped).size() <= 1024);
    REQUIRE(capped.current_results.size() == 1);
    CHECK(capped.current_results[0].text.rfind("...b", 0) == 0);
    CHECK(capped.current_results[0].step == 4);
}
