// Acceptance checks. Prints one PASS/FAIL/SKIP line per criterion and exits
// nonzero when any criterion fails.

#include "golden_tables.hpp"
#include "support.hpp"

#include "commands.hpp"
#include "toolflow/engine.hpp"
#include "toolflow/eval.hpp"
#include "toolflow/retriever.hpp"
#include "toolflow/router.hpp"
#include "toolflow/sandbox.hpp"
#include "toolflow/serialize.hpp"
#include "toolflow/state_manager.hpp"

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <sstream>

using namespace toolflow;
namespace fs = std::filesystem;

namespace {

enum class Status { Pass, Fail, Skip };

struct Check {
    Status verdict = Status::Pass;
    std::vector<std::string> problems;
    std::string note;

    void expect(bool ok, const std::string& what) {
        if (!ok) {
            verdict = Status::Fail;
            problems.push_back(what);
        }
    }
};

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

std::vector<Scenario> load_dir(const std::string& sub) { return load_scenario_dir(testing::scenarios_dir() / sub); }

Episode run_scenario(std::string_view method, const Scenario& s, const Provider& provider) {
    SandboxSession session(s);
    return run_method(method, provider, s.instruction, s.tools, EngineConfig::defaults_for(method), session);
}

std::vector<std::string> proposal_prompts(const RecordingProvider& rec) {
    std::vector<std::string> out;
    for (const auto& p : rec.prompts()) {
        if (p.rfind(std::string(kProposalHeader), 0) == 0 && !contains(p, "could not be parsed")) out.push_back(p);
    }
    return out;
}

// ----------------------------------------------------------------------------

Check table_averages() {
    Check c;
    auto check_row = [&](const std::string& name, const std::vector<double>& values, bool win, double printed) {
        std::vector<SubsetReport> reports;
        long double sum = 0;
        for (std::size_t i = 0; i < values.size(); ++i) {
            SubsetReport r{testing::kSubsets[i], std::nullopt, std::nullopt, 100};
            (win ? r.win_rate : r.pass_rate) = values[i];
            reports.push_back(r);
            sum += values[i];
        }
        auto row = aggregate(name, reports);
        const double avg = win ? *row.average_win : *row.average_pass;
        const double independent = static_cast<double>(sum / values.size());
        c.expect(std::abs(avg - independent) < 1e-9, name + ": mean differs from independent sum");
        c.expect(format_rate(avg) == format_rate(printed),
                 name + ": got " + format_rate(avg) + ", expected " + format_rate(printed));
    };
    for (const auto& g : testing::kPassTable) check_row(g.method, g.values, false, g.printed_average);
    for (const auto& g : testing::kWinTable) check_row(g.method, g.values, true, g.printed_average);
    for (const auto& g : testing::kAblationTable) {
        check_row(g.method + " pass", g.pass, false, g.printed_pass_average);
        check_row(g.method + " win", g.win, true, g.printed_win_average);
    }
    c.note = "11 averages reproduced";
    return c;
}

Check scenario_suite() {
    Check c;
    auto suite = load_dir("suite");
    c.expect(suite.size() >= 20, "only " + std::to_string(suite.size()) + " scenarios shipped");
    int passed = 0;
    for (const auto& s : suite) {
        ScriptedProvider p(load_policy(*s.policy));
        auto e = run_scenario(kSum2Act, s, p);
        const bool ok = check_pass(s, e) && e.steps.size() <= 30;
        passed += ok;
        c.expect(ok, s.id + " did not pass");
    }

    ScriptedProvider never(load_policy(testing::scenarios_dir() / "policies" / "never_finish.jsonl"));
    auto weather = load_scenario(testing::scenarios_dir() / "suite" / "weather_miami.json");
    auto e = run_scenario(kSum2Act, weather, never);
    c.expect(e.steps.size() == 30 && e.terminal && e.terminal->kind == TerminalKind::BudgetExhausted,
             "never-finishing policy stopped after " + std::to_string(e.steps.size()) + " steps");
    c.note = std::to_string(passed) + "/" + std::to_string(suite.size()) +
             " sum2act passes; never-finish stops at step " + std::to_string(e.steps.size());
    return c;
}

Check long_horizon() {
    Check c;
    auto scenarios = load_dir("long_horizon");
    c.expect(scenarios.size() >= 5, "fewer than 5 long-horizon scenarios");
    int sum2act = 0, react = 0;
    for (const auto& s : scenarios) {
        auto policy = load_policy(*s.policy);
        ScriptedProvider p1(policy), p2(policy);
        const bool a = check_pass(s, run_scenario(kSum2Act, s, p1));
        const bool b = check_pass(s, run_scenario(kReact, s, p2));
        sum2act += a;
        react += b;
        c.expect(a, s.id + ": sum2act did not pass");
        c.expect(!b, s.id + ": react passed although its window evicted the first result");
    }
    c.note = "sum2act " + std::to_string(sum2act) + "/" + std::to_string(scenarios.size()) + ", react " +
             std::to_string(react) + "/" + std::to_string(scenarios.size());
    return c;
}

Check search_information_loss() {
    Check c;
    auto s = load_scenario(testing::scenarios_dir() / "backtrack" / "backtrack_lisbon.json");
    const auto& failure_text = s.behaviors.at("primary_feed").front().message;
    auto policy = load_policy(*s.policy);

    ScriptedProvider dp(policy);
    RecordingProvider drec(dp);
    auto d = run_scenario(kDfsdt, s, drec);
    c.expect(d.steps.size() >= 2 && d.steps[0].observation && !d.steps[0].observation->ok(),
             "dfsdt first branch did not fail");
    std::string sibling;
    for (const auto& p : proposal_prompts(drec)) {
        if (contains(p, "attempt 2 of")) {
            sibling = p;
            break;
        }
    }
    c.expect(!sibling.empty(), "no sibling-branch prompt was issued");
    c.expect(!sibling.empty() && !contains(sibling, failure_text), "sibling prompt carries the failed observation");

    ScriptedProvider sp(policy);
    RecordingProvider srec(sp);
    auto e = run_scenario(kSum2Act, s, srec);
    auto prompts = proposal_prompts(srec);
    c.expect(prompts.size() >= 2 && !e.steps.empty(), "sum2act issued fewer than two proposals");
    if (prompts.size() >= 2 && !e.steps.empty()) {
        const auto& failures = e.steps[0].state.failure_history;
        c.expect(!failures.empty(), "sum2act recorded no failure at step 1");
        for (const auto& f : failures) {
            c.expect(contains(prompts[1], render_failure(f)), "step-2 prompt lacks failure entry " + f.tool_name);
        }
    }
    c.expect(check_pass(s, e), "sum2act did not answer the backtracking scenario");
    c.note = "sibling prompt excludes \"" + failure_text + "\"; sum2act step-2 prompt shows the failure";
    return c;
}

// Randomized model used to stress the state bound: random tool calls, verdicts
// with long summaries and reasons, occasional garbage.
class RandomModel final : public Provider {
public:
    explicit RandomModel(std::uint32_t seed) : rng_(seed) {}

    std::string complete(const CompletionRequest& req) const override {
        const auto prompt = render_prompt(req);
        if (prompt.rfind(std::string(kProposalHeader), 0) == 0) {
            if (rng_() % 20 == 0) return "let me think about it";
            if (rng_() % 12 == 0) return R"({"action":"Finish","args":{"Answer":"done"}})";
            return nlohmann::json{{"action", "t" + std::to_string(rng_() % 3)},
                                  {"args", {{"k", static_cast<int>(rng_() % 4)}}}}
                .dump();
        }
        if (prompt.rfind(std::string(kStateCompressionHeader), 0) == 0) {
            return nlohmann::json{{"summary", text(rng_() % 1500)}}.dump();
        }
        if (prompt.rfind(std::string(kStateUpdateHeader), 0) == 0) {
            switch (rng_() % 5) {
                case 0: return "no idea";
                case 1: return nlohmann::json{{"verdict", "Failure"}, {"reason", text(1 + rng_() % 600)}}.dump();
                default: return nlohmann::json{{"verdict", "Success"}, {"summary", text(1 + rng_() % 1500)}}.dump();
            }
        }
        return "?";
    }

private:
    std::string text(std::size_t n) const {
        std::string s;
        while (s.size() < n) s += testing::random_text(rng_, 8) + " ";
        return std::string(utf8_prefix(s, n));
    }
    mutable std::mt19937 rng_;
};

Scenario random_scenario(std::mt19937& rng) {
    Scenario s;
    s.id = "random";
    s.instruction = testing::make_instruction("random task", "random");
    for (int t = 0; t < 3; ++t) {
        const std::string name = "t" + std::to_string(t);
        s.tools.push_back(testing::make_tool(name, "tool"));
        auto& list = s.behaviors[name];
        for (std::size_t i = 1 + rng() % 4; i > 0; --i) {
            Behavior b;
            b.repeat = (rng() % 3 == 0) ? Repeat::Forever : Repeat::Once;
            switch (rng() % 4) {
                case 0: b.kind = BehaviorKind::Success; b.payload = "result " + std::to_string(rng() % 100); break;
                case 1: b.kind = BehaviorKind::Error; b.code = 500; b.message = "server error"; break;
                case 2: b.kind = BehaviorKind::Timeout; break;
                default: b.kind = BehaviorKind::Verbose; b.payload = "needle"; b.filler_chars = 2000 + rng() % 8000; break;
            }
            list.push_back(b);
        }
    }
    validate_scenario(s);
    return s;
}

Check invariants() {
    Check c;
    std::ostringstream note;

    // State boundedness and failure monotonicity over randomized episodes.
    std::mt19937 rng(424242);
    std::size_t steps_checked = 0;
    for (int i = 0; i < 1000; ++i) {
        auto s = random_scenario(rng);
        RandomModel model(static_cast<std::uint32_t>(rng()));
        EngineConfig cfg;
        cfg.step_budget = 1 + static_cast<int>(rng() % 30);
        cfg.state_cap_chars = 512 + rng() % 3585;
        SandboxSession session(s);
        auto e = run_sum2act(model, s.instruction, s.tools, cfg, session);
        std::size_t failures = 0;
        for (const auto& step : e.steps) {
            ++steps_checked;
            const auto len = render_state(step.state).size();
            if (len > cfg.state_cap_chars) {
                c.expect(false, "episode " + std::to_string(i) + ": state " + std::to_string(len) + " > cap " +
                                    std::to_string(cfg.state_cap_chars));
            }
            if (step.state.failure_history.size() < failures) {
                c.expect(false, "episode " + std::to_string(i) + ": failure history shrank");
            }
            failures = step.state.failure_history.size();
        }
        c.expect(static_cast<int>(e.steps.size()) <= cfg.step_budget && e.terminal.has_value(),
                 "episode " + std::to_string(i) + " overran its budget");
        if (c.problems.size() > 5) break;
    }
    note << "1000 random episodes (" << steps_checked << " steps) bounded and monotone; ";

    // Win-rate symmetry.
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<PairJudgment> js;
        for (std::size_t i = 1 + rng() % 100; i > 0; --i) {
            const bool swap = rng() % 2;
            js.push_back({"i", swap ? "m2" : "m1", swap ? "m1" : "m2", static_cast<Outcome>(rng() % 3), ""});
        }
        if (win_rate(js, "m1") + win_rate(js, "m2") != 100.0) {
            c.expect(false, "win rates do not sum to 100 in trial " + std::to_string(trial));
            break;
        }
    }
    note << "win-rate symmetry over 1000 multisets; ";

    // Replay determinism.
    std::size_t replays = 0;
    for (const char* dir : {"suite", "long_horizon", "backtrack"}) {
        for (const auto& s : load_dir(dir)) {
            auto policy = load_policy(*s.policy);
            for (auto method : {kSum2Act, kReact, kDfsdt}) {
                ScriptedProvider p1(policy), p2(policy);
                const auto a = serialize_episode(run_scenario(method, s, p1));
                const auto b = serialize_episode(run_scenario(method, s, p2));
                c.expect(a == b, s.id + "/" + std::string(method) + " is not reproducible");
                c.expect(serialize_episode(deserialize_episode(a)) == a,
                         s.id + "/" + std::string(method) + " does not round-trip");
                ++replays;
            }
        }
    }
    note << replays << " byte-identical replays; ";

    // Retriever top-1 on the three-tool case.
    std::vector<ToolSpec> catalog{
        testing::make_tool("weather_forecast", "Get the weather forecast for a city or region"),
        testing::make_tool("flight_search", "Search for flights between two airports on a date"),
        testing::make_tool("currency_convert", "Convert an amount of money from one currency to another")};
    auto ranked = rank("What is the weather in Florida?", catalog, 3);
    c.expect(!ranked.empty() && ranked[0].tool.name == "weather_forecast", "retriever top-1 is not the weather tool");
    note << "retriever top-1 weather_forecast";
    c.note = note.str();
    return c;
}

Check live_smoke() {
    Check c;
    if (!HttpProviderConfig::env_present()) {
        c.verdict = Status::Skip;
        c.note = "PROVIDER_BASE_URL / PROVIDER_MODEL not set";
        return c;
    }
    auto env_or = [](const char* name, fs::path fallback) {
        const char* v = std::getenv(name);
        return v ? std::string(v) : fallback.string();
    };
    const auto live = testing::source_dir() / "live";
    const auto tools = env_or("TOOLFLOW_LIVE_TOOLS", live / "tools.json");
    const auto endpoints = env_or("TOOLFLOW_LIVE_ENDPOINTS", live / "endpoints.json");
    const char* instruction = std::getenv("TOOLFLOW_LIVE_INSTRUCTION");
    auto out_dir = testing::temp_dir("live-smoke");

    std::ostringstream out, err;
    const int code = cli::run_cli({"run", "--provider", "live", "--tools", tools, "--endpoints", endpoints,
                                   "--instruction", instruction ? instruction : "What is the weather in Miami right now?",
                                   "--out", out_dir.string()},
                                  out, err);
    c.expect(code == cli::kExitOk, "run exited " + std::to_string(code) + ": " + err.str() + out.str());
    c.note = "live run exited " + std::to_string(code);
    fs::remove_all(out_dir);
    return c;
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        Check (*run)();
    };
    const Criterion criteria[] = {
        {"table-averages", table_averages},
        {"scenario-suite", scenario_suite},
        {"long-horizon-differential", long_horizon},
        {"search-information-loss", search_information_loss},
        {"invariants", invariants},
        {"live-smoke", live_smoke},
    };

    int failures = 0;
    for (const auto& cr : criteria) {
        const auto started = std::chrono::steady_clock::now();
        Check c;
        try {
            c = cr.run();
        } catch (const std::exception& e) {
            c.verdict = Status::Fail;
            c.problems.push_back(std::string("exception: ") + e.what());
        }
        const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started);
        const char* tag = c.verdict == Status::Pass ? "PASS" : c.verdict == Status::Fail ? "FAIL" : "SKIP";
        std::cout << tag << " " << cr.name << " (" << ms.count() << " ms)";
        if (!c.note.empty()) std::cout << ": " << c.note;
        std::cout << "\n";
        for (const auto& p : c.problems) std::cout << "    " << p << "\n";
        failures += c.verdict == Status::Fail;
    }
    return failures == 0 ? 0 : 1;
}
