#pragma once

#include "toolflow/core.hpp"
#include "toolflow/provider.hpp"

#include <atomic>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

namespace testing {

inline std::filesystem::path source_dir() { return TOOLFLOW_SOURCE_DIR; }
inline std::filesystem::path scenarios_dir() { return source_dir() / "scenarios"; }

/// Fresh, empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& tag) {
    static std::atomic<int> counter{0};
    auto dir = std::filesystem::temp_directory_path() /
               ("toolflow-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline toolflow::ToolSpec make_tool(std::string name, std::string description,
                                    std::vector<std::string> required = {}) {
    toolflow::ToolSpec t{std::move(name), std::move(description), {}, std::nullopt};
    for (auto& p : required) t.params.push_back({std::move(p), "string", true, ""});
    return t;
}

inline toolflow::Instruction make_instruction(std::string text, std::string id = "i1") {
    return {std::move(id), std::move(text), std::nullopt};
}

inline toolflow::ScriptedProvider scripted(std::vector<toolflow::PolicyEntry> entries,
                                           std::optional<std::string> fallback = std::nullopt) {
    return toolflow::ScriptedProvider(toolflow::ScriptedPolicy{std::move(entries), std::move(fallback)});
}

inline toolflow::PolicyEntry literal(std::string match, std::string response) {
    return {std::move(match), std::move(response), false};
}

inline toolflow::PolicyEntry regex(std::string match, std::string response) {
    return {std::move(match), std::move(response), true};
}

/// Random printable text with some multi-byte characters mixed in.
inline std::string random_text(std::mt19937& rng, std::size_t max_len) {
    static const std::vector<std::string> pieces = {
        "a", "b", "Miami", " ", "29", "\"", "\\", "{", "}", "\n", "é", "中", "😀", "ok", ",", ":", "\t"};
    std::uniform_int_distribution<std::size_t> len(0, max_len);
    std::uniform_int_distribution<std::size_t> pick(0, pieces.size() - 1);
    std::string s;
    const auto n = len(rng);
    for (std::size_t i = 0; i < n; ++i) s += pieces[pick(rng)];
    return s;
}

inline toolflow::ArgValue random_arg(std::mt19937& rng) {
    switch (rng() % 5) {
        case 0: return random_text(rng, 6);
        case 1: return static_cast<std::int64_t>(rng() % 2000) - 1000;
        case 2: return static_cast<double>(rng() % 100000) / 64.0 + 0.5;
        case 3: return (rng() % 2) == 0;
        default: {
            toolflow::ArgList list;
            for (std::size_t i = rng() % 4; i > 0; --i) {
                if (rng() % 2) list.push_back(random_text(rng, 3));
                else list.push_back(static_cast<std::int64_t>(rng() % 50));
            }
            return list;
        }
    }
}

inline toolflow::Args random_args(std::mt19937& rng) {
    toolflow::Args args;
    for (std::size_t i = rng() % 4; i > 0; --i) args["k" + std::to_string(rng() % 6)] = random_arg(rng);
    return args;
}

/// A structurally valid, terminated episode with random contents.
inline toolflow::Episode random_episode(std::mt19937& rng) {
    using namespace toolflow;
    Episode e;
    e.instruction = {"inst-" + std::to_string(rng() % 1000), "do " + random_text(rng, 12), std::nullopt};
    if (rng() % 2) e.instruction.subset_label = "I" + std::to_string(rng() % 3 + 1) + "-Inst";
    const int n_tools = 1 + static_cast<int>(rng() % 4);
    for (int i = 0; i < n_tools; ++i) {
        ToolSpec t{"tool_" + std::to_string(i), random_text(rng, 10), {}, std::nullopt};
        if (rng() % 2) t.params.push_back({"city", "string", true, random_text(rng, 5)});
        if (rng() % 2) t.params.push_back({"days", "integer", false, ""});
        if (rng() % 3 == 0) t.category = "cat" + std::to_string(rng() % 3);
        e.tools.push_back(std::move(t));
    }
    e.method_label = (rng() % 2) ? "sum2act" : "react";
    e.step_budget = 1 + static_cast<int>(rng() % 12);
    const int n_steps = static_cast<int>(rng() % (e.step_budget + 1));

    State state;
    for (int i = 1; i <= n_steps; ++i) {
        Step step;
        const bool last = i == n_steps;
        if (last && rng() % 2) {
            step.action = Action::finish("answer " + random_text(rng, 8));
        } else {
            const auto& tool = e.tools[rng() % e.tools.size()];
            step.action = Action::tool_call(tool.name, random_args(rng));
            if (rng() % 2) step.action.thought = random_text(rng, 8);
            Observation obs;
            if (rng() % 3 == 0) {
                obs = Observation::failure(ObservationStatus::ToolError, tool.name, step.action.args,
                                           "boom " + random_text(rng, 4),
                                           (rng() % 2) ? std::optional<int>(500) : std::nullopt);
                auto digest = args_digest(step.action.args);
                if (!state.has_failure(tool.name, digest)) {
                    state.failure_history.push_back({tool.name, digest, random_text(rng, 10), i});
                }
            } else {
                obs = Observation::success(tool.name, step.action.args, random_text(rng, 20));
                if (rng() % 2) state.current_results.push_back({random_text(rng, 10), i});
            }
            obs.latency = std::chrono::milliseconds(rng() % 5000);
            step.observation = std::move(obs);
        }
        step.retries = static_cast<int>(rng() % 3);
        if (rng() % 4 == 0) step.node = "0." + std::to_string(i);
        step.state = state;
        e.steps.push_back(std::move(step));
    }
    if (!e.steps.empty() && e.steps.back().action.is_finish()) {
        e.terminal = Terminal{TerminalKind::Finished, e.steps.back().action.answer(), {}};
    } else if (rng() % 2) {
        e.terminal = Terminal{TerminalKind::BudgetExhausted, {}, "step budget spent"};
    } else {
        e.terminal = Terminal{TerminalKind::AbortedParseFailure, {}, random_text(rng, 6)};
    }
    return e;
}

}  // namespace testing
