#pragma once

#include "toolflow/core.hpp"
#include "toolflow/prompt.hpp"
#include "toolflow/provider.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace toolflow {

/// Output of the optional decomposition stage, attached to router prompts.
struct Task {
    std::string target;
    std::vector<std::string> subtasks;

    bool operator==(const Task&) const = default;
};

struct RouterPrompt {
    std::string user_instruction_block;
    std::string state_block;
    std::string rules_block;
    std::string tools_block;

    /// Fills {instruction}, {state}, {tools} and {rules}; the built-in template
    /// when `tmpl` is null.
    std::string render(const PromptTemplate* tmpl = nullptr) const;
};

struct RouterOptions {
    int max_retries = 2;
    double temperature = 0.0;
    int max_output_tokens = 1024;
    const PromptTemplate* router_template = nullptr;
};

struct Proposal {
    Action action;
    int retries = 0;
    std::string prompt;  // first-attempt prompt as sent
};

/// Header line that starts every action-proposal prompt, whatever the engine.
inline constexpr std::string_view kProposalHeader = "[ACTION PROPOSAL]";
inline constexpr std::string_view kDecompositionHeader = "[TASK DECOMPOSITION]";

const PromptTemplate& default_router_template();

std::string render_tools_block(std::span<const ToolSpec> tools);
std::string render_instruction_block(const Instruction& instruction, const std::optional<Task>& task);
/// Behavioural rules plus the required output format for the state-driven router.
std::string router_rules_block();
/// Output-format instructions shared by every proposal prompt.
std::string action_format_block();

RouterPrompt build_router_prompt(const Instruction& instruction, const State& state,
                                 std::span<const ToolSpec> tools,
                                 const std::optional<Task>& decomposition = std::nullopt);

/// Extracts the first JSON object carrying an "action" field. Throws
/// MalformedOutput when none exists, args is not an object, or a Finish lacks
/// a non-empty Answer.
Action parse_action(std::string_view model_output);

/// complete -> parse_action, re-asking with a corrective suffix up to
/// `max_retries` times. MalformedOutput and ProviderError propagate.
Proposal propose_from_prompt(const Provider& provider, std::string prompt, const RouterOptions& options);

Proposal propose(const Provider& provider, const Instruction& instruction, const State& state,
                 std::span<const ToolSpec> tools, const std::optional<Task>& decomposition,
                 const RouterOptions& options = {});

std::string build_decomposition_prompt(const Instruction& instruction, std::span<const ToolSpec> tools);
/// Strict: requires a non-empty "target" string and a "subtasks" string array.
Task parse_task(std::string_view model_output);
/// nullopt when the model never produced a usable decomposition; the caller
/// carries on without one.
std::optional<Task> decompose(const Provider& provider, const Instruction& instruction,
                              std::span<const ToolSpec> tools, const RouterOptions& options = {});

}  // namespace toolflow
