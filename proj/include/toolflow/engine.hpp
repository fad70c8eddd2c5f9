#pragma once

#include "toolflow/core.hpp"
#include "toolflow/prompt.hpp"
#include "toolflow/provider.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace toolflow {

inline constexpr std::string_view kSum2Act = "sum2act";
inline constexpr std::string_view kReact = "react";
inline constexpr std::string_view kDfsdt = "dfsdt";

bool is_known_method(std::string_view label) noexcept;

/// Resolves a tool call into an observation. Implementations must not throw
/// for tool-level problems; those become observation statuses.
class ToolExecutor {
public:
    virtual ~ToolExecutor() = default;
    virtual Observation invoke(const std::string& tool_name, const Args& args) = 0;
};

struct EngineConfig {
    int step_budget = 30;
    std::size_t state_cap_chars = 4096;
    bool use_decomposition = false;
    std::size_t react_memory_window_chars = 4096;
    int dfsdt_max_children = 3;

    std::size_t observation_window_chars = 4096;
    int router_max_retries = 2;
    int state_manager_max_retries = 2;
    const PromptTemplate* router_template = nullptr;

    /// Budget 30 for sum2act and react, 200 for dfsdt.
    static EngineConfig defaults_for(std::string_view method);
    /// Throws ConfigError on budget < 1, caps or windows < 512, children < 1.
    void validate() const;
};

/// One raw (thought, action, observation) record of the linear transcript.
struct TranscriptEntry {
    std::optional<std::string> thought;
    Action action;
    std::optional<Observation> observation;
};

std::string render_transcript_entry(const TranscriptEntry& entry);

/// Newest entries that fit in `window_chars`, oldest first, separated by blank
/// lines. Older entries are dropped whole. `dropped` receives the count.
std::string render_transcript(std::span<const TranscriptEntry> entries, std::size_t window_chars,
                              std::size_t* dropped = nullptr);

std::string build_react_prompt(const Instruction& instruction, std::span<const ToolSpec> tools,
                               const std::string& transcript);

/// `attempt` is 1-based; the prompt says "attempt K of M" and shows only the
/// memory of the node being expanded.
std::string build_dfsdt_prompt(const Instruction& instruction, std::span<const ToolSpec> tools,
                               const std::string& transcript, int attempt, int max_children);

Episode run_sum2act(const Provider& provider, const Instruction& instruction,
                    std::span<const ToolSpec> tools, const EngineConfig& config, ToolExecutor& executor);

Episode run_react(const Provider& provider, const Instruction& instruction,
                  std::span<const ToolSpec> tools, const EngineConfig& config, ToolExecutor& executor);

Episode run_dfsdt(const Provider& provider, const Instruction& instruction,
                  std::span<const ToolSpec> tools, const EngineConfig& config, ToolExecutor& executor);

/// Dispatch on "sum2act", "react" or "dfsdt"; ConfigError for other labels.
Episode run_method(std::string_view method, const Provider& provider, const Instruction& instruction,
                   std::span<const ToolSpec> tools, const EngineConfig& config, ToolExecutor& executor);

}  // namespace toolflow
