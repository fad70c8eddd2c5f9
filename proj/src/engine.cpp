#include "toolflow/engine.hpp"

#include "toolflow/log.hpp"
#include "toolflow/router.hpp"
#include "toolflow/state_manager.hpp"

#include <sstream>

namespace toolflow {

namespace {

// Tool calls the episode does not know about never reach the executor, and an
// executor that throws anyway is reported as a tool error.
Observation execute(ToolExecutor& executor, std::span<const ToolSpec> tools, const Action& action) {
    if (!find_tool(tools, action.tool_name)) {
        return Observation::failure(ObservationStatus::ToolError, action.tool_name, action.args,
                                    "unknown tool: " + action.tool_name);
    }
    Observation obs;
    try {
        obs = executor.invoke(action.tool_name, action.args);
    } catch (const std::exception& e) {
        return Observation::failure(ObservationStatus::ToolError, action.tool_name, action.args,
                                    std::string("executor error: ") + e.what());
    }
    if (!obs.ok() && obs.error.empty()) obs.error = std::string(to_string(obs.status));
    if (obs.latency.count() < 0) obs.latency = std::chrono::milliseconds{0};
    return obs;
}

RouterOptions router_options(const EngineConfig& config) {
    RouterOptions o;
    o.max_retries = config.router_max_retries;
    o.router_template = config.router_template;
    return o;
}

StateManagerOptions state_options(const EngineConfig& config) {
    StateManagerOptions o;
    o.cap_chars = config.state_cap_chars;
    o.observation_window = config.observation_window_chars;
    o.max_retries = config.state_manager_max_retries;
    return o;
}

Terminal aborted(const std::exception& e, bool provider_failure) {
    return {TerminalKind::AbortedParseFailure, {},
            std::string(provider_failure ? "provider failure: " : "unparseable router output: ") +
                e.what()};
}

Terminal finished(const Action& action) { return {TerminalKind::Finished, action.answer(), {}}; }

Terminal out_of_budget(int budget) {
    return {TerminalKind::BudgetExhausted, {}, "step budget of " + std::to_string(budget) + " spent"};
}

std::string tool_call_text(const Action& action) {
    return action.tool_name + " " + canonical_args(action.args);
}

// Proposal for the transcript-driven engines; nullopt with `terminal` set when
// the router gave up.
std::optional<Proposal> try_propose(const Provider& provider, std::string prompt,
                                    const RouterOptions& options, std::optional<Terminal>& terminal) {
    try {
        return propose_from_prompt(provider, std::move(prompt), options);
    } catch (const MalformedOutput& e) {
        terminal = aborted(e, false);
    } catch (const ProviderError& e) {
        terminal = aborted(e, true);
    }
    return std::nullopt;
}

constexpr const char* kLinearIntro =
    "You are a tool-using assistant. Solve the user instruction step by step. At each step think "
    "about what to do next, then call exactly one tool and read its observation. Call Finish with "
    "the final reply once the instruction can be answered.";

void write_common_sections(std::ostringstream& out, const Instruction& instruction,
                           std::span<const ToolSpec> tools, const std::string& transcript) {
    out << "User instruction:\n"
        << instruction.text << "\n\n"
        << "Available tools:\n"
        << render_tools_block(tools) << "\n\n"
        << "Transcript so far:\n"
        << (transcript.empty() ? std::string("(empty)") : transcript) << "\n\n";
}

}  // namespace

bool is_known_method(std::string_view label) noexcept {
    return label == kSum2Act || label == kReact || label == kDfsdt;
}

EngineConfig EngineConfig::defaults_for(std::string_view method) {
    EngineConfig c;
    if (method == kDfsdt) c.step_budget = 200;
    return c;
}

void EngineConfig::validate() const {
    if (step_budget < 1) throw ConfigError("step budget must be at least 1");
    if (state_cap_chars < kMinStateCap) throw ConfigError("state cap must be at least 512 chars");
    if (react_memory_window_chars < 512) throw ConfigError("memory window must be at least 512 chars");
    if (observation_window_chars < 512) throw ConfigError("observation window must be at least 512 chars");
    if (dfsdt_max_children < 1) throw ConfigError("search branching factor must be at least 1");
    if (router_max_retries < 0 || state_manager_max_retries < 0) {
        throw ConfigError("retry counts must not be negative");
    }
}

// ----------------------------------------------------------------------------
// Transcript rendering
// ----------------------------------------------------------------------------

std::string render_transcript_entry(const TranscriptEntry& entry) {
    std::ostringstream out;
    if (entry.thought) out << "Thought: " << *entry.thought << "\n";
    out << "Action: " << tool_call_text(entry.action);
    if (entry.observation) {
        const auto& o = *entry.observation;
        out << "\nObservation (" << to_string(o.status) << "): ";
        if (o.ok()) {
            out << o.payload;
        } else {
            out << o.error_descriptor();
            if (!o.payload.empty()) out << "\n" << o.payload;
        }
    }
    return out.str();
}

std::string render_transcript(std::span<const TranscriptEntry> entries, std::size_t window_chars,
                              std::size_t* dropped) {
    std::vector<std::string> kept;
    std::size_t total = 0;
    for (auto it = entries.rbegin(); it != entries.rend(); ++it) {
        auto text = render_transcript_entry(*it);
        std::size_t extra = text.size() + (kept.empty() ? 0 : 2);
        if (total + extra > window_chars) break;
        total += extra;
        kept.push_back(std::move(text));
    }
    if (dropped) *dropped = entries.size() - kept.size();
    std::string out;
    for (auto it = kept.rbegin(); it != kept.rend(); ++it) {
        if (!out.empty()) out += "\n\n";
        out += *it;
    }
    return out;
}

std::string build_react_prompt(const Instruction& instruction, std::span<const ToolSpec> tools,
                               const std::string& transcript) {
    std::ostringstream out;
    out << kProposalHeader << "\n" << kLinearIntro << "\n\n";
    write_common_sections(out, instruction, tools, transcript);
    out << action_format_block() << "\n";
    return out.str();
}

std::string build_dfsdt_prompt(const Instruction& instruction, std::span<const ToolSpec> tools,
                               const std::string& transcript, int attempt, int max_children) {
    std::ostringstream out;
    out << kProposalHeader << "\n" << kLinearIntro << "\n"
        << "You are exploring a search tree of solution paths. This is attempt " << attempt << " of "
        << max_children << " from the current point. If this path cannot lead to an answer, use "
        << "the action " << kRestartAction << " with empty args to abandon it.\n\n";
    write_common_sections(out, instruction, tools, transcript);
    out << action_format_block() << "\n";
    return out.str();
}

// ----------------------------------------------------------------------------
// Engines
// ----------------------------------------------------------------------------

Episode run_sum2act(const Provider& provider, const Instruction& instruction,
                    std::span<const ToolSpec> tools, const EngineConfig& config, ToolExecutor& executor) {
    config.validate();
    Episode ep = new_episode(instruction, {tools.begin(), tools.end()}, config.step_budget,
                             std::string(kSum2Act));
    const auto ropts = router_options(config);
    const auto sopts = state_options(config);

    std::optional<Task> task;
    if (config.use_decomposition) task = decompose(provider, instruction, tools, ropts);

    State state;
    while (static_cast<int>(ep.steps.size()) < config.step_budget) {
        const int step_no = static_cast<int>(ep.steps.size()) + 1;
        Proposal proposal;
        try {
            proposal = propose(provider, instruction, state, tools, task, ropts);
        } catch (const MalformedOutput& e) {
            ep.terminal = aborted(e, false);
            return ep;
        } catch (const ProviderError& e) {
            ep.terminal = aborted(e, true);
            return ep;
        }

        Step step;
        step.action = proposal.action;
        step.retries = proposal.retries;
        if (proposal.action.is_finish()) {
            step.state = state;
            ep.steps.push_back(std::move(step));
            ep.terminal = finished(proposal.action);
            return ep;
        }

        Observation obs = execute(executor, tools, proposal.action);
        auto outcome = update(provider, instruction, state, obs, step_no, sopts);
        state = enforce_cap(provider, outcome.state, config.state_cap_chars, sopts);

        step.observation = std::move(obs);
        step.state = state;
        ep.steps.push_back(std::move(step));
    }
    ep.terminal = out_of_budget(config.step_budget);
    return ep;
}

Episode run_react(const Provider& provider, const Instruction& instruction,
                  std::span<const ToolSpec> tools, const EngineConfig& config, ToolExecutor& executor) {
    config.validate();
    if (tools.empty()) throw ConfigError("episode needs at least one tool");
    Episode ep = new_episode(instruction, {tools.begin(), tools.end()}, config.step_budget,
                             std::string(kReact));
    const auto ropts = router_options(config);

    std::vector<TranscriptEntry> transcript;
    while (static_cast<int>(ep.steps.size()) < config.step_budget) {
        auto prompt = build_react_prompt(
            instruction, tools, render_transcript(transcript, config.react_memory_window_chars));
        auto proposal = try_propose(provider, std::move(prompt), ropts, ep.terminal);
        if (!proposal) return ep;

        Step step;
        step.action = proposal->action;
        step.retries = proposal->retries;
        if (proposal->action.is_finish()) {
            ep.steps.push_back(std::move(step));
            ep.terminal = finished(proposal->action);
            return ep;
        }
        Observation obs = execute(executor, tools, proposal->action);
        transcript.push_back({proposal->action.thought, proposal->action, obs});
        step.observation = std::move(obs);
        ep.steps.push_back(std::move(step));
    }
    ep.terminal = out_of_budget(config.step_budget);
    return ep;
}

namespace {

struct SearchNode {
    std::string id;
    std::vector<TranscriptEntry> memory;
    int children_tried = 0;
    int parent = -1;
    int depth = 0;
};

}  // namespace

// Depth-first search: each proposal at a node is one child attempt. A failed
// observation kills the child and the node tries again; a node that has used
// all its attempts, or that proposes Restart, hands control back to its
// parent. Siblings never see each other's transcripts.
Episode run_dfsdt(const Provider& provider, const Instruction& instruction,
                  std::span<const ToolSpec> tools, const EngineConfig& config, ToolExecutor& executor) {
    config.validate();
    Episode ep = new_episode(instruction, {tools.begin(), tools.end()}, config.step_budget,
                             std::string(kDfsdt));
    const auto ropts = router_options(config);
    const int max_children = config.dfsdt_max_children;

    std::vector<SearchNode> nodes;
    nodes.push_back({"0", {}, 0, -1, 0});
    int current = 0;

    while (static_cast<int>(ep.steps.size()) < config.step_budget) {
        if (nodes[current].children_tried >= max_children) {
            if (nodes[current].parent < 0) {
                ep.terminal = {TerminalKind::BudgetExhausted, {}, "search tree exhausted"};
                return ep;
            }
            current = nodes[current].parent;
            continue;
        }
        const int attempt = ++nodes[current].children_tried;
        const std::string child_id = nodes[current].id + "." + std::to_string(attempt);
        auto prompt = build_dfsdt_prompt(
            instruction, tools, render_transcript(nodes[current].memory, config.react_memory_window_chars),
            attempt, max_children);
        auto proposal = try_propose(provider, std::move(prompt), ropts, ep.terminal);
        if (!proposal) return ep;

        Step step;
        step.action = proposal->action;
        step.retries = proposal->retries;
        step.node = child_id;

        if (proposal->action.is_finish()) {
            ep.steps.push_back(std::move(step));
            ep.terminal = finished(proposal->action);
            return ep;
        }
        if (proposal->action.tool_name == kRestartAction) {
            ep.steps.push_back(std::move(step));
            log_debug("search node " + nodes[current].id + " abandoned by " + std::string(kRestartAction));
            if (nodes[current].parent >= 0) {
                nodes[current].children_tried = max_children;
                current = nodes[current].parent;
            }
            continue;
        }

        Observation obs = execute(executor, tools, proposal->action);
        const bool ok = obs.ok();
        step.observation = obs;
        ep.steps.push_back(std::move(step));
        if (ok) {
            SearchNode child;
            child.id = child_id;
            child.memory = nodes[current].memory;
            child.memory.push_back({proposal->action.thought, proposal->action, std::move(obs)});
            child.parent = current;
            child.depth = nodes[current].depth + 1;
            nodes.push_back(std::move(child));
            current = static_cast<int>(nodes.size()) - 1;
        }
    }
    ep.terminal = out_of_budget(config.step_budget);
    return ep;
}

Episode run_method(std::string_view method, const Provider& provider, const Instruction& instruction,
                   std::span<const ToolSpec> tools, const EngineConfig& config, ToolExecutor& executor) {
    if (method == kSum2Act) return run_sum2act(provider, instruction, tools, config, executor);
    if (method == kReact) return run_react(provider, instruction, tools, config, executor);
    if (method == kDfsdt) return run_dfsdt(provider, instruction, tools, config, executor);
    throw ConfigError("unknown method '" + std::string(method) + "' (expected sum2act, react or dfsdt)");
}

}  // namespace toolflow
