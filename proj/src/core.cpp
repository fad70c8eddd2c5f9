#include "toolflow/core.hpp"

#include "toolflow/json_convert.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>

namespace toolflow {

namespace {

std::string with_line(const std::string& msg, std::size_t line) {
    if (line == 0) return msg;
    return "line " + std::to_string(line) + ": " + msg;
}

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

}  // namespace

ParseError::ParseError(const std::string& msg, std::size_t line)
    : std::runtime_error(with_line(msg, line)), line_(line) {}

bool is_identifier(std::string_view s) noexcept {
    if (s.empty()) return false;
    return std::all_of(s.begin(), s.end(), [](unsigned char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
               c == '_';
    });
}

void validate_tool(const ToolSpec& tool) {
    if (!is_identifier(tool.name)) {
        throw ValidationError("tool name is not an identifier: '" + tool.name + "'");
    }
    std::set<std::string> seen;
    for (const auto& p : tool.params) {
        if (p.name.empty()) {
            throw ValidationError("tool '" + tool.name + "' has a parameter without a name");
        }
        if (!seen.insert(p.name).second) {
            throw ValidationError("tool '" + tool.name + "' declares parameter '" + p.name +
                                  "' twice");
        }
    }
}

void validate_catalog(std::span<const ToolSpec> tools) {
    std::set<std::string> names;
    for (const auto& t : tools) {
        validate_tool(t);
        if (!names.insert(t.name).second) {
            throw ValidationError("duplicate tool name in catalog: " + t.name);
        }
    }
}

const ToolSpec* find_tool(std::span<const ToolSpec> tools, std::string_view name) noexcept {
    for (const auto& t : tools) {
        if (t.name == name) return &t;
    }
    return nullptr;
}

std::string canonical_args(const Args& args) {
    return dump_json(nlohmann::json(args));
}

std::string args_digest(const Args& args) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(canonical_args(args))));
    return buf;
}

std::string arg_text(const ArgValue& value) {
    if (const auto* s = std::get_if<std::string>(&value)) return *s;
    return dump_json(nlohmann::json(value));
}

Action Action::tool_call(std::string tool, Args args, std::optional<std::string> thought) {
    Action a;
    a.kind = ActionKind::ToolCall;
    a.tool_name = std::move(tool);
    a.args = std::move(args);
    a.thought = std::move(thought);
    return a;
}

Action Action::finish(std::string answer, std::optional<std::string> thought) {
    Action a;
    a.kind = ActionKind::Finish;
    a.tool_name = std::string(kFinishAction);
    a.args.emplace(std::string(kAnswerKey), std::move(answer));
    a.thought = std::move(thought);
    return a;
}

std::string Action::answer() const {
    if (kind != ActionKind::Finish) return {};
    auto it = args.find(std::string(kAnswerKey));
    return it == args.end() ? std::string{} : arg_text(it->second);
}

void validate_action(const Action& action) {
    if (action.kind == ActionKind::Finish) {
        if (!action.args.contains(std::string(kAnswerKey))) {
            throw ValidationError("Finish action without an Answer argument");
        }
    } else if (action.tool_name.empty()) {
        throw ValidationError("tool call without a tool name");
    }
}

Observation Observation::success(std::string tool, Args args, std::string payload) {
    Observation o;
    o.status = ObservationStatus::Success;
    o.payload = std::move(payload);
    o.tool_name = std::move(tool);
    o.args_echo = std::move(args);
    return o;
}

Observation Observation::failure(ObservationStatus status, std::string tool, Args args,
                                 std::string error, std::optional<int> code) {
    Observation o;
    o.status = status;
    o.error = std::move(error);
    o.error_code = code;
    o.tool_name = std::move(tool);
    o.args_echo = std::move(args);
    return o;
}

std::string Observation::error_descriptor() const {
    if (error_code) return "code " + std::to_string(*error_code) + ": " + error;
    return error;
}

void validate_observation(const Observation& obs) {
    if (!obs.ok() && obs.error.empty()) {
        throw ValidationError("failed observation without an error descriptor");
    }
    if (obs.latency.count() < 0) throw ValidationError("negative observation latency");
}

bool State::has_failure(std::string_view tool, std::string_view digest) const noexcept {
    return std::any_of(failure_history.begin(), failure_history.end(), [&](const auto& f) {
        return f.tool_name == tool && f.args_digest == digest;
    });
}

std::string render_failure(const FailureEntry& entry) {
    return entry.tool_name + "(" + entry.args_digest + "): " + entry.reason;
}

std::string render_state(const State& state) {
    if (state.empty()) return "Current results: (none). Failure history: (none).";

    std::ostringstream out;
    if (state.current_results.empty()) {
        out << "Current results: (none).\n";
    } else {
        out << "Current results:\n";
        int n = 1;
        for (const auto& r : state.current_results) {
            out << n++ << ". [step " << r.step << "] " << r.text << "\n";
        }
    }
    if (state.failure_history.empty()) {
        out << "Failure history: (none).";
    } else {
        out << "Failure history:";
        int n = 1;
        for (const auto& f : state.failure_history) {
            out << "\n" << n++ << ". [step " << f.step << "] " << render_failure(f);
        }
    }
    return out.str();
}

void validate_state(const State& state) {
    int last = 0;
    for (const auto& r : state.current_results) {
        if (r.step <= last) throw ValidationError("result step indices not strictly increasing");
        last = r.step;
    }
    last = 0;
    std::set<std::pair<std::string, std::string>> keys;
    for (const auto& f : state.failure_history) {
        if (f.step <= last) throw ValidationError("failure step indices not strictly increasing");
        last = f.step;
        if (!keys.emplace(f.tool_name, f.args_digest).second) {
            throw ValidationError("duplicate failure entry for " + f.tool_name);
        }
    }
}

State Episode::current_state() const {
    return steps.empty() ? State{} : steps.back().state;
}

Episode new_episode(Instruction instruction, std::vector<ToolSpec> tools, int budget,
                    std::string method_label) {
    if (budget < 1) throw ConfigError("step budget must be at least 1");
    if (tools.empty()) throw ConfigError("episode needs at least one tool");
    if (instruction.text.empty()) throw ConfigError("instruction text is empty");
    Episode e;
    e.instruction = std::move(instruction);
    e.tools = std::move(tools);
    e.step_budget = budget;
    e.method_label = std::move(method_label);
    return e;
}

void validate_episode(const Episode& e) {
    if (e.step_budget < 1) throw ValidationError("step_budget must be positive");
    if (e.instruction.text.empty()) throw ValidationError("instruction text is empty");
    if (e.tools.empty()) throw ValidationError("episode has no tools");
    validate_catalog(e.tools);
    if (static_cast<long>(e.steps.size()) > e.step_budget) {
        throw ValidationError("episode has " + std::to_string(e.steps.size()) +
                              " steps but budget " + std::to_string(e.step_budget));
    }
    std::size_t failures = 0;
    for (std::size_t i = 0; i < e.steps.size(); ++i) {
        const auto& s = e.steps[i];
        validate_action(s.action);
        if (s.observation) validate_observation(*s.observation);
        validate_state(s.state);
        if (s.state.failure_history.size() < failures) {
            throw ValidationError("failure history shrank at step " + std::to_string(i + 1));
        }
        failures = s.state.failure_history.size();
        if (s.action.is_finish() && i + 1 != e.steps.size()) {
            throw ValidationError("Finish action before the last step");
        }
    }
    if (e.terminal) {
        bool last_finish = !e.steps.empty() && e.steps.back().action.is_finish();
        bool finished = e.terminal->kind == TerminalKind::Finished;
        if (last_finish != finished) {
            throw ValidationError("terminal Finished must coincide with a final Finish action");
        }
        if (finished && e.terminal->answer != e.steps.back().action.answer()) {
            throw ValidationError("terminal answer differs from the Finish action's Answer");
        }
    }
}

namespace {

bool is_continuation(char c) noexcept {
    return (static_cast<unsigned char>(c) & 0xc0) == 0x80;
}

}  // namespace

std::string_view utf8_prefix(std::string_view s, std::size_t max_bytes) noexcept {
    if (s.size() <= max_bytes) return s;
    std::size_t n = max_bytes;
    while (n > 0 && is_continuation(s[n])) --n;
    return s.substr(0, n);
}

std::string_view utf8_suffix(std::string_view s, std::size_t max_bytes) noexcept {
    if (s.size() <= max_bytes) return s;
    std::size_t start = s.size() - max_bytes;
    while (start < s.size() && is_continuation(s[start])) ++start;
    return s.substr(start);
}

std::string shorten(std::string_view s, std::size_t max_bytes) {
    if (s.size() <= max_bytes) return std::string(s);
    if (max_bytes < 3) return std::string(utf8_prefix(s, max_bytes));
    return std::string(utf8_prefix(s, max_bytes - 3)) + "...";
}

std::string_view to_string(ActionKind kind) noexcept {
    return kind == ActionKind::Finish ? "Finish" : "ToolCall";
}

std::string_view to_string(ObservationStatus status) noexcept {
    switch (status) {
        case ObservationStatus::Success: return "Success";
        case ObservationStatus::ToolError: return "ToolError";
        case ObservationStatus::Timeout: return "Timeout";
        case ObservationStatus::MalformedResponse: return "MalformedResponse";
    }
    return "Unknown";
}

std::string_view to_string(TerminalKind kind) noexcept {
    switch (kind) {
        case TerminalKind::Finished: return "Finished";
        case TerminalKind::BudgetExhausted: return "BudgetExhausted";
        case TerminalKind::AbortedParseFailure: return "AbortedParseFailure";
    }
    return "Unknown";
}

std::optional<ObservationStatus> parse_observation_status(std::string_view s) noexcept {
    for (auto st : {ObservationStatus::Success, ObservationStatus::ToolError,
                    ObservationStatus::Timeout, ObservationStatus::MalformedResponse}) {
        if (to_string(st) == s) return st;
    }
    return std::nullopt;
}

std::optional<TerminalKind> parse_terminal_kind(std::string_view s) noexcept {
    for (auto k : {TerminalKind::Finished, TerminalKind::BudgetExhausted,
                   TerminalKind::AbortedParseFailure}) {
        if (to_string(k) == s) return k;
    }
    return std::nullopt;
}

}  // namespace toolflow
