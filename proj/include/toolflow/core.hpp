#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace toolflow {

// ----------------------------------------------------------------------------
// Errors
// ----------------------------------------------------------------------------

/// Invalid configuration or precondition violation (bad budget, empty catalog...).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input text could not be parsed. `line` is 1-based, 0 when unknown.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& msg, std::size_t line = 0);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Parsed input violates a structural invariant.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Model output did not contain the structured object we asked for.
class MalformedOutput : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ----------------------------------------------------------------------------
// Instructions and tools
// ----------------------------------------------------------------------------

struct Instruction {
    std::string id;
    std::string text;
    std::optional<std::string> subset_label;

    bool operator==(const Instruction&) const = default;
};

struct ParamSpec {
    std::string name;
    std::string type = "string";  // semantic tag: string, number, integer, boolean, array
    bool required = false;
    std::string description;

    bool operator==(const ParamSpec&) const = default;
};

struct ToolSpec {
    std::string name;
    std::string description;
    std::vector<ParamSpec> params;
    std::optional<std::string> category;

    bool operator==(const ToolSpec&) const = default;
};

/// Letters, digits and underscore; non-empty.
bool is_identifier(std::string_view s) noexcept;

void validate_tool(const ToolSpec& tool);
/// Validates every tool and checks that names are unique.
void validate_catalog(std::span<const ToolSpec> tools);
const ToolSpec* find_tool(std::span<const ToolSpec> tools, std::string_view name) noexcept;

// ----------------------------------------------------------------------------
// Arguments
// ----------------------------------------------------------------------------

// Argument values are scalars or flat lists of scalars. Nested objects coming
// from a model are rendered to text before they reach an Args map.
using Scalar = std::variant<std::string, std::int64_t, double, bool>;
using ArgList = std::vector<Scalar>;
using ArgValue = std::variant<std::string, std::int64_t, double, bool, ArgList>;
using Args = std::map<std::string, ArgValue>;

/// Compact JSON object with sorted keys, e.g. {"city":"Miami","days":3}.
std::string canonical_args(const Args& args);
/// 16 hex digits of FNV-1a/64 over canonical_args(args).
std::string args_digest(const Args& args);
/// Value as plain text: strings unquoted, everything else as JSON.
std::string arg_text(const ArgValue& value);

// ----------------------------------------------------------------------------
// Actions and observations
// ----------------------------------------------------------------------------

inline constexpr std::string_view kFinishAction = "Finish";
inline constexpr std::string_view kRestartAction = "Restart";
inline constexpr std::string_view kAnswerKey = "Answer";

enum class ActionKind { ToolCall, Finish };

struct Action {
    ActionKind kind = ActionKind::ToolCall;
    std::string tool_name;
    Args args;
    std::optional<std::string> thought;

    static Action tool_call(std::string tool, Args args, std::optional<std::string> thought = {});
    static Action finish(std::string answer, std::optional<std::string> thought = {});

    bool is_finish() const noexcept { return kind == ActionKind::Finish; }
    /// The "Answer" argument as text; empty for tool calls.
    std::string answer() const;

    bool operator==(const Action&) const = default;
};

void validate_action(const Action& action);

enum class ObservationStatus { Success, ToolError, Timeout, MalformedResponse };

struct Observation {
    ObservationStatus status = ObservationStatus::Success;
    std::string payload;
    std::string error;               // descriptor, required when status != Success
    std::optional<int> error_code;   // HTTP-style code when one exists
    std::chrono::milliseconds latency{0};
    std::string tool_name;
    Args args_echo;

    static Observation success(std::string tool, Args args, std::string payload);
    static Observation failure(ObservationStatus status, std::string tool, Args args,
                               std::string error, std::optional<int> code = {});

    bool ok() const noexcept { return status == ObservationStatus::Success; }
    /// "code 500: message", or just the message when no code is present.
    std::string error_descriptor() const;

    bool operator==(const Observation&) const = default;
};

void validate_observation(const Observation& obs);

// ----------------------------------------------------------------------------
// State
// ----------------------------------------------------------------------------

struct ResultEntry {
    std::string text;
    int step = 0;

    bool operator==(const ResultEntry&) const = default;
};

struct FailureEntry {
    std::string tool_name;
    std::string args_digest;
    std::string reason;
    int step = 0;

    bool operator==(const FailureEntry&) const = default;
};

/// Summarized task state: what has been found so far and what went wrong.
/// A default-constructed State is the initial state (both lists empty).
struct State {
    std::vector<ResultEntry> current_results;
    std::vector<FailureEntry> failure_history;

    bool empty() const noexcept { return current_results.empty() && failure_history.empty(); }
    bool has_failure(std::string_view tool, std::string_view digest) const noexcept;

    bool operator==(const State&) const = default;
};

/// The two-section text layout consumed by the router prompt.
std::string render_state(const State& state);
std::string render_failure(const FailureEntry& entry);
void validate_state(const State& state);

// ----------------------------------------------------------------------------
// Episodes
// ----------------------------------------------------------------------------

struct Step {
    Action action;
    std::optional<Observation> observation;
    State state;
    int retries = 0;    // router re-asks needed for this proposal
    std::string node;   // search-tree position (depth-first engine only)

    bool operator==(const Step&) const = default;
};

enum class TerminalKind { Finished, BudgetExhausted, AbortedParseFailure };

struct Terminal {
    TerminalKind kind = TerminalKind::BudgetExhausted;
    std::string answer;   // Finished only
    std::string detail;   // free-form diagnostic

    bool operator==(const Terminal&) const = default;
};

struct Episode {
    Instruction instruction;
    std::vector<ToolSpec> tools;
    std::vector<Step> steps;
    std::optional<Terminal> terminal;
    std::string method_label;
    int step_budget = 1;

    bool finished() const noexcept {
        return terminal && terminal->kind == TerminalKind::Finished;
    }
    /// State after the last step, or the initial state.
    State current_state() const;

    bool operator==(const Episode&) const = default;
};

Episode new_episode(Instruction instruction, std::vector<ToolSpec> tools, int budget,
                    std::string method_label);
void validate_episode(const Episode& episode);

// ----------------------------------------------------------------------------
// Text helpers
// ----------------------------------------------------------------------------

/// Longest prefix of at most `max_bytes` that does not split a UTF-8 sequence.
std::string_view utf8_prefix(std::string_view s, std::size_t max_bytes) noexcept;
/// Longest suffix of at most `max_bytes` that does not split a UTF-8 sequence.
std::string_view utf8_suffix(std::string_view s, std::size_t max_bytes) noexcept;
/// `s` if it fits, else a prefix plus "..." totalling at most `max_bytes`.
std::string shorten(std::string_view s, std::size_t max_bytes);

std::string_view to_string(ActionKind kind) noexcept;
std::string_view to_string(ObservationStatus status) noexcept;
std::string_view to_string(TerminalKind kind) noexcept;
std::optional<ObservationStatus> parse_observation_status(std::string_view s) noexcept;
std::optional<TerminalKind> parse_terminal_kind(std::string_view s) noexcept;

}  // namespace toolflow
