#pragma once

#include "toolflow/core.hpp"
#include "toolflow/engine.hpp"

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace toolflow {

// ----------------------------------------------------------------------------
// Scenarios
// ----------------------------------------------------------------------------

enum class BehaviorKind { Success, Error, Timeout, Verbose };
enum class Repeat { Once, Forever };

struct Behavior {
    BehaviorKind kind = BehaviorKind::Success;
    std::string payload;          // Success, Verbose
    int code = 500;               // Error
    std::string message;          // Error
    std::size_t filler_chars = 0; // Verbose: total payload length
    Repeat repeat = Repeat::Once;

    bool operator==(const Behavior&) const = default;
};

enum class PassKind { ContainsAll, Regex, Exact };

struct PassCondition {
    PassKind kind = PassKind::ContainsAll;
    std::vector<std::string> substrings;  // ContainsAll
    std::string text;                     // Regex pattern or Exact answer

    bool matches(std::string_view answer) const;
    bool operator==(const PassCondition&) const = default;
};

struct Scenario {
    std::string id;
    Instruction instruction;
    std::vector<ToolSpec> tools;
    std::map<std::string, std::vector<Behavior>> behaviors;
    PassCondition pass_condition;
    /// Scripted policy that drives this scenario, resolved against the file's
    /// directory when loaded from disk.
    std::optional<std::filesystem::path> policy;
};

std::string_view to_string(BehaviorKind kind) noexcept;

/// Throws ValidationError naming the offending tool when a behavior list
/// refers to an undeclared tool or is empty.
void validate_scenario(const Scenario& scenario);

Scenario parse_scenario(std::string_view text, const std::filesystem::path& base_dir = {});
Scenario load_scenario(const std::filesystem::path& path);
/// Every *.json file below `dir`, in path order. The first bad file aborts.
std::vector<Scenario> load_scenario_dir(const std::filesystem::path& dir);

/// `total_chars` of deterministic filler with `relevant` in the middle.
std::string verbose_payload(std::string_view relevant, std::size_t total_chars);

inline constexpr std::chrono::milliseconds kSimulatedTimeout{15000};

/// Per-episode executor over a shared, immutable scenario.
class SandboxSession final : public ToolExecutor {
public:
    explicit SandboxSession(const Scenario& scenario);

    Observation invoke(const std::string& tool_name, const Args& args) override;

    /// Behaviors consumed so far for `tool_name`.
    std::size_t consumed(const std::string& tool_name) const;

private:
    const Scenario& scenario_;
    std::map<std::string, std::size_t> cursor_;
};

/// True iff the episode finished and its answer satisfies the pass condition.
bool check_pass(const Scenario& scenario, const Episode& episode);

// ----------------------------------------------------------------------------
// Live HTTP tools
// ----------------------------------------------------------------------------

struct Endpoint {
    std::string url;          // may contain {param} placeholders
    std::string method = "GET";
    std::string auth_env;     // env var holding the token, optional
    std::string auth_header = "Authorization";
    std::string auth_prefix = "Bearer ";
};

struct EndpointSpec {
    std::map<std::string, Endpoint> tools;
    std::chrono::milliseconds timeout{15000};
};

EndpointSpec parse_endpoint_spec(std::string_view text);
EndpointSpec load_endpoint_spec(const std::filesystem::path& path);

/// Performs the HTTP call and maps every outcome onto an observation status.
/// Never throws.
Observation invoke_live(const EndpointSpec& spec, const std::string& tool_name, const Args& args);

class LiveToolInvoker final : public ToolExecutor {
public:
    explicit LiveToolInvoker(EndpointSpec spec) : spec_(std::move(spec)) {}
    Observation invoke(const std::string& tool_name, const Args& args) override {
        return invoke_live(spec_, tool_name, args);
    }

private:
    EndpointSpec spec_;
};

}  // namespace toolflow
