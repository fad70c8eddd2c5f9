#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace toolflow {

enum class Role { System, User, Assistant };

std::string_view to_string(Role role) noexcept;

struct ChatMessage {
    Role role = Role::User;
    std::string content;
};

struct CompletionRequest {
    std::vector<ChatMessage> messages;
    double temperature = 0.0;
    int max_output_tokens = 1024;
    std::optional<std::vector<std::string>> stop;

    /// Throws ConfigError when the request breaks an invariant.
    void validate() const;
};

CompletionRequest make_request(std::string prompt);

/// Message contents joined by blank lines. Scripted matchers run on this text.
std::string render_prompt(const CompletionRequest& request);

class ProviderError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Scripted policy has no entry for the prompt and no default.
class ScriptError : public ProviderError {
public:
    using ProviderError::ProviderError;
};

/// Endpoint unreachable (or kept failing) after every retry.
class ProviderUnavailable : public ProviderError {
public:
    using ProviderError::ProviderError;
};

/// Endpoint answered 4xx. Never retried.
class ProviderRejected : public ProviderError {
public:
    ProviderRejected(int status, const std::string& msg)
        : ProviderError(msg), status_(status) {}
    int status() const noexcept { return status_; }

private:
    int status_;
};

/// Rendered request is over the configured size; nothing is truncated silently.
class RequestTooLarge : public ProviderError {
public:
    using ProviderError::ProviderError;
};

/// Chat-completion backend. Implementations must be callable concurrently.
class Provider {
public:
    virtual ~Provider() = default;
    virtual std::string complete(const CompletionRequest& request) const = 0;
};

// ----------------------------------------------------------------------------
// Scripted provider
// ----------------------------------------------------------------------------

struct PolicyEntry {
    std::string match;
    std::string response;
    bool is_regex = false;
};

struct ScriptedPolicy {
    std::vector<PolicyEntry> entries;
    std::optional<std::string> default_response;
};

/// JSON Lines: one {"match", "response", "is_regex"} or {"default"} object per
/// line; blank lines and lines starting with '#' are skipped.
ScriptedPolicy parse_policy(std::string_view text);
ScriptedPolicy load_policy(const std::filesystem::path& path);

/// Deterministic stand-in for a model: the first entry whose matcher hits the
/// rendered prompt wins, then the default, otherwise ScriptError.
class ScriptedProvider final : public Provider {
public:
    explicit ScriptedProvider(ScriptedPolicy policy);
    ~ScriptedProvider() override;
    ScriptedProvider(ScriptedProvider&&) noexcept;
    ScriptedProvider& operator=(ScriptedProvider&&) noexcept;

    std::string complete(const CompletionRequest& request) const override;
    const ScriptedPolicy& policy() const noexcept { return policy_; }

private:
    struct Compiled;
    ScriptedPolicy policy_;
    std::unique_ptr<Compiled> compiled_;
};

/// Decorator that keeps every rendered prompt and response, for inspection.
class RecordingProvider final : public Provider {
public:
    explicit RecordingProvider(const Provider& inner) : inner_(inner) {}

    std::string complete(const CompletionRequest& request) const override;

    struct Exchange {
        std::string prompt;
        std::string response;  // empty when the inner provider threw
    };
    std::vector<Exchange> exchanges() const;
    std::vector<std::string> prompts() const;
    void clear();

private:
    const Provider& inner_;
    mutable std::mutex mu_;
    mutable std::vector<Exchange> log_;
};

// ----------------------------------------------------------------------------
// Live chat-completions client
// ----------------------------------------------------------------------------

struct HttpProviderConfig {
    std::string base_url;  // e.g. https://api.example.com/v1
    std::string api_key;
    std::string model;
    int max_retries = 3;
    std::chrono::milliseconds initial_backoff{500};
    std::chrono::milliseconds timeout{60000};
    std::size_t max_request_chars = 400000;

    /// PROVIDER_BASE_URL, PROVIDER_API_KEY, PROVIDER_MODEL. Throws ConfigError
    /// when the base URL or model is missing.
    static HttpProviderConfig from_env();
    static bool env_present() noexcept;
};

/// POSTs {base_url}/chat/completions. Transport errors and 5xx are retried with
/// exponential backoff; 4xx surfaces as ProviderRejected immediately.
class HttpChatProvider final : public Provider {
public:
    explicit HttpChatProvider(HttpProviderConfig config);
    std::string complete(const CompletionRequest& request) const override;

    const HttpProviderConfig& config() const noexcept { return config_; }

private:
    HttpProviderConfig config_;
};

}  // namespace toolflow
