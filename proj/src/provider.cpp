#include "toolflow/provider.hpp"

#include "toolflow/core.hpp"
#include "toolflow/serialize.hpp"

#include <boost/regex.hpp>
#include <nlohmann/json.hpp>

namespace toolflow {

std::string_view to_string(Role role) noexcept {
    switch (role) {
        case Role::System: return "system";
        case Role::User: return "user";
        case Role::Assistant: return "assistant";
    }
    return "user";
}

void CompletionRequest::validate() const {
    if (messages.empty()) throw ConfigError("completion request has no messages");
    for (const auto& m : messages) {
        if (m.role != Role::Assistant && m.content.empty()) {
            throw ConfigError("empty " + std::string(to_string(m.role)) + " message");
        }
    }
    if (!(temperature >= 0.0)) throw ConfigError("temperature must be >= 0");
    if (max_output_tokens < 1) throw ConfigError("max_output_tokens must be positive");
}

CompletionRequest make_request(std::string prompt) {
    CompletionRequest req;
    req.messages.push_back({Role::User, std::move(prompt)});
    return req;
}

std::string render_prompt(const CompletionRequest& request) {
    std::string out;
    for (const auto& m : request.messages) {
        if (!out.empty()) out += "\n\n";
        out += m.content;
    }
    return out;
}

// ----------------------------------------------------------------------------

ScriptedPolicy parse_policy(std::string_view text) {
    ScriptedPolicy policy;
    std::size_t lineno = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        auto line = text.substr(pos, end - pos);
        pos = end + 1;
        ++lineno;

        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string_view::npos || line[first] == '#') {
            if (end == text.size()) break;
            continue;
        }
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line.begin(), line.end());
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(std::string("policy: ") + e.what(), lineno);
        }
        if (!j.is_object()) throw ParseError("policy entry must be a JSON object", lineno);
        try {
            if (j.contains("default")) {
                if (policy.default_response) throw ParseError("policy has two defaults", lineno);
                policy.default_response = j.at("default").get<std::string>();
                continue;
            }
            if (!j.contains("match") || !j.contains("response")) {
                throw ParseError("policy entry needs 'match' and 'response'", lineno);
            }
            PolicyEntry entry;
            entry.match = j.at("match").get<std::string>();
            entry.response = j.at("response").get<std::string>();
            entry.is_regex = j.value("is_regex", false);
            if (entry.match.empty()) throw ParseError("policy matcher is empty", lineno);
            if (entry.is_regex) {
                try {
                    boost::regex probe(entry.match, boost::regex::perl);
                } catch (const boost::regex_error& e) {
                    throw ParseError(std::string("bad regex: ") + e.what(), lineno);
                }
            }
            policy.entries.push_back(std::move(entry));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("policy: ") + e.what(), lineno);
        }
        if (end == text.size()) break;
    }
    return policy;
}

ScriptedPolicy load_policy(const std::filesystem::path& path) {
    try {
        return parse_policy(read_file(path));
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what(), e.line());
    }
}

struct ScriptedProvider::Compiled {
    std::vector<std::optional<boost::regex>> patterns;
};

ScriptedProvider::ScriptedProvider(ScriptedPolicy policy)
    : policy_(std::move(policy)), compiled_(std::make_unique<Compiled>()) {
    for (const auto& e : policy_.entries) {
        if (e.is_regex) {
            compiled_->patterns.emplace_back(boost::regex(e.match, boost::regex::perl));
        } else {
            compiled_->patterns.emplace_back(std::nullopt);
        }
    }
}

ScriptedProvider::~ScriptedProvider() = default;
ScriptedProvider::ScriptedProvider(ScriptedProvider&&) noexcept = default;
ScriptedProvider& ScriptedProvider::operator=(ScriptedProvider&&) noexcept = default;

std::string ScriptedProvider::complete(const CompletionRequest& request) const {
    request.validate();
    const std::string prompt = render_prompt(request);
    for (std::size_t i = 0; i < policy_.entries.size(); ++i) {
        const auto& entry = policy_.entries[i];
        const auto& re = compiled_->patterns[i];
        bool hit = re ? boost::regex_search(prompt, *re)
                      : prompt.find(entry.match) != std::string::npos;
        if (hit) return entry.response;
    }
    if (policy_.default_response) return *policy_.default_response;
    auto head = prompt.substr(0, std::min<std::size_t>(prompt.size(), 60));
    throw ScriptError("no scripted response matches prompt starting with: " + head);
}

// ----------------------------------------------------------------------------

std::string RecordingProvider::complete(const CompletionRequest& request) const {
    auto prompt = render_prompt(request);
    try {
        auto response = inner_.complete(request);
        std::lock_guard lock(mu_);
        log_.push_back({std::move(prompt), response});
        return response;
    } catch (...) {
        std::lock_guard lock(mu_);
        log_.push_back({std::move(prompt), {}});
        throw;
    }
}

std::vector<RecordingProvider::Exchange> RecordingProvider::exchanges() const {
    std::lock_guard lock(mu_);
    return log_;
}

std::vector<std::string> RecordingProvider::prompts() const {
    std::lock_guard lock(mu_);
    std::vector<std::string> out;
    out.reserve(log_.size());
    for (const auto& e : log_) out.push_back(e.prompt);
    return out;
}

void RecordingProvider::clear() {
    std::lock_guard lock(mu_);
    log_.clear();
}

}  // namespace toolflow
