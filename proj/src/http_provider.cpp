#include "toolflow/provider.hpp"

#include "http_util.hpp"
#include "toolflow/core.hpp"
#include "toolflow/log.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <thread>

namespace toolflow {

namespace {

std::string env_or_empty(const char* name) {
    const char* v = std::getenv(name);
    return v ? std::string(v) : std::string();
}

}  // namespace

HttpProviderConfig HttpProviderConfig::from_env() {
    HttpProviderConfig cfg;
    cfg.base_url = env_or_empty("PROVIDER_BASE_URL");
    cfg.api_key = env_or_empty("PROVIDER_API_KEY");
    cfg.model = env_or_empty("PROVIDER_MODEL");
    if (cfg.base_url.empty()) throw ConfigError("PROVIDER_BASE_URL is not set");
    if (cfg.model.empty()) throw ConfigError("PROVIDER_MODEL is not set");
    return cfg;
}

bool HttpProviderConfig::env_present() noexcept {
    return !env_or_empty("PROVIDER_BASE_URL").empty() && !env_or_empty("PROVIDER_MODEL").empty();
}

HttpChatProvider::HttpChatProvider(HttpProviderConfig config) : config_(std::move(config)) {
    detail::split_url(config_.base_url);
    if (config_.max_retries < 0) throw ConfigError("max_retries must be >= 0");
}

std::string HttpChatProvider::complete(const CompletionRequest& request) const {
    request.validate();
    std::size_t chars = 0;
    for (const auto& m : request.messages) chars += m.content.size();
    if (chars > config_.max_request_chars) {
        throw RequestTooLarge("request has " + std::to_string(chars) + " characters, limit " +
                              std::to_string(config_.max_request_chars));
    }

    nlohmann::json body;
    body["model"] = config_.model;
    body["temperature"] = request.temperature;
    body["max_tokens"] = request.max_output_tokens;
    body["messages"] = nlohmann::json::array();
    for (const auto& m : request.messages) {
        body["messages"].push_back({{"role", to_string(m.role)}, {"content", m.content}});
    }
    if (request.stop) body["stop"] = *request.stop;
    const std::string payload = body.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);

    const auto url = detail::split_url(config_.base_url);
    const std::string path = url.path + "/chat/completions";
    auto seconds = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
    auto micros = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - seconds);

    std::string last_error;
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(config_.initial_backoff * (1 << (attempt - 1)));
        }
        httplib::Client client(url.origin);
        client.set_connection_timeout(seconds.count(), micros.count());
        client.set_read_timeout(seconds.count(), micros.count());
        client.set_write_timeout(seconds.count(), micros.count());
        httplib::Headers headers;
        if (!config_.api_key.empty()) {
            headers.emplace("Authorization", "Bearer " + config_.api_key);
        }
        auto res = client.Post(path, headers, payload, "application/json");
        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
            log_debug("provider attempt " + std::to_string(attempt + 1) + ": " + last_error);
            continue;
        }
        if (res->status >= 400 && res->status < 500) {
            throw ProviderRejected(res->status, "provider rejected request with HTTP " +
                                                    std::to_string(res->status) + ": " +
                                                    res->body.substr(0, 300));
        }
        if (res->status >= 500 || res->status < 200 || res->status >= 300) {
            last_error = "HTTP " + std::to_string(res->status);
            log_debug("provider attempt " + std::to_string(attempt + 1) + ": " + last_error);
            continue;
        }
        try {
            auto j = nlohmann::json::parse(res->body);
            const auto& content = j.at("choices").at(0).at("message").at("content");
            if (!content.is_string()) throw ProviderError("completion has no text content");
            return content.get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw ProviderError(std::string("unreadable completion response: ") + e.what());
        }
    }
    throw ProviderUnavailable("provider unavailable after " +
                              std::to_string(config_.max_retries + 1) + " attempts: " + last_error);
}

}  // namespace toolflow
