#include "toolflow/sandbox.hpp"

#include "http_util.hpp"
#include "toolflow/json_convert.hpp"
#include "toolflow/log.hpp"
#include "toolflow/serialize.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <cstdlib>

namespace toolflow {

using nlohmann::json;

EndpointSpec parse_endpoint_spec(std::string_view text) {
    json j;
    try {
        j = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("endpoint spec: ") + e.what());
    }
    EndpointSpec spec;
    try {
        if (j.contains("timeout_ms")) spec.timeout = std::chrono::milliseconds(j.at("timeout_ms").get<long>());
        for (const auto& [name, e] : j.at("tools").items()) {
            Endpoint ep;
            ep.url = e.at("url").get<std::string>();
            ep.method = e.value("method", std::string("GET"));
            ep.auth_env = e.value("auth_env", std::string());
            ep.auth_header = e.value("auth_header", std::string("Authorization"));
            ep.auth_prefix = e.value("auth_prefix", std::string("Bearer "));
            if (ep.method != "GET" && ep.method != "POST") {
                throw ParseError("endpoint '" + name + "': method must be GET or POST");
            }
            detail::split_url(ep.url);
            spec.tools.emplace(name, std::move(ep));
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("endpoint spec: ") + e.what());
    }
    if (spec.timeout.count() <= 0) throw ConfigError("endpoint timeout must be positive");
    return spec;
}

EndpointSpec load_endpoint_spec(const std::filesystem::path& path) {
    try {
        return parse_endpoint_spec(read_file(path));
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

namespace {

// Substitutes {param} placeholders and returns the arguments left over.
std::string expand_url(const std::string& tmpl, const Args& args, Args& unused) {
    unused = args;
    std::string out;
    std::size_t i = 0;
    while (i < tmpl.size()) {
        if (tmpl[i] == '{') {
            auto close = tmpl.find('}', i);
            if (close != std::string::npos) {
                auto name = tmpl.substr(i + 1, close - i - 1);
                auto it = args.find(name);
                if (it != args.end()) {
                    out += detail::url_encode(arg_text(it->second));
                    unused.erase(name);
                    i = close + 1;
                    continue;
                }
            }
        }
        out += tmpl[i++];
    }
    return out;
}

bool is_json_content(const std::string& content_type) {
    return content_type.find("json") != std::string::npos;
}

}  // namespace

Observation invoke_live(const EndpointSpec& spec, const std::string& tool_name, const Args& args) {
    auto it = spec.tools.find(tool_name);
    if (it == spec.tools.end()) {
        return Observation::failure(ObservationStatus::ToolError, tool_name, args, "unknown tool: " + tool_name);
    }
    const Endpoint& ep = it->second;
    const auto started = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started);
    };
    auto fail = [&](ObservationStatus status, std::string msg, std::optional<int> code = {}) {
        auto o = Observation::failure(status, tool_name, args, std::move(msg), code);
        o.latency = elapsed();
        return o;
    };

    try {
        Args rest;
        const auto url = detail::split_url(expand_url(ep.url, args, rest));

        httplib::Client client(url.origin);
        auto secs = std::chrono::duration_cast<std::chrono::seconds>(spec.timeout);
        auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(spec.timeout - secs);
        client.set_connection_timeout(secs.count(), usecs.count());
        client.set_read_timeout(secs.count(), usecs.count());
        client.set_write_timeout(secs.count(), usecs.count());

        httplib::Headers headers;
        if (!ep.auth_env.empty()) {
            if (const char* token = std::getenv(ep.auth_env.c_str())) {
                headers.emplace(ep.auth_header, ep.auth_prefix + token);
            }
        }

        std::string path = url.path.empty() ? "/" : url.path;
        httplib::Result res;
        if (ep.method == "GET") {
            std::string query;
            for (const auto& [k, v] : rest) {
                query += (query.empty() ? "" : "&") + detail::url_encode(k) + "=" + detail::url_encode(arg_text(v));
            }
            if (!query.empty()) path += (path.find('?') == std::string::npos ? "?" : "&") + query;
            res = client.Get(path, headers);
        } else {
            json body = json::object();
            for (const auto& [k, v] : rest) body[k] = arg_to_json(v);
            res = client.Post(path, headers, body.dump(), "application/json");
        }

        if (!res) {
            const auto err = res.error();
            if (err == httplib::Error::ConnectionTimeout || elapsed() >= spec.timeout) {
                return fail(ObservationStatus::Timeout,
                            "no response within " + std::to_string(spec.timeout.count()) + " ms");
            }
            return fail(ObservationStatus::ToolError, "transport error: " + httplib::to_string(err));
        }
        if (res->status >= 200 && res->status < 300) {
            if (is_json_content(res->get_header_value("Content-Type")) && !json::accept(res->body)) {
                auto o = fail(ObservationStatus::MalformedResponse, "response declared JSON but did not parse");
                o.payload = res->body;
                return o;
            }
            auto o = Observation::success(tool_name, args, res->body);
            o.latency = elapsed();
            return o;
        }
        auto o = fail(ObservationStatus::ToolError, "HTTP " + std::to_string(res->status), res->status);
        o.payload = res->body;
        return o;
    } catch (const std::exception& e) {
        log_debug(std::string("live tool call failed: ") + e.what());
        return fail(ObservationStatus::ToolError, e.what());
    }
}

}  // namespace toolflow
