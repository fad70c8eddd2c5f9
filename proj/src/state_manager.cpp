#include "toolflow/state_manager.hpp"

#include "toolflow/json_extract.hpp"
#include "toolflow/log.hpp"
#include "model_io.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace toolflow {

using nlohmann::json;

namespace {

constexpr const char* kUpdateFormatHint =
    R"({"verdict": "Success", "summary": "..."} or {"verdict": "Failure", "reason": "..."})";
constexpr const char* kMergeFormatHint = R"({"summary": "..."})";

CompletionRequest request_for(std::string prompt, const StateManagerOptions& options) {
    auto req = make_request(std::move(prompt));
    req.temperature = options.temperature;
    req.max_output_tokens = options.max_output_tokens;
    return req;
}

bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() &&
           std::equal(a.begin(), a.end(), b.begin(), [](unsigned char x, unsigned char y) {
               return std::tolower(x) == std::tolower(y);
           });
}

std::string non_empty_string(const json& obj, const char* key) {
    if (!obj.contains(key) || !obj.at(key).is_string()) return {};
    return obj.at(key).get<std::string>();
}

std::string mechanical_join(const ResultEntry& a, const ResultEntry& b) {
    return a.text + " | " + b.text;
}

std::string build_merge_prompt(const ResultEntry& a, const ResultEntry& b) {
    std::ostringstream out;
    out << kStateCompressionHeader << "\n"
        << "Merge the two task results below into one concise entry. Keep every fact that may be "
           "needed to answer the user (names, numbers, codes, dates) and drop repetition.\n\n"
        << "Results:\n1. " << a.text << "\n2. " << b.text << "\n\n"
        << "Output format: reply with exactly one JSON object and nothing else:\n"
        << R"({"summary": "<merged result>"})" << "\n";
    return out.str();
}

std::string parse_merge(std::string_view output) {
    auto obj = find_json_object(output, [](const json& j) { return j.contains("summary"); });
    if (!obj) throw MalformedOutput("no JSON object with a \"summary\" field");
    auto text = non_empty_string(*obj, "summary");
    if (text.empty()) throw MalformedOutput("\"summary\" must be a non-empty string");
    return text;
}

// The merged entry keeps the newer step index so step order stays increasing.
ResultEntry merge_entries(const Provider& provider, const ResultEntry& a, const ResultEntry& b,
                          const StateManagerOptions& options) {
    std::string joined = mechanical_join(a, b);
    try {
        auto [summary, retries] =
            detail::ask_with_retries(provider, request_for(build_merge_prompt(a, b), options),
                                     options.max_retries, kMergeFormatHint, parse_merge);
        (void)retries;
        if (summary.size() < joined.size()) return {std::move(summary), b.step};
        log_debug("model merge summary is not shorter than the plain join; using the join");
    } catch (const MalformedOutput& e) {
        log_info(std::string("state compression fell back to a plain join: ") + e.what());
    } catch (const ProviderError& e) {
        log_info(std::string("state compression fell back to a plain join: ") + e.what());
    }
    return {std::move(joined), b.step};
}

bool fits(const State& s, std::size_t cap) { return render_state(s).size() <= cap; }

}  // namespace

std::string truncate_payload(std::string_view payload, std::size_t window) {
    if (payload.size() <= window) return std::string(payload);
    auto head = utf8_prefix(payload, window);
    return std::string(head) + "[truncated " + std::to_string(payload.size() - head.size()) +
           " chars]";
}

std::string build_state_prompt(const Instruction& instruction, const State& state,
                               const Observation& observation, std::size_t observation_window) {
    std::ostringstream out;
    out << kStateUpdateHeader << "\n"
        << "You are the State Manager of a tool-using assistant. Check whether the latest tool "
           "call returned information related to the user instruction and update the task state.\n"
        << "Summarization: if the call returned task-relevant information, summarize only the "
           "facts needed for the instruction (names, numbers, codes, dates). Leave out boilerplate "
           "and anything unrelated to the task.\n"
        << "Dealing with failure: if the call failed or returned nothing useful, analyze the "
           "observation and deduce the most likely reason (wrong or missing arguments, service "
           "unavailable, irrelevant result) so the next action can avoid it.\n"
        << "Output format: reply with exactly one JSON object and nothing else, either\n"
        << R"({"verdict": "Success", "summary": "<task-relevant facts>"})" << "\nor\n"
        << R"({"verdict": "Failure", "reason": "<deduced reason>"})" << "\n\n"
        << "User instruction:\n"
        << instruction.text << "\n\n"
        << "Current state:\n"
        << render_state(state) << "\n\n"
        << kLatestObservationLabel << "\n"
        << "Tool: " << observation.tool_name << "\n"
        << "Arguments: " << canonical_args(observation.args_echo) << "\n"
        << "Status: " << to_string(observation.status) << "\n";
    if (!observation.ok()) out << "Error: " << observation.error_descriptor() << "\n";
    out << "Payload:\n" << truncate_payload(observation.payload, observation_window) << "\n";
    return out.str();
}

StateUpdate parse_state_update(std::string_view model_output, const Observation& observation) {
    auto obj = find_json_object(model_output, [](const json& j) { return j.contains("verdict"); });
    if (!obj) throw MalformedOutput("no JSON object with a \"verdict\" field");
    const json& verdict = obj->at("verdict");
    if (!verdict.is_string()) throw MalformedOutput("\"verdict\" must be a string");
    const auto v = verdict.get<std::string>();

    StateUpdate u;
    if (iequals(v, "Success")) {
        auto summary = non_empty_string(*obj, "summary");
        if (summary.empty()) throw MalformedOutput("a Success verdict needs a non-empty \"summary\"");
        u.verdict = Verdict::Success;
        u.result_entry = std::move(summary);
    } else if (iequals(v, "Failure")) {
        auto reason = non_empty_string(*obj, "reason");
        if (reason.empty()) throw MalformedOutput("a Failure verdict needs a non-empty \"reason\"");
        u.verdict = Verdict::Failure;
        u.failure_entry =
            FailureEntry{observation.tool_name, args_digest(observation.args_echo), std::move(reason), 0};
    } else {
        throw MalformedOutput("\"verdict\" must be Success or Failure, got '" + v + "'");
    }
    return u;
}

StateUpdate fallback_update(const Observation& observation, std::size_t result_chars) {
    StateUpdate u;
    if (observation.ok()) {
        u.verdict = Verdict::Success;
        std::string text(utf8_prefix(observation.payload, result_chars));
        if (text.empty()) text = observation.tool_name + " returned an empty response";
        u.result_entry = std::move(text);
    } else {
        u.verdict = Verdict::Failure;
        auto reason = observation.error_descriptor();
        if (reason.empty()) reason = std::string(to_string(observation.status));
        u.failure_entry = FailureEntry{observation.tool_name, args_digest(observation.args_echo),
                                       std::move(reason), 0};
    }
    return u;
}

State apply_update(const State& state, const StateUpdate& update, int step) {
    State next = state;
    if (update.verdict == Verdict::Success) {
        if (update.result_entry) next.current_results.push_back({*update.result_entry, step});
    } else if (update.failure_entry) {
        const auto& f = *update.failure_entry;
        if (!next.has_failure(f.tool_name, f.args_digest)) {
            next.failure_history.push_back({f.tool_name, f.args_digest, f.reason, step});
        }
    }
    return next;
}

UpdateOutcome update(const Provider& provider, const Instruction& instruction, const State& state,
                     const Observation& observation, int step, const StateManagerOptions& options) {
    auto parse = [&](std::string_view out) { return parse_state_update(out, observation); };
    auto req = request_for(build_state_prompt(instruction, state, observation, options.observation_window),
                           options);
    try {
        auto [u, retries] = detail::ask_with_retries(provider, std::move(req), options.max_retries,
                                                     kUpdateFormatHint, parse);
        return {apply_update(state, u, step), u, false, retries};
    } catch (const MalformedOutput& e) {
        log_info(std::string("state update fell back to transport status: ") + e.what());
        auto u = fallback_update(observation, options.fallback_result_chars);
        return {apply_update(state, u, step), u, true, options.max_retries};
    } catch (const ProviderError& e) {
        log_info(std::string("state update fell back to transport status: ") + e.what());
        auto u = fallback_update(observation, options.fallback_result_chars);
        return {apply_update(state, u, step), u, true, 0};
    }
}

State enforce_cap(const Provider& provider, const State& state, std::size_t cap_chars,
                  const StateManagerOptions& options) {
    if (cap_chars < kMinStateCap) {
        throw ConfigError("state cap must be at least " + std::to_string(kMinStateCap) + " chars");
    }
    if (fits(state, cap_chars)) return state;

    State s = state;
    while (!fits(s, cap_chars) && s.current_results.size() > 1) {
        auto merged = merge_entries(provider, s.current_results[0], s.current_results[1], options);
        s.current_results.erase(s.current_results.begin());
        s.current_results.front() = std::move(merged);
    }
    if (fits(s, cap_chars)) return s;

    for (auto& f : s.failure_history) f.reason = shorten(f.reason, options.max_reason_chars);
    if (fits(s, cap_chars)) return s;

    // Last resort: cut the single merged result, keeping its most recent part.
    if (!s.current_results.empty()) {
        auto& text = s.current_results.front().text;
        std::size_t over = render_state(s).size() - cap_chars;
        std::size_t keep = text.size() > over + 3 ? text.size() - over - 3 : 0;
        text = "..." + std::string(utf8_suffix(text, keep));
    }
    if (fits(s, cap_chars)) return s;

    // Failures alone exceed the cap: entries stay, their reasons shrink further.
    for (std::size_t limit : {80u, 40u, 16u, 3u, 0u}) {
        for (auto& f : s.failure_history) f.reason = shorten(f.reason, limit);
        if (fits(s, cap_chars)) break;
    }
    if (!fits(s, cap_chars)) {
        log_warn("failure history alone exceeds the state cap of " + std::to_string(cap_chars) +
                 " chars");
    }
    return s;
}

}  // namespace toolflow
