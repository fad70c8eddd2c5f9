#include "toolflow/sandbox.hpp"

#include "toolflow/json_convert.hpp"
#include "toolflow/serialize.hpp"

#include <boost/regex.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>

namespace toolflow {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 6> kFiller = {
    "Sponsored results and related listings appear below. ",
    "Data is provided as is and may be cached for up to an hour. ",
    "Popular searches this week include weekend deals and travel tips. ",
    "Terms of service apply to all content shown on this page. ",
    "Sign in to save your preferences across devices. ",
    "Customers who viewed this also viewed similar items. ",
};

std::string filler(std::size_t n, std::size_t offset) {
    std::string out;
    out.reserve(n + 80);
    std::size_t i = offset;
    while (out.size() < n) out += kFiller[i++ % kFiller.size()];
    out.resize(n);
    return out;
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

BehaviorKind parse_behavior_kind(const std::string& s) {
    auto k = lower(s);
    if (k == "success") return BehaviorKind::Success;
    if (k == "error") return BehaviorKind::Error;
    if (k == "timeout") return BehaviorKind::Timeout;
    if (k == "verbose") return BehaviorKind::Verbose;
    throw ParseError("unknown behavior kind '" + s + "'");
}

Behavior parse_behavior(const json& j) {
    if (!j.is_object()) throw ParseError("behavior must be an object");
    Behavior b;
    b.kind = parse_behavior_kind(j.at("kind").get<std::string>());
    auto repeat = lower(j.value("repeat", std::string("once")));
    if (repeat == "once") {
        b.repeat = Repeat::Once;
    } else if (repeat == "forever") {
        b.repeat = Repeat::Forever;
    } else {
        throw ParseError("unknown repeat mode '" + repeat + "'");
    }
    switch (b.kind) {
        case BehaviorKind::Success:
            b.payload = j.at("payload").get<std::string>();
            break;
        case BehaviorKind::Error:
            b.code = j.value("code", 500);
            b.message = j.value("message", std::string("internal server error"));
            break;
        case BehaviorKind::Timeout:
            break;
        case BehaviorKind::Verbose:
            b.payload = j.at("payload").get<std::string>();
            b.filler_chars = j.at("filler_chars").get<std::size_t>();
            break;
    }
    return b;
}

PassCondition parse_pass_condition(const json& j) {
    if (!j.is_object()) throw ParseError("pass_condition must be an object");
    PassCondition p;
    if (j.contains("contains_all") || j.contains("contains-all")) {
        p.kind = PassKind::ContainsAll;
        p.substrings = j.contains("contains_all") ? j.at("contains_all").get<std::vector<std::string>>()
                                                  : j.at("contains-all").get<std::vector<std::string>>();
    } else if (j.contains("regex")) {
        p.kind = PassKind::Regex;
        p.text = j.at("regex").get<std::string>();
        try {
            boost::regex probe(p.text, boost::regex::perl);
        } catch (const boost::regex_error& e) {
            throw ParseError(std::string("bad pass_condition regex: ") + e.what());
        }
    } else if (j.contains("exact")) {
        p.kind = PassKind::Exact;
        p.text = j.at("exact").get<std::string>();
    } else {
        throw ParseError("pass_condition needs one of contains_all, regex, exact");
    }
    return p;
}

Observation with_latency(Observation o, std::chrono::milliseconds latency) {
    o.latency = latency;
    return o;
}

}  // namespace

std::string_view to_string(BehaviorKind kind) noexcept {
    switch (kind) {
        case BehaviorKind::Success: return "success";
        case BehaviorKind::Error: return "error";
        case BehaviorKind::Timeout: return "timeout";
        case BehaviorKind::Verbose: return "verbose";
    }
    return "success";
}

bool PassCondition::matches(std::string_view answer) const {
    switch (kind) {
        case PassKind::ContainsAll:
            return std::all_of(substrings.begin(), substrings.end(), [&](const std::string& s) {
                return answer.find(s) != std::string_view::npos;
            });
        case PassKind::Regex: {
            boost::regex re(text, boost::regex::perl);
            return boost::regex_search(answer.begin(), answer.end(), re);
        }
        case PassKind::Exact:
            return answer == text;
    }
    return false;
}

void validate_scenario(const Scenario& s) {
    if (s.id.empty()) throw ValidationError("scenario without an id");
    if (s.instruction.text.empty()) throw ValidationError("scenario '" + s.id + "' has an empty instruction");
    if (s.tools.empty()) throw ValidationError("scenario '" + s.id + "' declares no tools");
    validate_catalog(s.tools);
    for (const auto& [tool, list] : s.behaviors) {
        if (!find_tool(s.tools, tool)) {
            throw ValidationError("scenario '" + s.id + "' has behaviors for undeclared tool '" + tool + "'");
        }
        if (list.empty()) {
            throw ValidationError("scenario '" + s.id + "' has an empty behavior list for '" + tool + "'");
        }
        for (const auto& b : list) {
            if (b.kind == BehaviorKind::Verbose && b.filler_chars < b.payload.size()) {
                throw ValidationError("verbose behavior for '" + tool +
                                      "' is shorter than its relevant payload");
            }
        }
    }
}

Scenario parse_scenario(std::string_view text, const std::filesystem::path& base_dir) {
    json j;
    try {
        j = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("scenario: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("scenario must be a JSON object");

    Scenario s;
    try {
        s.id = j.at("id").get<std::string>();
        const auto& ij = j.at("instruction");
        if (ij.is_string()) {
            s.instruction.text = ij.get<std::string>();
        } else {
            s.instruction.text = ij.at("text").get<std::string>();
            if (ij.contains("id")) s.instruction.id = ij.at("id").get<std::string>();
            if (ij.contains("subset_label")) s.instruction.subset_label = ij.at("subset_label").get<std::string>();
        }
        if (s.instruction.id.empty()) s.instruction.id = s.id;
        if (j.contains("subset_label") && !s.instruction.subset_label) {
            s.instruction.subset_label = j.at("subset_label").get<std::string>();
        }
        s.tools = j.at("tools").get<std::vector<ToolSpec>>();
        if (j.contains("behaviors")) {
            for (const auto& [tool, list] : j.at("behaviors").items()) {
                if (!list.is_array()) throw ParseError("behaviors for '" + tool + "' must be a list");
                auto& out = s.behaviors[tool];
                for (const auto& b : list) out.push_back(parse_behavior(b));
            }
        }
        s.pass_condition = parse_pass_condition(j.at("pass_condition"));
        if (j.contains("policy")) {
            std::filesystem::path p = j.at("policy").get<std::string>();
            s.policy = p.is_relative() && !base_dir.empty() ? (base_dir / p).lexically_normal() : p;
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("scenario: ") + e.what());
    }
    validate_scenario(s);
    return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
    auto text = read_file(path);
    try {
        return parse_scenario(text, path.parent_path());
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

std::vector<Scenario> load_scenario_dir(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw ConfigError("not a directory: " + dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::recursive_directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<Scenario> out;
    out.reserve(files.size());
    for (const auto& f : files) out.push_back(load_scenario(f));
    return out;
}

std::string verbose_payload(std::string_view relevant, std::size_t total_chars) {
    if (total_chars <= relevant.size()) return std::string(relevant);
    const std::size_t pad = total_chars - relevant.size();
    const std::size_t before = pad / 2;
    return filler(before, 0) + std::string(relevant) + filler(pad - before, 3);
}

SandboxSession::SandboxSession(const Scenario& scenario) : scenario_(scenario) {}

std::size_t SandboxSession::consumed(const std::string& tool_name) const {
    auto it = cursor_.find(tool_name);
    return it == cursor_.end() ? 0 : it->second;
}

Observation SandboxSession::invoke(const std::string& tool_name, const Args& args) {
    const ToolSpec* spec = find_tool(scenario_.tools, tool_name);
    if (!spec) {
        return Observation::failure(ObservationStatus::ToolError, tool_name, args,
                                    "unknown tool: " + tool_name);
    }
    for (const auto& p : spec->params) {
        if (p.required && !args.contains(p.name)) {
            return with_latency(Observation::failure(ObservationStatus::ToolError, tool_name, args,
                                                     "missing required parameter: " + p.name, 400),
                                std::chrono::milliseconds{5});
        }
    }
    auto it = scenario_.behaviors.find(tool_name);
    if (it == scenario_.behaviors.end()) {
        return Observation::failure(ObservationStatus::ToolError, tool_name, args,
                                    "no behavior configured for " + tool_name, 501);
    }

    // Once-behaviors advance the cursor; a forever-behavior, or the last entry
    // of an exhausted list, is served again on every call.
    const auto& list = it->second;
    auto& cur = cursor_[tool_name];
    const std::size_t index = std::min(cur, list.size() - 1);
    const Behavior& b = list[index];
    if (b.repeat == Repeat::Once && cur < list.size()) ++cur;

    switch (b.kind) {
        case BehaviorKind::Success:
            return with_latency(Observation::success(tool_name, args, b.payload), std::chrono::milliseconds{120});
        case BehaviorKind::Error:
            return with_latency(
                Observation::failure(ObservationStatus::ToolError, tool_name, args, b.message, b.code),
                std::chrono::milliseconds{80});
        case BehaviorKind::Timeout:
            return with_latency(
                Observation::failure(ObservationStatus::Timeout, tool_name, args,
                                     "no response within " + std::to_string(kSimulatedTimeout.count()) + " ms"),
                kSimulatedTimeout);
        case BehaviorKind::Verbose:
            return with_latency(
                Observation::success(tool_name, args, verbose_payload(b.payload, b.filler_chars)),
                std::chrono::milliseconds{250});
    }
    return Observation::failure(ObservationStatus::ToolError, tool_name, args, "unhandled behavior");
}

bool check_pass(const Scenario& scenario, const Episode& episode) {
    if (!episode.finished()) return false;
    return scenario.pass_condition.matches(episode.terminal->answer);
}

}  // namespace toolflow
