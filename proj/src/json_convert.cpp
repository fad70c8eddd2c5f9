#include "toolflow/json_convert.hpp"

#include <limits>

namespace toolflow {

using nlohmann::json;

namespace {

template <typename T>
T required(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) {
        throw ParseError(std::string("missing field '") + key + "'");
    }
    return j.at(key).get<T>();
}

template <typename T>
std::optional<T> optional_field(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<T>();
}

std::optional<Scalar> scalar_from_json(const json& j) {
    switch (j.type()) {
        case json::value_t::string: return Scalar{j.get<std::string>()};
        case json::value_t::boolean: return Scalar{j.get<bool>()};
        case json::value_t::number_integer: return Scalar{j.get<std::int64_t>()};
        case json::value_t::number_unsigned: {
            auto u = j.get<std::uint64_t>();
            if (u <= static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
                return Scalar{static_cast<std::int64_t>(u)};
            }
            return Scalar{static_cast<double>(u)};
        }
        case json::value_t::number_float: return Scalar{j.get<double>()};
        default: return std::nullopt;
    }
}

json scalar_to_json(const Scalar& s) {
    return std::visit([](const auto& v) { return json(v); }, s);
}

}  // namespace

std::string dump_json(const json& j) {
    return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

ArgValue arg_from_json(const json& j) {
    if (auto s = scalar_from_json(j)) {
        return std::visit([](auto&& v) -> ArgValue { return v; }, *s);
    }
    if (j.is_array()) {
        ArgList list;
        for (const auto& item : j) {
            auto s = scalar_from_json(item);
            if (!s) return dump_json(j);
            list.push_back(std::move(*s));
        }
        return list;
    }
    if (j.is_null()) return std::string("null");
    return dump_json(j);
}

Args args_from_json(const json& j) {
    if (!j.is_object()) throw ParseError("args must be an object");
    Args args;
    for (const auto& [k, v] : j.items()) args.emplace(k, arg_from_json(v));
    return args;
}

json arg_to_json(const ArgValue& v) {
    if (const auto* list = std::get_if<ArgList>(&v)) {
        json arr = json::array();
        for (const auto& s : *list) arr.push_back(scalar_to_json(s));
        return arr;
    }
    return std::visit(
        [](const auto& x) -> json {
            if constexpr (std::is_same_v<std::decay_t<decltype(x)>, ArgList>) {
                return json::array();
            } else {
                return json(x);
            }
        },
        v);
}

void to_json(json& j, const Instruction& v) {
    j = json{{"id", v.id}, {"text", v.text}};
    if (v.subset_label) j["subset_label"] = *v.subset_label;
}

void from_json(const json& j, Instruction& v) {
    v.id = required<std::string>(j, "id");
    v.text = required<std::string>(j, "text");
    v.subset_label = optional_field<std::string>(j, "subset_label");
}

void to_json(json& j, const ParamSpec& v) {
    j = json{{"name", v.name}, {"type", v.type}, {"required", v.required},
             {"description", v.description}};
}

void from_json(const json& j, ParamSpec& v) {
    v.name = required<std::string>(j, "name");
    v.type = optional_field<std::string>(j, "type").value_or("string");
    v.required = optional_field<bool>(j, "required").value_or(false);
    v.description = optional_field<std::string>(j, "description").value_or("");
}

void to_json(json& j, const ToolSpec& v) {
    j = json{{"name", v.name}, {"description", v.description}, {"params", v.params}};
    if (v.category) j["category"] = *v.category;
}

void from_json(const json& j, ToolSpec& v) {
    v.name = required<std::string>(j, "name");
    v.description = optional_field<std::string>(j, "description").value_or("");
    v.params = optional_field<std::vector<ParamSpec>>(j, "params").value_or(std::vector<ParamSpec>{});
    v.category = optional_field<std::string>(j, "category");
}

void to_json(json& j, const Action& v) {
    j = json{{"kind", to_string(v.kind)}, {"tool_name", v.tool_name}, {"args", v.args}};
    if (v.thought) j["thought"] = *v.thought;
}

void from_json(const json& j, Action& v) {
    auto kind = required<std::string>(j, "kind");
    if (kind == "Finish") {
        v.kind = ActionKind::Finish;
    } else if (kind == "ToolCall") {
        v.kind = ActionKind::ToolCall;
    } else {
        throw ParseError("unknown action kind '" + kind + "'");
    }
    v.tool_name = required<std::string>(j, "tool_name");
    v.args = args_from_json(j.contains("args") ? j.at("args") : json::object());
    v.thought = optional_field<std::string>(j, "thought");
}

void to_json(json& j, const Observation& v) {
    j = json{{"status", to_string(v.status)},
             {"payload", v.payload},
             {"error", v.error},
             {"latency_ms", v.latency.count()},
             {"tool_name", v.tool_name},
             {"args", v.args_echo}};
    if (v.error_code) j["error_code"] = *v.error_code;
}

void from_json(const json& j, Observation& v) {
    auto status = required<std::string>(j, "status");
    auto parsed = parse_observation_status(status);
    if (!parsed) throw ParseError("unknown observation status '" + status + "'");
    v.status = *parsed;
    v.payload = optional_field<std::string>(j, "payload").value_or("");
    v.error = optional_field<std::string>(j, "error").value_or("");
    v.error_code = optional_field<int>(j, "error_code");
    v.latency = std::chrono::milliseconds(optional_field<std::int64_t>(j, "latency_ms").value_or(0));
    v.tool_name = required<std::string>(j, "tool_name");
    v.args_echo = args_from_json(j.contains("args") ? j.at("args") : json::object());
}

void to_json(json& j, const State& v) {
    j = json{{"current_results", json::array()}, {"failure_history", json::array()}};
    for (const auto& r : v.current_results) {
        j["current_results"].push_back({{"text", r.text}, {"step", r.step}});
    }
    for (const auto& f : v.failure_history) {
        j["failure_history"].push_back({{"tool_name", f.tool_name},
                                        {"args_digest", f.args_digest},
                                        {"reason", f.reason},
                                        {"step", f.step}});
    }
}

void from_json(const json& j, State& v) {
    v = State{};
    for (const auto& r : required<json>(j, "current_results")) {
        v.current_results.push_back({required<std::string>(r, "text"), required<int>(r, "step")});
    }
    for (const auto& f : required<json>(j, "failure_history")) {
        v.failure_history.push_back({required<std::string>(f, "tool_name"),
                                     required<std::string>(f, "args_digest"),
                                     required<std::string>(f, "reason"),
                                     required<int>(f, "step")});
    }
}

void to_json(json& j, const Step& v) {
    j = json{{"action", v.action}, {"state", v.state}, {"retries", v.retries}};
    j["observation"] = v.observation ? json(*v.observation) : json(nullptr);
    if (!v.node.empty()) j["node"] = v.node;
}

void from_json(const json& j, Step& v) {
    v.action = required<Action>(j, "action");
    v.observation = optional_field<Observation>(j, "observation");
    v.state = required<State>(j, "state");
    v.retries = optional_field<int>(j, "retries").value_or(0);
    v.node = optional_field<std::string>(j, "node").value_or("");
}

void to_json(json& j, const Terminal& v) {
    j = json{{"kind", to_string(v.kind)}};
    if (v.kind == TerminalKind::Finished) j["answer"] = v.answer;
    if (!v.detail.empty()) j["detail"] = v.detail;
}

void from_json(const json& j, Terminal& v) {
    auto kind = required<std::string>(j, "kind");
    auto parsed = parse_terminal_kind(kind);
    if (!parsed) throw ParseError("unknown terminal tag '" + kind + "'");
    v.kind = *parsed;
    v.answer = optional_field<std::string>(j, "answer").value_or("");
    v.detail = optional_field<std::string>(j, "detail").value_or("");
}

void to_json(json& j, const Episode& v) {
    j = json{{"instruction", v.instruction},
             {"tools", v.tools},
             {"steps", v.steps},
             {"method_label", v.method_label},
             {"step_budget", v.step_budget}};
    j["terminal"] = v.terminal ? json(*v.terminal) : json(nullptr);
}

void from_json(const json& j, Episode& v) {
    v.instruction = required<Instruction>(j, "instruction");
    v.tools = required<std::vector<ToolSpec>>(j, "tools");
    v.steps = required<std::vector<Step>>(j, "steps");
    v.terminal = optional_field<Terminal>(j, "terminal");
    v.method_label = required<std::string>(j, "method_label");
    v.step_budget = required<int>(j, "step_budget");
}

}  // namespace toolflow
