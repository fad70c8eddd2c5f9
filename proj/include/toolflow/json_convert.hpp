#pragma once

// JSON mappings for the core value types. Field names here are the stable
// trace-file contract documented in README.md.

#include "toolflow/core.hpp"

#include <nlohmann/json.hpp>

namespace toolflow {

/// Compact dump; invalid UTF-8 is replaced rather than thrown on.
std::string dump_json(const nlohmann::json& j);

/// Lenient conversion used for model output and trace files alike: scalars map
/// directly, flat scalar arrays become lists, anything nested becomes its JSON text.
ArgValue arg_from_json(const nlohmann::json& j);
Args args_from_json(const nlohmann::json& j);

nlohmann::json arg_to_json(const ArgValue& v);

void to_json(nlohmann::json& j, const Instruction& v);
void from_json(const nlohmann::json& j, Instruction& v);
void to_json(nlohmann::json& j, const ParamSpec& v);
void from_json(const nlohmann::json& j, ParamSpec& v);
void to_json(nlohmann::json& j, const ToolSpec& v);
void from_json(const nlohmann::json& j, ToolSpec& v);
void to_json(nlohmann::json& j, const Action& v);
void from_json(const nlohmann::json& j, Action& v);
void to_json(nlohmann::json& j, const Observation& v);
void from_json(const nlohmann::json& j, Observation& v);
void to_json(nlohmann::json& j, const State& v);
void from_json(const nlohmann::json& j, State& v);
void to_json(nlohmann::json& j, const Step& v);
void from_json(const nlohmann::json& j, Step& v);
void to_json(nlohmann::json& j, const Terminal& v);
void from_json(const nlohmann::json& j, Terminal& v);
void to_json(nlohmann::json& j, const Episode& v);
void from_json(const nlohmann::json& j, Episode& v);

}  // namespace toolflow

// ArgValue is a std::variant, so ADL never reaches toolflow; hook the serializer.
template <>
struct nlohmann::adl_serializer<toolflow::ArgValue> {
    static void to_json(nlohmann::json& j, const toolflow::ArgValue& v) {
        j = toolflow::arg_to_json(v);
    }
    static void from_json(const nlohmann::json& j, toolflow::ArgValue& v) {
        v = toolflow::arg_from_json(j);
    }
};
