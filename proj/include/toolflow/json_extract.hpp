#pragma once

#include <functional>
#include <optional>
#include <string_view>

#include <nlohmann/json.hpp>

namespace toolflow {

/// Scans `text` for balanced {...} spans (string-literal aware) and returns the
/// first one that parses as a JSON object and satisfies `accept`. Surrounding
/// prose and code fences are ignored.
std::optional<nlohmann::json> find_json_object(
    std::string_view text, const std::function<bool(const nlohmann::json&)>& accept);

}  // namespace toolflow
