#include "toolflow/json_extract.hpp"

namespace toolflow {

namespace {

// Index one past the brace matching text[open], or npos.
std::size_t match_brace(std::string_view text, std::size_t open) {
    int depth = 0;
    bool in_string = false;
    for (std::size_t i = open; i < text.size(); ++i) {
        char c = text[i];
        if (in_string) {
            if (c == '\\') {
                ++i;
            } else if (c == '"') {
                in_string = false;
            }
            continue;
        }
        if (c == '"') {
            in_string = true;
        } else if (c == '{') {
            ++depth;
        } else if (c == '}') {
            if (--depth == 0) return i + 1;
        }
    }
    return std::string_view::npos;
}

}  // namespace

std::optional<nlohmann::json> find_json_object(
    std::string_view text, const std::function<bool(const nlohmann::json&)>& accept) {
    for (auto open = text.find('{'); open != std::string_view::npos; open = text.find('{', open + 1)) {
        auto end = match_brace(text, open);
        if (end == std::string_view::npos) continue;
        auto candidate = text.substr(open, end - open);
        auto parsed = nlohmann::json::parse(candidate.begin(), candidate.end(), nullptr, false);
        if (parsed.is_discarded() || !parsed.is_object()) continue;
        if (accept(parsed)) return parsed;
    }
    return std::nullopt;
}

}  // namespace toolflow
