#include "toolflow/prompt.hpp"

#include "toolflow/core.hpp"
#include "toolflow/serialize.hpp"

namespace toolflow {

PromptTemplate::PromptTemplate(std::string text, std::vector<std::string> required)
    : text_(std::move(text)) {
    for (const auto& name : required) {
        if (text_.find("{" + name + "}") == std::string::npos) {
            throw ConfigError("prompt template lacks placeholder {" + name + "}");
        }
    }
}

PromptTemplate PromptTemplate::load(const std::filesystem::path& path,
                                    std::vector<std::string> required) {
    return PromptTemplate(read_file(path), std::move(required));
}

std::string PromptTemplate::fill(const std::map<std::string, std::string>& values) const {
    std::string out;
    out.reserve(text_.size());
    std::size_t i = 0;
    while (i < text_.size()) {
        if (text_[i] == '{') {
            auto close = text_.find('}', i + 1);
            if (close != std::string::npos) {
                auto name = text_.substr(i + 1, close - i - 1);
                if (auto it = values.find(name); it != values.end() && is_identifier(name)) {
                    out += it->second;
                    i = close + 1;
                    continue;
                }
            }
        }
        out += text_[i++];
    }
    return out;
}

}  // namespace toolflow
