#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace toolflow {

/// Text with {name} placeholders. Braces that do not enclose a known
/// placeholder name are copied through untouched.
class PromptTemplate {
public:
    /// Throws ConfigError when a required placeholder is absent from the text.
    explicit PromptTemplate(std::string text, std::vector<std::string> required = {});
    static PromptTemplate load(const std::filesystem::path& path, std::vector<std::string> required = {});

    std::string fill(const std::map<std::string, std::string>& values) const;
    const std::string& text() const noexcept { return text_; }

private:
    std::string text_;
};

}  // namespace toolflow
