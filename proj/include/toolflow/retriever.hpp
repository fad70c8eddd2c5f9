#pragma once

#include "toolflow/core.hpp"

#include <filesystem>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace toolflow {

struct RankedTool {
    ToolSpec tool;
    double score = 0.0;
};

/// Splits on Unicode whitespace, lowercases ASCII letters and treats ASCII
/// punctuation as a separator. Non-ASCII bytes are kept verbatim.
std::vector<std::string> tokenize(std::string_view text);

/// Cosine similarity between TF-IDF vectors of the query and of each tool's
/// name + description, idf(t) = ln(1 + N / df(t)). Returns min(k, |catalog|)
/// tools sorted by descending score, ties by ascending name.
std::vector<RankedTool> rank(std::string_view instruction_text, std::span<const ToolSpec> catalog,
                             std::size_t k);

using GroundTruth = std::map<std::string, std::vector<std::string>>;

class LookupError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class CatalogMismatch : public std::runtime_error {
public:
    CatalogMismatch(std::string tool)
        : std::runtime_error("ground-truth tool not in catalog: " + tool), tool_(std::move(tool)) {}
    const std::string& tool() const noexcept { return tool_; }

private:
    std::string tool_;
};

/// The ground-truth tools for the instruction, in ground-truth order.
std::vector<ToolSpec> oracle(const Instruction& instruction, const GroundTruth& ground_truth,
                             std::span<const ToolSpec> catalog);

GroundTruth parse_ground_truth(std::string_view text);
GroundTruth load_ground_truth(const std::filesystem::path& path);
/// Pretty-printed JSON with sorted ids; parse_ground_truth(dump(x)) == x.
std::string dump_ground_truth(const GroundTruth& ground_truth);

}  // namespace toolflow
