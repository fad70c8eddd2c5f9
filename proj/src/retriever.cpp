#include "toolflow/retriever.hpp"

#include "toolflow/serialize.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace toolflow {

namespace {

bool is_ascii_punct(unsigned char c) {
    return (c >= 0x21 && c <= 0x2f) || (c >= 0x3a && c <= 0x40) || (c >= 0x5b && c <= 0x60) ||
           (c >= 0x7b && c <= 0x7e);
}

// Length in bytes of a Unicode whitespace sequence at text[i], 0 if none.
std::size_t whitespace_len(std::string_view text, std::size_t i) {
    auto c = static_cast<unsigned char>(text[i]);
    if (c == ' ' || (c >= 0x09 && c <= 0x0d)) return 1;
    auto at = [&](std::size_t k) {
        return i + k < text.size() ? static_cast<unsigned char>(text[i + k]) : 0;
    };
    if (c == 0xc2 && (at(1) == 0x85 || at(1) == 0xa0)) return 2;  // NEL, NBSP
    if (c == 0xe1 && at(1) == 0x9a && at(2) == 0x80) return 3;      // U+1680
    if (c == 0xe2 && at(1) == 0x80) {
        auto d = at(2);
        if ((d >= 0x80 && d <= 0x8a) || d == 0xa8 || d == 0xa9 || d == 0xaf) return 3;
    }
    if (c == 0xe2 && at(1) == 0x81 && at(2) == 0x9f) return 3;  // U+205F
    if (c == 0xe3 && at(1) == 0x80 && at(2) == 0x80) return 3;  // U+3000
    return 0;
}

using TermCounts = std::unordered_map<std::string, double>;

TermCounts count_terms(std::string_view text) {
    TermCounts tf;
    for (auto& t : tokenize(text)) tf[t] += 1.0;
    return tf;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty()) tokens.push_back(std::move(cur));
        cur.clear();
    };
    for (std::size_t i = 0; i < text.size();) {
        if (auto ws = whitespace_len(text, i)) {
            flush();
            i += ws;
            continue;
        }
        auto c = static_cast<unsigned char>(text[i]);
        if (is_ascii_punct(c)) {
            flush();
        } else if (c >= 'A' && c <= 'Z') {
            cur += static_cast<char>(c - 'A' + 'a');
        } else {
            cur += static_cast<char>(c);
        }
        ++i;
    }
    flush();
    return tokens;
}

std::vector<RankedTool> rank(std::string_view instruction_text, std::span<const ToolSpec> catalog,
                             std::size_t k) {
    if (k < 1) throw ConfigError("rank: k must be at least 1");
    if (catalog.empty()) return {};

    std::vector<TermCounts> docs;
    docs.reserve(catalog.size());
    std::unordered_map<std::string, double> df;
    for (const auto& tool : catalog) {
        docs.push_back(count_terms(tool.name + " " + tool.description));
        for (const auto& [term, _] : docs.back()) df[term] += 1.0;
    }
    const double n = static_cast<double>(catalog.size());
    auto idf = [&](const std::string& term) {
        auto it = df.find(term);
        return it == df.end() ? 0.0 : std::log(1.0 + n / it->second);
    };

    const TermCounts query = count_terms(instruction_text);
    double query_norm = 0.0;
    for (const auto& [term, tf] : query) query_norm += std::pow(tf * idf(term), 2);
    query_norm = std::sqrt(query_norm);

    std::vector<RankedTool> ranked;
    ranked.reserve(catalog.size());
    for (std::size_t i = 0; i < catalog.size(); ++i) {
        double dot = 0.0, doc_norm = 0.0;
        for (const auto& [term, tf] : docs[i]) {
            double w = tf * idf(term);
            doc_norm += w * w;
            if (auto q = query.find(term); q != query.end()) dot += w * q->second * idf(term);
        }
        doc_norm = std::sqrt(doc_norm);
        double score = (dot > 0.0 && doc_norm > 0.0 && query_norm > 0.0)
                           ? dot / (doc_norm * query_norm)
                           : 0.0;
        ranked.push_back({catalog[i], score});
    }
    std::sort(ranked.begin(), ranked.end(), [](const RankedTool& a, const RankedTool& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.tool.name < b.tool.name;
    });
    ranked.resize(std::min(k, ranked.size()));
    return ranked;
}

std::vector<ToolSpec> oracle(const Instruction& instruction, const GroundTruth& ground_truth,
                             std::span<const ToolSpec> catalog) {
    auto it = ground_truth.find(instruction.id);
    if (it == ground_truth.end()) {
        throw LookupError("no ground-truth tools for instruction '" + instruction.id + "'");
    }
    std::vector<ToolSpec> tools;
    for (const auto& name : it->second) {
        const ToolSpec* t = find_tool(catalog, name);
        if (!t) throw CatalogMismatch(name);
        tools.push_back(*t);
    }
    return tools;
}

GroundTruth parse_ground_truth(std::string_view text) {
    try {
        auto j = nlohmann::json::parse(text.begin(), text.end());
        if (!j.is_object()) throw ParseError("ground truth must be a JSON object");
        return j.get<GroundTruth>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed ground truth: ") + e.what());
    }
}

GroundTruth load_ground_truth(const std::filesystem::path& path) {
    return parse_ground_truth(read_file(path));
}

std::string dump_ground_truth(const GroundTruth& ground_truth) {
    return nlohmann::json(ground_truth).dump(2) + "\n";
}

}  // namespace toolflow
