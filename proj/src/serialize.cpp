#include "toolflow/serialize.hpp"

#include "toolflow/json_convert.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace toolflow {

using nlohmann::json;

std::string serialize_episode(const Episode& episode) {
    if (!episode.terminal) throw ValidationError("cannot serialize an episode without a terminal state");
    validate_episode(episode);
    return dump_json(json(episode));
}

Episode deserialize_episode(std::string_view record) {
    json j;
    try {
        j = json::parse(record.begin(), record.end());
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed trace record: ") + e.what());
    }
    Episode episode;
    try {
        episode = j.get<Episode>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed trace record: ") + e.what());
    }
    if (!episode.terminal) throw ParseError("trace record has no terminal state");
    validate_episode(episode);
    return episode;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace {

void read_trace_file(const std::filesystem::path& path, std::vector<Episode>& out) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open trace " + path.string());
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(deserialize_episode(line));
        } catch (const ParseError& e) {
            throw ParseError(path.string() + ": " + e.what(), lineno);
        } catch (const ValidationError& e) {
            throw ParseError(path.string() + ": " + e.what(), lineno);
        }
    }
}

}  // namespace

std::vector<Episode> read_traces(const std::filesystem::path& path) {
    std::vector<Episode> episodes;
    if (std::filesystem::is_directory(path)) {
        std::vector<std::filesystem::path> files;
        for (const auto& entry : std::filesystem::recursive_directory_iterator(path)) {
            if (entry.is_regular_file() && entry.path().extension() == ".jsonl") {
                files.push_back(entry.path());
            }
        }
        std::sort(files.begin(), files.end());
        for (const auto& f : files) read_trace_file(f, episodes);
    } else {
        read_trace_file(path, episodes);
    }
    return episodes;
}

void write_trace(const std::filesystem::path& file, const Episode& episode, bool append) {
    auto record = serialize_episode(episode);
    if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
    std::ofstream out(file, append ? std::ios::app : std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + file.string());
    out << record << '\n';
}

std::vector<ToolSpec> parse_catalog(std::string_view text) {
    std::vector<ToolSpec> tools;
    try {
        auto j = json::parse(text.begin(), text.end());
        if (j.is_object() && j.contains("tools")) j = j.at("tools");
        if (!j.is_array()) throw ParseError("tool catalog must be a JSON array");
        tools = j.get<std::vector<ToolSpec>>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed tool catalog: ") + e.what());
    }
    validate_catalog(tools);
    return tools;
}

std::vector<ToolSpec> load_catalog(const std::filesystem::path& path) {
    return parse_catalog(read_file(path));
}

}  // namespace toolflow
