#pragma once

#include "toolflow/core.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace toolflow {

/// One line of JSON (no trailing newline). Throws ValidationError when the
/// episode has no terminal state or breaks an episode invariant.
std::string serialize_episode(const Episode& episode);
/// Parses and validates one trace record.
Episode deserialize_episode(std::string_view record);

/// Reads every non-blank line of a trace file, or every *.jsonl file of a
/// directory in filename order. ParseError carries the failing line number.
std::vector<Episode> read_traces(const std::filesystem::path& path);
void write_trace(const std::filesystem::path& file, const Episode& episode, bool append = false);

std::vector<ToolSpec> parse_catalog(std::string_view text);
std::vector<ToolSpec> load_catalog(const std::filesystem::path& path);

/// Whole-file read; throws ConfigError when the file cannot be opened.
std::string read_file(const std::filesystem::path& path);

}  // namespace toolflow
