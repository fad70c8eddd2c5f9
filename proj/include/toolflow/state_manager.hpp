#pragma once

#include "toolflow/core.hpp"
#include "toolflow/provider.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace toolflow {

inline constexpr std::string_view kStateUpdateHeader = "[STATE UPDATE]";
inline constexpr std::string_view kStateCompressionHeader = "[STATE COMPRESSION]";
/// Last section of every state prompt; the observation follows it.
inline constexpr std::string_view kLatestObservationLabel = "Latest observation:";

inline constexpr std::size_t kMinStateCap = 512;

struct StateManagerOptions {
    std::size_t cap_chars = 4096;
    std::size_t observation_window = 4096;
    int max_retries = 2;
    std::size_t fallback_result_chars = 200;
    std::size_t max_reason_chars = 120;
    double temperature = 0.0;
    int max_output_tokens = 1024;
};

enum class Verdict { Success, Failure };

struct StateUpdate {
    Verdict verdict = Verdict::Success;
    std::optional<std::string> result_entry;
    std::optional<FailureEntry> failure_entry;  // step is filled in by apply_update

    bool operator==(const StateUpdate&) const = default;
};

/// Payload unchanged when it fits, else the first `window` chars followed by
/// "[truncated N chars]".
std::string truncate_payload(std::string_view payload, std::size_t window);

std::string build_state_prompt(const Instruction& instruction, const State& state,
                               const Observation& observation, std::size_t observation_window = 4096);

/// Reads {"verdict": "Success", "summary": ...} or {"verdict": "Failure", "reason": ...}.
StateUpdate parse_state_update(std::string_view model_output, const Observation& observation);

/// Transport-status judgement used when the model cannot be understood.
StateUpdate fallback_update(const Observation& observation, std::size_t result_chars = 200);

/// New state with the update registered at `step`. A failure whose
/// (tool, args digest) is already recorded is merged into the existing entry.
State apply_update(const State& state, const StateUpdate& update, int step);

struct UpdateOutcome {
    State state;
    StateUpdate update;
    bool used_fallback = false;
    int retries = 0;
};

/// One summarization stage. Never throws for model problems: after the retries
/// run out (or the provider fails) the mechanical fallback is applied.
UpdateOutcome update(const Provider& provider, const Instruction& instruction, const State& state,
                     const Observation& observation, int step,
                     const StateManagerOptions& options = {});

/// Keeps render_state(result).size() <= cap_chars. Oldest results are merged
/// first (provider summary, mechanical join as fallback); failure entries are
/// never dropped, only their reasons shortened. Throws ConfigError if
/// cap_chars < 512.
State enforce_cap(const Provider& provider, const State& state, std::size_t cap_chars,
                  const StateManagerOptions& options = {});

}  // namespace toolflow
