#pragma once

#include "toolflow/core.hpp"
#include "toolflow/provider.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace toolflow {

enum class Outcome { AWins, BWins, Tie };

std::string_view to_string(Outcome outcome) noexcept;

struct PairJudgment {
    std::string instruction_id;
    std::string method_a;
    std::string method_b;
    Outcome outcome = Outcome::Tie;
    std::string rationale;

    bool operator==(const PairJudgment&) const = default;
};

struct ScoredEpisode {
    Episode episode;
    bool passed = false;
};

/// 100 * passes / total in full precision. Throws ConfigError on an empty list.
double pass_rate(std::span<const ScoredEpisode> episodes);

/// 100 * (wins + ties / 2) / total for `method`. Throws ConfigError on an empty
/// list and ValidationError when a judgment does not involve `method`.
double win_rate(std::span<const PairJudgment> judgments, std::string_view method);

class Judge {
public:
    virtual ~Judge() = default;
    virtual std::pair<Outcome, std::string> decide(const Instruction& instruction, const Episode& a,
                                                   const Episode& b) const = 0;
};

/// Deterministic judge: both pass -> fewer steps wins (equal -> Tie); exactly
/// one passes -> it wins; neither -> Tie.
class RuleJudge final : public Judge {
public:
    using PassFn = std::function<bool(const Episode&)>;
    /// Without a predicate an episode passes when it Finished.
    explicit RuleJudge(PassFn passes = {});

    std::pair<Outcome, std::string> decide(const Instruction& instruction, const Episode& a,
                                           const Episode& b) const override;

private:
    PassFn passes_;
};

inline constexpr std::string_view kJudgeHeader = "[PAIR JUDGMENT]";

std::string build_judge_prompt(const Instruction& instruction, const Episode& a, const Episode& b);
/// Reads {"winner": "A" | "B" | "Tie", "rationale": ...}.
std::pair<Outcome, std::string> parse_judgment(std::string_view model_output);

/// Model-backed judge. Unusable output after the retries, or a provider
/// failure, counts as a Tie.
class LlmJudge final : public Judge {
public:
    explicit LlmJudge(const Provider& provider, int max_retries = 2)
        : provider_(provider), max_retries_(max_retries) {}

    std::pair<Outcome, std::string> decide(const Instruction& instruction, const Episode& a,
                                           const Episode& b) const override;

private:
    const Provider& provider_;
    int max_retries_;
};

/// Both episodes must be for `instruction` and carry different method labels.
PairJudgment judge_pair(const Judge& judge, const Instruction& instruction, const Episode& a,
                        const Episode& b);

struct SubsetReport {
    std::string subset_label;
    std::optional<double> pass_rate;
    std::optional<double> win_rate;
    int n = 1;

    bool operator==(const SubsetReport&) const = default;
};

struct AggregateRow {
    std::string method;
    std::vector<SubsetReport> subsets;
    std::optional<double> average_pass;  // unweighted mean over subsets
    std::optional<double> average_win;
};

/// Throws ConfigError on an empty list, ValidationError on duplicate labels or
/// rates outside [0, 100].
AggregateRow aggregate(std::string method, std::vector<SubsetReport> reports);

/// Half-up to one decimal: 65.75 -> "65.8".
std::string format_rate(double rate);
double round_rate(double rate);

enum class Metric { PassRate, WinRate };

/// Monospace table with one column per subset (first-seen order) and a
/// final Average column.
std::string render_table(std::span<const AggregateRow> rows, Metric metric);
nlohmann::json report_json(std::span<const AggregateRow> rows);

}  // namespace toolflow
