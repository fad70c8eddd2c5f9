#include "toolflow/eval.hpp"

#include "toolflow/json_extract.hpp"
#include "toolflow/log.hpp"
#include "model_io.hpp"

#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>

namespace toolflow {

using nlohmann::json;

std::string_view to_string(Outcome outcome) noexcept {
    switch (outcome) {
        case Outcome::AWins: return "AWins";
        case Outcome::BWins: return "BWins";
        case Outcome::Tie: return "Tie";
    }
    return "Tie";
}

double pass_rate(std::span<const ScoredEpisode> episodes) {
    if (episodes.empty()) throw ConfigError("pass rate of an empty episode list");
    std::size_t passes = 0;
    for (const auto& e : episodes) passes += e.passed ? 1 : 0;
    return 100.0 * static_cast<double>(passes) / static_cast<double>(episodes.size());
}

double win_rate(std::span<const PairJudgment> judgments, std::string_view method) {
    if (judgments.empty()) throw ConfigError("win rate of an empty judgment list");
    // Count in half-points so the tie split stays exact.
    long half_points = 0;
    for (const auto& j : judgments) {
        const bool is_a = j.method_a == method;
        const bool is_b = j.method_b == method;
        if (!is_a && !is_b) {
            throw ValidationError("judgment for " + j.instruction_id + " does not involve " +
                                  std::string(method));
        }
        if (j.outcome == Outcome::Tie) {
            half_points += 1;
        } else if ((j.outcome == Outcome::AWins) == is_a) {
            half_points += 2;
        }
    }
    return 50.0 * static_cast<double>(half_points) / static_cast<double>(judgments.size());
}

// ----------------------------------------------------------------------------

RuleJudge::RuleJudge(PassFn passes) : passes_(std::move(passes)) {
    if (!passes_) passes_ = [](const Episode& e) { return e.finished(); };
}

std::pair<Outcome, std::string> RuleJudge::decide(const Instruction&, const Episode& a,
                                                  const Episode& b) const {
    const bool pa = passes_(a);
    const bool pb = passes_(b);
    if (pa && pb) {
        const auto sa = a.steps.size();
        const auto sb = b.steps.size();
        const std::string counts = " (" + std::to_string(sa) + " vs " + std::to_string(sb) + " steps)";
        if (sa < sb) return {Outcome::AWins, "both pass, A used fewer steps" + counts};
        if (sb < sa) return {Outcome::BWins, "both pass, B used fewer steps" + counts};
        return {Outcome::Tie, "both pass with the same number of steps" + counts};
    }
    if (pa) return {Outcome::AWins, "only A passes"};
    if (pb) return {Outcome::BWins, "only B passes"};
    return {Outcome::Tie, "neither passes"};
}

namespace {

void describe(std::ostringstream& out, const char* name, const Episode& e) {
    std::set<std::string> used;
    for (const auto& s : e.steps) {
        if (!s.action.is_finish()) used.insert(s.action.tool_name);
    }
    out << "Solution " << name << ":\n"
        << "Outcome: " << (e.terminal ? to_string(e.terminal->kind) : "unfinished") << "\n"
        << "Answer: " << (e.finished() ? e.terminal->answer : std::string("(no answer)")) << "\n"
        << "Total steps: " << e.steps.size() << "\n"
        << "Distinct tools used (" << used.size() << "):";
    for (const auto& t : used) out << " " << t;
    out << "\nCalls:";
    int n = 1;
    for (const auto& s : e.steps) {
        out << "\n" << n++ << ". ";
        if (s.action.is_finish()) {
            out << "Finish";
        } else {
            out << s.action.tool_name << " " << canonical_args(s.action.args);
            if (s.observation) out << " -> " << to_string(s.observation->status);
        }
    }
    out << "\n\n";
}

constexpr const char* kJudgmentHint = R"({"winner": "A" | "B" | "Tie", "rationale": "..."})";

}  // namespace

std::string build_judge_prompt(const Instruction& instruction, const Episode& a, const Episode& b) {
    std::ostringstream out;
    out << kJudgeHeader << "\n"
        << "Compare two solution paths for the same user instruction. Prefer the solution whose "
           "answer better fulfils the instruction. Also weigh the total number of execution steps "
           "(fewer is better) and the diversity of tools used when they help the answer.\n\n"
        << "User instruction:\n"
        << instruction.text << "\n\n";
    describe(out, "A", a);
    describe(out, "B", b);
    out << "Output format: reply with exactly one JSON object and nothing else:\n"
        << R"({"winner": "A" or "B" or "Tie", "rationale": "<one sentence>"})" << "\n";
    return out.str();
}

std::pair<Outcome, std::string> parse_judgment(std::string_view model_output) {
    auto obj = find_json_object(model_output, [](const json& j) { return j.contains("winner"); });
    if (!obj) throw MalformedOutput("no JSON object with a \"winner\" field");
    const auto& w = obj->at("winner");
    if (!w.is_string()) throw MalformedOutput("\"winner\" must be a string");
    std::string rationale;
    if (obj->contains("rationale") && obj->at("rationale").is_string()) {
        rationale = obj->at("rationale").get<std::string>();
    }
    const auto v = w.get<std::string>();
    if (v == "A") return {Outcome::AWins, rationale};
    if (v == "B") return {Outcome::BWins, rationale};
    if (v == "Tie" || v == "tie" || v == "TIE") return {Outcome::Tie, rationale};
    throw MalformedOutput("\"winner\" must be A, B or Tie, got '" + v + "'");
}

std::pair<Outcome, std::string> LlmJudge::decide(const Instruction& instruction, const Episode& a,
                                                 const Episode& b) const {
    try {
        return detail::ask_with_retries(provider_, make_request(build_judge_prompt(instruction, a, b)),
                                        max_retries_, kJudgmentHint, parse_judgment)
            .first;
    } catch (const MalformedOutput& e) {
        log_info(std::string("judge output unusable, scoring a tie: ") + e.what());
        return {Outcome::Tie, std::string("judge output unusable: ") + e.what()};
    } catch (const ProviderError& e) {
        log_info(std::string("judge unavailable, scoring a tie: ") + e.what());
        return {Outcome::Tie, std::string("judge unavailable: ") + e.what()};
    }
}

PairJudgment judge_pair(const Judge& judge, const Instruction& instruction, const Episode& a,
                        const Episode& b) {
    if (a.instruction.id != instruction.id || b.instruction.id != instruction.id) {
        throw ValidationError("judge_pair: episodes are not both for instruction " + instruction.id);
    }
    if (a.method_label == b.method_label) {
        throw ValidationError("judge_pair: both episodes are labelled " + a.method_label);
    }
    auto [outcome, rationale] = judge.decide(instruction, a, b);
    return {instruction.id, a.method_label, b.method_label, outcome, std::move(rationale)};
}

// ----------------------------------------------------------------------------

namespace {

void check_rate(const std::optional<double>& r, const std::string& label) {
    if (r && !(*r >= 0.0 && *r <= 100.0)) {
        throw ValidationError("rate for subset " + label + " is outside [0, 100]");
    }
}

std::optional<double> mean_of(const std::vector<SubsetReport>& reports,
                              std::optional<double> SubsetReport::*field) {
    double sum = 0.0;
    int count = 0;
    for (const auto& r : reports) {
        if (r.*field) {
            sum += *(r.*field);
            ++count;
        }
    }
    if (count == 0) return std::nullopt;
    return sum / count;
}

}  // namespace

AggregateRow aggregate(std::string method, std::vector<SubsetReport> reports) {
    if (reports.empty()) throw ConfigError("aggregate needs at least one subset report");
    std::set<std::string> labels;
    for (const auto& r : reports) {
        if (!labels.insert(r.subset_label).second) {
            throw ValidationError("duplicate subset label " + r.subset_label);
        }
        if (r.n < 1) throw ValidationError("subset " + r.subset_label + " has no instructions");
        check_rate(r.pass_rate, r.subset_label);
        check_rate(r.win_rate, r.subset_label);
    }
    AggregateRow row;
    row.method = std::move(method);
    row.average_pass = mean_of(reports, &SubsetReport::pass_rate);
    row.average_win = mean_of(reports, &SubsetReport::win_rate);
    row.subsets = std::move(reports);
    return row;
}

double round_rate(double rate) { return std::floor(rate * 10.0 + 0.5 + 1e-9) / 10.0; }

std::string format_rate(double rate) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(1) << round_rate(rate);
    return out.str();
}

std::string render_table(std::span<const AggregateRow> rows, Metric metric) {
    std::vector<std::string> columns;
    for (const auto& row : rows) {
        for (const auto& s : row.subsets) {
            if (std::find(columns.begin(), columns.end(), s.subset_label) == columns.end()) {
                columns.push_back(s.subset_label);
            }
        }
    }
    auto pick = [&](const SubsetReport& s) { return metric == Metric::PassRate ? s.pass_rate : s.win_rate; };

    std::vector<std::vector<std::string>> cells;
    std::vector<std::string> header{"Method"};
    header.insert(header.end(), columns.begin(), columns.end());
    header.push_back("Average");
    cells.push_back(header);
    for (const auto& row : rows) {
        std::vector<std::string> line{row.method};
        for (const auto& c : columns) {
            std::string cell = "-";
            for (const auto& s : row.subsets) {
                if (s.subset_label == c && pick(s)) cell = format_rate(*pick(s));
            }
            line.push_back(cell);
        }
        auto avg = metric == Metric::PassRate ? row.average_pass : row.average_win;
        line.push_back(avg ? format_rate(*avg) : "-");
        cells.push_back(std::move(line));
    }

    std::vector<std::size_t> width(header.size(), 0);
    for (const auto& line : cells) {
        for (std::size_t i = 0; i < line.size(); ++i) width[i] = std::max(width[i], line[i].size());
    }
    std::ostringstream out;
    for (const auto& line : cells) {
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (i == 0) {
                out << std::left << std::setw(static_cast<int>(width[i])) << line[i];
            } else {
                out << "  " << std::right << std::setw(static_cast<int>(width[i])) << line[i];
            }
        }
        out << "\n";
    }
    return out.str();
}

json report_json(std::span<const AggregateRow> rows) {
    json out = json::array();
    for (const auto& row : rows) {
        json r;
        r["method"] = row.method;
        r["subsets"] = json::array();
        for (const auto& s : row.subsets) {
            json sj{{"subset_label", s.subset_label}, {"n", s.n}};
            sj["pass_rate"] = s.pass_rate ? json(*s.pass_rate) : json(nullptr);
            sj["win_rate"] = s.win_rate ? json(*s.win_rate) : json(nullptr);
            r["subsets"].push_back(sj);
        }
        r["average_pass"] = row.average_pass ? json(*row.average_pass) : json(nullptr);
        r["average_win"] = row.average_win ? json(*row.average_win) : json(nullptr);
        r["average_pass_display"] = row.average_pass ? json(format_rate(*row.average_pass)) : json(nullptr);
        r["average_win_display"] = row.average_win ? json(format_rate(*row.average_win)) : json(nullptr);
        out.push_back(r);
    }
    return out;
}

}  // namespace toolflow
