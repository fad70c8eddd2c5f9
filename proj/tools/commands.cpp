#include "commands.hpp"

#include "toolflow/engine.hpp"
#include "toolflow/eval.hpp"
#include "toolflow/log.hpp"
#include "toolflow/provider.hpp"
#include "toolflow/retriever.hpp"
#include "toolflow/sandbox.hpp"
#include "toolflow/serialize.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace toolflow::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Every flag has a config-file key of the same name (dashes become
// underscores). Unset optionals are filled from the config file, then from
// built-in defaults.
struct Options {
    std::optional<std::string> config;
    std::optional<std::string> method;
    std::optional<std::string> methods;
    std::optional<std::string> scenario;
    std::optional<std::string> scenario_dir;
    std::optional<std::string> policy;
    std::optional<std::string> provider;
    std::optional<int> budget;
    std::optional<std::size_t> state_cap;
    std::optional<bool> decompose;
    std::optional<int> concurrency;
    std::optional<std::string> out;
    std::optional<std::string> tools;
    std::optional<std::string> endpoints;
    std::optional<std::string> instruction;
    std::optional<std::string> router_template;
    std::optional<std::string> judge;
    std::optional<std::size_t> react_window;
    std::optional<int> dfsdt_children;
    std::optional<std::size_t> observation_window;
    std::optional<std::string> retriever;
    std::optional<std::string> ground_truth;
    std::optional<std::size_t> top_k;
    std::optional<std::string> a;
    std::optional<std::string> b;
};

template <typename T>
void fill_from(std::optional<T>& target, const json& cfg, const char* key) {
    if (target || !cfg.contains(key)) return;
    try {
        target = cfg.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
}

void fill_path(std::optional<std::string>& target, const json& cfg, const char* key, const fs::path& base) {
    if (target || !cfg.contains(key)) return;
    fill_from(target, cfg, key);
    fs::path p = *target;
    if (p.is_relative()) target = (base / p).lexically_normal().string();
}

void apply_config(Options& o) {
    if (!o.config) return;
    const fs::path cfg_path = *o.config;
    json cfg;
    try {
        cfg = json::parse(read_file(cfg_path));
    } catch (const json::parse_error& e) {
        throw ParseError(cfg_path.string() + ": " + e.what());
    }
    if (!cfg.is_object()) throw ConfigError("config file must hold a JSON object");
    const fs::path base = cfg_path.parent_path();

    fill_from(o.method, cfg, "method");
    if (!o.methods && cfg.contains("methods")) {
        const auto& m = cfg.at("methods");
        if (m.is_array()) {
            std::string joined;
            for (const auto& x : m) joined += (joined.empty() ? "" : ",") + x.get<std::string>();
            o.methods = joined;
        } else {
            fill_from(o.methods, cfg, "methods");
        }
    }
    fill_path(o.scenario, cfg, "scenario", base);
    fill_path(o.scenario_dir, cfg, "scenario_dir", base);
    fill_path(o.policy, cfg, "policy", base);
    fill_from(o.provider, cfg, "provider");
    fill_from(o.budget, cfg, "budget");
    fill_from(o.state_cap, cfg, "state_cap");
    fill_from(o.decompose, cfg, "decompose");
    fill_from(o.concurrency, cfg, "concurrency");
    fill_path(o.out, cfg, "out", base);
    fill_path(o.tools, cfg, "tools", base);
    fill_path(o.endpoints, cfg, "endpoints", base);
    fill_from(o.instruction, cfg, "instruction");
    fill_path(o.router_template, cfg, "router_template", base);
    fill_from(o.judge, cfg, "judge");
    fill_from(o.react_window, cfg, "react_window");
    fill_from(o.dfsdt_children, cfg, "dfsdt_children");
    fill_from(o.observation_window, cfg, "observation_window");
    fill_from(o.retriever, cfg, "retriever");
    fill_path(o.ground_truth, cfg, "ground_truth", base);
    fill_from(o.top_k, cfg, "top_k");
}

std::vector<std::string> split_methods(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (item.empty()) continue;
        if (!is_known_method(item)) {
            throw ConfigError("unknown method '" + item + "' (expected sum2act, react or dfsdt)");
        }
        if (std::find(out.begin(), out.end(), item) == out.end()) out.push_back(item);
    }
    if (out.empty()) throw ConfigError("no methods given");
    return out;
}

// Keeps the router template alive for as long as configs point at it.
struct Settings {
    std::unique_ptr<PromptTemplate> router_template;

    EngineConfig engine_config(const Options& o, const std::string& method) const {
        auto c = EngineConfig::defaults_for(method);
        if (o.budget) c.step_budget = *o.budget;
        if (o.state_cap) c.state_cap_chars = *o.state_cap;
        if (o.decompose) c.use_decomposition = *o.decompose;
        if (o.react_window) c.react_memory_window_chars = *o.react_window;
        if (o.dfsdt_children) c.dfsdt_max_children = *o.dfsdt_children;
        if (o.observation_window) c.observation_window_chars = *o.observation_window;
        c.router_template = router_template.get();
        c.validate();
        return c;
    }
};

Settings load_settings(const Options& o) {
    Settings s;
    if (o.router_template) {
        s.router_template = std::make_unique<PromptTemplate>(
            PromptTemplate::load(*o.router_template, {"instruction", "state", "tools", "rules"}));
    }
    return s;
}

std::string provider_mode(const Options& o) {
    auto mode = o.provider.value_or("scripted");
    if (mode != "scripted" && mode != "live") {
        throw ConfigError("--provider must be scripted or live, got '" + mode + "'");
    }
    return mode;
}

std::unique_ptr<Provider> make_live_provider() {
    if (!HttpProviderConfig::env_present()) {
        throw ConfigError("live provider needs PROVIDER_BASE_URL and PROVIDER_MODEL to be set");
    }
    return std::make_unique<HttpChatProvider>(HttpProviderConfig::from_env());
}

std::unique_ptr<Provider> make_scripted_provider(const fs::path& policy) {
    if (!fs::exists(policy)) throw ConfigError("policy file not found: " + policy.string());
    return std::make_unique<ScriptedProvider>(load_policy(policy));
}

std::vector<ToolSpec> select_tools(const Options& o, const Instruction& instruction,
                                   std::vector<ToolSpec> catalog) {
    const auto mode = o.retriever.value_or("all");
    if (mode == "all") return catalog;
    if (mode == "tfidf") {
        auto ranked = rank(instruction.text, catalog, o.top_k.value_or(5));
        std::vector<ToolSpec> out;
        for (auto& r : ranked) out.push_back(std::move(r.tool));
        return out;
    }
    if (mode == "oracle") {
        if (!o.ground_truth) throw ConfigError("--retriever oracle needs --ground-truth");
        return oracle(instruction, load_ground_truth(*o.ground_truth), catalog);
    }
    throw ConfigError("--retriever must be all, tfidf or oracle, got '" + mode + "'");
}

std::string file_safe(std::string s) {
    for (auto& c : s) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.')) c = '_';
    }
    return s;
}

std::string describe_terminal(const Episode& e) {
    const auto& t = *e.terminal;
    std::string s(to_string(t.kind));
    if (!t.detail.empty()) s += " (" + t.detail + ")";
    return s;
}

// ----------------------------------------------------------------------------
// run
// ----------------------------------------------------------------------------

int cmd_run(const Options& o, std::ostream& out) {
    const auto method = o.method.value_or(std::string(kSum2Act));
    if (!is_known_method(method)) throw ConfigError("unknown method '" + method + "'");
    const auto mode = provider_mode(o);
    const auto settings = load_settings(o);
    const auto config = settings.engine_config(o, method);

    std::optional<Scenario> scenario;
    Instruction instruction;
    std::vector<ToolSpec> catalog;
    if (o.scenario) {
        scenario = load_scenario(*o.scenario);
        instruction = scenario->instruction;
        catalog = scenario->tools;
        if (o.instruction) instruction.text = *o.instruction;
    } else {
        if (!o.tools || !o.instruction) {
            throw ConfigError("run needs --scenario, or --tools together with --instruction");
        }
        catalog = load_catalog(*o.tools);
        instruction.id = "adhoc";
        instruction.text = *o.instruction;
        if (instruction.text.empty()) throw ConfigError("--instruction is empty");
    }

    std::unique_ptr<Provider> provider;
    if (mode == "live") {
        provider = make_live_provider();
    } else {
        std::optional<fs::path> policy;
        if (o.policy) policy = *o.policy;
        else if (scenario && scenario->policy) policy = *scenario->policy;
        if (!policy) throw ConfigError("scripted provider needs --policy");
        provider = make_scripted_provider(*policy);
    }

    std::unique_ptr<ToolExecutor> executor;
    if (o.endpoints) {
        executor = std::make_unique<LiveToolInvoker>(load_endpoint_spec(*o.endpoints));
    } else if (scenario) {
        executor = std::make_unique<SandboxSession>(*scenario);
    } else {
        throw ConfigError("--tools runs need --endpoints to execute tool calls");
    }

    auto tools = select_tools(o, instruction, catalog);
    if (tools.empty()) throw ConfigError("no tools selected for the instruction");
    Episode ep = run_method(method, *provider, instruction, tools, config, *executor);

    const fs::path dir = o.out.value_or("runs");
    fs::create_directories(dir);
    const fs::path trace = dir / (file_safe(instruction.id) + "." + method + ".jsonl");
    write_trace(trace, ep);

    if (ep.finished()) {
        out << "Answer: " << ep.terminal->answer << "\n";
    } else {
        out << "Status: " << describe_terminal(ep) << "\n";
    }
    out << "Steps: " << ep.steps.size() << "/" << ep.step_budget << "\n";
    if (scenario && !o.endpoints) out << "Pass: " << (check_pass(*scenario, ep) ? "yes" : "no") << "\n";
    out << "Trace: " << trace.string() << "\n";
    return ep.finished() ? kExitOk : kExitEpisodeFailed;
}

// ----------------------------------------------------------------------------
// bench
// ----------------------------------------------------------------------------

struct Job {
    const Scenario* scenario;
    std::string method;
    const Provider* provider;
    Episode episode;
    bool passed = false;
};

std::string subset_of(const Instruction& instruction) {
    return instruction.subset_label.value_or("all");
}

// Pass-rate rows, one per method, subsets in first-seen order.
std::vector<AggregateRow> pass_rows(const std::vector<Job>& jobs, const std::vector<std::string>& methods) {
    std::vector<AggregateRow> rows;
    for (const auto& m : methods) {
        std::vector<std::string> order;
        std::map<std::string, std::vector<ScoredEpisode>> by_subset;
        for (const auto& j : jobs) {
            if (j.method != m) continue;
            auto label = subset_of(j.scenario->instruction);
            if (!by_subset.count(label)) order.push_back(label);
            by_subset[label].push_back({j.episode, j.passed});
        }
        std::vector<SubsetReport> reports;
        for (const auto& label : order) {
            const auto& eps = by_subset[label];
            reports.push_back({label, pass_rate(eps), std::nullopt, static_cast<int>(eps.size())});
        }
        rows.push_back(aggregate(m, std::move(reports)));
    }
    return rows;
}

template <typename Fn>
void run_pool(std::size_t count, int concurrency, Fn&& fn) {
    const int workers = std::max(1, std::min<int>(concurrency, static_cast<int>(count)));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex mu;
    auto work = [&] {
        for (;;) {
            const auto i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(mu);
                if (!failure) failure = std::current_exception();
                next = count;
                return;
            }
        }
    };
    std::vector<std::thread> threads;
    for (int t = 1; t < workers; ++t) threads.emplace_back(work);
    work();
    for (auto& t : threads) t.join();
    if (failure) std::rethrow_exception(failure);
}

int cmd_bench(const Options& o, std::ostream& out) {
    if (!o.scenario_dir) throw ConfigError("bench needs --scenario-dir");
    const auto methods = split_methods(o.methods ? *o.methods : o.method.value_or(std::string(kSum2Act)));
    const auto mode = provider_mode(o);
    const int concurrency = o.concurrency.value_or(1);
    if (concurrency < 1) throw ConfigError("--concurrency must be at least 1");
    const auto settings = load_settings(o);
    std::map<std::string, EngineConfig> configs;
    for (const auto& m : methods) configs.emplace(m, settings.engine_config(o, m));

    // Everything is loaded before the first episode runs, so a bad file aborts
    // the whole benchmark.
    const auto scenarios = load_scenario_dir(*o.scenario_dir);
    if (scenarios.empty()) throw ConfigError("no scenarios under " + *o.scenario_dir);
    std::set<std::string> ids;
    for (const auto& s : scenarios) {
        if (!ids.insert(s.instruction.id).second) throw ValidationError("duplicate scenario id " + s.instruction.id);
    }

    std::map<std::string, std::unique_ptr<Provider>> providers;
    std::unique_ptr<Provider> shared;
    if (mode == "live") {
        shared = make_live_provider();
    } else if (o.policy) {
        shared = make_scripted_provider(*o.policy);
    }
    std::vector<Job> jobs;
    for (const auto& s : scenarios) {
        const Provider* p = shared.get();
        if (!p) {
            if (!s.policy) throw ConfigError("scenario " + s.id + " names no policy and --policy is not set");
            auto key = s.policy->string();
            auto& slot = providers[key];
            if (!slot) slot = make_scripted_provider(*s.policy);
            p = slot.get();
        }
        for (const auto& m : methods) jobs.push_back({&s, m, p, {}, false});
    }

    const fs::path dir = o.out.value_or("bench-out");
    for (const auto& m : methods) fs::create_directories(dir / "traces" / m);

    run_pool(jobs.size(), concurrency, [&](std::size_t i) {
        auto& job = jobs[i];
        SandboxSession session(*job.scenario);
        job.episode = run_method(job.method, *job.provider, job.scenario->instruction, job.scenario->tools,
                                 configs.at(job.method), session);
        job.passed = check_pass(*job.scenario, job.episode);
        write_trace(dir / "traces" / job.method / (file_safe(job.scenario->id) + ".jsonl"), job.episode);
    });

    const auto rows = pass_rows(jobs, methods);
    const auto table = render_table(rows, Metric::PassRate);
    json report;
    report["metric"] = "pass_rate";
    report["rows"] = report_json(rows);
    report["episodes"] = json::array();
    for (const auto& j : jobs) {
        report["episodes"].push_back({{"scenario", j.scenario->id},
                                      {"method", j.method},
                                      {"subset_label", subset_of(j.scenario->instruction)},
                                      {"terminal", to_string(j.episode.terminal->kind)},
                                      {"steps", j.episode.steps.size()},
                                      {"passed", j.passed}});
    }
    {
        std::ofstream f(dir / "report.txt");
        f << table;
    }
    {
        std::ofstream f(dir / "report.json");
        f << report.dump(2) << "\n";
    }
    out << table;
    out << "Traces: " << jobs.size() << " written under " << (dir / "traces").string() << "\n";

    const bool all_passed = std::all_of(jobs.begin(), jobs.end(), [](const Job& j) { return j.passed; });
    return all_passed ? kExitOk : kExitEpisodeFailed;
}

// ----------------------------------------------------------------------------
// compare
// ----------------------------------------------------------------------------

std::map<std::string, Episode> index_traces(const std::string& path, const char* side) {
    std::map<std::string, Episode> by_id;
    for (auto& e : read_traces(path)) {
        auto id = e.instruction.id;
        if (!by_id.emplace(id, std::move(e)).second) {
            throw ValidationError(std::string("trace set ") + side + " has two episodes for " + id);
        }
    }
    if (by_id.empty()) throw ParseError(std::string("trace set ") + side + " is empty");
    return by_id;
}

std::string common_label(const std::map<std::string, Episode>& set) {
    const auto& first = set.begin()->second.method_label;
    for (const auto& [id, e] : set) {
        if (e.method_label != first) return "mixed";
    }
    return first;
}

int cmd_compare(const Options& o, std::ostream& out) {
    if (!o.a || !o.b) throw ConfigError("compare needs --a and --b trace paths");
    auto set_a = index_traces(*o.a, "A");
    auto set_b = index_traces(*o.b, "B");

    std::vector<std::string> missing;
    for (const auto& [id, e] : set_a) {
        if (!set_b.count(id)) missing.push_back(id + " (missing from B)");
    }
    for (const auto& [id, e] : set_b) {
        if (!set_a.count(id)) missing.push_back(id + " (missing from A)");
    }
    if (!missing.empty()) {
        std::string msg = "trace sets cover different instructions:";
        for (const auto& m : missing) msg += " " + m;
        throw ValidationError(msg);
    }

    auto label_a = common_label(set_a);
    auto label_b = common_label(set_b);
    if (label_a == label_b) {
        label_a += "@A";
        label_b += "@B";
    }
    for (auto& [id, e] : set_a) e.method_label = label_a;
    for (auto& [id, e] : set_b) e.method_label = label_b;

    std::unique_ptr<Judge> judge;
    std::unique_ptr<Provider> judge_provider;
    std::map<std::string, Scenario> scenarios;
    const auto judge_mode = o.judge.value_or("rule");
    if (judge_mode == "rule") {
        if (o.scenario_dir) {
            for (auto& s : load_scenario_dir(*o.scenario_dir)) scenarios.emplace(s.instruction.id, std::move(s));
            judge = std::make_unique<RuleJudge>([&scenarios](const Episode& e) {
                auto it = scenarios.find(e.instruction.id);
                return it != scenarios.end() ? check_pass(it->second, e) : e.finished();
            });
        } else {
            judge = std::make_unique<RuleJudge>();
        }
    } else if (judge_mode == "llm") {
        if (provider_mode(o) == "live") {
            judge_provider = make_live_provider();
        } else {
            if (!o.policy) throw ConfigError("an llm judge with the scripted provider needs --policy");
            judge_provider = make_scripted_provider(*o.policy);
        }
        judge = std::make_unique<LlmJudge>(*judge_provider);
    } else {
        throw ConfigError("--judge must be rule or llm, got '" + judge_mode + "'");
    }

    std::vector<std::string> order;
    std::map<std::string, std::vector<PairJudgment>> by_subset;
    json judgments = json::array();
    for (const auto& [id, a] : set_a) {
        const auto& b = set_b.at(id);
        auto j = judge_pair(*judge, a.instruction, a, b);
        auto label = subset_of(a.instruction);
        if (!by_subset.count(label)) order.push_back(label);
        judgments.push_back({{"instruction_id", j.instruction_id},
                             {"subset_label", label},
                             {"method_a", j.method_a},
                             {"method_b", j.method_b},
                             {"outcome", to_string(j.outcome)},
                             {"rationale", j.rationale}});
        by_subset[label].push_back(std::move(j));
    }

    std::vector<AggregateRow> rows;
    for (const auto& label_of_row : {label_a, label_b}) {
        std::vector<SubsetReport> reports;
        for (const auto& label : order) {
            const auto& js = by_subset[label];
            reports.push_back({label, std::nullopt, win_rate(js, label_of_row), static_cast<int>(js.size())});
        }
        rows.push_back(aggregate(label_of_row, std::move(reports)));
    }
    const auto table = render_table(rows, Metric::WinRate);
    out << table;
    if (o.out) {
        fs::create_directories(*o.out);
        json report{{"metric", "win_rate"}, {"rows", report_json(rows)}, {"judgments", judgments}};
        std::ofstream(fs::path(*o.out) / "compare.json") << report.dump(2) << "\n";
        std::ofstream(fs::path(*o.out) / "compare.txt") << table;
    }
    return kExitOk;
}

// ----------------------------------------------------------------------------
// replay
// ----------------------------------------------------------------------------

std::string clip(const std::string& s, std::size_t n) {
    std::string one_line = s;
    std::replace(one_line.begin(), one_line.end(), '\n', ' ');
    return shorten(one_line, n);
}

void render_state_diff(std::ostream& out, const State& before, const State& after) {
    bool any = false;
    for (const auto& r : before.current_results) {
        if (std::find(after.current_results.begin(), after.current_results.end(), r) ==
            after.current_results.end()) {
            out << "    - result [step " << r.step << "] " << clip(r.text, 160) << "\n";
            any = true;
        }
    }
    for (const auto& r : after.current_results) {
        if (std::find(before.current_results.begin(), before.current_results.end(), r) ==
            before.current_results.end()) {
            out << "    + result [step " << r.step << "] " << clip(r.text, 160) << "\n";
            any = true;
        }
    }
    for (const auto& f : after.failure_history) {
        auto it = std::find_if(before.failure_history.begin(), before.failure_history.end(),
                               [&](const FailureEntry& g) {
                                   return g.tool_name == f.tool_name && g.args_digest == f.args_digest;
                               });
        if (it == before.failure_history.end()) {
            out << "    + failure [step " << f.step << "] " << clip(render_failure(f), 160) << "\n";
            any = true;
        } else if (it->reason != f.reason) {
            out << "    ~ failure [step " << f.step << "] " << clip(render_failure(f), 160) << "\n";
            any = true;
        }
    }
    if (!any) out << "    (unchanged)\n";
}

int cmd_replay(const std::string& path, std::ostream& out) {
    auto episodes = read_traces(path);
    if (episodes.empty()) throw ParseError("trace " + path + " holds no episodes");
    for (const auto& e : episodes) {
        out << "Episode " << e.instruction.id << " [" << e.method_label << "] budget " << e.step_budget
            << "\n"
            << "Instruction: " << clip(e.instruction.text, 200) << "\n";
        State prev;
        for (std::size_t i = 0; i < e.steps.size(); ++i) {
            const auto& s = e.steps[i];
            out << "Step " << (i + 1);
            if (!s.node.empty()) out << " [node " << s.node << "]";
            if (s.retries > 0) out << " (router retries: " << s.retries << ")";
            out << "\n";
            if (s.action.is_finish()) {
                out << "  Action: Finish -> " << clip(s.action.answer(), 200) << "\n";
            } else {
                out << "  Action: " << s.action.tool_name << " " << canonical_args(s.action.args) << "\n";
            }
            if (s.observation) {
                const auto& ob = *s.observation;
                out << "  Observation: " << to_string(ob.status);
                if (ob.ok()) {
                    out << " (" << ob.payload.size() << " chars) " << clip(ob.payload, 120) << "\n";
                } else {
                    out << " " << clip(ob.error_descriptor(), 160) << "\n";
                }
            }
            out << "  State:\n";
            render_state_diff(out, prev, s.state);
            prev = s.state;
        }
        out << "Terminal: " << describe_terminal(e) << "\n";
        if (e.finished()) out << "Answer: " << e.terminal->answer << "\n";
        out << "\n";
    }
    return kExitOk;
}

void add_common(CLI::App* cmd, Options& o) {
    cmd->add_option("--config", o.config, "JSON config file; flags override its keys");
    cmd->add_option("--provider", o.provider, "scripted (default) or live");
    cmd->add_option("--policy", o.policy, "scripted policy file (JSON Lines)");
    cmd->add_option("--out", o.out, "output directory");
}

void add_engine(CLI::App* cmd, Options& o) {
    cmd->add_option("--budget", o.budget, "step budget (default 30, dfsdt 200)");
    cmd->add_option("--state-cap", o.state_cap, "state length cap in chars (default 4096)");
    cmd->add_flag("--decompose", o.decompose, "decompose the instruction before the loop");
    cmd->add_option("--react-window", o.react_window, "transcript window in chars (default 4096)");
    cmd->add_option("--dfsdt-children", o.dfsdt_children, "attempts per search node (default 3)");
    cmd->add_option("--observation-window", o.observation_window,
                    "observation chars shown to the state manager (default 4096)");
    cmd->add_option("--router-template", o.router_template, "router prompt template file");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"toolflow: tool-invocation agents, sandbox and evaluation"};
    app.require_subcommand(1);
    Options o;
    std::string replay_path;

    auto* run = app.add_subcommand("run", "run one instruction and write its trace");
    add_common(run, o);
    add_engine(run, o);
    run->add_option("--method", o.method, "sum2act (default), react or dfsdt");
    run->add_option("--scenario", o.scenario, "sandbox scenario file");
    run->add_option("--tools", o.tools, "tool catalog file (live runs)");
    run->add_option("--endpoints", o.endpoints, "live endpoint spec file");
    run->add_option("--instruction", o.instruction, "instruction text");
    run->add_option("--retriever", o.retriever, "all (default), tfidf or oracle");
    run->add_option("--ground-truth", o.ground_truth, "ground-truth tools file for --retriever oracle");
    run->add_option("--top-k", o.top_k, "tools kept by --retriever tfidf (default 5)");

    auto* bench = app.add_subcommand("bench", "run every scenario with every method and report pass rates");
    add_common(bench, o);
    add_engine(bench, o);
    bench->add_option("--scenario-dir", o.scenario_dir, "directory of scenario files");
    bench->add_option("--methods", o.methods, "comma-separated methods");
    bench->add_option("--method", o.method, "single method (when --methods is absent)");
    bench->add_option("--concurrency", o.concurrency, "parallel episodes (default 1)");

    auto* compare = app.add_subcommand("compare", "pairwise win rates between two trace sets");
    add_common(compare, o);
    compare->add_option("--a", o.a, "trace file or directory for side A");
    compare->add_option("--b", o.b, "trace file or directory for side B");
    compare->add_option("--judge", o.judge, "rule (default) or llm");
    compare->add_option("--scenario-dir", o.scenario_dir, "scenarios whose pass conditions feed the rule judge");

    auto* replay = app.add_subcommand("replay", "print a trace step by step");
    replay->add_option("trace", replay_path, "trace file")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        apply_config(o);
        if (run->parsed()) return cmd_run(o, out);
        if (bench->parsed()) return cmd_bench(o, out);
        if (compare->parsed()) return cmd_compare(o, out);
        return cmd_replay(replay_path, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}

}  // namespace toolflow::cli
