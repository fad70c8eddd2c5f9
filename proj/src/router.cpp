#include "toolflow/router.hpp"

#include "toolflow/json_convert.hpp"
#include "toolflow/json_extract.hpp"
#include "toolflow/log.hpp"
#include "model_io.hpp"

#include <sstream>

namespace toolflow {

using nlohmann::json;

namespace {

constexpr const char* kRouterTemplate =
    R"([ACTION PROPOSAL]
You are the Router of a tool-using assistant. Read the user instruction and the current task state, then choose the single next action: call one of the available tools, or call Finish when the instruction can be answered.

User instruction:
{instruction}

State:
{state}

Available tools:
{tools}

{rules}
)";

CompletionRequest request_for(std::string prompt, const RouterOptions& options) {
    auto req = make_request(std::move(prompt));
    req.temperature = options.temperature;
    req.max_output_tokens = options.max_output_tokens;
    return req;
}

constexpr const char* kActionFormatHint =
    R"({"thought": "...", "action": "<tool name or Finish>", "args": {...}})";
constexpr const char* kTaskFormatHint = R"({"target": "...", "subtasks": ["...", ...]})";

}  // namespace

const PromptTemplate& default_router_template() {
    static const PromptTemplate tmpl(kRouterTemplate, {"instruction", "state", "tools", "rules"});
    return tmpl;
}

std::string RouterPrompt::render(const PromptTemplate* tmpl) const {
    const PromptTemplate& t = tmpl ? *tmpl : default_router_template();
    return t.fill({{"instruction", user_instruction_block},
                   {"state", state_block},
                   {"tools", tools_block},
                   {"rules", rules_block}});
}

std::string render_tools_block(std::span<const ToolSpec> tools) {
    std::ostringstream out;
    bool first = true;
    for (const auto& t : tools) {
        if (!first) out << "\n";
        first = false;
        out << "- " << t.name << ": " << t.description;
        for (const auto& p : t.params) {
            out << "\n    " << p.name << " (" << p.type << ", "
                << (p.required ? "required" : "optional") << ")";
            if (!p.description.empty()) out << ": " << p.description;
        }
    }
    return out.str();
}

std::string render_instruction_block(const Instruction& instruction, const std::optional<Task>& task) {
    std::string block = instruction.text;
    if (task) {
        block += "\nTarget task: " + task->target;
        for (std::size_t i = 0; i < task->subtasks.size(); ++i) {
            block += "\nSubtask " + std::to_string(i + 1) + ": " + task->subtasks[i];
        }
    }
    return block;
}

std::string action_format_block() {
    return "Output format: reply with exactly one JSON object and nothing else:\n"
           R"({"thought": "<short reasoning>", "action": "<tool name or Finish>", "args": {"<parameter>": <value>}})"
           "\nTo finish, use the action Finish with the complete reply to the user in args.Answer.";
}

std::string router_rules_block() {
    return "Rules:\n"
           "1. Build on the current results. Do not call a tool again for information you already have.\n"
           "2. Read the failure history before choosing. Never repeat a failed call with the same "
           "arguments; change the arguments or use another tool.\n"
           "3. Only call tools from the list above and pass every required parameter.\n"
           "4. Call Finish as soon as the current results answer the instruction, or when no "
           "remaining tool can help.\n" +
           action_format_block();
}

RouterPrompt build_router_prompt(const Instruction& instruction, const State& state,
                                 std::span<const ToolSpec> tools,
                                 const std::optional<Task>& decomposition) {
    if (tools.empty()) throw ConfigError("router prompt needs at least one tool");
    RouterPrompt p;
    p.user_instruction_block = render_instruction_block(instruction, decomposition);
    p.state_block = render_state(state);
    p.rules_block = router_rules_block();
    p.tools_block = render_tools_block(tools);
    return p;
}

Action parse_action(std::string_view model_output) {
    auto obj = find_json_object(model_output, [](const json& j) { return j.contains("action"); });
    if (!obj) throw MalformedOutput("no JSON object with an \"action\" field");

    const json& action = obj->at("action");
    if (!action.is_string() || action.get<std::string>().empty()) {
        throw MalformedOutput("\"action\" must be a non-empty string");
    }
    std::optional<std::string> thought;
    if (obj->contains("thought") && obj->at("thought").is_string()) {
        thought = obj->at("thought").get<std::string>();
    }
    json args = obj->contains("args") ? obj->at("args") : json::object();
    if (!args.is_object()) throw MalformedOutput("\"args\" must be an object");

    const auto name = action.get<std::string>();
    if (name == kFinishAction) {
        if (!args.contains(std::string(kAnswerKey))) {
            throw MalformedOutput("Finish requires args.Answer");
        }
        auto answer = arg_text(arg_from_json(args.at(std::string(kAnswerKey))));
        if (answer.empty()) throw MalformedOutput("Finish requires a non-empty args.Answer");
        return Action::finish(std::move(answer), std::move(thought));
    }
    return Action::tool_call(name, args_from_json(args), std::move(thought));
}

Proposal propose_from_prompt(const Provider& provider, std::string prompt, const RouterOptions& options) {
    auto req = request_for(prompt, options);
    auto [action, retries] = detail::ask_with_retries(provider, std::move(req), options.max_retries,
                                              kActionFormatHint, parse_action);
    return {std::move(action), retries, std::move(prompt)};
}

Proposal propose(const Provider& provider, const Instruction& instruction, const State& state,
                 std::span<const ToolSpec> tools, const std::optional<Task>& decomposition,
                 const RouterOptions& options) {
    auto prompt = build_router_prompt(instruction, state, tools, decomposition)
                      .render(options.router_template);
    return propose_from_prompt(provider, std::move(prompt), options);
}

std::string build_decomposition_prompt(const Instruction& instruction, std::span<const ToolSpec> tools) {
    std::ostringstream out;
    out << kDecompositionHeader << "\n"
        << "Identify the target task in the user instruction and break it into a short ordered "
           "list of subtasks that the available tools can solve. Do not call any tool.\n\n"
        << "User instruction:\n"
        << instruction.text << "\n\n"
        << "Available tools:\n"
        << render_tools_block(tools) << "\n\n"
        << "Output format: reply with exactly one JSON object and nothing else:\n"
        << R"({"target": "<target task>", "subtasks": ["<subtask>", "..."]})" << "\n";
    return out.str();
}

Task parse_task(std::string_view model_output) {
    auto obj = find_json_object(model_output, [](const json& j) { return j.contains("target"); });
    if (!obj) throw MalformedOutput("no JSON object with a \"target\" field");
    const json& target = obj->at("target");
    if (!target.is_string() || target.get<std::string>().empty()) {
        throw MalformedOutput("\"target\" must be a non-empty string");
    }
    if (!obj->contains("subtasks") || !obj->at("subtasks").is_array()) {
        throw MalformedOutput("\"subtasks\" must be an array");
    }
    Task task{target.get<std::string>(), {}};
    for (const auto& s : obj->at("subtasks")) {
        if (!s.is_string()) throw MalformedOutput("subtasks must be strings");
        task.subtasks.push_back(s.get<std::string>());
    }
    return task;
}

std::optional<Task> decompose(const Provider& provider, const Instruction& instruction,
                              std::span<const ToolSpec> tools, const RouterOptions& options) {
    if (tools.empty()) throw ConfigError("decomposition needs at least one tool");
    try {
        auto req = request_for(build_decomposition_prompt(instruction, tools), options);
        return detail::ask_with_retries(provider, std::move(req), options.max_retries, kTaskFormatHint,
                                parse_task)
            .first;
    } catch (const MalformedOutput& e) {
        log_info(std::string("continuing without task decomposition: ") + e.what());
    } catch (const ProviderError& e) {
        log_info(std::string("continuing without task decomposition: ") + e.what());
    }
    return std::nullopt;
}

}  // namespace toolflow
