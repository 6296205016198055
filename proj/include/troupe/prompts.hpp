#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "troupe/core.hpp"
#include "troupe/prompt_assets.hpp"
#include "troupe/result.hpp"
#include "troupe/text.hpp"

namespace troupe {

// ---------------------------------------------------------------------------
// Templates
// ---------------------------------------------------------------------------

enum class PromptKind { Planner, AgentObserver, PlanObserver, ActionObserver, CustomAgent };

inline const char* prompt_kind_name(PromptKind k) {
    switch (k) {
        case PromptKind::Planner: return "planner";
        case PromptKind::AgentObserver: return "agent-observer";
        case PromptKind::PlanObserver: return "plan-observer";
        case PromptKind::ActionObserver: return "action-observer";
        case PromptKind::CustomAgent: return "custom-agent";
    }
    return "unknown";
}

// The five role templates plus per-kind format examples. Defaults are the
// embedded assets; a directory of UTF-8 files with the same names overrides
// them (planner.txt, agent_observer.txt, plan_observer.txt,
// action_observer.txt, custom_agent.txt, and optional *_format.txt).
class TemplateStore {
public:
    static TemplateStore builtin() {
        TemplateStore s;
        s.templates_[PromptKind::Planner] = assets::kPlannerTemplate;
        s.templates_[PromptKind::AgentObserver] = assets::kAgentObserverTemplate;
        s.templates_[PromptKind::PlanObserver] = assets::kPlanObserverTemplate;
        s.templates_[PromptKind::ActionObserver] = assets::kActionObserverTemplate;
        s.templates_[PromptKind::CustomAgent] = assets::kCustomAgentTemplate;
        s.format_examples_[PromptKind::Planner] = assets::kPlannerFormatExample;
        s.format_examples_[PromptKind::AgentObserver] = assets::kObserverFormatExample;
        s.format_examples_[PromptKind::PlanObserver] = assets::kObserverFormatExample;
        s.format_examples_[PromptKind::ActionObserver] = assets::kActionObserverFormatExample;
        s.format_examples_[PromptKind::CustomAgent] = assets::kCustomAgentFormatExample;
        return s;
    }

    static Result<TemplateStore> from_dir(const std::string& dir) {
        TemplateStore s = builtin();
        struct Entry {
            PromptKind kind;
            const char* file;
        };
        const Entry required[] = {
            {PromptKind::Planner, "planner.txt"},
            {PromptKind::AgentObserver, "agent_observer.txt"},
            {PromptKind::PlanObserver, "plan_observer.txt"},
            {PromptKind::ActionObserver, "action_observer.txt"},
            {PromptKind::CustomAgent, "custom_agent.txt"},
        };
        for (const auto& e : required) {
            auto body = read_file(dir, e.file);
            if (!body) return Error{"template-io", std::string("missing template file: ") + dir +
                                                       "/" + e.file};
            s.templates_[e.kind] = *body;
        }
        const Entry optional[] = {
            {PromptKind::Planner, "planner_format.txt"},
            {PromptKind::AgentObserver, "observer_format.txt"},
            {PromptKind::PlanObserver, "observer_format.txt"},
            {PromptKind::ActionObserver, "action_observer_format.txt"},
            {PromptKind::CustomAgent, "custom_agent_format.txt"},
        };
        for (const auto& e : optional) {
            auto body = read_file(dir, e.file);
            if (body) s.format_examples_[e.kind] = *body;
        }
        return s;
    }

    const std::string& template_for(PromptKind kind) const { return templates_.at(kind); }
    const std::string& format_example_for(PromptKind kind) const {
        return format_examples_.at(kind);
    }

private:
    static std::optional<std::string> read_file(const std::string& dir, const char* name) {
        std::ifstream in(std::filesystem::path(dir) / name, std::ios::binary);
        if (!in) return std::nullopt;
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    }

    std::map<PromptKind, std::string> templates_;
    std::map<PromptKind, std::string> format_examples_;
};

using Bindings = std::map<std::string, std::string>;

// Substitutes {placeholder} occurrences with bindings. Doubled braces are
// literals ("{{" -> "{", "}}" -> "}"); a stray brace that opens no
// placeholder passes through. Fails with missing-binding naming the first
// placeholder that has no binding.
inline Result<std::string> render_template(const std::string& tpl, const Bindings& bindings) {
    std::string out;
    out.reserve(tpl.size());
    size_t i = 0, n = tpl.size();
    while (i < n) {
        char c = tpl[i];
        if (c == '{') {
            if (i + 1 < n && tpl[i + 1] == '{') {
                out += '{';
                i += 2;
                continue;
            }
            size_t j = i + 1;
            while (j < n && (std::isalnum(static_cast<unsigned char>(tpl[j])) || tpl[j] == '_'))
                ++j;
            if (j > i + 1 && j < n && tpl[j] == '}') {
                std::string name = tpl.substr(i + 1, j - i - 1);
                auto it = bindings.find(name);
                if (it == bindings.end())
                    return Error{"missing-binding", name};
                out += it->second;
                i = j + 1;
                continue;
            }
            out += '{';
            ++i;
        } else if (c == '}') {
            out += '}';
            i += (i + 1 < n && tpl[i + 1] == '}') ? 2 : 1;
        } else {
            out += c;
            ++i;
        }
    }
    return out;
}

inline Result<std::string> render_prompt(PromptKind kind, const Bindings& bindings,
                                         const TemplateStore& store) {
    auto rendered = render_template(store.template_for(kind), bindings);
    if (!rendered.ok())
        return Error{rendered.error().code,
                     std::string(prompt_kind_name(kind)) + ": " + rendered.error().message};
    return rendered;
}

// Unsubstituted {word} occurrences left in a rendered prompt ("{{" literals
// do not count). Used to check render completeness.
inline std::vector<std::string> find_unresolved_placeholders(std::string_view s) {
    std::vector<std::string> out;
    size_t i = 0, n = s.size();
    while (i < n) {
        if (s[i] == '{') {
            if (i + 1 < n && s[i + 1] == '{') {
                i += 2;
                continue;
            }
            size_t j = i + 1;
            while (j < n && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
            if (j > i + 1 && j < n && s[j] == '}') {
                out.emplace_back(s.substr(i + 1, j - i - 1));
                i = j + 1;
                continue;
            }
        }
        ++i;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Section grammar
// ---------------------------------------------------------------------------
// A header line is optional '#' marks, the section name (case-insensitive),
// then end of line or a colon; content may follow the colon inline. A body
// runs to the next known header; non-verbatim sections additionally stop at
// any '#'-style header so prose sections do not swallow trailing material.
// Verbatim sections (ActionInput, RelevantHistory) keep '#' lines because
// their bodies may legitimately contain them.

struct HeaderMatch {
    bool matched = false;
    std::string inline_content;
};

inline HeaderMatch match_section_header(std::string_view line, std::string_view name) {
    auto s = text::ltrim(line);
    while (!s.empty() && s.front() == '#') s.remove_prefix(1);
    s = text::ltrim(s);
    if (s.size() < name.size() || !text::iequals(s.substr(0, name.size()), name)) return {};
    s.remove_prefix(name.size());
    auto rest = text::ltrim(s);
    if (rest.empty()) return {true, ""};
    if (rest.front() == ':') {
        rest.remove_prefix(1);
        return {true, std::string(text::ltrim(rest))};
    }
    return {};
}

inline bool is_any_header(std::string_view line, const std::vector<std::string>& names) {
    for (const auto& n : names)
        if (match_section_header(line, n).matched) return true;
    return false;
}

inline std::optional<std::string> find_section(std::string_view doc, std::string_view name,
                                               const std::vector<std::string>& known_sections,
                                               bool verbatim = false) {
    auto lines = text::split_lines(doc);
    for (size_t i = 0; i < lines.size(); ++i) {
        auto h = match_section_header(lines[i], name);
        if (!h.matched) continue;
        std::vector<std::string> body;
        if (!h.inline_content.empty()) body.push_back(h.inline_content);
        for (size_t j = i + 1; j < lines.size(); ++j) {
            if (is_any_header(lines[j], known_sections)) break;
            if (!verbatim) {
                auto lt = text::ltrim(lines[j]);
                if (!lt.empty() && lt.front() == '#') break;
            }
            body.emplace_back(lines[j]);
        }
        while (!body.empty() && text::trim(body.back()).empty()) body.pop_back();
        return text::join(body, "\n");
    }
    return std::nullopt;
}

inline std::optional<std::string> find_first_section(std::string_view doc,
                                                     const std::vector<std::string>& names,
                                                     const std::vector<std::string>& known,
                                                     bool verbatim = false) {
    for (const auto& n : names) {
        auto s = find_section(doc, n, known, verbatim);
        if (s) return s;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Role blob extraction
// ---------------------------------------------------------------------------

inline const std::vector<std::string>& role_blob_keys() {
    static const std::vector<std::string> keys = {"name", "description", "tools", "suggestions",
                                                  "prompt"};
    return keys;
}

struct BlobIssue {
    std::string span;  // offending text
    std::vector<std::string> missing_keys;
};

struct RoleBlobScan {
    std::vector<AgentSpec> specs;
    std::vector<BlobIssue> issues;

    bool empty() const { return specs.empty() && issues.empty(); }
};

namespace detail {

// Balanced-brace span starting at `start` (which must be '{'), respecting
// JSON string quoting and escapes. Returns one-past-end, or npos.
inline size_t balanced_json_span(std::string_view s, size_t start) {
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    for (size_t i = start; i < s.size(); ++i) {
        char c = s[i];
        if (in_string) {
            if (escaped)
                escaped = false;
            else if (c == '\\')
                escaped = true;
            else if (c == '"')
                in_string = false;
            continue;
        }
        if (c == '"')
            in_string = true;
        else if (c == '{')
            ++depth;
        else if (c == '}') {
            --depth;
            if (depth == 0) return i + 1;
        }
    }
    return std::string_view::npos;
}

// Strips trailing commas before '}' or ']' outside strings; the JSON blob
// format example in the published templates carries one, and models copy it.
inline std::string strip_trailing_commas(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool in_string = false, escaped = false;
    for (size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        if (in_string) {
            out += c;
            if (escaped)
                escaped = false;
            else if (c == '\\')
                escaped = true;
            else if (c == '"')
                in_string = false;
            continue;
        }
        if (c == '"') in_string = true;
        if (c == ',') {
            size_t j = i + 1;
            while (j < s.size() && std::isspace(static_cast<unsigned char>(s[j]))) ++j;
            if (j < s.size() && (s[j] == '}' || s[j] == ']')) continue;  // drop it
        }
        out += c;
    }
    return out;
}

inline std::optional<json> try_parse_object(std::string_view span) {
    auto j = json::parse(span, nullptr, false);
    if (!j.is_discarded() && j.is_object()) return j;
    auto fixed = strip_trailing_commas(span);
    j = json::parse(fixed, nullptr, false);
    if (!j.is_discarded() && j.is_object()) return j;
    return std::nullopt;
}

}  // namespace detail

// Scans arbitrary text for role blobs: JSON objects carrying the key set
// {name, description, tools, suggestions, prompt}. Fenced and bare objects
// are both found (the scan is character-level). An object with three or four
// of the keys is a malformed blob and is reported, not dropped silently;
// objects with fewer matching keys are unrelated JSON and are ignored.
inline RoleBlobScan scan_role_blobs(std::string_view doc,
                                    AgentOrigin origin = AgentOrigin::NewlyCreated) {
    RoleBlobScan scan;
    size_t i = 0;
    while (i < doc.size()) {
        size_t open = doc.find('{', i);
        if (open == std::string_view::npos) break;
        size_t end = detail::balanced_json_span(doc, open);
        if (end == std::string_view::npos) {
            i = open + 1;
            continue;
        }
        auto span = doc.substr(open, end - open);
        auto parsed = detail::try_parse_object(span);
        if (!parsed) {
            i = open + 1;  // outer span is not JSON; inner objects may still be
            continue;
        }
        std::vector<std::string> missing;
        int present = 0;
        for (const auto& key : role_blob_keys()) {
            if (parsed->contains(key))
                ++present;
            else
                missing.push_back(key);
        }
        if (present == 5)
            scan.specs.push_back(role_from_json(*parsed, origin));
        else if (present >= 3)
            scan.issues.push_back({std::string(span), missing});
        i = end;
    }
    return scan;
}

// Result-typed front: fails on malformed blobs or when no blob is present.
inline Result<std::vector<AgentSpec>> extract_role_blobs(
    std::string_view doc, AgentOrigin origin = AgentOrigin::NewlyCreated) {
    auto scan = scan_role_blobs(doc, origin);
    if (!scan.issues.empty()) {
        std::string msg;
        for (const auto& issue : scan.issues) {
            msg += "blob missing keys [" + text::join(issue.missing_keys, ", ") + "]: ";
            msg += issue.span.substr(0, 120);
            msg += "\n";
        }
        return Error{"malformed-blob", msg};
    }
    if (scan.specs.empty()) return Error{"no-blobs-found", "no role JSON blobs in text"};
    return scan.specs;
}

// ---------------------------------------------------------------------------
// Plan list parsing
// ---------------------------------------------------------------------------

namespace detail {

// "12. rest" / "3) rest" -> {12, "rest"}
inline bool match_numbered_item(std::string_view line, int& number, std::string& rest) {
    auto s = text::ltrim(line);
    size_t d = 0;
    while (d < s.size() && std::isdigit(static_cast<unsigned char>(s[d]))) ++d;
    if (d == 0 || d > 6) return false;
    if (d >= s.size() || (s[d] != '.' && s[d] != ')')) return false;
    number = std::stoi(std::string(s.substr(0, d)));
    rest = std::string(text::ltrim(s.substr(d + 1)));
    return true;
}

inline bool is_bullet_item(std::string_view line) {
    auto s = text::ltrim(line);
    return s.size() >= 2 && (s[0] == '-' || s[0] == '*') && s[1] == ' ';
}

inline std::string strip_name_decoration(std::string_view s) {
    auto t = text::trim(s);
    while (!t.empty() && (t.front() == '*' || t.front() == '`' || t.front() == '"')) t.remove_prefix(1);
    while (!t.empty() && (t.back() == '*' || t.back() == '`' || t.back() == '"')) t.remove_suffix(1);
    return text::trimmed(t);
}

// Splits "Expected output: ..." / "Input(s): ..." markers out of an item
// remainder. The input marker requires a colon shortly after the word so
// prose uses of "input" stay in the description.
inline void split_step_markers(const std::string& remainder, std::string& description,
                               std::string& expected_output, std::string& required_inputs) {
    auto consume_colon_value = [](std::string_view s) -> std::string {
        auto t = text::ltrim(s);
        if (!t.empty() && (t.front() == 's' || t.front() == 'S')) t.remove_prefix(1);
        t = text::ltrim(t);
        if (!t.empty() && t.front() == ':') t.remove_prefix(1);
        return text::trimmed(t);
    };
    auto input_marker_at = [&](std::string_view s, size_t from) -> size_t {
        size_t pos = from;
        while ((pos = text::ifind(s, "input", pos)) != std::string_view::npos) {
            bool word_start = pos == 0 || !std::isalnum(static_cast<unsigned char>(s[pos - 1]));
            size_t after = pos + 5;
            if (after < s.size() && (s[after] == 's' || s[after] == 'S')) ++after;
            size_t colon = after;
            while (colon < s.size() && s[colon] == ' ') ++colon;
            if (word_start && colon < s.size() && s[colon] == ':') return pos;
            pos += 5;
        }
        return std::string_view::npos;
    };

    std::string_view rem = remainder;
    size_t exp_pos = text::ifind(rem, "expected output");
    size_t inp_pos = input_marker_at(rem, exp_pos == std::string_view::npos ? 0 : exp_pos);

    size_t desc_end = std::min(exp_pos == std::string_view::npos ? rem.size() : exp_pos,
                               inp_pos == std::string_view::npos ? rem.size() : inp_pos);
    description = text::trimmed(rem.substr(0, desc_end));
    if (exp_pos != std::string_view::npos) {
        size_t value_begin = exp_pos + std::string_view("expected output").size();
        size_t value_end = (inp_pos != std::string_view::npos && inp_pos > exp_pos) ? inp_pos
                                                                                    : rem.size();
        expected_output = consume_colon_value(rem.substr(value_begin, value_end - value_begin));
    }
    if (inp_pos != std::string_view::npos)
        required_inputs = consume_colon_value(rem.substr(inp_pos + 5));
}

}  // namespace detail

// Parses a numbered plan list. Each item's leading role-name list (before the
// first colon) becomes assigned_agents; "Expected output:" and "Input:"
// markers are split out when present.
inline Result<std::vector<PlanStep>> parse_plan_steps(std::string_view doc) {
    auto lines = text::split_lines(doc);
    struct Item {
        int number;
        std::string body;
    };
    std::vector<Item> items;
    bool saw_bullet = false;
    for (const auto& line : lines) {
        int number = 0;
        std::string rest;
        if (detail::match_numbered_item(line, number, rest)) {
            items.push_back({number, rest});
        } else if (detail::is_bullet_item(line)) {
            saw_bullet = true;
        } else if (!items.empty() && !text::trim(line).empty()) {
            auto lt = text::ltrim(line);
            if (!lt.empty() && lt.front() == '#') continue;  // section noise
            items.back().body += " ";
            items.back().body += text::trimmed(line);
        }
    }
    if (items.empty()) {
        if (saw_bullet)
            return Error{"unnumbered-step", "plan items must carry leading integers"};
        return Error{"no-steps-found", "no numbered plan steps in text"};
    }

    std::vector<PlanStep> steps;
    for (const auto& item : items) {
        PlanStep step;
        step.index = item.number;
        step.raw_text = std::to_string(item.number) + ". " + item.body;
        std::string remainder = item.body;
        size_t colon = remainder.find(':');
        if (colon != std::string::npos) {
            auto head = remainder.substr(0, colon);
            for (const auto& name : text::split_csv(head)) {
                auto clean = detail::strip_name_decoration(name);
                if (!clean.empty()) step.assigned_agents.push_back(clean);
            }
            remainder = text::trimmed(remainder.substr(colon + 1));
        }
        detail::split_step_markers(remainder, step.description, step.expected_output,
                                   step.required_inputs);
        if (step.description.empty()) step.description = remainder;
        steps.push_back(std::move(step));
    }
    return steps;
}

// ---------------------------------------------------------------------------
// Critique parsing
// ---------------------------------------------------------------------------

// Locates the Suggestions section. Verdict is no-suggestions iff the body,
// trimmed, equals the sentinel case-insensitively.
inline Result<Critique> parse_critique(std::string_view doc) {
    static const std::vector<std::string> known = {"Thought", "Suggestions"};
    auto body = find_section(doc, "Suggestions", known);
    if (!body) return Error{"missing-suggestions-section", "no Suggestions section in output"};
    Critique critique;
    critique.body = text::trimmed(*body);
    critique.verdict = text::iequals(critique.body, kNoSuggestionsSentinel)
                           ? CritiqueVerdict::NoSuggestions
                           : CritiqueVerdict::HasSuggestions;
    return critique;
}

// ---------------------------------------------------------------------------
// NextStep parsing
// ---------------------------------------------------------------------------

struct NextStepParse {
    std::vector<std::string> agent_names;
    std::string step_text;
    std::string relevant_history;  // passthrough section, may be empty
    int step_index_hint = 0;       // echoed step number, 0 when absent
};

inline Result<NextStepParse> parse_next_step(std::string_view doc) {
    static const std::vector<std::string> known = {"Thought", "NextStep", "RelevantHistory"};
    auto body = find_section(doc, "NextStep", known);
    if (!body) return Error{"missing-nextstep-section", "no NextStep section in output"};

    NextStepParse out;
    if (auto hist = find_section(doc, "RelevantHistory", known, /*verbatim=*/true))
        out.relevant_history = *hist;

    std::string content = text::trimmed(*body);
    {  // tolerate an echoed step number: "3. Role: ..."
        int number = 0;
        std::string rest;
        if (detail::match_numbered_item(content, number, rest)) {
            out.step_index_hint = number;
            content = rest;
        }
    }
    size_t colon = content.find(':');
    if (colon == std::string::npos)
        return Error{"no-agent-named", "NextStep carries no 'Role:' prefix: " + content};
    for (const auto& name : text::split_csv(content.substr(0, colon))) {
        auto clean = detail::strip_name_decoration(name);
        if (!clean.empty()) out.agent_names.push_back(clean);
    }
    if (out.agent_names.empty())
        return Error{"no-agent-named", "NextStep role list is empty: " + content};
    out.step_text = text::trimmed(content.substr(colon + 1));
    return out;
}

// ---------------------------------------------------------------------------
// Agent action parsing
// ---------------------------------------------------------------------------

struct AgentActionParse {
    std::string thought;  // optional Thought section
    std::string current_step;
    std::string action;        // tool name as written (trimmed, undecorated)
    std::string action_input;  // verbatim, including newlines
    bool is_final = false;
};

inline constexpr const char* kFinalOutputTool = "Final Output";
inline constexpr const char* kWriteFileTool = "Write File";

inline Result<AgentActionParse> parse_agent_action(std::string_view doc) {
    static const std::vector<std::string> known = {"Thought", "CurrentStep", "Action",
                                                   "ActionInput"};
    AgentActionParse out;
    if (auto thought = find_section(doc, "Thought", known)) out.thought = text::trimmed(*thought);

    auto current = find_section(doc, "CurrentStep", known);
    if (!current) return Error{"missing-section:CurrentStep", "no CurrentStep section in output"};
    out.current_step = text::trimmed(*current);

    auto action = find_section(doc, "Action", known);
    if (!action) return Error{"missing-section:Action", "no Action section in output"};
    // First non-empty line, stripped of quotes and backticks.
    std::string action_line;
    for (auto line : text::split_lines(*action)) {
        if (!text::trim(line).empty()) {
            action_line = detail::strip_name_decoration(line);
            break;
        }
    }
    out.action = action_line;

    auto input = find_section(doc, "ActionInput", known, /*verbatim=*/true);
    if (!input) return Error{"missing-section:ActionInput", "no ActionInput section in output"};
    out.action_input = *input;

    out.is_final = text::iequals(text::trim(out.action), kFinalOutputTool);
    return out;
}

// ---------------------------------------------------------------------------
// Write File payload grammar
// ---------------------------------------------------------------------------

struct WriteFilePayload {
    std::string file_name;
    std::string content;
};

inline std::string format_write_file_payload(const std::string& name,
                                             const std::string& content) {
    return ">>>" + name + "<<<\n>>>>>\n" + content + "\n<<<<<";
}

// Grammar: a line ">>>NAME<<<", a line ">>>>>", content lines, a line
// "<<<<<". The closing delimiter is the LAST such line, so content may itself
// contain delimiter-like lines. A single surrounding markdown fence is
// unwrapped first, since the published Write File format example places the
// payload in one. Content is preserved byte-exact between the delimiters.
inline Result<WriteFilePayload> parse_write_file_payload(std::string_view payload) {
    auto lines0 = text::split_lines(payload);
    size_t begin = 0, end = lines0.size();
    while (begin < end && text::trim(lines0[begin]).empty()) ++begin;
    while (end > begin && text::trim(lines0[end - 1]).empty()) --end;
    if (begin < end && text::ltrim(lines0[begin]).substr(0, 3) == "```") {
        auto last = text::trim(lines0[end - 1]);
        if (end - begin >= 2 && last.substr(0, 3) == "```") {
            ++begin;
            --end;
            while (end > begin && text::trim(lines0[end - 1]).empty()) --end;
        }
    }
    std::vector<std::string_view> lines(lines0.begin() + static_cast<long>(begin),
                                        lines0.begin() + static_cast<long>(end));

    if (lines.empty())
        return Error{"malformed-write-file", "missing file-name delimiter line '>>>name<<<'"};
    auto head = text::trim(lines[0]);
    if (head.size() < 6 || head.substr(0, 3) != ">>>" || head.substr(head.size() - 3) != "<<<")
        return Error{"malformed-write-file", "missing file-name delimiter line '>>>name<<<'"};
    WriteFilePayload out;
    out.file_name = text::trimmed(head.substr(3, head.size() - 6));

    if (lines.size() < 2 || text::trim(lines[1]) != ">>>>>")
        return Error{"malformed-write-file", "missing opening content delimiter '>>>>>'"};

    size_t close = lines.size();
    for (size_t i = lines.size(); i-- > 2;) {
        if (text::trim(lines[i]) == "<<<<<") {
            close = i;
            break;
        }
    }
    if (close == lines.size())
        return Error{"malformed-write-file", "missing closing content delimiter '<<<<<'"};

    std::vector<std::string> content_lines;
    for (size_t i = 2; i < close; ++i) content_lines.emplace_back(lines[i]);
    out.content = text::join(content_lines, "\n");
    return out;
}

}  // namespace troupe
