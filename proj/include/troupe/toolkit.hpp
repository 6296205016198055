#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "troupe/prompts.hpp"
#include "troupe/result.hpp"
#include "troupe/text.hpp"

namespace troupe {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Workspace
// ---------------------------------------------------------------------------

// Resolves a candidate relative path strictly inside `root`. Rejects absolute
// inputs, ".." escapes (after lexical normalization) and symlink traversal
// out of root. Returns the normalized path joined under root.
inline Result<fs::path> workspace_resolve(const fs::path& root, const std::string& candidate) {
    if (candidate.empty() || candidate.find('\0') != std::string::npos)
        return Error{"path-escape", "empty or NUL-bearing path"};
    fs::path p;
    try {
        p = fs::path(candidate);
    } catch (const std::exception&) {
        return Error{"path-escape", "unparseable path"};
    }
    if (p.is_absolute() || p.has_root_path())
        return Error{"path-escape", "absolute path: " + candidate};
    auto normal = p.lexically_normal();
    if (normal.empty() || normal == "." || normal == "./")
        return Error{"path-escape", "path names no file: " + candidate};
    for (const auto& comp : normal) {
        if (comp == "..") return Error{"path-escape", "path leaves the workspace: " + candidate};
    }

    std::error_code ec;
    auto canon_root = fs::weakly_canonical(root, ec);
    if (ec) return Error{"path-escape", "workspace root unresolvable: " + root.string()};
    auto joined = root / normal;
    auto canon = fs::weakly_canonical(joined, ec);
    if (ec) return Error{"path-escape", "path unresolvable: " + candidate};

    auto rit = canon_root.begin();
    auto cit = canon.begin();
    for (; rit != canon_root.end(); ++rit, ++cit) {
        if (cit == canon.end() || *cit != *rit)
            return Error{"path-escape", "path resolves outside the workspace: " + candidate};
    }
    return joined;
}

// Confined file sink for tool effects. Every write goes through
// workspace_resolve; written relative paths are recorded for the manifest.
class Workspace {
public:
    Workspace() = default;
    explicit Workspace(fs::path root) : root_(std::move(root)) {
        fs::create_directories(root_);
    }

    const fs::path& root() const { return root_; }
    const std::vector<std::string>& files_written() const { return files_written_; }

    Result<std::string> write_file(const std::string& rel_path, const std::string& content) {
        if (root_.empty()) return Error{"workspace-unset", "no workspace root configured"};
        auto resolved = workspace_resolve(root_, rel_path);
        if (!resolved.ok()) return resolved.error();
        const auto& path = resolved.value();
        std::error_code ec;
        if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) return Error{"write-failed", "cannot open for writing: " + rel_path};
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) return Error{"write-failed", "short write: " + rel_path};
        auto recorded = fs::path(rel_path).lexically_normal().generic_string();
        bool seen = false;
        for (const auto& f : files_written_)
            if (f == recorded) seen = true;
        if (!seen) files_written_.push_back(recorded);
        return recorded;
    }

private:
    fs::path root_;
    std::vector<std::string> files_written_;
};

// ---------------------------------------------------------------------------
// Tool registry
// ---------------------------------------------------------------------------

enum class ToolKind { Effectful, Terminal };

struct ToolDef {
    std::string name;  // the exact token agents emit in Action sections
    std::string description;
    ToolKind kind = ToolKind::Effectful;
};

// Executors return the observation string; failures are returned as
// observations too, so the refinement loop can self-correct.
using ToolExecutor = std::function<std::string(const std::string& input, Workspace& ws)>;

struct ToolExecution {
    std::string observation;
    bool terminal = false;
};

class ToolRegistry {
public:
    Status register_tool(ToolDef def, ToolExecutor executor) {
        if (find(def.name))
            return Error{"duplicate-tool", "tool already registered: " + def.name};
        tools_.push_back({std::move(def), std::move(executor)});
        return ok_status();
    }

    // Case-insensitive, trimmed lookup; model outputs vary in casing.
    const ToolDef* find(std::string_view name) const {
        auto needle = text::trim(name);
        for (const auto& t : tools_)
            if (text::iequals(t.def.name, needle)) return &t.def;
        return nullptr;
    }

    // Tool failures never escape as run failures; everything surfaces as an
    // observation string fed back to the agent.
    ToolExecution execute(const std::string& name, const std::string& input,
                          Workspace& ws) const {
        auto needle = text::trim(name);
        for (const auto& t : tools_) {
            if (!text::iequals(t.def.name, needle)) continue;
            try {
                return {t.executor(input, ws), t.def.kind == ToolKind::Terminal};
            } catch (const std::exception& e) {
                return {std::string("tool-error: ") + e.what(), false};
            }
        }
        return {"unknown-tool: " + std::string(needle) +
                    " (registered tools: " + names_csv() + ")",
                false};
    }

    std::vector<std::string> names() const {
        std::vector<std::string> out;
        for (const auto& t : tools_) out.push_back(t.def.name);
        return out;
    }

    std::string names_csv() const { return text::join(names(), ", "); }

    std::set<std::string> name_set() const {
        std::set<std::string> out;
        for (const auto& t : tools_) out.insert(t.def.name);
        return out;
    }

    size_t size() const { return tools_.size(); }

private:
    struct Registered {
        ToolDef def;
        ToolExecutor executor;
    };
    std::vector<Registered> tools_;
};

// The default registry ships exactly Write File and Final Output; anything
// else comes through the extension API or config.
inline ToolRegistry default_toolkit() {
    ToolRegistry registry;
    registry.register_tool(
        {kWriteFileTool, "write a file into the run workspace", ToolKind::Effectful},
        [](const std::string& input, Workspace& ws) -> std::string {
            auto parsed = parse_write_file_payload(input);
            if (!parsed.ok()) return parsed.error().to_string();
            const auto& payload = parsed.value();
            auto written = ws.write_file(payload.file_name, payload.content);
            if (!written.ok()) return written.error().to_string();
            return "wrote " + written.value() + " (" + std::to_string(payload.content.size()) +
                   " bytes)";
        });
    registry.register_tool(
        {kFinalOutputTool, "finish the step and return its final summary", ToolKind::Terminal},
        [](const std::string& input, Workspace&) -> std::string { return input; });
    return registry;
}

// Config-declared extension tools: observation echoes the input. Placeholder
// behavior for registries extended without code.
inline Status register_echo_tool(ToolRegistry& registry, const std::string& name,
                                 const std::string& description = "") {
    return registry.register_tool(
        {name, description.empty() ? "echoes its input" : description, ToolKind::Effectful},
        [name](const std::string& input, Workspace&) -> std::string {
            return name + " received: " + input;
        });
}

}  // namespace troupe
