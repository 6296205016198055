#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "troupe/toolkit.hpp"

using namespace troupe;
namespace fs = std::filesystem;

namespace {

fs::path fresh_root(const std::string& name) {
    auto root = fs::temp_directory_path() / name;
    fs::remove_all(root);
    fs::create_directories(root);
    return root;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

TEST_CASE("the default registry is exactly Write File and Final Output") {
    auto registry = default_toolkit();
    CHECK(registry.name_set() == std::set<std::string>{"Write File", "Final Output"});
    CHECK(registry.names_csv() == "Write File, Final Output");
}

TEST_CASE("registering a duplicate tool fails") {
    auto registry = default_toolkit();
    auto again = registry.register_tool({"Write File", "again", ToolKind::Effectful},
                                        [](const std::string&, Workspace&) { return ""; });
    REQUIRE_FALSE(again.ok());
    CHECK(again.error().code == "duplicate-tool");
    CHECK(registry.size() == 2);
}

TEST_CASE("extension tools appear in the registry and its csv") {
    auto registry = default_toolkit();
    REQUIRE(register_echo_tool(registry, "Echo").ok());
    CHECK(registry.name_set() == std::set<std::string>{"Write File", "Final Output", "Echo"});
    CHECK(registry.names_csv() == "Write File, Final Output, Echo");
    Workspace ws;
    auto result = registry.execute("echo", "ping", ws);
    CHECK(result.observation == "Echo received: ping");
}

TEST_CASE("write file executes, reports bytes, and lands in the workspace") {
    auto root = fresh_root("troupe_tk_write");
    Workspace ws(root);
    auto registry = default_toolkit();
    auto result = registry.execute(
        "Write File", format_write_file_payload("tetris.py", "print('hi')"), ws);
    CHECK_FALSE(result.terminal);
    CHECK(result.observation == "wrote tetris.py (11 bytes)");
    CHECK(slurp(root / "tetris.py") == "print('hi')");
    CHECK(ws.files_written() == std::vector<std::string>{"tetris.py"});
}

TEST_CASE("final output returns its input unchanged and signals termination") {
    Workspace ws;
    auto registry = default_toolkit();
    auto result = registry.execute("Final Output", "summary text", ws);
    CHECK(result.terminal);
    CHECK(result.observation == "summary text");
}

TEST_CASE("unknown tools become observations, not failures") {
    Workspace ws;
    auto registry = default_toolkit();
    auto result = registry.execute("Nonexistent", "anything", ws);
    CHECK_FALSE(result.terminal);
    CHECK(result.observation.rfind("unknown-tool", 0) == 0);
}

TEST_CASE("tool names match case-insensitively after trimming") {
    Workspace ws;
    auto registry = default_toolkit();
    CHECK(registry.execute("  final output ", "x", ws).terminal);
    CHECK(registry.find(" WRITE FILE ") != nullptr);
}

TEST_CASE("malformed payloads and escapes surface as observations") {
    auto root = fresh_root("troupe_tk_obs");
    Workspace ws(root);
    auto registry = default_toolkit();
    auto bad = registry.execute("Write File", "no delimiters here", ws);
    CHECK(bad.observation.rfind("malformed-write-file", 0) == 0);
    auto escape = registry.execute(
        "Write File", format_write_file_payload("../../etc/passwd", "x"), ws);
    CHECK(escape.observation.rfind("path-escape", 0) == 0);
    CHECK(ws.files_written().empty());
}

TEST_CASE("overwrites are allowed and recorded once") {
    auto root = fresh_root("troupe_tk_overwrite");
    Workspace ws(root);
    REQUIRE(ws.write_file("a.txt", "one").ok());
    REQUIRE(ws.write_file("a.txt", "two").ok());
    CHECK(slurp(root / "a.txt") == "two");
    CHECK(ws.files_written() == std::vector<std::string>{"a.txt"});
}

TEST_CASE("workspace resolve joins simple relative paths") {
    auto root = fresh_root("troupe_tk_resolve");
    auto resolved = workspace_resolve(root, "src/main.py");
    REQUIRE(resolved.ok());
    CHECK(resolved.value() == root / "src/main.py");
}

TEST_CASE("dotdot escapes are rejected") {
    auto root = fresh_root("troupe_tk_dotdot");
    auto resolved = workspace_resolve(root, "../../etc/passwd");
    REQUIRE_FALSE(resolved.ok());
    CHECK(resolved.error().code == "path-escape");
}

TEST_CASE("interior dot segments normalize away") {
    auto root = fresh_root("troupe_tk_norm");
    auto resolved = workspace_resolve(root, "a/./b//c.txt");
    REQUIRE(resolved.ok());
    CHECK(resolved.value().lexically_normal() == (root / "a/b/c.txt").lexically_normal());

    // interior ".." that stays inside the root is fine
    auto inside = workspace_resolve(root, "a/../b.txt");
    REQUIRE(inside.ok());
    CHECK(inside.value().lexically_normal() == (root / "b.txt").lexically_normal());
}

TEST_CASE("absolute paths are rejected") {
    auto root = fresh_root("troupe_tk_abs");
    auto resolved = workspace_resolve(root, "/etc/passwd");
    REQUIRE_FALSE(resolved.ok());
    CHECK(resolved.error().code == "path-escape");
}

TEST_CASE("symlink traversal out of the root is rejected") {
    auto root = fresh_root("troupe_tk_symlink");
    auto outside = fresh_root("troupe_tk_symlink_outside");
    std::error_code ec;
    fs::create_directory_symlink(outside, root / "link", ec);
    REQUIRE_FALSE(ec);
    auto resolved = workspace_resolve(root, "link/evil.txt");
    REQUIRE_FALSE(resolved.ok());
    CHECK(resolved.error().code == "path-escape");

    // a symlink that stays inside the root is fine
    fs::create_directories(root / "real");
    fs::create_directory_symlink(root / "real", root / "alias", ec);
    REQUIRE_FALSE(ec);
    CHECK(workspace_resolve(root, "alias/ok.txt").ok());
}

TEST_CASE("fuzzed candidates either resolve inside the root or report path-escape") {
    auto root = fresh_root("troupe_tk_fuzz");
    auto canon_root = fs::weakly_canonical(root);
    std::mt19937 rng(42);
    static const std::vector<std::string> pieces = {
        "a",  "..", ".",  "b.txt", "/etc", "\\evil", "~",  "c d", "..\\..", "", "dev",
        "null", "....", "a/../..", "json.hpp"};
    for (int i = 0; i < 2000; ++i) {
        std::string candidate;
        int segments = 1 + static_cast<int>(rng() % 4);
        for (int s = 0; s < segments; ++s) {
            if (s) candidate += "/";
            candidate += pieces[rng() % pieces.size()];
        }
        auto resolved = workspace_resolve(root, candidate);
        if (resolved.ok()) {
            auto canon = fs::weakly_canonical(resolved.value());
            auto rel = canon.lexically_relative(canon_root);
            CAPTURE(candidate, canon);
            CHECK(!rel.empty());
            CHECK(rel.native().rfind("..", 0) != 0);
        } else {
            CHECK(resolved.error().code == "path-escape");
        }
    }
}

TEST_CASE("write round-trips byte-identical content") {
    auto root = fresh_root("troupe_tk_roundtrip");
    Workspace ws(root);
    std::string content = "bytes\n\twith tabs\nand \x01 control\n";
    REQUIRE(ws.write_file("data/blob.bin", content).ok());
    CHECK(slurp(root / "data/blob.bin") == content);
}
