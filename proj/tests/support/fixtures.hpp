#pragma once

// Scripted protocol scenarios shared by the unit suites and the acceptance
// binary. Everything here is deterministic by construction.

#include <string>
#include <vector>

#include "troupe/core.hpp"
#include "troupe/engine.hpp"

namespace fixtures {

using troupe::ordered_json;

inline std::string role_prompt(const std::string& name, const std::string& description) {
    return "You are " + description + ", named " + name +
           ". Your goal is to carry out your assigned steps well, and your constraints are to "
           "stay within your expertise. You could follow these execution suggestions: be "
           "precise.";
}

inline std::string role_blob(const std::string& name, const std::string& description,
                             const std::vector<std::string>& tools,
                             const std::string& suggestions = "be precise") {
    ordered_json j;
    j["name"] = name;
    j["description"] = description;
    j["tools"] = tools;
    j["suggestions"] = suggestions;
    j["prompt"] = role_prompt(name, description);
    return j.dump(2);
}

inline std::string planner_output(const std::vector<std::string>& created_blobs,
                                  const std::vector<std::string>& plan_lines,
                                  const std::vector<std::string>& selected_blobs = {}) {
    std::string out = "# Thought\nBreaking the task into expert roles.\n\n# Selected Roles\n";
    if (selected_blobs.empty()) {
        out += "None\n";
    } else {
        for (const auto& blob : selected_blobs) out += blob + "\n";
    }
    out += "\n# Created Roles\n";
    for (const auto& blob : created_blobs) out += blob + "\n";
    out += "\n# Execution Plan\n";
    for (const auto& line : plan_lines) out += line + "\n";
    return out;
}

inline std::string observer_ok() {
    return "# Thought\nEverything checks out.\n\n# Suggestions\nNo Suggestions";
}

inline std::string observer_suggest(const std::string& suggestion) {
    return "# Thought\nFound a gap.\n\n# Suggestions\n" + suggestion;
}

inline std::string next_step(const std::string& step_echo,
                             const std::string& history = "None") {
    return "## Thought\nThat step is next.\n\n## NextStep\n" + step_echo +
           "\n\n## RelevantHistory\n" + history;
}

inline std::string agent_action(const std::string& current_step, const std::string& action,
                                const std::string& action_input) {
    return "# Thought\nWorking on it.\n\n# CurrentStep\n" + current_step + "\n\n# Action\n" +
           action + "\n\n# ActionInput\n" + action_input;
}

inline std::string final_step_line(int n, const std::string& question) {
    return std::to_string(n) +
           ". Language Expert: Based on the previous steps, please provide a helpful, relevant, "
           "accurate, and detailed response to the user's original question: " +
           question;
}

// --- minimal 2-step scenario: researcher answers, language expert sums up ---

inline std::vector<std::string> minimal_team_blobs() {
    return {
        role_blob("Researcher", "a meticulous research specialist", {}),
        role_blob("Language Expert", "a language expert who summarizes the results of all steps",
                  {}),
    };
}

inline std::vector<std::string> minimal_plan_lines(const std::string& question) {
    return {
        "1. Researcher: answer the question. Expected output: the answer. Input: the question.",
        final_step_line(2, question),
    };
}

inline std::vector<std::string> minimal_run_script(const std::string& question,
                                                   const std::string& answer,
                                                   const std::string& final_answer) {
    return {
        planner_output(minimal_team_blobs(), minimal_plan_lines(question)),
        observer_ok(),
        observer_ok(),
        next_step("1. Researcher: answer the question. Expected output: the answer. Input: the "
                  "question."),
        agent_action("Answer the question", "Final Output", answer),
        next_step(final_step_line(2, question)),
        agent_action("Summarize the results", "Final Output", final_answer),
    };
}

// --- Tetris-style scenario: drafting converges in round 2 after the agent
// observer asks for a testing expert; execution writes a pseudocode file,
// then the program file, then finalizes ---

inline const char* kTetrisQuestion = "develop Python-based software for the Tetris game";

inline const char* kPseudocodeFile = "pseudocode.txt";
inline const char* kPseudocodeContent =
    "loop:\n  spawn piece\n  while piece can move:\n    apply gravity\n    read input\n  clear "
    "full rows\n  update score";

inline const char* kTetrisFile = "tetris.py";
inline const char* kTetrisContent =
    "import random\n\n\ndef new_piece():\n    return random.choice('IJLOSTZ')\n\n\ndef main():\n"
    "    print('tetris', new_piece())\n\n\nif __name__ == '__main__':\n    main()\n";

inline std::vector<std::string> tetris_team_blobs(bool with_tester) {
    std::vector<std::string> blobs = {
        role_blob("Game Designer", "a game design expert for puzzle games",
                  {"Write File"}),
        role_blob("UI Designer", "a UI design expert for game interfaces", {"Write File"}),
        role_blob("Programmer", "a Python programmer specialized in games",
                  {"Write File"}),
    };
    if (with_tester)
        blobs.push_back(role_blob("Testing Expert", "a software testing expert", {}));
    blobs.push_back(role_blob(
        "Language Expert", "a language expert who summarizes the results of all steps", {}));
    return blobs;
}

inline std::vector<std::string> tetris_plan_lines(bool with_tester) {
    std::vector<std::string> lines = {
        "1. Game Designer: write the game logic document. Expected output: game rules. Input: "
        "the task.",
        "2. UI Designer: describe the game interface. Expected output: UI notes. Input: game "
        "rules.",
        "3. Programmer: implement the game in Python. Expected output: program files. Input: "
        "game rules and UI notes.",
    };
    if (with_tester)
        lines.push_back("4. Testing Expert: test the game and report defects. Expected output: "
                        "test report. Input: program files.");
    lines.push_back(final_step_line(with_tester ? 5 : 4, kTetrisQuestion));
    return lines;
}

inline const char* kTetrisFinalAnswer =
    "The Tetris game was designed, implemented in tetris.py from the pseudocode plan, and "
    "verified by the testing expert.";

inline std::vector<std::string> tetris_run_script() {
    using troupe::format_write_file_payload;
    std::vector<std::string> script;
    // round 1: planner omits a tester; the agent observer objects
    script.push_back(planner_output(tetris_team_blobs(false), tetris_plan_lines(false)));
    script.push_back(observer_suggest(
        "Add a testing expert role so the game is verified before delivery."));
    script.push_back(observer_ok());
    // round 2: revised team converges
    script.push_back(planner_output(tetris_team_blobs(true), tetris_plan_lines(true)));
    script.push_back(observer_ok());
    script.push_back(observer_ok());
    // execution
    script.push_back(next_step(tetris_plan_lines(true)[0]));
    script.push_back(agent_action("Write the game logic document", "Final Output",
                                  "Rules: pieces fall, rows clear, score rises."));
    script.push_back(next_step(tetris_plan_lines(true)[1]));
    script.push_back(agent_action("Describe the game interface", "Final Output",
                                  "UI: 10x20 grid, next-piece preview, score panel."));
    script.push_back(next_step(tetris_plan_lines(true)[2]));
    script.push_back(agent_action("Plan the implementation", "Write File",
                                  format_write_file_payload(kPseudocodeFile,
                                                            kPseudocodeContent)));
    script.push_back(agent_action("Write the program file", "Write File",
                                  format_write_file_payload(kTetrisFile, kTetrisContent)));
    script.push_back(agent_action("Summarize the implementation", "Final Output",
                                  "Implemented tetris.py per the pseudocode plan."));
    script.push_back(next_step(tetris_plan_lines(true)[3]));
    script.push_back(agent_action("Test the game", "Final Output",
                                  "All mechanics behave as designed; no defects found."));
    script.push_back(next_step(tetris_plan_lines(true)[4]));
    script.push_back(agent_action("Summarize for the user", "Final Output",
                                  kTetrisFinalAnswer));
    return script;
}

// --- 4-step trivia flow: retrieval, writing, a collaborative coherence
// check, and the language-expert summary ---

inline std::vector<std::string> trivia_flow_script(const std::string& question,
                                                   const std::string& story) {
    std::vector<std::string> blobs = {
        role_blob("Trivia Researcher", "a trivia domain specialist", {}),
        role_blob("Story Writer", "a creative story writer", {}),
        role_blob("Language Expert",
                  "a language expert who summarizes the results of all steps", {}),
    };
    std::vector<std::string> plan = {
        "1. Trivia Researcher: retrieve the answers to every trivia question. Expected output: "
        "answer list. Input: the questions.",
        "2. Story Writer: draft the story around the topic incorporating every answer. Expected "
        "output: story draft. Input: answer list.",
        "3. Trivia Researcher, Story Writer: check the story mentions every answer coherently. "
        "Expected output: verified story. Input: story draft.",
        final_step_line(4, question),
    };
    return {
        planner_output(blobs, plan),
        observer_ok(),
        observer_ok(),
        next_step(plan[0]),
        agent_action("Retrieve the answers", "Final Output",
                     "Answers: as listed in my notes."),
        next_step(plan[1]),
        agent_action("Draft the story", "Final Output", "Draft: " + story),
        next_step(plan[2]),
        agent_action("Check the draft", "Write File",
                     troupe::format_write_file_payload("coherence_notes.txt",
                                                       "every answer appears")),
        agent_action("Confirm the story", "Final Output", "Verified story: " + story),
        next_step(plan[3]),
        agent_action("Respond to the user", "Final Output", story),
    };
}

// Writes a script to a JSONL file usable by the scripted backend.
inline void write_script_file(const std::string& path, const std::vector<std::string>& script) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    for (const auto& entry : script) {
        ordered_json j;
        j["text"] = entry;
        out << j.dump() << "\n";
    }
}

}  // namespace fixtures
