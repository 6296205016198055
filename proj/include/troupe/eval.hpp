#pragma once

#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "troupe/core.hpp"
#include "troupe/result.hpp"
#include "troupe/text.hpp"

namespace troupe {

// ---------------------------------------------------------------------------
// Trivia creative writing benchmark: write a topic story embedding the
// answers to N trivia questions; scored by answer-variant string matching.
// ---------------------------------------------------------------------------

struct TriviaQuestion {
    std::string question_text;
    std::vector<std::string> answer_variants;
};

struct TriviaTask {
    std::string topic;
    std::vector<TriviaQuestion> questions;

    int n() const { return static_cast<int>(questions.size()); }
};

struct TriviaScore {
    int correct_mentions = 0;
    int total = 0;

    double score() const { return total == 0 ? 0.0 : static_cast<double>(correct_mentions) / total; }
};

// Normalization for matching: ASCII case fold and whitespace-run collapse.
// No stemming, no punctuation stripping, so scores stay comparable.
inline std::string normalize_for_match(std::string_view s) {
    return text::collapse_ws(text::to_lower(s));
}

// A question counts as correct iff any of its answer variants occurs as a
// substring of the normalized story. score = correct mentions / questions.
inline TriviaScore score_output(const std::string& story, const TriviaTask& task) {
    TriviaScore result;
    result.total = task.n();
    std::string normalized_story = normalize_for_match(story);
    for (const auto& q : task.questions) {
        for (const auto& variant : q.answer_variants) {
            if (normalized_story.find(normalize_for_match(variant)) != std::string::npos) {
                ++result.correct_mentions;
                break;
            }
        }
    }
    return result;
}

// Benchmark file: JSON Lines, one task per line:
//   {"topic": "...", "questions": [{"text": "...", "answer_variants": ["..."]}]}
inline Result<std::vector<TriviaTask>> load_benchmark(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return Error{"bad-benchmark", "cannot open benchmark file: " + path};
    std::vector<TriviaTask> tasks;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (text::trim(line).empty()) continue;
        auto locus = path + ":" + std::to_string(lineno);
        auto j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object())
            return Error{"bad-benchmark", locus + ": not a JSON object"};
        if (!j.contains("topic") || !j["topic"].is_string())
            return Error{"bad-benchmark", locus + ": missing string field 'topic'"};
        if (!j.contains("questions") || !j["questions"].is_array() || j["questions"].empty())
            return Error{"bad-benchmark", locus + ": 'questions' must be a non-empty array"};
        TriviaTask task;
        task.topic = j["topic"].get<std::string>();
        for (const auto& q : j["questions"]) {
            if (!q.is_object() || !q.contains("text") || !q["text"].is_string())
                return Error{"bad-benchmark", locus + ": question missing string field 'text'"};
            if (!q.contains("answer_variants") || !q["answer_variants"].is_array() ||
                q["answer_variants"].empty())
                return Error{"bad-benchmark",
                             locus + ": question needs a non-empty 'answer_variants' array"};
            TriviaQuestion question;
            question.question_text = q["text"].get<std::string>();
            for (const auto& v : q["answer_variants"]) {
                if (!v.is_string() || normalize_for_match(v.get<std::string>()).empty())
                    return Error{"bad-benchmark", locus + ": empty answer variant"};
                question.answer_variants.push_back(v.get<std::string>());
            }
            task.questions.push_back(std::move(question));
        }
        tasks.push_back(std::move(task));
    }
    return tasks;
}

// The task text handed to the engine for one benchmark instance.
inline std::string trivia_task_text(const TriviaTask& task) {
    std::string out = "Write a short and coherent story about " + task.topic +
                      " that incorporates the answers to the following " +
                      std::to_string(task.n()) + " trivia questions:\n";
    for (size_t i = 0; i < task.questions.size(); ++i)
        out += std::to_string(i + 1) + ". " + task.questions[i].question_text + "\n";
    return out;
}

struct EvalRow {
    int index = 0;
    std::string topic;
    TriviaScore score;
    std::string error;  // empty on success
};

struct EvalReport {
    std::vector<EvalRow> rows;
    double mean_score_pct = 0.0;      // instance-level mean of per-task scores
    double question_level_pct = 0.0;  // pooled correct / pooled questions

    int instances() const { return static_cast<int>(rows.size()); }
};

// Runs every task through `runner` (the full drafting+execution pipeline) and
// scores the final answers. Per-task failures score 0 with an error note; the
// run continues. Both aggregations are reported; they coincide when all
// instances share one N.
inline EvalReport run_benchmark(
    const std::vector<TriviaTask>& tasks,
    const std::function<Result<std::string>(const Task&, const TriviaTask&)>& runner) {
    EvalReport report;
    long pooled_correct = 0, pooled_total = 0;
    double score_sum = 0.0;
    for (size_t i = 0; i < tasks.size(); ++i) {
        const auto& task = tasks[i];
        EvalRow row;
        row.index = static_cast<int>(i) + 1;
        row.topic = task.topic;
        row.score.total = task.n();

        Task engine_task;
        engine_task.id = "trivia-" + std::to_string(i + 1);
        engine_task.text = trivia_task_text(task);
        auto answer = runner(engine_task, task);
        if (answer.ok()) {
            row.score = score_output(answer.value(), task);
        } else {
            row.error = answer.error().to_string();
        }
        pooled_correct += row.score.correct_mentions;
        pooled_total += row.score.total;
        score_sum += row.score.score();
        report.rows.push_back(std::move(row));
    }
    if (!tasks.empty()) report.mean_score_pct = 100.0 * score_sum / static_cast<double>(tasks.size());
    if (pooled_total > 0)
        report.question_level_pct = 100.0 * static_cast<double>(pooled_correct) /
                                    static_cast<double>(pooled_total);
    return report;
}

inline ordered_json eval_report_to_json(const EvalReport& report, const std::string& method) {
    ordered_json j;
    j["method"] = method;
    j["instances"] = report.instances();
    j["mean_score_pct"] = report.mean_score_pct;
    j["question_level_pct"] = report.question_level_pct;
    ordered_json rows = ordered_json::array();
    for (const auto& r : report.rows) {
        ordered_json row;
        row["index"] = r.index;
        row["topic"] = r.topic;
        row["correct"] = r.score.correct_mentions;
        row["total"] = r.score.total;
        row["score"] = r.score.score();
        if (!r.error.empty()) row["error"] = r.error;
        rows.push_back(std::move(row));
    }
    j["tasks"] = std::move(rows);
    return j;
}

// Text table with the benchmark's reporting columns: method, score %, and
// delta against a named baseline report when one is supplied.
inline std::string render_eval_table(const EvalReport& report, const std::string& method,
                                     const std::string& baseline_name = "",
                                     double baseline_pct = 0.0) {
    char line[160];
    std::string out;
    out += "Method                         Score (%)   Delta\n";
    out += "-----------------------------  ----------  ----------\n";
    if (!baseline_name.empty()) {
        std::snprintf(line, sizeof(line), "%-29s  %10.1f  %10s\n", baseline_name.c_str(),
                      baseline_pct, "+0.0%");
        out += line;
        double delta = report.mean_score_pct - baseline_pct;
        char delta_text[32];
        std::snprintf(delta_text, sizeof(delta_text), "%+.1f%%", delta);
        std::snprintf(line, sizeof(line), "%-29s  %10.1f  %10s\n", method.c_str(),
                      report.mean_score_pct, delta_text);
        out += line;
    } else {
        std::snprintf(line, sizeof(line), "%-29s  %10.1f  %10s\n", method.c_str(),
                      report.mean_score_pct, "-");
        out += line;
    }
    return out;
}

}  // namespace troupe
