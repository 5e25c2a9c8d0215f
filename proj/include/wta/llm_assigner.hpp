#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wta/backend.hpp"
#include "wta/geometry.hpp"
#include "wta/solvers.hpp"

namespace wta {

/// Structured prompt: system legend and constraints, scene data, decision request.
struct PromptDocument {
    std::string system_section;
    std::string scene_section;
    std::string decision_request;

    /// The single user message sent to the backend.
    std::string text() const;
};

PromptDocument format_prompt(const SceneSnapshot& snapshot, int precision = 1);

/// "[2 1 3]" style row vector.
std::string render_row_vector(std::span<const int> values);

enum class ParseFailure { none, no_vector, empty_brackets, non_integer, wrong_arity, out_of_range };

const char* to_string(ParseFailure failure);

struct ParseResult {
    std::vector<int> values;
    std::vector<std::size_t> clipped;  // entries moved into [1, n_targets]
    ParseFailure failure = ParseFailure::none;
    std::string detail;

    bool ok() const { return failure == ParseFailure::none; }
};

/// Extracts the first bracketed integer row vector from the earliest line
/// holding one. Stray non-numeric characters inside the brackets are dropped;
/// entries outside [1, n_targets] are clipped (or rejected when strict).
ParseResult parse_response(std::string_view raw, std::size_t n_agents, std::size_t n_targets,
                           bool strict = false);

struct ValidationResult {
    std::optional<Assignment> assignment;
    std::vector<std::string> violations;

    bool ok() const { return assignment.has_value(); }
};

/// One target per interceptor always; every target covered when the snapshot's
/// coverage condition applies. The objective is evaluated on costs.
ValidationResult validate_assignment(std::span<const int> z, const SceneSnapshot& snapshot,
                                     const Matrix& costs);

enum class AssignmentSource { llm, fallback, classical };

const char* to_string(AssignmentSource source);

struct AssignerOutcome {
    Assignment assignment;
    AssignmentSource source = AssignmentSource::llm;
    int attempts = 0;
    double latency = 0.0;  // s, summed over attempts
    std::string prompt;
    std::vector<std::string> raw_responses;  // one per attempt, empty on backend error
    std::vector<std::string> failures;       // reason per failed attempt
    bool clipped = false;

    const std::string& raw_response() const;
};

/// Prompt, query, parse and validate with up to cfg.max_retries re-queries;
/// afterwards the configured classical solver computes the assignment.
AssignerOutcome assign_with_fallback(const SceneSnapshot& snapshot, const Matrix& costs,
                                     const BackendConfig& cfg, ChatBackend& backend);

/// Append-only JSON-lines log of prompts and responses, one record per epoch.
class ReplayLog {
public:
    explicit ReplayLog(const std::filesystem::path& path);
    void append(const SceneSnapshot& snapshot, const AssignerOutcome& outcome);

private:
    std::ofstream out_;
};

struct ReplayRecord {
    int epoch = 0;
    double time = 0.0;
    std::size_t n_agents = 0;
    std::size_t n_targets = 0;
    std::string prompt;
    std::vector<std::string> responses;
    std::string source;
};

std::vector<ReplayRecord> read_replay_log(const std::filesystem::path& path);

}  // namespace wta
