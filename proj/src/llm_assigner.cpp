#include "wta/llm_assigner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <regex>
#include <sstream>

#include <json.hpp>

namespace wta {

namespace {

std::string fixed(double value, int precision) {
    if (std::isinf(value)) return "1e9";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", precision, value);
    std::string s(buf);
    // "-0.0" carries no information and breaks byte-level comparisons.
    if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
    return s;
}

std::string render_list(std::span<const double> values, int precision) {
    std::string out = "[";
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ',';
        out += fixed(values[i], precision);
    }
    return out + "]";
}

std::string render_matrix(const Matrix& m, int precision) {
    std::string out = "[";
    for (std::size_t r = 0; r < m.rows(); ++r) {
        if (r) out += ';';
        out += render_list(m.row(r), precision);
    }
    return out + "]";
}

}  // namespace

std::string PromptDocument::text() const {
    return system_section + "\n" + scene_section + "\n" + decision_request;
}

std::string render_row_vector(std::span<const int> values) {
    std::string out = "[";
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ' ';
        out += std::to_string(values[i]);
    }
    return out + "]";
}

PromptDocument format_prompt(const SceneSnapshot& s, int precision) {
    PromptDocument doc;

    std::ostringstream sys;
    sys << "You are an expert mission planner for a weapon target assignment problem.\n"
        << "Goal: Solve the optimal assignment problem and protect high-priority assets by assigning "
           "interceptors to incoming targets.\n\n"
        << "PROVIDED DATA STRUCTURE:\n"
        << "N_i = number of interceptors (agents), N_t = number of targets, N_a = number of defended assets.\n"
        << "Agents: agent_i, i=1,...,N_i; Targets: target_k, k=1,...,N_t; Assets: asset_m, m=1,...,N_a.\n"
        << "PREVIOUS_ASSIGNMENT: MATLAB row vector where entry i gives the Target ID assigned to Agent i.\n"
        << "DISTANCE_MATRIX (N_i x N_t): distance between Agent i and Target k.\n"
        << "CLOSING_MATRIX (N_i x N_t): relative closing speed between Agent i and Target k.\n"
        << "TIME_TO_ASSET (N_t): time until each target reaches its associated asset.\n"
        << "THREAT_LEVEL (N_t): threat level of each target.\n"
        << "ASSET_PRIORITY (N_a): priority of each defended asset.\n";
    if (s.remapped()) {
        sys << "AGENT_IDS / TARGET_IDS: original ids of the remaining agents and targets; "
               "a 0 in PREVIOUS_ASSIGNMENT marks a target that has been removed.\n";
    }
    sys << "\nCONSTRAINTS:\n"
        << "- Each interceptor must be assigned to exactly ONE target.\n";
    if (s.coverage_active()) sys << "- Every target must be assigned at least one interceptor.\n";
    sys << "- Returned vector must follow the same format as PREVIOUS_ASSIGNMENT\n"
        << "  (index i = Agent ID, value = Target ID).\n"
        << "- Avoid frequent reassignments; keep PREVIOUS_ASSIGNMENT unless clearly advantageous.\n"
        << "- Prefer small distance, high closing speed, and low time-to-asset.\n"
        << "- Prioritize high-priority assets.\n"
        << "- RETURN ONLY a MATLAB row vector in the same format as PREVIOUS_ASSIGNMENT.\n";
    doc.system_section = sys.str();

    std::ostringstream scene;
    scene << "CURRENT SCENARIO INFORMATION:\n"
          << "N_i = " << s.num_interceptors() << ", N_t = " << s.num_targets()
          << ", N_a = " << s.num_assets() << "\n";
    if (s.remapped()) {
        scene << "AGENT_IDS: " << render_row_vector(s.interceptor_ids) << "\n"
              << "TARGET_IDS: " << render_row_vector(s.target_ids) << "\n";
    }
    scene << "PREVIOUS_ASSIGNMENT: " << render_row_vector(s.previous_assignment) << "\n"
          << "DISTANCE_MATRIX: " << render_matrix(s.distance, precision) << "\n"
          << "CLOSING_MATRIX: " << render_matrix(s.closing, precision) << "\n"
          << "TIME_TO_ASSET: " << render_list(s.time_to_asset, precision) << "\n"
          << "THREAT_LEVEL: " << render_list(s.threat_level, precision) << "\n"
          << "ASSET_PRIORITY: " << render_list(s.asset_priority, precision) << "\n";
    doc.scene_section = scene.str();

    std::vector<int> example = s.previous_assignment;
    for (std::size_t i = 0; i < example.size(); ++i) {
        if (example[i] == 0) example[i] = static_cast<int>(std::min(i + 1, s.num_targets()));
    }
    doc.decision_request =
        "DECISION REQUEST:\n"
        "Please return your decision for the assignment as a MATLAB row vector in the same format as "
        "PREVIOUS_ASSIGNMENT, where index i corresponds to the Agent ID and the value corresponds to the "
        "assigned Target ID. Example: " +
        render_row_vector(example) + ".\n";
    return doc;
}

const char* to_string(ParseFailure failure) {
    switch (failure) {
        case ParseFailure::none: return "none";
        case ParseFailure::no_vector: return "no_vector";
        case ParseFailure::empty_brackets: return "empty_brackets";
        case ParseFailure::non_integer: return "non_integer";
        case ParseFailure::wrong_arity: return "wrong_arity";
        case ParseFailure::out_of_range: return "out_of_range";
    }
    return "unknown";
}

ParseResult parse_response(std::string_view raw, std::size_t n_agents, std::size_t n_targets, bool strict) {
    static const std::regex bracket_re(R"(\[([^\[\]\r\n]*)\])");
    static const std::regex stray_re(R"([^0-9+\-., \t])");
    static const std::regex separator_re(R"([ ,\t]+)");
    static const std::regex integer_re(R"([+-]?[0-9]+)");

    ParseResult result;
    std::string inner;
    bool found = false;
    std::istringstream lines{std::string(raw)};
    for (std::string line; !found && std::getline(lines, line);) {
        std::smatch m;
        if (std::regex_search(line, m, bracket_re)) {
            inner = m[1];
            found = true;
        }
    }
    if (!found) {
        result.failure = ParseFailure::no_vector;
        result.detail = "no bracketed row vector in response";
        return result;
    }

    inner = std::regex_replace(inner, stray_re, "");
    std::vector<std::string> tokens;
    std::sregex_token_iterator it(inner.begin(), inner.end(), separator_re, -1);
    for (std::sregex_token_iterator end; it != end; ++it) {
        if (it->length() > 0) tokens.push_back(*it);
    }
    if (tokens.empty()) {
        result.failure = ParseFailure::empty_brackets;
        result.detail = "bracketed vector has no entries";
        return result;
    }

    for (const auto& token : tokens) {
        if (!std::regex_match(token, integer_re)) {
            result.failure = ParseFailure::non_integer;
            result.detail = "entry '" + token + "' is not an integer";
            result.values.clear();
            return result;
        }
        long long v = 0;
        try {
            v = std::stoll(token);
        } catch (const std::out_of_range&) {
            v = token.front() == '-' ? -1 : static_cast<long long>(n_targets) + 1;
        }
        result.values.push_back(static_cast<int>(std::clamp<long long>(v, -1, static_cast<long long>(n_targets) + 1)));
    }
    if (result.values.size() != n_agents) {
        result.failure = ParseFailure::wrong_arity;
        result.detail = "expected " + std::to_string(n_agents) + " entries, got " +
                        std::to_string(result.values.size());
        return result;
    }

    const int hi = static_cast<int>(n_targets);
    for (std::size_t i = 0; i < result.values.size(); ++i) {
        int& v = result.values[i];
        if (v >= 1 && v <= hi) continue;
        if (strict) {
            result.failure = ParseFailure::out_of_range;
            result.detail = "entry " + std::to_string(i + 1) + " outside [1, " + std::to_string(hi) + "]";
            return result;
        }
        v = std::clamp(v, 1, hi);
        result.clipped.push_back(i);
    }
    return result;
}

ValidationResult validate_assignment(std::span<const int> z, const SceneSnapshot& snapshot,
                                     const Matrix& costs) {
    ValidationResult out;
    const std::size_t n = snapshot.num_interceptors();
    const std::size_t m = snapshot.num_targets();
    if (z.size() != n) {
        out.violations.push_back("assignment has " + std::to_string(z.size()) + " entries, expected " +
                                 std::to_string(n));
        return out;
    }
    std::vector<int> load(m, 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (z[i] < 1 || static_cast<std::size_t>(z[i]) > m) {
            out.violations.push_back("interceptor " + std::to_string(i + 1) + " assigned to unknown target " +
                                     std::to_string(z[i]));
        } else {
            ++load[static_cast<std::size_t>(z[i] - 1)];
        }
    }
    if (snapshot.coverage_active()) {
        for (std::size_t k = 0; k < m; ++k) {
            if (load[k] == 0) out.violations.push_back("target " + std::to_string(k + 1) + " uncovered");
        }
    }
    if (out.violations.empty()) {
        std::vector<int> target_of(z.begin(), z.end());
        out.assignment = Assignment{target_of, assignment_objective(costs, target_of)};
    }
    return out;
}

const char* to_string(AssignmentSource source) {
    switch (source) {
        case AssignmentSource::llm: return "llm";
        case AssignmentSource::fallback: return "fallback";
        case AssignmentSource::classical: return "classical";
    }
    return "unknown";
}

const std::string& AssignerOutcome::raw_response() const {
    static const std::string empty;
    return raw_responses.empty() ? empty : raw_responses.back();
}

AssignerOutcome assign_with_fallback(const SceneSnapshot& snapshot, const Matrix& costs,
                                     const BackendConfig& cfg, ChatBackend& backend) {
    AssignerOutcome outcome;
    outcome.prompt = format_prompt(snapshot, cfg.precision).text();
    const QueryContext context{&snapshot, &costs};
    const int max_attempts = std::max(cfg.max_retries, 0) + 1;

    for (int attempt = 1; attempt <= max_attempts; ++attempt) {
        outcome.attempts = attempt;
        BackendReply reply;
        try {
            reply = backend.complete(outcome.prompt, cfg, context);
        } catch (const BackendError& e) {
            outcome.latency += e.latency();
            outcome.raw_responses.emplace_back();
            outcome.failures.push_back(std::string("backend: ") + e.what());
            continue;
        }
        outcome.latency += reply.latency;
        outcome.raw_responses.push_back(reply.text);

        ParseResult parsed = parse_response(reply.text, snapshot.num_interceptors(), snapshot.num_targets(),
                                            cfg.strict_parsing);
        if (!parsed.ok()) {
            outcome.failures.push_back(std::string("parse: ") + to_string(parsed.failure) + ": " + parsed.detail);
            continue;
        }
        ValidationResult valid = validate_assignment(parsed.values, snapshot, costs);
        if (!valid.ok()) {
            std::string joined;
            for (const auto& v : valid.violations) joined += (joined.empty() ? "" : "; ") + v;
            outcome.failures.push_back("validation: " + joined);
            continue;
        }
        outcome.assignment = *valid.assignment;
        outcome.source = AssignmentSource::llm;
        outcome.clipped = !parsed.clipped.empty();
        return outcome;
    }

    outcome.source = AssignmentSource::fallback;
    if (cfg.fallback_solver == FallbackSolver::milp) {
        MilpConstraints cons;
        cons.coverage_required = snapshot.coverage;
        outcome.assignment = solve_milp(costs, cons);
    } else {
        outcome.assignment = solve_hungarian(costs);
    }
    return outcome;
}

ReplayLog::ReplayLog(const std::filesystem::path& path) : out_(path, std::ios::app) {
    if (!out_) throw std::runtime_error("cannot open replay log " + path.string());
}

void ReplayLog::append(const SceneSnapshot& snapshot, const AssignerOutcome& outcome) {
    nlohmann::json record = {{"h", snapshot.epoch_index},
                             {"t", snapshot.time},
                             {"n_agents", snapshot.num_interceptors()},
                             {"n_targets", snapshot.num_targets()},
                             {"prompt", outcome.prompt},
                             {"responses", outcome.raw_responses},
                             {"response", outcome.raw_response()},
                             {"source", to_string(outcome.source)},
                             {"attempts", outcome.attempts},
                             {"latency", outcome.latency},
                             {"assignment", outcome.assignment.target_of}};
    out_ << record.dump() << '\n';
    out_.flush();
}

std::vector<ReplayRecord> read_replay_log(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open replay log " + path.string());
    std::vector<ReplayRecord> records;
    for (std::string line; std::getline(in, line);) {
        if (line.empty()) continue;
        const auto j = nlohmann::json::parse(line);
        ReplayRecord r;
        r.epoch = j.at("h").get<int>();
        r.time = j.at("t").get<double>();
        r.n_agents = j.at("n_agents").get<std::size_t>();
        r.n_targets = j.at("n_targets").get<std::size_t>();
        r.prompt = j.at("prompt").get<std::string>();
        r.responses = j.at("responses").get<std::vector<std::string>>();
        r.source = j.at("source").get<std::string>();
        records.push_back(std::move(r));
    }
    return records;
}

}  // namespace wta
