#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <regex>

#include "wta/backend.hpp"
#include "wta/llm_assigner.hpp"
#include "wta/solvers.hpp"

namespace wta {

using nlohmann::json;

MockMode mock_mode_from_string(const std::string& text) {
    if (text == "echo_hungarian") return MockMode::echo_hungarian;
    if (text == "echo_previous") return MockMode::echo_previous;
    if (text == "malformed") return MockMode::malformed;
    if (text == "malformed_once_then_valid") return MockMode::malformed_once_then_valid;
    if (text == "out_of_range") return MockMode::out_of_range;
    if (text == "timeout") return MockMode::timeout;
    throw std::invalid_argument("unknown mock mode '" + text + "'");
}

const char* to_string(MockMode mode) {
    switch (mode) {
        case MockMode::echo_hungarian: return "echo_hungarian";
        case MockMode::echo_previous: return "echo_previous";
        case MockMode::malformed: return "malformed";
        case MockMode::malformed_once_then_valid: return "malformed_once_then_valid";
        case MockMode::out_of_range: return "out_of_range";
        case MockMode::timeout: return "timeout";
    }
    return "unknown";
}

namespace {

const char* const kMalformedReply =
    "I think agent 1 should engage the closest target first, then the others follow.";

std::vector<int> reference_answer(const QueryContext& context) {
    if (context.costs == nullptr) throw std::logic_error("mock backend needs the cost matrix");
    return solve_hungarian(*context.costs).target_of;
}

}  // namespace

BackendReply MockBackend::complete(const std::string& /*prompt*/, const BackendConfig& cfg,
                                   const QueryContext& context) {
    ++calls_;
    switch (mode_) {
        case MockMode::echo_hungarian:
            return {render_row_vector(reference_answer(context)), 0.0};
        case MockMode::echo_previous: {
            if (context.snapshot == nullptr) throw std::logic_error("mock backend needs the snapshot");
            auto z = context.snapshot->previous_assignment;
            const auto fill = reference_answer(context);
            for (std::size_t i = 0; i < z.size(); ++i) {
                if (z[i] == 0) z[i] = fill[i];
            }
            return {render_row_vector(z), 0.0};
        }
        case MockMode::malformed:
            return {kMalformedReply, 0.0};
        case MockMode::malformed_once_then_valid: {
            const bool valid = next_valid_;
            next_valid_ = !next_valid_;
            if (!valid) return {kMalformedReply, 0.0};
            return {render_row_vector(reference_answer(context)), 0.0};
        }
        case MockMode::out_of_range: {
            auto z = reference_answer(context);
            const int n_targets = static_cast<int>(context.costs->cols());
            for (int& v : z) {
                if (v == n_targets) v = std::max(99, n_targets + 1);
            }
            return {"Sure! " + render_row_vector(z) + " done", 0.0};
        }
        case MockMode::timeout:
            throw BackendError(BackendError::Kind::timeout, "mock backend timed out", cfg.timeout);
    }
    throw std::logic_error("unhandled mock mode");
}

std::string chat_request_body(const std::string& prompt, const BackendConfig& cfg) {
    json body = {{"model", cfg.model_name},
                 {"messages", json::array({{{"role", "user"}, {"content", prompt}}})},
                 {"temperature", cfg.temperature}};
    return body.dump();
}

std::string chat_response_text(const std::string& body) {
    json j;
    try {
        j = json::parse(body);
        return j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
        throw BackendError(BackendError::Kind::protocol,
                           std::string("unexpected chat-completion response: ") + e.what());
    }
}

BackendReply HttpChatBackend::complete(const std::string& prompt, const BackendConfig& cfg,
                                       const QueryContext& /*context*/) {
    static const std::regex url_re(R"(^(https?)://([^/:]+)(?::(\d+))?(/.*)?$)");
    std::smatch m;
    if (!std::regex_match(cfg.endpoint_url, m, url_re)) {
        throw BackendError(BackendError::Kind::transport, "unsupported endpoint URL: " + cfg.endpoint_url);
    }
    const std::string scheme = m[1];
    const std::string host = m[2];
    const int port = m[3].matched ? std::stoi(m[3]) : (scheme == "https" ? 443 : 80);
    const std::string path = m[4].matched ? std::string(m[4]) : "/";

    const char* key = std::getenv(cfg.api_key_env_var.c_str());
    httplib::Headers headers;
    if (key != nullptr && *key != '\0') headers.emplace("Authorization", std::string("Bearer ") + key);

    httplib::Client client(scheme + "://" + host + ":" + std::to_string(port));
    const auto timeout = std::chrono::duration<double>(cfg.timeout);
    const auto sec = std::chrono::duration_cast<std::chrono::seconds>(timeout);
    const auto usec = std::chrono::duration_cast<std::chrono::microseconds>(timeout - sec);
    client.set_connection_timeout(sec.count(), usec.count());
    client.set_read_timeout(sec.count(), usec.count());
    client.set_write_timeout(sec.count(), usec.count());

    const auto start = std::chrono::steady_clock::now();
    auto res = client.Post(path, headers, chat_request_body(prompt, cfg), "application/json");
    const double latency = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    if (!res) {
        const auto err = res.error();
        const bool timed_out = err == httplib::Error::ConnectionTimeout ||
                               (err == httplib::Error::Read && latency >= 0.9 * cfg.timeout);
        throw BackendError(timed_out ? BackendError::Kind::timeout : BackendError::Kind::transport,
                           "chat request failed: " + httplib::to_string(err), latency);
    }
    if (res->status < 200 || res->status >= 300) {
        throw BackendError(BackendError::Kind::status,
                           "chat request returned HTTP " + std::to_string(res->status), latency);
    }
    return {chat_response_text(res->body), latency};
}

std::unique_ptr<ChatBackend> make_backend(const BackendConfig& cfg) {
    if (cfg.is_mock()) {
        return std::make_unique<MockBackend>(mock_mode_from_string(cfg.endpoint_url.substr(7)));
    }
    return std::make_unique<HttpChatBackend>();
}

}  // namespace wta
