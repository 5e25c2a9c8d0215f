#pragma once

#include <memory>
#include <stdexcept>
#include <string>

#include "wta/geometry.hpp"
#include "wta/matrix.hpp"

namespace wta {

enum class FallbackSolver { hungarian, milp };

struct BackendConfig {
    std::string endpoint_url = "https://api.openai.com/v1/chat/completions";
    std::string model_name = "gpt-4o-mini";
    std::string api_key_env_var = "OPENAI_API_KEY";
    double timeout = 30.0;     // s
    double temperature = 0.0;
    int max_retries = 2;       // re-queries after the first attempt
    FallbackSolver fallback_solver = FallbackSolver::hungarian;
    bool strict_parsing = false;  // reject out-of-range indices instead of clipping
    int precision = 1;            // decimals for prompt numbers

    bool is_mock() const { return endpoint_url.rfind("mock://", 0) == 0; }
};

/// Everything the live backend ignores but the offline mock needs to
/// produce reference answers.
struct QueryContext {
    const SceneSnapshot* snapshot = nullptr;
    const Matrix* costs = nullptr;
};

struct BackendReply {
    std::string text;
    double latency = 0.0;  // s
};

/// Retryable backend failure: timeout, transport error or non-success status.
class BackendError : public std::runtime_error {
public:
    enum class Kind { timeout, transport, status, protocol };
    BackendError(Kind kind, const std::string& what, double latency = 0.0)
        : std::runtime_error(what), kind_(kind), latency_(latency) {}
    Kind kind() const { return kind_; }
    double latency() const { return latency_; }

private:
    Kind kind_;
    double latency_;
};

class ChatBackend {
public:
    virtual ~ChatBackend() = default;
    virtual BackendReply complete(const std::string& prompt, const BackendConfig& cfg,
                                  const QueryContext& context) = 0;
};

enum class MockMode {
    echo_hungarian,
    echo_previous,
    malformed,
    malformed_once_then_valid,
    out_of_range,
    timeout
};

MockMode mock_mode_from_string(const std::string& text);
const char* to_string(MockMode mode);

/// Offline stand-in selected with a `mock://<mode>` endpoint. Latency is
/// simulated, so runs are reproducible.
class MockBackend : public ChatBackend {
public:
    explicit MockBackend(MockMode mode) : mode_(mode) {}
    BackendReply complete(const std::string& prompt, const BackendConfig& cfg,
                          const QueryContext& context) override;
    int calls() const { return calls_; }

private:
    MockMode mode_;
    int calls_ = 0;
    bool next_valid_ = false;
};

/// Chat-completion client over HTTP(S) with JSON bodies.
class HttpChatBackend : public ChatBackend {
public:
    BackendReply complete(const std::string& prompt, const BackendConfig& cfg,
                          const QueryContext& context) override;
};

/// Request body sent to the chat-completion endpoint.
std::string chat_request_body(const std::string& prompt, const BackendConfig& cfg);

/// First choice's message text from a chat-completion response body.
std::string chat_response_text(const std::string& body);

/// Mock backend for mock:// endpoints, HTTP client otherwise.
std::unique_ptr<ChatBackend> make_backend(const BackendConfig& cfg);

}  // namespace wta
