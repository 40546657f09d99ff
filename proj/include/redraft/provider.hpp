#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "redraft/core.hpp"

namespace redraft {

struct ChatMessage {
    std::string role;  // system | user | assistant
    std::string content;
};

struct ChatRequest {
    std::vector<ChatMessage> messages;
    double temperature = 0.2;
    double top_p = 0.95;
    double frequency_penalty = 0.0;
    double presence_penalty = 0.0;
    std::optional<int> max_tokens;
    std::optional<std::uint64_t> seed;
    std::string model_name;
};

enum class ProviderErrorKind { None, ProviderUnavailable, ProtocolError, ScenarioExhausted };

struct Completion {
    std::string text;
    ProviderErrorKind error = ProviderErrorKind::None;
    std::string error_message;

    bool ok() const { return error == ProviderErrorKind::None; }
};

class ChatProvider {
public:
    virtual ~ChatProvider() = default;
    // Thread-safe; returns the assistant message content or an error value.
    virtual Completion complete(const ChatRequest& request) = 0;
};

// Runs requests with at most `bound` in flight; results positionally aligned,
// per-request errors isolated.
std::vector<Completion> complete_many(ChatProvider& provider,
                                      const std::vector<ChatRequest>& requests, int bound);

// ---- scripted provider ------------------------------------------------------

struct ScriptRule {
    std::optional<std::string> needle;     // matches against the last user message
    std::optional<std::size_t> position;   // provider-global request sequence number
    std::optional<int> times;              // max fires; absent = unlimited
    std::string response;
};

struct ScriptScenario {
    std::vector<ScriptRule> rules;  // evaluated in order, first match fires
    std::optional<std::string> default_response;

    // JSONL: {"kind":"rule", "needle"?|"position"?, "times"?, "response"} and
    // {"kind":"default", "response"}.
    static ScriptScenario load(const std::string& path);
    static ScriptScenario parse(const std::string& jsonl);
};

class ScriptedProvider : public ChatProvider {
public:
    explicit ScriptedProvider(ScriptScenario scenario);
    Completion complete(const ChatRequest& request) override;

private:
    ScriptScenario scenario_;
    std::vector<int> fired_;
    std::size_t sequence_ = 0;
    std::mutex mu_;
};

// ---- live provider ----------------------------------------------------------

struct LiveProviderConfig {
    std::string base_url;                      // e.g. https://api.openai.com
    std::string path = "/v1/chat/completions";
    std::string api_key;                       // empty = no Authorization header
    int max_retries = 3;                       // after the initial attempt
    int backoff_base_ms = 1000;                // 1s/2s/4s before retries 1/2/3
    int timeout_seconds = 120;
};

// OpenAI-compatible chat-completions client. Retries timeouts, 429 and 5xx
// with exponential backoff and jitter; sampling parameters pass through
// bit-exactly into the wire payload.
class LiveProvider : public ChatProvider {
public:
    explicit LiveProvider(LiveProviderConfig config);
    ~LiveProvider() override;
    Completion complete(const ChatRequest& request) override;

    // Wire payload for a request (exposed for tests).
    static std::string request_body(const ChatRequest& request);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace redraft
