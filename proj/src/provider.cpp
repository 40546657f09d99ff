#include "redraft/provider.hpp"

#include <atomic>
#include <chrono>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "httplib.h"
#include "json.hpp"

namespace redraft {

using nlohmann::json;

std::vector<Completion> complete_many(ChatProvider& provider,
                                      const std::vector<ChatRequest>& requests, int bound) {
    if (bound < 1) throw std::invalid_argument("bound must be >= 1");
    std::vector<Completion> results(requests.size());
    if (requests.empty()) return results;

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= requests.size()) return;
            try {
                results[i] = provider.complete(requests[i]);
            } catch (const std::exception& e) {
                results[i] = {"", ProviderErrorKind::ProviderUnavailable, e.what()};
            }
        }
    };

    std::size_t n_workers = std::min<std::size_t>(bound, requests.size());
    std::vector<std::thread> workers;
    workers.reserve(n_workers);
    for (std::size_t w = 0; w < n_workers; ++w) workers.emplace_back(worker);
    for (auto& t : workers) t.join();
    return results;
}

// ---- scripted provider ------------------------------------------------------

ScriptScenario ScriptScenario::parse(const std::string& jsonl) {
    ScriptScenario s;
    std::istringstream in(jsonl);
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json rec = json::parse(line);
        std::string kind = rec.at("kind").get<std::string>();
        if (kind == "default") {
            s.default_response = rec.at("response").get<std::string>();
        } else if (kind == "rule") {
            ScriptRule r;
            if (rec.contains("needle")) r.needle = rec["needle"].get<std::string>();
            if (rec.contains("position")) r.position = rec["position"].get<std::size_t>();
            if (rec.contains("times")) r.times = rec["times"].get<int>();
            r.response = rec.at("response").get<std::string>();
            s.rules.push_back(std::move(r));
        } else {
            throw std::runtime_error("unknown scenario record kind: " + kind);
        }
    }
    return s;
}

ScriptScenario ScriptScenario::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read scenario file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

ScriptedProvider::ScriptedProvider(ScriptScenario scenario)
    : scenario_(std::move(scenario)), fired_(scenario_.rules.size(), 0) {}

Completion ScriptedProvider::complete(const ChatRequest& request) {
    std::lock_guard lock(mu_);
    const std::size_t seq = sequence_++;

    const std::string* user = nullptr;
    for (const auto& m : request.messages)
        if (m.role == "user") user = &m.content;

    for (std::size_t i = 0; i < scenario_.rules.size(); ++i) {
        const auto& r = scenario_.rules[i];
        if (r.times && fired_[i] >= *r.times) continue;
        bool match = false;
        if (r.position) match = (*r.position == seq);
        else if (r.needle) match = user && user->find(*r.needle) != std::string::npos;
        if (match) {
            ++fired_[i];
            return {r.response, ProviderErrorKind::None, ""};
        }
    }
    if (scenario_.default_response)
        return {*scenario_.default_response, ProviderErrorKind::None, ""};
    return {"", ProviderErrorKind::ScenarioExhausted,
            "no scenario rule matched request #" + std::to_string(seq)};
}

// ---- live provider ----------------------------------------------------------

struct LiveProvider::Impl {
    LiveProviderConfig config;
    std::mt19937_64 rng{std::random_device{}()};
    std::mutex rng_mu;

    double jitter() {
        std::lock_guard lock(rng_mu);
        return std::uniform_real_distribution<double>(0.5, 1.5)(rng);
    }
};

LiveProvider::LiveProvider(LiveProviderConfig config)
    : impl_(std::make_unique<Impl>()) {
    impl_->config = std::move(config);
}

LiveProvider::~LiveProvider() = default;

std::string LiveProvider::request_body(const ChatRequest& request) {
    json body;
    body["model"] = request.model_name;
    body["messages"] = json::array();
    for (const auto& m : request.messages)
        body["messages"].push_back({{"role", m.role}, {"content", m.content}});
    body["temperature"] = request.temperature;
    body["top_p"] = request.top_p;
    body["frequency_penalty"] = request.frequency_penalty;
    body["presence_penalty"] = request.presence_penalty;
    if (request.max_tokens) body["max_tokens"] = *request.max_tokens;
    if (request.seed) body["seed"] = *request.seed;
    return body.dump();
}

namespace {

bool retryable_status(int status) {
    return status == 429 || (status >= 500 && status < 600);
}

}  // namespace

Completion LiveProvider::complete(const ChatRequest& request) {
    const auto& cfg = impl_->config;
    const std::string body = request_body(request);

    std::string last_error;
    for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
        if (attempt > 0) {
            double backoff_ms = cfg.backoff_base_ms * double(1 << (attempt - 1));
            backoff_ms *= impl_->jitter();
            std::this_thread::sleep_for(
                std::chrono::milliseconds(static_cast<long>(backoff_ms)));
        }

        httplib::Client client(cfg.base_url);
        client.set_connection_timeout(cfg.timeout_seconds);
        client.set_read_timeout(cfg.timeout_seconds);
        httplib::Headers headers;
        if (!cfg.api_key.empty())
            headers.emplace("Authorization", "Bearer " + cfg.api_key);

        auto res = client.Post(cfg.path, headers, body, "application/json");
        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
            continue;  // timeouts and connection failures are retryable
        }
        if (res->status != 200) {
            last_error = "HTTP " + std::to_string(res->status);
            if (retryable_status(res->status)) continue;
            return {"", ProviderErrorKind::ProviderUnavailable,
                    last_error + ": " + res->body};
        }
        try {
            json payload = json::parse(res->body);
            return {payload.at("choices").at(0).at("message").at("content")
                        .get<std::string>(),
                    ProviderErrorKind::None, ""};
        } catch (const std::exception& e) {
            return {"", ProviderErrorKind::ProtocolError,
                    std::string("malformed provider payload: ") + e.what()};
        }
    }
    return {"", ProviderErrorKind::ProviderUnavailable,
            "exhausted retries: " + last_error};
}

}  // namespace redraft
