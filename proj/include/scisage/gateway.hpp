#pragma once

#include <chrono>
#include <cstdlib>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "scisage/serialization.hpp"
#include "scisage/types.hpp"

namespace scisage {

// ---------------------------------------------------------------------------
// Chat-completion request/response model
// ---------------------------------------------------------------------------

struct ChatMessage {
    std::string role;  // "system" | "user" | "assistant"
    std::string content;

    bool operator==(const ChatMessage&) const = default;
};

struct ChatRequest {
    std::string model;
    std::vector<ChatMessage> messages;
    double temperature = 0.0;
    int max_tokens = 0;

    std::string system_text() const {
        for (const auto& m : messages)
            if (m.role == "system") return m.content;
        return {};
    }
    std::string user_text() const {
        std::string last;
        for (const auto& m : messages)
            if (m.role == "user") last = m.content;
        return last;
    }
};

struct ChatResponse {
    std::string content;
    std::string finish_reason = "stop";
    std::string model;
};

inline json to_json(const ChatMessage& m) { return {{"role", m.role}, {"content", m.content}}; }

inline json to_json(const ChatRequest& r) {
    json messages = json::array();
    for (const auto& m : r.messages) messages.push_back(to_json(m));
    return {{"model", r.model},
            {"messages", messages},
            {"temperature", r.temperature},
            {"max_tokens", r.max_tokens}};
}

inline json to_json(const ChatResponse& r) {
    return {{"content", r.content}, {"finish_reason", r.finish_reason}, {"model", r.model}};
}

// ---------------------------------------------------------------------------
// Transport abstraction
// ---------------------------------------------------------------------------

/// Sends one chat request to one backend and returns the raw response.
/// Implementations throw TransportError for delivery failures (possibly
/// transient) and ProtocolError for malformed or unscripted exchanges.
class Transport {
public:
    virtual ~Transport() = default;
    virtual ChatResponse send(const std::string& endpoint, const ChatRequest& request) = 0;
};

// ---------------------------------------------------------------------------
// Rate limiting: per-endpoint minimum spacing between dispatches
// ---------------------------------------------------------------------------

class RateLimiter {
public:
    explicit RateLimiter(double requests_per_sec) {
        if (requests_per_sec <= 0.0) throw ConfigError("rate limit must be > 0 requests/sec");
        min_interval_ = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
            std::chrono::duration<double>(1.0 / requests_per_sec));
    }

    /// Blocks until a dispatch to `endpoint` is permitted, then records it.
    void acquire(const std::string& endpoint) {
        std::chrono::steady_clock::time_point wake;
        {
            std::lock_guard<std::mutex> lock(mu_);
            auto now = std::chrono::steady_clock::now();
            auto it = next_allowed_.find(endpoint);
            wake = (it == next_allowed_.end() || it->second < now) ? now : it->second;
            next_allowed_[endpoint] = wake + min_interval_;
        }
        std::this_thread::sleep_until(wake);
    }

    std::chrono::steady_clock::duration min_interval() const { return min_interval_; }

private:
    std::mutex mu_;
    std::chrono::steady_clock::duration min_interval_{};
    std::unordered_map<std::string, std::chrono::steady_clock::time_point> next_allowed_;
};

// ---------------------------------------------------------------------------
// TransientError: a TransportError worth retrying
// ---------------------------------------------------------------------------

class TransientError : public TransportError {
public:
    using TransportError::TransportError;
};

// ---------------------------------------------------------------------------
// Gateway: retry loop + rate limiting around a Transport
// ---------------------------------------------------------------------------

struct GatewayOptions {
    int max_retries = 3;           // total attempts = 1 + max_retries
    int backoff_initial_ms = 250;  // delay before the first retry
    double backoff_factor = 2.0;   // multiplier per subsequent retry
    double rate_limit_per_sec = 4.0;
    bool sleep_on_backoff = true;  // tests disable real sleeping
};

class Gateway {
public:
    Gateway(std::shared_ptr<Transport> transport, GatewayOptions options, Logger* log = nullptr)
        : transport_(std::move(transport)),
          options_(options),
          limiter_(options.rate_limit_per_sec),
          log_(log) {
        if (!transport_) throw PreconditionError("gateway requires a transport");
        if (options_.max_retries < 0) throw ConfigError("max_retries must be >= 0");
    }

    ChatResponse complete(const std::string& endpoint, const ChatRequest& request) {
        if (request.messages.empty())
            throw PreconditionError("chat request must contain at least one message");
        int attempts = 1 + options_.max_retries;
        double delay_ms = static_cast<double>(options_.backoff_initial_ms);
        for (int attempt = 1;; ++attempt) {
            limiter_.acquire(endpoint);
            try {
                return transport_->send(endpoint, request);
            } catch (const TransientError& e) {
                if (attempt >= attempts)
                    throw TransportError(std::string(e.what()) + " (after " +
                                         std::to_string(attempt) + " attempts)");
                if (log_)
                    log_->warn(std::string("transient request failure, retrying: ") + e.what());
                if (options_.sleep_on_backoff && delay_ms > 0.0)
                    std::this_thread::sleep_for(
                        std::chrono::milliseconds(static_cast<long long>(delay_ms)));
                delay_ms *= options_.backoff_factor;
            }
            // ProtocolError / UnmatchedRequestError / non-transient TransportError
            // propagate immediately: retrying cannot change a deterministic failure.
        }
    }

    RateLimiter& limiter() { return limiter_; }

private:
    std::shared_ptr<Transport> transport_;
    GatewayOptions options_;
    RateLimiter limiter_;
    Logger* log_;
};

// ---------------------------------------------------------------------------
// MockTransport: scripted, deterministic, offline
// ---------------------------------------------------------------------------

/// One scripted exchange.  A request matches when every set constraint holds.
/// The first unconsumed matching entry in script order answers the request;
/// sticky entries are never consumed.  Entries with `fail=true` throw a
/// TransientError instead of answering (used to exercise retry paths).
struct MockScriptEntry {
    std::optional<std::string> match_user_contains;
    std::optional<std::string> match_system_contains;
    std::optional<std::string> match_model;
    std::string reply;
    std::string finish_reason = "stop";
    bool sticky = false;
    bool fail = false;
    std::string fail_message = "scripted transient failure";
};

struct TranscriptEntry {
    std::string endpoint;
    ChatRequest request;
    ChatResponse response;
    bool failed = false;
};

class MockTransport : public Transport {
public:
    MockTransport() = default;

    void push(MockScriptEntry entry) {
        std::lock_guard<std::mutex> lock(mu_);
        script_.push_back(Slot{std::move(entry), false});
    }

    /// Convenience: reply `text` to any request whose user prompt contains `needle`.
    void reply_when(const std::string& needle, const std::string& text, bool sticky = false) {
        MockScriptEntry e;
        e.match_user_contains = needle;
        e.reply = text;
        e.sticky = sticky;
        push(std::move(e));
    }

    ChatResponse send(const std::string& endpoint, const ChatRequest& request) override {
        std::lock_guard<std::mutex> lock(mu_);
        for (auto& slot : script_) {
            if (slot.consumed) continue;
            if (!matches(slot.entry, request)) continue;
            if (!slot.entry.sticky) slot.consumed = true;
            if (slot.entry.fail) {
                transcript_.push_back({endpoint, request, {}, true});
                throw TransientError(slot.entry.fail_message);
            }
            ChatResponse resp;
            resp.content = slot.entry.reply;
            resp.finish_reason = slot.entry.finish_reason;
            resp.model = request.model;
            transcript_.push_back({endpoint, request, resp, false});
            return resp;
        }
        transcript_.push_back({endpoint, request, {}, true});
        throw UnmatchedRequestError("no scripted reply matches request (model=" + request.model +
                                    ", user prompt begins: '" +
                                    request.user_text().substr(0, 80) + "')");
    }

    const std::vector<TranscriptEntry>& transcript() const { return transcript_; }

    std::size_t unconsumed_count() const {
        std::lock_guard<std::mutex> lock(mu_);
        std::size_t n = 0;
        for (const auto& slot : script_)
            if (!slot.consumed && !slot.entry.sticky) ++n;
        return n;
    }

    json transcript_json() const {
        json arr = json::array();
        for (const auto& t : transcript_) {
            json e = {{"endpoint", t.endpoint},
                      {"request", to_json(t.request)},
                      {"failed", t.failed}};
            if (!t.failed) e["response"] = to_json(t.response);
            arr.push_back(e);
        }
        return {{"kind", "transcript"}, {"exchanges", arr}};
    }

    /// Loads a script file: {"kind":"mock_script","entries":[...]} where each
    /// entry has an optional "match" object ({"user_contains","system_contains",
    /// "model"}) plus "reply"/"finish"/"sticky" or "fail".
    void load_script(const json& j) {
        if (!j.is_object() || j.value("kind", "") != "mock_script")
            throw ParseError("mock script must be an object with kind 'mock_script'");
        for (const auto& e : jsonio::req_arr(j, "entries")) {
            MockScriptEntry entry;
            if (e.contains("match")) {
                const json& m = e.at("match");
                if (m.contains("user_contains"))
                    entry.match_user_contains = m.at("user_contains").get<std::string>();
                if (m.contains("system_contains"))
                    entry.match_system_contains = m.at("system_contains").get<std::string>();
                if (m.contains("model")) entry.match_model = m.at("model").get<std::string>();
            }
            entry.sticky = e.value("sticky", false);
            entry.fail = e.value("fail", false);
            if (entry.fail) {
                entry.fail_message = e.value("message", entry.fail_message);
            } else {
                if (!e.contains("reply"))
                    throw ParseError("mock script entry missing field 'reply'");
                entry.reply = e.at("reply").get<std::string>();
                entry.finish_reason = e.value("finish", "stop");
            }
            push(std::move(entry));
        }
    }

private:
    struct Slot {
        MockScriptEntry entry;
        bool consumed = false;
    };

    static bool matches(const MockScriptEntry& e, const ChatRequest& r) {
        if (e.match_model && *e.match_model != r.model) return false;
        if (e.match_user_contains && r.user_text().find(*e.match_user_contains) ==
                                         std::string::npos)
            return false;
        if (e.match_system_contains && r.system_text().find(*e.match_system_contains) ==
                                           std::string::npos)
            return false;
        return true;
    }

    mutable std::mutex mu_;
    std::vector<Slot> script_;
    std::vector<TranscriptEntry> transcript_;
};

// ---------------------------------------------------------------------------
// HttpTransport: OpenAI-style chat completions endpoint
// ---------------------------------------------------------------------------

/// Splits "http://host:port/path" into {scheme_host_port, path}.
inline std::pair<std::string, std::string> split_endpoint(const std::string& endpoint) {
    auto scheme_end = endpoint.find("://");
    std::size_t path_start =
        endpoint.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
    if (path_start == std::string::npos) return {endpoint, "/"};
    return {endpoint.substr(0, path_start), endpoint.substr(path_start)};
}

}  // namespace scisage

#if defined(SCISAGE_ENABLE_HTTP)
#include <httplib.h>

namespace scisage {

class HttpTransport : public Transport {
public:
    explicit HttpTransport(std::string api_key_env = "SCISAGE_API_KEY")
        : api_key_env_(std::move(api_key_env)) {}

    ChatResponse send(const std::string& endpoint, const ChatRequest& request) override {
        auto [base, path] = split_endpoint(endpoint);
        httplib::Client client(base);
        client.set_connection_timeout(30);
        client.set_read_timeout(120);
        httplib::Headers headers;
        if (const char* key = std::getenv(api_key_env_.c_str()); key && *key)
            headers.emplace("Authorization", std::string("Bearer ") + key);
        std::string body = to_json(request).dump();
        auto res = client.Post(path, headers, body, "application/json");
        if (!res) throw TransientError("network failure contacting " + base);
        if (res->status == 429 || res->status >= 500)
            throw TransientError("backend returned status " + std::to_string(res->status));
        if (res->status != 200)
            throw TransportError("backend returned status " + std::to_string(res->status));
        json j = parse_json_text(res->body);
        if (!j.contains("choices") || !j.at("choices").is_array() || j.at("choices").empty())
            throw ProtocolError("chat completion response has no choices");
        const json& choice = j.at("choices").at(0);
        ChatResponse out;
        out.content = choice.at("message").value("content", "");
        out.finish_reason = choice.value("finish_reason", "stop");
        out.model = j.value("model", request.model);
        return out;
    }

private:
    std::string api_key_env_;
};

}  // namespace scisage
#endif  // SCISAGE_ENABLE_HTTP
