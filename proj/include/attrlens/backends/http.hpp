#pragma once

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

#include "httplib.h"
#include "json.hpp"

#include "attrlens/backends/backend.hpp"
#include "attrlens/backends/payload.hpp"

namespace attrlens {

namespace detail {

struct ParsedEndpoint {
    std::string origin;  // scheme://host[:port]
    std::string prefix;  // optional path prefix, no trailing slash
};

inline ParsedEndpoint parse_endpoint(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw ConfigError("endpoint_url needs a scheme: " + url);
    auto path_start = url.find('/', scheme_end + 3);
    ParsedEndpoint p;
    if (path_start == std::string::npos) {
        p.origin = url;
    } else {
        p.origin = url.substr(0, path_start);
        p.prefix = url.substr(path_start);
        while (!p.prefix.empty() && p.prefix.back() == '/') p.prefix.pop_back();
    }
    return p;
}

inline httplib::Headers auth_headers(const BackendConfig& cfg) {
    httplib::Headers headers;
    if (!cfg.api_key_env.empty()) {
        const char* key = std::getenv(cfg.api_key_env.c_str());
        if (key == nullptr || *key == '\0')
            throw AuthError("API key environment variable not set: " + cfg.api_key_env);
        headers.emplace("Authorization", std::string("Bearer ") + key);
    }
    return headers;
}

inline bool retryable_status(int status) {
    return status == 429 || (status >= 500 && status < 600);
}

/// POSTs a JSON body, retrying transient failures (connection errors, 429,
/// 5xx) with exponential backoff up to cfg.max_retries extra attempts.
inline json post_json(const BackendConfig& cfg, const std::string& path, const json& body) {
    validate_backend_config(cfg);
    ParsedEndpoint ep = parse_endpoint(cfg.endpoint_url);
    httplib::Headers headers = auth_headers(cfg);

    httplib::Client client(ep.origin);
    auto timeout = std::chrono::duration<double>(cfg.timeout_s);
    auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
    auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());

    const std::string payload = body.dump();
    const std::string url_path = ep.prefix + path;
    std::string last_error;
    for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
        if (attempt > 0) {
            auto delay = std::chrono::milliseconds(50) * (1 << std::min(attempt - 1, 5));
            std::this_thread::sleep_for(delay);
        }
        auto res = client.Post(url_path, headers, payload, "application/json");
        if (!res) {
            last_error = "connection failed: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status >= 200 && res->status < 300) {
            try {
                return json::parse(res->body);
            } catch (const json::exception& e) {
                throw BackendError("malformed backend response: " + std::string(e.what()),
                                   res->status, res->body);
            }
        }
        if (!retryable_status(res->status))
            throw BackendError("backend request failed: " + url_path + " -> " +
                               std::to_string(res->status), res->status, res->body);
        last_error = "status " + std::to_string(res->status);
    }
    throw BackendError("backend request failed after " + std::to_string(cfg.max_retries + 1) +
                       " attempts: " + url_path + " (" + last_error + ")");
}

}  // namespace detail

/// POST {endpoint}/chat {model, prompt, temperature} -> {text}
class HttpChatBackend : public ChatBackend {
public:
    explicit HttpChatBackend(BackendConfig cfg) : cfg_(std::move(cfg)) {}

    std::string complete(const LlmRequest& request) override {
        if (request.prompt.empty()) throw EmptyInput("prompt must be non-empty");
        ++calls_;
        LlmRequest req = request;
        if (req.model_id.empty()) req.model_id = cfg_.model_id;
        json resp = detail::post_json(cfg_, "/chat", chat_payload(req, /*wire=*/true));
        return resp.at("text").get<std::string>();
    }

    long calls() const { return calls_.load(); }

private:
    BackendConfig cfg_;
    std::atomic<long> calls_{0};
};

/// POST {endpoint}/itm {model, image_b64, caption} -> {score}
class HttpItmBackend : public ItmBackend {
public:
    explicit HttpItmBackend(BackendConfig cfg) : cfg_(std::move(cfg)) {}

    double score(const std::string& image_bytes, const std::string& caption) override {
        detail::check_image_and_caption(image_bytes, caption);
        ++calls_;
        json resp = detail::post_json(cfg_, "/itm", itm_payload(cfg_.model_id, image_bytes, caption));
        double s = resp.at("score").get<double>();
        detail::check_finite_score(s);
        return s;
    }

    long calls() const { return calls_.load(); }

private:
    BackendConfig cfg_;
    std::atomic<long> calls_{0};
};

/// POST {endpoint}/detect {model, image_b64, queries} -> {detections}
class HttpDetectBackend : public DetectBackend {
public:
    explicit HttpDetectBackend(BackendConfig cfg) : cfg_(std::move(cfg)) {}

    std::vector<Detection> detect(const std::string& image_bytes,
                                  const std::vector<std::string>& queries) override {
        if (image_bytes.empty()) throw DecodeError("image bytes are empty");
        if (queries.empty()) throw EmptyInput("detect needs at least one query");
        ++calls_;
        json resp = detail::post_json(cfg_, "/detect", detect_payload(cfg_.model_id, image_bytes, queries));
        std::vector<Detection> out;
        for (const auto& d : resp.at("detections")) {
            Detection det;
            det.query = d.at("query").get<std::string>();
            for (const auto& b : d.at("boxes")) det.boxes.push_back(box_from_json(b));
            out.push_back(std::move(det));
        }
        detail::check_detections(out);
        return out;
    }

    long calls() const { return calls_.load(); }

private:
    BackendConfig cfg_;
    std::atomic<long> calls_{0};
};

/// POST {endpoint}/embed {model, text} -> {values}
class HttpEmbedBackend : public EmbedBackend {
public:
    explicit HttpEmbedBackend(BackendConfig cfg) : cfg_(std::move(cfg)) {}

    EmbeddingVector embed(const std::string& text) override {
        if (text.empty()) throw EmptyInput("text must be non-empty");
        ++calls_;
        json resp = detail::post_json(cfg_, "/embed", embed_payload(cfg_.model_id, text));
        return EmbeddingVector{resp.at("values").get<std::vector<double>>()};
    }

    long calls() const { return calls_.load(); }

private:
    BackendConfig cfg_;
    std::atomic<long> calls_{0};
};

}  // namespace attrlens
