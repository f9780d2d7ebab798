#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "attrlens/core/errors.hpp"
#include "attrlens/core/types.hpp"
#include "attrlens/llm/prompts.hpp"

namespace attrlens {

struct BackendConfig {
    std::string endpoint_url;
    std::string model_id;
    std::string api_key_env;  // name of the env var holding the key; empty = no auth header
    double timeout_s = 30.0;
    int max_retries = 2;
};

inline void validate_backend_config(const BackendConfig& c) {
    if (c.timeout_s <= 0) throw ConfigError("backend timeout_s must be > 0");
    if (c.max_retries < 0) throw ConfigError("backend max_retries must be >= 0");
}

/// Scored boxes returned for one detection query.
struct Detection {
    std::string query;
    std::vector<DetectionBox> boxes;
};

struct EmbeddingVector {
    std::vector<double> values;

    std::size_t dim() const { return values.size(); }

    bool is_zero() const {
        for (double v : values)
            if (v != 0.0) return false;
        return true;
    }
};

class ChatBackend {
public:
    virtual ~ChatBackend() = default;
    virtual std::string complete(const LlmRequest& request) = 0;
};

class ItmBackend {
public:
    virtual ~ItmBackend() = default;
    /// Scalar image-text matching score; higher means a better match.
    virtual double score(const std::string& image_bytes, const std::string& caption) = 0;
};

class DetectBackend {
public:
    virtual ~DetectBackend() = default;
    /// One Detection per query, in query order. Boxes may be empty.
    virtual std::vector<Detection> detect(const std::string& image_bytes,
                                          const std::vector<std::string>& queries) = 0;
};

class EmbedBackend {
public:
    virtual ~EmbedBackend() = default;
    /// Deterministic per (model, text); fixed dimension per model.
    virtual EmbeddingVector embed(const std::string& text) = 0;
};

namespace detail {

inline void check_image_and_caption(const std::string& image_bytes, const std::string& caption) {
    if (image_bytes.empty()) throw DecodeError("image bytes are empty");
    if (caption.empty()) throw EmptyInput("caption must be non-empty");
}

inline void check_detections(const std::vector<Detection>& dets) {
    for (const auto& d : dets)
        for (const auto& b : d.boxes)
            if (!b.valid())
                throw BackendError("invalid detection box for query: " + d.query);
}

inline void check_finite_score(double s) {
    if (!std::isfinite(s)) throw BackendError("backend returned a non-finite score");
}

}  // namespace detail

}  // namespace attrlens
