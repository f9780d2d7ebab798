#pragma once

#include <filesystem>
#include <mutex>
#include <optional>
#include <string>

#include "json.hpp"

#include "attrlens/backends/backend.hpp"
#include "attrlens/backends/payload.hpp"

namespace attrlens {

/// Persistent response cache: one JSON file per entry, named by the request
/// key. Writes go through a temp file and rename, so concurrent writers of
/// the same key settle on last-write-wins (values are deterministic per key).
class ResponseCache {
public:
    explicit ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {
        std::filesystem::create_directories(dir_);
    }

    std::optional<json> get(const std::string& key) const {
        std::filesystem::path path = entry_path(key);
        if (!std::filesystem::exists(path)) return std::nullopt;
        try {
            return json::parse(read_file(path));
        } catch (const json::exception&) {
            return std::nullopt;  // treat a corrupt entry as a miss
        }
    }

    void put(const std::string& key, const json& value) const {
        write_file_atomic(entry_path(key), value.dump() + "\n");
    }

    const std::filesystem::path& dir() const { return dir_; }

private:
    std::filesystem::path entry_path(const std::string& key) const { return dir_ / (key + ".json"); }

    std::filesystem::path dir_;
};

// Caching decorators. Enabling a cache never changes returned values, only
// how often the inner backend is hit.

class CachedChatBackend : public ChatBackend {
public:
    CachedChatBackend(ChatBackend& inner, ResponseCache& cache) : inner_(inner), cache_(cache) {}

    std::string complete(const LlmRequest& request) override {
        std::string key = request_key("chat", chat_payload(request, /*wire=*/false));
        if (auto hit = cache_.get(key)) return hit->at("text").get<std::string>();
        std::string text = inner_.complete(request);
        cache_.put(key, json{{"text", text}});
        return text;
    }

private:
    ChatBackend& inner_;
    ResponseCache& cache_;
};

class CachedItmBackend : public ItmBackend {
public:
    CachedItmBackend(ItmBackend& inner, ResponseCache& cache, std::string model_id)
        : inner_(inner), cache_(cache), model_id_(std::move(model_id)) {}

    double score(const std::string& image_bytes, const std::string& caption) override {
        std::string key = request_key("itm", itm_payload(model_id_, image_bytes, caption));
        if (auto hit = cache_.get(key)) return hit->at("score").get<double>();
        double s = inner_.score(image_bytes, caption);
        cache_.put(key, json{{"score", s}});
        return s;
    }

private:
    ItmBackend& inner_;
    ResponseCache& cache_;
    std::string model_id_;
};

class CachedDetectBackend : public DetectBackend {
public:
    CachedDetectBackend(DetectBackend& inner, ResponseCache& cache, std::string model_id)
        : inner_(inner), cache_(cache), model_id_(std::move(model_id)) {}

    std::vector<Detection> detect(const std::string& image_bytes,
                                  const std::vector<std::string>& queries) override {
        std::string key = request_key("detect", detect_payload(model_id_, image_bytes, queries));
        if (auto hit = cache_.get(key)) return decode(*hit);
        std::vector<Detection> dets = inner_.detect(image_bytes, queries);
        json arr = json::array();
        for (const auto& d : dets) {
            json boxes = json::array();
            for (const auto& b : d.boxes) boxes.push_back(to_json(b));
            arr.push_back(json{{"query", d.query}, {"boxes", std::move(boxes)}});
        }
        cache_.put(key, json{{"detections", std::move(arr)}});
        return dets;
    }

private:
    static std::vector<Detection> decode(const json& j) {
        std::vector<Detection> out;
        for (const auto& d : j.at("detections")) {
            Detection det;
            det.query = d.at("query").get<std::string>();
            for (const auto& b : d.at("boxes")) det.boxes.push_back(box_from_json(b));
            out.push_back(std::move(det));
        }
        return out;
    }

    DetectBackend& inner_;
    ResponseCache& cache_;
    std::string model_id_;
};

class CachedEmbedBackend : public EmbedBackend {
public:
    CachedEmbedBackend(EmbedBackend& inner, ResponseCache& cache, std::string model_id)
        : inner_(inner), cache_(cache), model_id_(std::move(model_id)) {}

    EmbeddingVector embed(const std::string& text) override {
        std::string key = request_key("embed", embed_payload(model_id_, text));
        if (auto hit = cache_.get(key)) return EmbeddingVector{hit->at("values").get<std::vector<double>>()};
        EmbeddingVector v = inner_.embed(text);
        cache_.put(key, json{{"values", v.values}});
        return v;
    }

private:
    EmbedBackend& inner_;
    ResponseCache& cache_;
    std::string model_id_;
};

}  // namespace attrlens
