#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <mutex>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"

#include "attrlens/backends/backend.hpp"
#include "attrlens/backends/payload.hpp"

namespace attrlens {

/// Scripted responses for the mock backends, loadable from a JSONL file.
/// Each line holds {"op": ..., "request": {...}} plus either a single
/// "response" document or a "responses" array consumed call by call (the
/// last element repeats once exhausted). Entries are keyed by the same
/// request hash the cache uses.
class FixtureSet {
public:
    struct Entry {
        std::string op;
        json request;
        std::vector<json> responses;
    };

    void add(std::string op, json request, json response) {
        add_sequence(std::move(op), std::move(request), {std::move(response)});
    }

    void add_sequence(std::string op, json request, std::vector<json> responses) {
        if (responses.empty()) throw ConfigError("fixture entry needs at least one response");
        std::string key = request_key(op, request);
        auto [it, inserted] = index_.try_emplace(key, entries_.size());
        if (inserted) {
            entries_.push_back(Entry{std::move(op), std::move(request), std::move(responses)});
        } else {
            entries_[it->second].responses = std::move(responses);
        }
    }

    const std::vector<json>* find(const std::string& key) const {
        auto it = index_.find(key);
        return it == index_.end() ? nullptr : &entries_[it->second].responses;
    }

    std::size_t size() const { return entries_.size(); }

    static FixtureSet load(const std::filesystem::path& path) {
        FixtureSet set;
        std::string text = read_file(path);
        std::size_t pos = 0, line_no = 0;
        while (pos < text.size()) {
            std::size_t nl = text.find('\n', pos);
            std::string_view line(text.data() + pos, (nl == std::string::npos ? text.size() : nl) - pos);
            pos = nl == std::string::npos ? text.size() : nl + 1;
            ++line_no;
            if (trim(line).empty()) continue;
            try {
                json j = json::parse(line);
                std::vector<json> responses;
                if (j.contains("responses"))
                    responses = j.at("responses").get<std::vector<json>>();
                else
                    responses.push_back(j.at("response"));
                set.add_sequence(j.at("op").get<std::string>(), j.at("request"), std::move(responses));
            } catch (const json::exception& e) {
                throw IoError("malformed fixture file " + path.string() + " at line " +
                              std::to_string(line_no) + ": " + e.what());
            }
        }
        return set;
    }

    void save(const std::filesystem::path& path) const {
        std::string out;
        for (const auto& e : entries_) {
            json j{{"op", e.op}, {"request", e.request}};
            if (e.responses.size() == 1)
                j["response"] = e.responses[0];
            else
                j["responses"] = e.responses;
            out += j.dump() + "\n";
        }
        write_file_atomic(path, out);
    }

private:
    std::vector<Entry> entries_;
    std::unordered_map<std::string, std::size_t> index_;
};

// Fixture authoring helpers.

inline void add_chat_fixture(FixtureSet& set, std::string_view model, std::string_view prompt,
                             std::string_view text, std::string_view run_tag = "",
                             double temperature = 0.3) {
    LlmRequest req{std::string(prompt), temperature, std::string(model), std::string(run_tag)};
    set.add("chat", chat_payload(req, /*wire=*/false), json{{"text", std::string(text)}});
}

inline void add_itm_fixture(FixtureSet& set, std::string_view model, const std::string& image_bytes,
                            const std::string& caption, double score) {
    set.add("itm", itm_payload(model, image_bytes, caption), json{{"score", score}});
}

inline void add_detect_fixture(FixtureSet& set, std::string_view model, const std::string& image_bytes,
                               const std::vector<std::string>& queries,
                               const std::vector<Detection>& detections) {
    json dets = json::array();
    for (const auto& d : detections) {
        json boxes = json::array();
        for (const auto& b : d.boxes) boxes.push_back(to_json(b));
        dets.push_back(json{{"query", d.query}, {"boxes", std::move(boxes)}});
    }
    set.add("detect", detect_payload(model, image_bytes, queries), json{{"detections", std::move(dets)}});
}

inline void add_embed_fixture(FixtureSet& set, std::string_view model, const std::string& text,
                              const std::vector<double>& values) {
    set.add("embed", embed_payload(model, text), json{{"values", values}});
}

namespace detail {

/// Shared lookup state for the scripted backends: per-key sequence cursors
/// plus a total call counter.
class ScriptedBase {
public:
    explicit ScriptedBase(const FixtureSet& fixtures) : fixtures_(&fixtures) {}

    long calls() const { return calls_.load(); }

protected:
    json next_response(const std::string& op, const json& payload, const std::string& describe) {
        ++calls_;
        std::string key = request_key(op, payload);
        const std::vector<json>* seq = fixtures_->find(key);
        if (!seq && payload.contains("run_tag")) {
            json wildcard = payload;
            wildcard.erase("run_tag");
            key = request_key(op, wildcard);
            seq = fixtures_->find(key);
        }
        if (!seq) throw BackendError("no " + op + " fixture for request: " + describe);
        std::lock_guard<std::mutex> lock(mu_);
        std::size_t i = cursor_[key]++;
        return (*seq)[std::min(i, seq->size() - 1)];
    }

private:
    const FixtureSet* fixtures_;
    std::mutex mu_;
    std::unordered_map<std::string, std::size_t> cursor_;
    std::atomic<long> calls_{0};
};

}  // namespace detail

class ScriptedChatBackend : public ChatBackend, public detail::ScriptedBase {
public:
    explicit ScriptedChatBackend(const FixtureSet& fixtures) : ScriptedBase(fixtures) {}

    std::string complete(const LlmRequest& request) override {
        if (request.prompt.empty()) throw EmptyInput("prompt must be non-empty");
        json resp = next_response("chat", chat_payload(request, /*wire=*/false),
                                  request.prompt.substr(0, 80));
        return resp.at("text").get<std::string>();
    }
};

class ScriptedItmBackend : public ItmBackend, public detail::ScriptedBase {
public:
    ScriptedItmBackend(const FixtureSet& fixtures, std::string model_id)
        : ScriptedBase(fixtures), model_id_(std::move(model_id)) {}

    double score(const std::string& image_bytes, const std::string& caption) override {
        detail::check_image_and_caption(image_bytes, caption);
        json resp = next_response("itm", itm_payload(model_id_, image_bytes, caption), caption);
        double s = resp.at("score").get<double>();
        detail::check_finite_score(s);
        return s;
    }

private:
    std::string model_id_;
};

class ScriptedDetectBackend : public DetectBackend, public detail::ScriptedBase {
public:
    ScriptedDetectBackend(const FixtureSet& fixtures, std::string model_id)
        : ScriptedBase(fixtures), model_id_(std::move(model_id)) {}

    std::vector<Detection> detect(const std::string& image_bytes,
                                  const std::vector<std::string>& queries) override {
        if (image_bytes.empty()) throw DecodeError("image bytes are empty");
        if (queries.empty()) throw EmptyInput("detect needs at least one query");
        json resp = next_response("detect", detect_payload(model_id_, image_bytes, queries),
                                  queries.front());
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

private:
    std::string model_id_;
};

class ScriptedEmbedBackend : public EmbedBackend, public detail::ScriptedBase {
public:
    ScriptedEmbedBackend(const FixtureSet& fixtures, std::string model_id)
        : ScriptedBase(fixtures), model_id_(std::move(model_id)) {}

    EmbeddingVector embed(const std::string& text) override {
        if (text.empty()) throw EmptyInput("text must be non-empty");
        json resp = next_response("embed", embed_payload(model_id_, text), text);
        return EmbeddingVector{resp.at("values").get<std::vector<double>>()};
    }

private:
    std::string model_id_;
};

/// Deterministic embedding mock: the vector is derived from a seeded hash
/// of the input string and unit-normalized. Identical strings always map
/// to identical vectors.
class HashEmbedBackend : public EmbedBackend {
public:
    explicit HashEmbedBackend(std::size_t dim, std::uint64_t seed = 0) : dim_(dim), seed_(seed) {
        if (dim_ == 0) throw ConfigError("embedding dimension must be >= 1");
    }

    EmbeddingVector embed(const std::string& text) override {
        if (text.empty()) throw EmptyInput("text must be non-empty");
        ++calls_;
        // FNV-1a, stable across platforms.
        std::uint64_t h = 1469598103934665603ull;
        for (unsigned char c : text) {
            h ^= c;
            h *= 1099511628211ull;
        }
        std::mt19937_64 rng(h ^ seed_);
        EmbeddingVector v;
        v.values.resize(dim_);
        double norm2 = 0;
        do {
            norm2 = 0;
            for (auto& x : v.values) {
                x = 2.0 * (static_cast<double>(rng()) / static_cast<double>(std::mt19937_64::max())) - 1.0;
                norm2 += x * x;
            }
        } while (norm2 == 0.0);
        double inv = 1.0 / std::sqrt(norm2);
        for (auto& x : v.values) x *= inv;
        return v;
    }

    long calls() const { return calls_.load(); }

private:
    std::size_t dim_;
    std::uint64_t seed_;
    std::atomic<long> calls_{0};
};

/// Embedding mock backed by an explicit string -> vector table.
class DictionaryEmbedBackend : public EmbedBackend {
public:
    explicit DictionaryEmbedBackend(std::map<std::string, std::vector<double>> table)
        : table_(std::move(table)) {}

    EmbeddingVector embed(const std::string& text) override {
        if (text.empty()) throw EmptyInput("text must be non-empty");
        ++calls_;
        auto it = table_.find(text);
        if (it == table_.end()) throw BackendError("no embedding fixture for text: " + text);
        return EmbeddingVector{it->second};
    }

    long calls() const { return calls_.load(); }

private:
    std::map<std::string, std::vector<double>> table_;
    std::atomic<long> calls_{0};
};

}  // namespace attrlens
