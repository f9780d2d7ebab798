#pragma once

#include <atomic>
#include <functional>
#include <limits>
#include <mutex>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "httplib.h"

#include "attrlens/backends/backend.hpp"
#include "attrlens/captioner.hpp"
#include "attrlens/core/json_io.hpp"
#include "attrlens/core/types.hpp"
#include "attrlens/core/validate.hpp"

namespace attrlens {

enum class FailPolicy { SkipRecord, AbortRun };

struct AnnotatorConfig {
    double alpha = 0.3;  // detection score threshold, exclusive
    int parallelism = 1;
    FailPolicy fail_policy = FailPolicy::SkipRecord;
};

inline void validate_annotator_config(const AnnotatorConfig& c) {
    if (!(c.alpha > 0.0 && c.alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
    if (c.parallelism < 1) throw ConfigError("parallelism must be >= 1");
}

inline std::string load_image_bytes(const std::string& uri) {
    if (uri.rfind("http://", 0) == 0 || uri.rfind("https://", 0) == 0) {
        auto scheme_end = uri.find("://");
        auto path_start = uri.find('/', scheme_end + 3);
        std::string origin = path_start == std::string::npos ? uri : uri.substr(0, path_start);
        std::string path = path_start == std::string::npos ? "/" : uri.substr(path_start);
        httplib::Client client(origin);
        auto res = client.Get(path);
        if (!res) throw IoError("cannot fetch image: " + uri);
        if (res->status < 200 || res->status >= 300)
            throw IoError("image fetch failed with status " + std::to_string(res->status) + ": " + uri);
        if (res->body.empty()) throw DecodeError("image is empty: " + uri);
        return res->body;
    }
    std::string bytes = read_file(uri);
    if (bytes.empty()) throw DecodeError("image file is empty: " + uri);
    return bytes;
}

/// Multiclass rule for an image-level category: score every attribute
/// caption plus the base caption; the winner must strictly beat the base
/// score. Ties among attributes go to the earliest in schema order; a tie
/// with the base caption means no label.
inline AnnotationRecord annotate_image_level(const ImageRef& image, const std::string& image_bytes,
                                             const AttributeCategory& category,
                                             const DomainSpec& domain, ItmBackend& itm) {
    if (category.kind != CategoryKind::ImageLevel)
        throw ConfigError("annotate_image_level needs an image-level category: " + category.name);

    AnnotationRecord rec;
    rec.image_id = image.id;
    rec.category_name = category.name;
    rec.kind = CategoryKind::ImageLevel;

    double best = -std::numeric_limits<double>::infinity();
    std::size_t best_idx = std::numeric_limits<std::size_t>::max();
    for (std::size_t i = 0; i < category.attributes.size(); ++i) {
        const std::string& attr = category.attributes[i];
        std::string caption =
            render_caption(category.caption_template, domain.noun, attr, category.name).text;
        double s = itm.score(image_bytes, caption);
        rec.attribute_scores[attr] = s;
        if (s > best) {
            best = s;
            best_idx = i;
        }
    }
    double base = itm.score(image_bytes, base_caption(domain));
    rec.attribute_scores[std::string(kBaseScoreKey)] = base;
    if (best_idx != std::numeric_limits<std::size_t>::max() && best > base)
        rec.chosen_attribute = category.attributes[best_idx];
    return rec;
}

inline AnnotationRecord annotate_image_level(const ImageRef& image, const AttributeCategory& category,
                                             const DomainSpec& domain, ItmBackend& itm) {
    return annotate_image_level(image, load_image_bytes(image.uri), category, domain, itm);
}

/// Threshold rule for an object-level category: every attribute string is a
/// detection query; an attribute is present iff its best box score strictly
/// exceeds alpha. Boxes above alpha are retained; the stored score is the
/// best box score regardless of the threshold (0 when nothing was detected).
inline AnnotationRecord annotate_object_level(const ImageRef& image, const std::string& image_bytes,
                                              const AttributeCategory& category,
                                              DetectBackend& detect, double alpha) {
    if (category.kind != CategoryKind::ObjectLevel)
        throw ConfigError("annotate_object_level needs an object-level category: " + category.name);

    AnnotationRecord rec;
    rec.image_id = image.id;
    rec.category_name = category.name;
    rec.kind = CategoryKind::ObjectLevel;

    std::vector<Detection> detections = detect.detect(image_bytes, category.attributes);
    if (detections.size() != category.attributes.size())
        throw BackendError("detect returned " + std::to_string(detections.size()) + " results for " +
                           std::to_string(category.attributes.size()) + " queries");
    for (std::size_t i = 0; i < category.attributes.size(); ++i) {
        const std::string& attr = category.attributes[i];
        const Detection& det = detections[i];
        if (det.query != attr)
            throw BackendError("detect response out of order: expected " + attr + ", got " + det.query);
        double best = 0.0;
        std::vector<DetectionBox> kept;
        for (const auto& box : det.boxes) {
            best = std::max(best, box.score);
            if (box.score > alpha) kept.push_back(box);
        }
        rec.attribute_scores[attr] = best;
        if (best > alpha) rec.detections[attr] = std::move(kept);
    }
    return rec;
}

inline AnnotationRecord annotate_object_level(const ImageRef& image, const AttributeCategory& category,
                                              DetectBackend& detect, double alpha) {
    return annotate_object_level(image, load_image_bytes(image.uri), category, detect, alpha);
}

struct AnnotateStats {
    std::size_t computed = 0;
    std::size_t resumed = 0;
    std::size_t skipped = 0;
    std::vector<std::string> skips;  // "image_id/category": reason
};

struct AnnotateResult {
    AnnotationStore store;
    AnnotateStats stats;
};

using LogFn = std::function<void(const std::string&)>;
using RecordSink = std::function<void(const AnnotationRecord&)>;

/// Annotates every (image, category) pair not already present in `existing`.
/// Pairs are independent and run on up to cfg.parallelism worker threads;
/// the resulting store is a keyed merge, so contents do not depend on the
/// degree of parallelism or completion order.
inline AnnotateResult annotate_corpus(const std::vector<ImageRef>& images,
                                      const AttributeSchema& schema, const AnnotatorConfig& cfg,
                                      ItmBackend& itm, DetectBackend& detect,
                                      const std::map<RecordKey, AnnotationRecord>* existing = nullptr,
                                      const LogFn& log = {}, const RecordSink& on_record = {}) {
    validate_annotator_config(cfg);
    if (images.empty()) throw EmptyInput("image list must be non-empty");
    {
        std::set<std::string> ids;
        for (const auto& img : images)
            if (!ids.insert(img.id).second) throw ConfigError("duplicate image id: " + img.id);
    }
    if (auto violations = validate_schema(schema); !violations.empty())
        throw ConfigError("schema is invalid: " + violations.front());

    AnnotateResult result;
    result.store.schema = schema;
    result.store.alpha = cfg.alpha;
    if (existing) {
        result.store.records = *existing;
        for (const auto& img : images)
            for (const auto& cat : schema.categories)
                if (existing->count(RecordKey{img.id, cat.name})) ++result.stats.resumed;
    }

    std::atomic<std::size_t> next{0};
    std::atomic<bool> abort{false};
    std::mutex mu;
    std::exception_ptr first_error;

    auto worker = [&] {
        while (!abort.load()) {
            std::size_t idx = next.fetch_add(1);
            if (idx >= images.size()) return;
            const ImageRef& img = images[idx];

            std::string bytes;
            bool loaded = false;
            for (const auto& cat : schema.categories) {
                if (abort.load()) return;
                if (existing && existing->count(RecordKey{img.id, cat.name})) continue;
                try {
                    if (!loaded) {
                        bytes = load_image_bytes(img.uri);
                        loaded = true;
                    }
                    AnnotationRecord rec =
                        cat.kind == CategoryKind::ImageLevel
                            ? annotate_image_level(img, bytes, cat, schema.domain, itm)
                            : annotate_object_level(img, bytes, cat, detect, cfg.alpha);
                    std::lock_guard<std::mutex> lock(mu);
                    if (on_record) on_record(rec);
                    result.store.insert(std::move(rec));
                    ++result.stats.computed;
                } catch (const Error& e) {
                    std::lock_guard<std::mutex> lock(mu);
                    if (cfg.fail_policy == FailPolicy::AbortRun) {
                        if (!first_error) first_error = std::current_exception();
                        abort.store(true);
                        return;
                    }
                    ++result.stats.skipped;
                    result.stats.skips.push_back(img.id + "/" + cat.name + ": " + e.what());
                    if (log) log("skipped " + img.id + "/" + cat.name + ": " + e.what());
                }
            }
        }
    };

    std::size_t n_workers = std::min<std::size_t>(static_cast<std::size_t>(cfg.parallelism), images.size());
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (std::size_t i = 0; i < n_workers; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);
    return result;
}

}  // namespace attrlens
