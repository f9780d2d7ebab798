#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "attrlens/core/errors.hpp"
#include "attrlens/core/normalize.hpp"

namespace attrlens {

/// Reserved key under which the base-caption score is stored in
/// image-level annotation records. User attributes may not use it.
inline constexpr std::string_view kBaseScoreKey = "__base__";

/// Reserved histogram label for images where no attribute won.
inline constexpr std::string_view kNoneLabel = "none";

enum class CategoryKind { ImageLevel, ObjectLevel };

enum class CaptionTemplate { Is, Has, With, In, From, Identity };

inline std::string_view to_string(CategoryKind k) {
    return k == CategoryKind::ImageLevel ? "image_level" : "object_level";
}

inline std::string_view to_string(CaptionTemplate t) {
    switch (t) {
        case CaptionTemplate::Is: return "is";
        case CaptionTemplate::Has: return "has";
        case CaptionTemplate::With: return "with";
        case CaptionTemplate::In: return "in";
        case CaptionTemplate::From: return "from";
        case CaptionTemplate::Identity: return "identity";
    }
    return "identity";
}

inline CategoryKind kind_from_string(std::string_view s) {
    if (s == "image_level") return CategoryKind::ImageLevel;
    if (s == "object_level") return CategoryKind::ObjectLevel;
    throw ConfigError("unknown category kind: " + std::string(s));
}

inline CaptionTemplate template_from_string(std::string_view s) {
    std::string t = normalize_name(s);
    if (t == "is") return CaptionTemplate::Is;
    if (t == "has") return CaptionTemplate::Has;
    if (t == "with") return CaptionTemplate::With;
    if (t == "in") return CaptionTemplate::In;
    if (t == "from") return CaptionTemplate::From;
    if (t == "identity") return CaptionTemplate::Identity;
    throw ConfigError("unknown caption template: " + std::string(s));
}

/// The user's domain description plus generation parameters.
struct DomainSpec {
    std::string caption;       // phrase inserted into the prompts, e.g. "a photo of a bird"
    std::string noun;          // head noun for caption templates, e.g. "bird"
    int n_categories = 10;
    int m_attributes = 5;
    int reps_categories = 5;
    int reps_attributes = 5;
    int reps_kind = 3;

    bool operator==(const DomainSpec&) const = default;
};

/// Trims text fields in place and throws ConfigError on invariant breaches.
inline void validate_domain(DomainSpec& d) {
    d.caption = trim(d.caption);
    d.noun = trim(d.noun);
    if (d.caption.empty()) throw ConfigError("domain caption must be non-empty");
    if (d.noun.empty()) throw ConfigError("domain noun must be non-empty");
    if (d.n_categories < 1) throw ConfigError("n_categories must be >= 1");
    if (d.m_attributes < 1) throw ConfigError("m_attributes must be >= 1");
    if (d.reps_categories < 1 || d.reps_attributes < 1 || d.reps_kind < 1)
        throw ConfigError("repetition counts must be >= 1");
}

struct AttributeCategory {
    std::string name;                     // normalized
    std::vector<std::string> attributes;  // normalized, unique within the category
    CategoryKind kind = CategoryKind::ImageLevel;
    CaptionTemplate caption_template = CaptionTemplate::Identity;
    bool needs_review = false;

    bool operator==(const AttributeCategory&) const = default;
};

struct AttributeSchema {
    DomainSpec domain;
    std::vector<AttributeCategory> categories;
    std::map<std::string, std::string> provenance;

    const AttributeCategory* find(std::string_view name) const {
        for (const auto& c : categories)
            if (c.name == name) return &c;
        return nullptr;
    }
};

/// Annotation-relevant schema identity: domain and categories, ignoring
/// provenance and review state.
inline bool same_schema(const AttributeSchema& a, const AttributeSchema& b) {
    if (a.domain != b.domain) return false;
    if (a.categories.size() != b.categories.size()) return false;
    for (std::size_t i = 0; i < a.categories.size(); ++i) {
        const auto& x = a.categories[i];
        const auto& y = b.categories[i];
        if (x.name != y.name || x.attributes != y.attributes || x.kind != y.kind ||
            x.caption_template != y.caption_template)
            return false;
    }
    return true;
}

struct ImageRef {
    std::string id;
    std::string uri;
    std::optional<std::string> class_label;
};

struct DetectionBox {
    double x_min = 0, y_min = 0, x_max = 0, y_max = 0;
    double score = 0;

    bool valid() const {
        return x_min < x_max && y_min < y_max && score >= 0.0 && score <= 1.0;
    }
    bool operator==(const DetectionBox&) const = default;
};

/// Result of annotating one (image, category) pair.
struct AnnotationRecord {
    std::string image_id;
    std::string category_name;
    CategoryKind kind = CategoryKind::ImageLevel;
    // Image-level: winning attribute, absent when the base caption won.
    std::optional<std::string> chosen_attribute;
    // Image-level: ITM score per attribute caption plus kBaseScoreKey.
    // Object-level: max detection score per attribute (0 when no boxes).
    std::map<std::string, double> attribute_scores;
    // Object-level only: boxes above the threshold, keyed by attribute.
    // An attribute has an entry iff it was labeled present.
    std::map<std::string, std::vector<DetectionBox>> detections;

    bool operator==(const AnnotationRecord&) const = default;
};

using RecordKey = std::pair<std::string, std::string>;  // (image_id, category_name)

struct AnnotationStore {
    AttributeSchema schema;
    double alpha = 0.3;
    std::map<RecordKey, AnnotationRecord> records;

    void insert(AnnotationRecord rec) {
        RecordKey key{rec.image_id, rec.category_name};
        records[std::move(key)] = std::move(rec);
    }

    const AnnotationRecord* find(std::string_view image_id, std::string_view category) const {
        auto it = records.find(RecordKey{std::string(image_id), std::string(category)});
        return it == records.end() ? nullptr : &it->second;
    }

    std::vector<const AnnotationRecord*> records_for_category(std::string_view category) const {
        std::vector<const AnnotationRecord*> out;
        for (const auto& [key, rec] : records)
            if (key.second == category) out.push_back(&rec);
        return out;
    }
};

}  // namespace attrlens
