#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "attrlens/core/errors.hpp"
#include "attrlens/core/types.hpp"

namespace attrlens {

using nlohmann::json;

// ---------------------------------------------------------------------------
// File helpers

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Writes via a temp file and rename so readers never observe partial content.
inline void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write file: " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw IoError("short write: " + tmp.string());
    }
    fs::rename(tmp, path);
}

// ---------------------------------------------------------------------------
// Domain / schema

inline json to_json(const DomainSpec& d) {
    return json{{"caption", d.caption},
                {"noun", d.noun},
                {"n_categories", d.n_categories},
                {"m_attributes", d.m_attributes},
                {"reps_categories", d.reps_categories},
                {"reps_attributes", d.reps_attributes},
                {"reps_kind", d.reps_kind}};
}

inline DomainSpec domain_from_json(const json& j) {
    DomainSpec d;
    d.caption = j.at("caption").get<std::string>();
    d.noun = j.at("noun").get<std::string>();
    d.n_categories = j.at("n_categories").get<int>();
    d.m_attributes = j.at("m_attributes").get<int>();
    d.reps_categories = j.value("reps_categories", 5);
    d.reps_attributes = j.value("reps_attributes", 5);
    d.reps_kind = j.value("reps_kind", 3);
    return d;
}

inline json to_json(const AttributeCategory& c) {
    return json{{"name", c.name},
                {"attributes", c.attributes},
                {"kind", std::string(to_string(c.kind))},
                {"template", std::string(to_string(c.caption_template))},
                {"needs_review", c.needs_review}};
}

inline AttributeCategory category_from_json(const json& j) {
    AttributeCategory c;
    c.name = j.at("name").get<std::string>();
    c.attributes = j.at("attributes").get<std::vector<std::string>>();
    c.kind = kind_from_string(j.at("kind").get<std::string>());
    c.caption_template = template_from_string(j.at("template").get<std::string>());
    c.needs_review = j.value("needs_review", false);
    return c;
}

inline json to_json(const AttributeSchema& s) {
    json cats = json::array();
    for (const auto& c : s.categories) cats.push_back(to_json(c));
    return json{{"domain", to_json(s.domain)}, {"categories", cats}, {"provenance", s.provenance}};
}

inline AttributeSchema schema_from_json(const json& j) {
    AttributeSchema s;
    s.domain = domain_from_json(j.at("domain"));
    for (const auto& c : j.at("categories")) s.categories.push_back(category_from_json(c));
    if (j.contains("provenance"))
        s.provenance = j.at("provenance").get<std::map<std::string, std::string>>();
    return s;
}

inline std::string serialize_schema(const AttributeSchema& s) {
    return to_json(s).dump(2) + "\n";
}

inline AttributeSchema parse_schema(std::string_view text) {
    try {
        return schema_from_json(json::parse(text));
    } catch (const json::exception& e) {
        throw IoError(std::string("malformed schema file: ") + e.what());
    }
}

inline AttributeSchema load_schema(const std::filesystem::path& path) {
    return parse_schema(read_file(path));
}

inline void save_schema(const std::filesystem::path& path, const AttributeSchema& s) {
    write_file_atomic(path, serialize_schema(s));
}

// ---------------------------------------------------------------------------
// Annotation records / store

inline json to_json(const DetectionBox& b) {
    return json{{"x_min", b.x_min}, {"y_min", b.y_min}, {"x_max", b.x_max},
                {"y_max", b.y_max}, {"score", b.score}};
}

inline DetectionBox box_from_json(const json& j) {
    DetectionBox b;
    b.x_min = j.at("x_min").get<double>();
    b.y_min = j.at("y_min").get<double>();
    b.x_max = j.at("x_max").get<double>();
    b.y_max = j.at("y_max").get<double>();
    b.score = j.at("score").get<double>();
    return b;
}

inline json to_json(const AnnotationRecord& r) {
    json j{{"image_id", r.image_id},
           {"category_name", r.category_name},
           {"kind", std::string(to_string(r.kind))},
           {"attribute_scores", r.attribute_scores}};
    if (r.chosen_attribute) j["chosen_attribute"] = *r.chosen_attribute;
    if (!r.detections.empty()) {
        json det = json::object();
        for (const auto& [attr, boxes] : r.detections) {
            json arr = json::array();
            for (const auto& b : boxes) arr.push_back(to_json(b));
            det[attr] = std::move(arr);
        }
        j["detections"] = std::move(det);
    }
    return j;
}

inline AnnotationRecord record_from_json(const json& j) {
    AnnotationRecord r;
    r.image_id = j.at("image_id").get<std::string>();
    r.category_name = j.at("category_name").get<std::string>();
    r.kind = kind_from_string(j.at("kind").get<std::string>());
    r.attribute_scores = j.at("attribute_scores").get<std::map<std::string, double>>();
    if (j.contains("chosen_attribute")) r.chosen_attribute = j.at("chosen_attribute").get<std::string>();
    if (j.contains("detections"))
        for (const auto& [attr, arr] : j.at("detections").items()) {
            std::vector<DetectionBox> boxes;
            for (const auto& b : arr) boxes.push_back(box_from_json(b));
            r.detections[attr] = std::move(boxes);
        }
    return r;
}

inline json store_header_json(const AnnotationStore& s) {
    return json{{"schema", to_json(s.schema)}, {"alpha", s.alpha}};
}

/// Canonical store format: one JSON header line (schema, alpha) followed by
/// one record per line, ordered by (image_id, category_name).
inline std::string serialize_store(const AnnotationStore& s) {
    std::string out = store_header_json(s).dump() + "\n";
    for (const auto& [key, rec] : s.records) out += to_json(rec).dump() + "\n";
    return out;
}

inline AnnotationStore parse_store(std::string_view text) {
    AnnotationStore store;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    try {
        while (pos < text.size()) {
            std::size_t nl = text.find('\n', pos);
            std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
            pos = nl == std::string_view::npos ? text.size() : nl + 1;
            ++line_no;
            if (trim(line).empty()) continue;
            json j = json::parse(line);
            if (line_no == 1) {
                store.schema = schema_from_json(j.at("schema"));
                store.alpha = j.at("alpha").get<double>();
            } else {
                store.insert(record_from_json(j));
            }
        }
    } catch (const json::exception& e) {
        throw IoError("malformed store file at line " + std::to_string(line_no) + ": " + e.what());
    }
    if (line_no == 0) throw IoError("store file is empty");
    return store;
}

inline AnnotationStore load_store(const std::filesystem::path& path) {
    return parse_store(read_file(path));
}

inline void save_store(const std::filesystem::path& path, const AnnotationStore& s) {
    write_file_atomic(path, serialize_store(s));
}

// ---------------------------------------------------------------------------
// Corpus manifest (JSONL of ImageRef)

inline json to_json(const ImageRef& r) {
    json j{{"id", r.id}, {"uri", r.uri}};
    if (r.class_label) j["class_label"] = *r.class_label;
    return j;
}

inline ImageRef image_ref_from_json(const json& j) {
    ImageRef r;
    r.id = j.at("id").get<std::string>();
    r.uri = j.at("uri").get<std::string>();
    if (j.contains("class_label")) r.class_label = j.at("class_label").get<std::string>();
    return r;
}

inline std::vector<ImageRef> parse_manifest(std::string_view text) {
    std::vector<ImageRef> refs;
    std::set<std::string> ids;
    std::size_t pos = 0, line_no = 0;
    while (pos < text.size()) {
        std::size_t nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() : nl + 1;
        ++line_no;
        if (trim(line).empty()) continue;
        try {
            refs.push_back(image_ref_from_json(json::parse(line)));
        } catch (const json::exception& e) {
            throw IoError("malformed manifest at line " + std::to_string(line_no) + ": " + e.what());
        }
        if (!ids.insert(refs.back().id).second)
            throw IoError("duplicate image id in manifest: " + refs.back().id);
    }
    return refs;
}

inline std::vector<ImageRef> load_manifest(const std::filesystem::path& path) {
    return parse_manifest(read_file(path));
}

}  // namespace attrlens
