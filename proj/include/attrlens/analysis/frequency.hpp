#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "attrlens/core/errors.hpp"
#include "attrlens/core/types.hpp"

namespace attrlens {

/// Attribute frequencies for one category. Image-level tables carry a
/// trailing "none" entry and their counts sum to the image total; object
/// level is multilabel, so each count is independently bounded by the total.
struct FrequencyTable {
    std::string category_name;
    CategoryKind kind = CategoryKind::ImageLevel;
    std::vector<std::pair<std::string, std::size_t>> counts;
    std::size_t total_images = 0;
    std::vector<std::pair<std::string, double>> proportions;

    double proportion_of(std::string_view name) const {
        for (const auto& [attr, p] : proportions)
            if (attr == name) return p;
        throw UnknownCategory("no histogram entry: " + std::string(name));
    }
};

inline FrequencyTable category_histogram(const AnnotationStore& store,
                                         const std::string& category_name) {
    const AttributeCategory* cat = store.schema.find(category_name);
    if (!cat) throw UnknownCategory("unknown category: " + category_name);
    auto recs = store.records_for_category(category_name);
    if (recs.empty()) throw EmptyInput("no records for category: " + category_name);

    FrequencyTable table;
    table.category_name = category_name;
    table.kind = cat->kind;
    table.total_images = recs.size();

    std::map<std::string, std::size_t> tally;
    if (cat->kind == CategoryKind::ImageLevel) {
        for (const AnnotationRecord* rec : recs)
            ++tally[rec->chosen_attribute ? *rec->chosen_attribute : std::string(kNoneLabel)];
        for (const auto& attr : cat->attributes) table.counts.emplace_back(attr, tally[attr]);
        table.counts.emplace_back(std::string(kNoneLabel), tally[std::string(kNoneLabel)]);
        // Chosen labels outside the schema should not happen, but keep sums honest.
        for (const auto& [label, count] : tally) {
            bool known = label == kNoneLabel ||
                         std::find(cat->attributes.begin(), cat->attributes.end(), label) !=
                             cat->attributes.end();
            if (!known) table.counts.emplace_back(label, count);
        }
    } else {
        for (const AnnotationRecord* rec : recs)
            for (const auto& [attr, boxes] : rec->detections) ++tally[attr];
        for (const auto& attr : cat->attributes) table.counts.emplace_back(attr, tally[attr]);
    }

    for (const auto& [attr, count] : table.counts)
        table.proportions.emplace_back(
            attr, static_cast<double>(count) / static_cast<double>(table.total_images));
    return table;
}

/// Row-normalized contingency table.
struct CrossTab {
    std::vector<std::string> row_labels;
    std::vector<std::string> col_labels;
    std::vector<std::vector<double>> row_normalized;
    std::vector<std::size_t> row_totals;
    std::size_t excluded = 0;  // images dropped for lacking a label on either side
    std::vector<std::string> warnings;
};

/// Class-label x attribute cross-tabulation for one category. Rows are the
/// corpus class labels (sorted); image-level columns include "none". Classes
/// with no annotated images are omitted with a warning.
inline CrossTab crosstab(const AnnotationStore& store, const std::vector<ImageRef>& images,
                         const std::string& category_name) {
    const AttributeCategory* cat = store.schema.find(category_name);
    if (!cat) throw UnknownCategory("unknown category: " + category_name);

    std::map<std::string, std::string> class_of;
    std::set<std::string> classes;
    for (const auto& img : images)
        if (img.class_label) {
            class_of[img.id] = *img.class_label;
            classes.insert(*img.class_label);
        }

    std::map<std::string, std::vector<const AnnotationRecord*>> by_class;
    for (const AnnotationRecord* rec : store.records_for_category(category_name)) {
        auto it = class_of.find(rec->image_id);
        if (it == class_of.end()) throw MissingClassLabel(rec->image_id);
        by_class[it->second].push_back(rec);
    }

    CrossTab tab;
    tab.col_labels = cat->attributes;
    if (cat->kind == CategoryKind::ImageLevel) tab.col_labels.push_back(std::string(kNoneLabel));

    for (const auto& cls : classes) {
        auto it = by_class.find(cls);
        if (it == by_class.end() || it->second.empty()) {
            tab.warnings.push_back("class " + cls + " has no annotated images for category " +
                                   category_name + "; row omitted");
            continue;
        }
        const auto& recs = it->second;
        std::vector<double> row(tab.col_labels.size(), 0.0);
        for (const AnnotationRecord* rec : recs) {
            if (cat->kind == CategoryKind::ImageLevel) {
                std::string label = rec->chosen_attribute ? *rec->chosen_attribute : std::string(kNoneLabel);
                for (std::size_t c = 0; c < tab.col_labels.size(); ++c)
                    if (tab.col_labels[c] == label) row[c] += 1.0;
            } else {
                for (std::size_t c = 0; c < tab.col_labels.size(); ++c)
                    if (rec->detections.count(tab.col_labels[c])) row[c] += 1.0;
            }
        }
        for (auto& cell : row) cell /= static_cast<double>(recs.size());
        tab.row_labels.push_back(cls);
        tab.row_totals.push_back(recs.size());
        tab.row_normalized.push_back(std::move(row));
    }
    return tab;
}

struct DiffEntry {
    std::string category;
    std::string attribute;
    double ref_proportion = 0.0;
    double cmp_proportion = 0.0;
    double diff = 0.0;  // ref minus cmp; negative = more frequent in the comparison set
};

/// Per-attribute frequency difference between two stores sharing a schema.
/// Entries within a category are ordered by descending reference proportion.
inline std::vector<DiffEntry> distribution_diff(const AnnotationStore& ref,
                                                const AnnotationStore& cmp) {
    if (!same_schema(ref.schema, cmp.schema))
        throw SchemaMismatch("stores have different schemas");

    std::vector<DiffEntry> out;
    for (const auto& cat : ref.schema.categories) {
        FrequencyTable fr = category_histogram(ref, cat.name);
        FrequencyTable fc = category_histogram(cmp, cat.name);
        std::map<std::string, double> cmp_props(fc.proportions.begin(), fc.proportions.end());

        std::vector<DiffEntry> block;
        for (const auto& [attr, ref_p] : fr.proportions) {
            DiffEntry e;
            e.category = cat.name;
            e.attribute = attr;
            e.ref_proportion = ref_p;
            auto it = cmp_props.find(attr);
            e.cmp_proportion = it == cmp_props.end() ? 0.0 : it->second;
            e.diff = e.ref_proportion - e.cmp_proportion;
            block.push_back(std::move(e));
        }
        std::stable_sort(block.begin(), block.end(), [](const DiffEntry& a, const DiffEntry& b) {
            return a.ref_proportion > b.ref_proportion;
        });
        out.insert(out.end(), block.begin(), block.end());
    }
    return out;
}

}  // namespace attrlens
