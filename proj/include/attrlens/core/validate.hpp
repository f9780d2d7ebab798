#pragma once

#include <set>
#include <string>
#include <vector>

#include "attrlens/core/normalize.hpp"
#include "attrlens/core/types.hpp"

namespace attrlens {

/// Checks every schema invariant and returns one message per violation.
/// An empty result means the schema is well-formed. Never throws.
inline std::vector<std::string> validate_schema(const AttributeSchema& schema) {
    std::vector<std::string> violations;
    auto add = [&](std::string msg) { violations.push_back(std::move(msg)); };

    DomainSpec d = schema.domain;
    if (trim(d.caption).empty()) add("domain caption is empty");
    if (trim(d.noun).empty()) add("domain noun is empty");
    if (d.n_categories < 1) add("domain n_categories must be >= 1");
    if (d.m_attributes < 1) add("domain m_attributes must be >= 1");
    if (d.reps_categories < 1 || d.reps_attributes < 1 || d.reps_kind < 1)
        add("domain repetition counts must be >= 1");

    if (static_cast<int>(schema.categories.size()) > d.n_categories)
        add("schema has " + std::to_string(schema.categories.size()) +
            " categories, domain allows " + std::to_string(d.n_categories));

    std::set<std::string> seen_names;
    for (const auto& cat : schema.categories) {
        const std::string norm = normalize_name(cat.name);
        if (norm.empty()) {
            add("category name is empty");
            continue;
        }
        if (cat.name != norm) add("category name not normalized: " + cat.name);
        if (!seen_names.insert(norm).second) add("duplicate category name: " + norm);

        if (cat.attributes.empty()) add("category has no attributes: " + norm);
        if (static_cast<int>(cat.attributes.size()) > d.m_attributes)
            add("category " + norm + " has " + std::to_string(cat.attributes.size()) +
                " attributes, domain allows " + std::to_string(d.m_attributes));

        std::set<std::string> seen_attrs;
        for (const auto& attr : cat.attributes) {
            if (attr != normalize_name(attr)) add("attribute not normalized: " + attr + " (category: " + norm + ")");
            if (attr == kBaseScoreKey) add("reserved attribute name " + std::string(kBaseScoreKey) + " (category: " + norm + ")");
            if (!seen_attrs.insert(attr).second) add("duplicate attribute " + attr + " (category: " + norm + ")");
        }

        if (cat.kind == CategoryKind::ObjectLevel && cat.caption_template != CaptionTemplate::Identity)
            add("object-level category must use identity template: " + norm);
    }
    return violations;
}

}  // namespace attrlens
