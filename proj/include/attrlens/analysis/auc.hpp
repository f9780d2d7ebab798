#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "attrlens/analysis/csv.hpp"
#include "attrlens/core/errors.hpp"
#include "attrlens/core/types.hpp"

namespace attrlens {

/// Rank-based (Mann-Whitney) AUC with average ranks for ties. Undefined
/// (nullopt) when the labels are single-class; such values are excluded
/// from averages downstream.
inline std::optional<double> auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size())
        throw LengthMismatch("auc needs matching score and label counts");
    if (scores.empty()) throw LengthMismatch("auc needs at least one (score, label) pair");

    std::size_t positives = 0;
    for (int l : labels)
        if (l > 0) ++positives;
    const std::size_t negatives = scores.size() - positives;
    if (positives == 0 || negatives == 0) return std::nullopt;

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Average ranks over tie groups, 1-based.
    std::vector<double> rank(scores.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
        double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) rank[order[k]] = avg;
        i = j + 1;
    }

    double positive_rank_sum = 0;
    for (std::size_t k = 0; k < scores.size(); ++k)
        if (labels[k] > 0) positive_rank_sum += rank[k];
    double u = positive_rank_sum -
               static_cast<double>(positives) * (static_cast<double>(positives) + 1.0) / 2.0;
    return u / (static_cast<double>(positives) * static_cast<double>(negatives));
}

/// Per-image, per-attribute binary ground truth.
using GroundTruth = std::map<std::string, std::map<std::string, int>>;

/// CSV with header image_id,attribute,label and label in {0,1}.
inline GroundTruth parse_ground_truth_csv(std::string_view text) {
    GroundTruth gt;
    auto rows = parse_csv(text);
    if (rows.empty()) throw IoError("ground truth CSV is empty");
    std::size_t start = 0;
    if (rows[0].size() >= 3 && rows[0][0] == "image_id") start = 1;
    for (std::size_t r = start; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() != 3)
            throw IoError("ground truth CSV row " + std::to_string(r + 1) + " needs 3 fields");
        if (row[2] != "0" && row[2] != "1")
            throw IoError("ground truth label must be 0 or 1 at row " + std::to_string(r + 1));
        gt[row[0]][normalize_name(row[1])] = row[2] == "1" ? 1 : 0;
    }
    return gt;
}

struct AttributeAuc {
    std::string category;
    std::string attribute;
    std::optional<double> value;
    std::size_t positives = 0;
    std::size_t negatives = 0;
};

struct DatasetAucResult {
    std::vector<AttributeAuc> per_attribute;
    std::optional<double> mean;  // over defined AUCs only
};

/// Scores every (category, attribute) pair that appears in the ground truth
/// against the stored annotation scores (ITM score for image-level, best
/// detection score for object-level). Every annotated image must carry a
/// ground-truth label for each evaluated attribute.
inline DatasetAucResult dataset_auc(const AnnotationStore& store, const GroundTruth& gt) {
    std::set<std::string> gt_attrs;
    for (const auto& [image, attrs] : gt)
        for (const auto& [attr, label] : attrs) gt_attrs.insert(attr);

    DatasetAucResult result;
    std::vector<std::string> missing;
    double sum = 0;
    std::size_t defined = 0;

    for (const auto& cat : store.schema.categories) {
        auto recs = store.records_for_category(cat.name);
        for (const auto& attr : cat.attributes) {
            if (!gt_attrs.count(attr)) continue;
            std::vector<double> scores;
            std::vector<int> labels;
            for (const AnnotationRecord* rec : recs) {
                auto sit = rec->attribute_scores.find(attr);
                if (sit == rec->attribute_scores.end()) {
                    missing.push_back(rec->image_id + "/" + attr + " (no stored score)");
                    continue;
                }
                auto git = gt.find(rec->image_id);
                bool labeled = false;
                int label = 0;
                if (git != gt.end()) {
                    auto lit = git->second.find(attr);
                    if (lit != git->second.end()) {
                        labeled = true;
                        label = lit->second;
                    }
                }
                if (!labeled) {
                    missing.push_back(rec->image_id + "/" + attr);
                    continue;
                }
                scores.push_back(sit->second);
                labels.push_back(label);
            }
            AttributeAuc row;
            row.category = cat.name;
            row.attribute = attr;
            for (int l : labels) l > 0 ? ++row.positives : ++row.negatives;
            if (!scores.empty()) row.value = auc(scores, labels);
            if (row.value) {
                sum += *row.value;
                ++defined;
            }
            result.per_attribute.push_back(std::move(row));
        }
    }

    if (!missing.empty()) {
        std::string msg = "ground truth missing for " + std::to_string(missing.size()) + " pair(s):";
        for (std::size_t i = 0; i < missing.size() && i < 20; ++i) msg += " " + missing[i];
        if (missing.size() > 20) msg += " ...";
        throw CoverageError(msg);
    }
    if (defined > 0) result.mean = sum / static_cast<double>(defined);
    return result;
}

}  // namespace attrlens
