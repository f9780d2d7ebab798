#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "attrlens/analysis/csv.hpp"
#include "attrlens/analysis/frequency.hpp"
#include "attrlens/core/errors.hpp"
#include "attrlens/core/types.hpp"

namespace attrlens {

inline constexpr std::string_view kUnknownLabel = "unknown";
inline constexpr std::string_view kNoConsensusLabel = "no-consensus";

/// Human-vs-machine agreement matrix, normalized over rows (human labels).
/// Images present on only one side are excluded and counted. Label order
/// follows `label_order`; labels outside it are appended sorted.
inline CrossTab confusion_matrix(const std::map<std::string, std::string>& human,
                                 const std::map<std::string, std::string>& machine,
                                 const std::vector<std::string>& label_order) {
    std::vector<std::string> shared;
    for (const auto& [id, label] : human)
        if (machine.count(id)) shared.push_back(id);
    if (shared.empty()) throw EmptyIntersection("no images carry both a human and a machine label");

    CrossTab tab;
    std::set<std::string> all_ids;
    for (const auto& [id, label] : human) all_ids.insert(id);
    for (const auto& [id, label] : machine) all_ids.insert(id);
    tab.excluded = all_ids.size() - shared.size();

    auto order_of = [&](const std::string& label) {
        auto it = std::find(label_order.begin(), label_order.end(), label);
        return it == label_order.end() ? label_order.size()
                                       : static_cast<std::size_t>(it - label_order.begin());
    };
    auto sort_labels = [&](std::set<std::string> labels) {
        std::vector<std::string> out(labels.begin(), labels.end());
        std::sort(out.begin(), out.end(), [&](const std::string& a, const std::string& b) {
            std::size_t oa = order_of(a), ob = order_of(b);
            return oa != ob ? oa < ob : a < b;
        });
        return out;
    };

    std::set<std::string> row_set, col_set;
    std::map<std::pair<std::string, std::string>, std::size_t> counts;
    for (const auto& id : shared) {
        const std::string& h = human.at(id);
        const std::string& m = machine.at(id);
        row_set.insert(h);
        col_set.insert(m);
        ++counts[{h, m}];
    }
    tab.row_labels = sort_labels(row_set);
    tab.col_labels = sort_labels(col_set);

    for (const auto& row_label : tab.row_labels) {
        std::vector<double> row(tab.col_labels.size(), 0.0);
        std::size_t total = 0;
        for (std::size_t c = 0; c < tab.col_labels.size(); ++c) {
            auto it = counts.find({row_label, tab.col_labels[c]});
            std::size_t n = it == counts.end() ? 0 : it->second;
            row[c] = static_cast<double>(n);
            total += n;
        }
        for (auto& cell : row) cell /= static_cast<double>(total);
        tab.row_totals.push_back(total);
        tab.row_normalized.push_back(std::move(row));
    }
    return tab;
}

struct ConsensusStats {
    std::size_t n_images = 0;
    double avg_annotations = 0.0;
    double pct_unknown = 0.0;       // images where at least one annotator chose "unknown"
    double pct_no_consensus = 0.0;  // images without a consensus attribute
};

struct ConsensusResult {
    std::map<std::string, std::string> labels;  // consensus per image; no-consensus images excluded
    std::vector<std::string> no_consensus_images;
    ConsensusStats stats;
};

/// Majority label per image. An "unknown" majority falls back to the next
/// highest attribute when one is unambiguous, else stays "unknown". Ties at
/// the top (or in the fallback) mean no consensus; those images are tracked
/// and left out of the returned labels.
inline ConsensusResult consensus_labels(
    const std::map<std::string, std::vector<std::string>>& annotations_per_image) {
    ConsensusResult result;
    std::size_t total_annotations = 0;
    std::size_t with_unknown = 0;

    for (const auto& [image_id, labels] : annotations_per_image) {
        if (labels.empty()) continue;
        ++result.stats.n_images;
        total_annotations += labels.size();

        std::map<std::string, std::size_t> tally;
        bool any_unknown = false;
        for (const auto& raw : labels) {
            std::string label = normalize_name(raw);
            if (label == kUnknownLabel) any_unknown = true;
            ++tally[label];
        }
        if (any_unknown) ++with_unknown;

        auto top_of = [](const std::map<std::string, std::size_t>& t) {
            std::size_t best = 0;
            std::vector<std::string> winners;
            for (const auto& [label, count] : t) {
                if (count > best) {
                    best = count;
                    winners = {label};
                } else if (count == best) {
                    winners.push_back(label);
                }
            }
            return winners;
        };

        std::vector<std::string> winners = top_of(tally);
        std::string consensus;
        if (winners.size() != 1) {
            consensus = std::string(kNoConsensusLabel);
        } else if (winners.front() != kUnknownLabel) {
            consensus = winners.front();
        } else {
            std::map<std::string, std::size_t> others = tally;
            others.erase(std::string(kUnknownLabel));
            if (others.empty()) {
                consensus = std::string(kUnknownLabel);
            } else {
                std::vector<std::string> next = top_of(others);
                consensus = next.size() == 1 ? next.front() : std::string(kNoConsensusLabel);
            }
        }

        if (consensus == kNoConsensusLabel)
            result.no_consensus_images.push_back(image_id);
        else
            result.labels[image_id] = consensus;
    }

    if (result.stats.n_images > 0) {
        result.stats.avg_annotations =
            static_cast<double>(total_annotations) / static_cast<double>(result.stats.n_images);
        result.stats.pct_unknown =
            100.0 * static_cast<double>(with_unknown) / static_cast<double>(result.stats.n_images);
        result.stats.pct_no_consensus = 100.0 *
                                        static_cast<double>(result.no_consensus_images.size()) /
                                        static_cast<double>(result.stats.n_images);
    }
    return result;
}

/// CSV with header image_id,annotator_id,label; labels are normalized.
inline std::map<std::string, std::vector<std::string>> parse_human_csv(std::string_view text) {
    std::map<std::string, std::vector<std::string>> out;
    auto rows = parse_csv(text);
    if (rows.empty()) throw IoError("human annotation CSV is empty");
    std::size_t start = 0;
    if (rows[0].size() >= 3 && rows[0][0] == "image_id") start = 1;
    for (std::size_t r = start; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() != 3)
            throw IoError("human annotation CSV row " + std::to_string(r + 1) + " needs 3 fields");
        out[row[0]].push_back(row[2]);
    }
    return out;
}

/// Machine label per image for one image-level category: the chosen
/// attribute, or "none" when the base caption won.
inline std::map<std::string, std::string> machine_labels(const AnnotationStore& store,
                                                         const std::string& category_name) {
    const AttributeCategory* cat = store.schema.find(category_name);
    if (!cat) throw UnknownCategory("unknown category: " + category_name);
    if (cat->kind != CategoryKind::ImageLevel)
        throw ConfigError("confusion analysis needs an image-level category: " + category_name);
    std::map<std::string, std::string> out;
    for (const AnnotationRecord* rec : store.records_for_category(category_name))
        out[rec->image_id] =
            rec->chosen_attribute ? *rec->chosen_attribute : std::string(kNoneLabel);
    return out;
}

}  // namespace attrlens
