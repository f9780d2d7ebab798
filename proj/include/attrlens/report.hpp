#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "attrlens/analysis/auc.hpp"
#include "attrlens/analysis/confusion.hpp"
#include "attrlens/analysis/csv.hpp"
#include "attrlens/analysis/embedding_metrics.hpp"
#include "attrlens/analysis/frequency.hpp"
#include "attrlens/core/types.hpp"

namespace attrlens {

struct ReportFile {
    std::string name;
    std::string content;
};

namespace detail {

inline std::string pct(double proportion) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f%%", proportion * 100.0);
    return buf;
}

inline std::string md_row(const std::vector<std::string>& cells) {
    std::string out = "|";
    for (const auto& c : cells) out += " " + c + " |";
    out += "\n";
    return out;
}

inline std::string md_header(const std::vector<std::string>& cells) {
    std::string out = md_row(cells);
    out += "|";
    for (std::size_t i = 0; i < cells.size(); ++i) out += " --- |";
    out += "\n";
    return out;
}

}  // namespace detail

inline std::vector<ReportFile> histogram_report(const AnnotationStore& store) {
    CsvWriter csv;
    csv.row({"category", "attribute", "count", "proportion", "total_images"});
    std::string md = "## Attribute histograms\n";

    for (const auto& cat : store.schema.categories) {
        std::vector<const AnnotationRecord*> recs = store.records_for_category(cat.name);
        if (recs.empty()) {
            md += "\n### " + cat.name + "\n\n(no records)\n";
            continue;
        }
        FrequencyTable table = category_histogram(store, cat.name);
        md += "\n### " + cat.name + " (" + std::string(to_string(cat.kind)) + ", " +
              std::to_string(table.total_images) + " images)\n\n";
        md += detail::md_header({"attribute", "count", "proportion"});

        const std::pair<std::string, std::size_t>* majority = nullptr;
        for (std::size_t i = 0; i < table.counts.size(); ++i) {
            const auto& [attr, count] = table.counts[i];
            double p = table.proportions[i].second;
            csv.row({cat.name, attr, std::to_string(count), format_double(p),
                     std::to_string(table.total_images)});
            md += detail::md_row({attr, std::to_string(count), detail::pct(p)});
            if (attr != kNoneLabel && (!majority || count > majority->second))
                majority = &table.counts[i];
        }
        if (majority)
            md += "\nMajority attribute: " + majority->first + " (" +
                  detail::pct(static_cast<double>(majority->second) /
                              static_cast<double>(table.total_images)) +
                  ")\n";
    }
    return {{"histograms.csv", csv.str()}, {"histograms.md", md}};
}

inline std::vector<ReportFile> crosstab_report(const AnnotationStore& store,
                                               const std::vector<ImageRef>& images,
                                               const std::vector<std::string>& categories) {
    CsvWriter csv;
    csv.row({"category", "class_label", "attribute", "proportion", "row_total"});
    std::string md = "## Class-label cross-tabulation\n";

    for (const auto& name : categories) {
        CrossTab tab = crosstab(store, images, name);
        md += "\n### " + name + "\n\n";
        std::vector<std::string> header{"class \\ attribute"};
        header.insert(header.end(), tab.col_labels.begin(), tab.col_labels.end());
        md += detail::md_header(header);
        for (std::size_t r = 0; r < tab.row_labels.size(); ++r) {
            std::vector<std::string> cells{tab.row_labels[r]};
            for (std::size_t c = 0; c < tab.col_labels.size(); ++c) {
                csv.row({name, tab.row_labels[r], tab.col_labels[c],
                         format_double(tab.row_normalized[r][c]), std::to_string(tab.row_totals[r])});
                cells.push_back(detail::pct(tab.row_normalized[r][c]));
            }
            md += detail::md_row(cells);
        }
        for (const auto& w : tab.warnings) md += "\nNote: " + w + "\n";
    }
    return {{"crosstab.csv", csv.str()}, {"crosstab.md", md}};
}

inline std::vector<ReportFile> diff_report(const AnnotationStore& ref, const AnnotationStore& cmp) {
    std::vector<DiffEntry> entries = distribution_diff(ref, cmp);
    CsvWriter csv;
    csv.row({"category", "attribute", "ref_proportion", "cmp_proportion", "diff"});
    std::string md = "## Attribute distribution differences\n\n"
                     "Diff is reference minus comparison; a negative value means the attribute is "
                     "more frequent in the comparison set. Attributes are ordered by descending "
                     "reference proportion.\n";

    std::string current;
    for (const auto& e : entries) {
        if (e.category != current) {
            current = e.category;
            md += "\n### " + current + "\n\n";
            md += detail::md_header({"attribute", "reference", "comparison", "diff"});
        }
        csv.row({e.category, e.attribute, format_double(e.ref_proportion),
                 format_double(e.cmp_proportion), format_double(e.diff)});
        md += detail::md_row({e.attribute, detail::pct(e.ref_proportion),
                              detail::pct(e.cmp_proportion), detail::pct(e.diff)});
    }
    return {{"diff.csv", csv.str()}, {"diff.md", md}};
}

inline std::vector<ReportFile> auc_report(const AnnotationStore& store, const GroundTruth& gt) {
    DatasetAucResult result = dataset_auc(store, gt);
    CsvWriter csv;
    csv.row({"category", "attribute", "auc", "positives", "negatives"});
    std::string md = "## Annotation quality (AUC against ground truth)\n\n";
    md += detail::md_header({"category", "attribute", "auc", "positives", "negatives"});

    for (const auto& row : result.per_attribute) {
        std::string value = row.value ? format_double(*row.value) : "";
        csv.row({row.category, row.attribute, value, std::to_string(row.positives),
                 std::to_string(row.negatives)});
        md += detail::md_row({row.category, row.attribute, row.value ? value : "n/a",
                              std::to_string(row.positives), std::to_string(row.negatives)});
    }
    md += "\nMean AUC over defined attributes: " +
          (result.mean ? format_double(*result.mean) : std::string("n/a")) + "\n";
    return {{"auc.csv", csv.str()}, {"auc.md", md}};
}

inline std::vector<ReportFile> confusion_report(
    const AnnotationStore& store,
    const std::map<std::string, std::vector<std::string>>& human_annotations,
    const std::string& category_name) {
    const AttributeCategory* cat = store.schema.find(category_name);
    if (!cat) throw UnknownCategory("unknown category: " + category_name);

    ConsensusResult consensus = consensus_labels(human_annotations);
    std::map<std::string, std::string> machine = machine_labels(store, category_name);
    std::vector<std::string> label_order = cat->attributes;
    label_order.push_back(std::string(kNoneLabel));
    label_order.push_back(std::string(kUnknownLabel));
    CrossTab tab = confusion_matrix(consensus.labels, machine, label_order);

    CsvWriter csv;
    csv.row({"human_label", "machine_label", "proportion", "row_total"});
    std::string md = "## Human vs machine confusion (" + category_name + ")\n\n";
    std::vector<std::string> header{"human \\ machine"};
    header.insert(header.end(), tab.col_labels.begin(), tab.col_labels.end());
    md += detail::md_header(header);
    for (std::size_t r = 0; r < tab.row_labels.size(); ++r) {
        std::vector<std::string> cells{tab.row_labels[r]};
        for (std::size_t c = 0; c < tab.col_labels.size(); ++c) {
            csv.row({tab.row_labels[r], tab.col_labels[c], format_double(tab.row_normalized[r][c]),
                     std::to_string(tab.row_totals[r])});
            cells.push_back(detail::pct(tab.row_normalized[r][c]));
        }
        md += detail::md_row(cells);
    }

    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.1f", consensus.stats.avg_annotations);
    md += "\nAnnotated images: " + std::to_string(consensus.stats.n_images) + "\n";
    md += "\nMean annotations per image: " + std::string(buf) + "\n";
    std::snprintf(buf, sizeof(buf), "%.1f%%", consensus.stats.pct_unknown);
    md += "\nImages with at least one \"unknown\" vote: " + std::string(buf) + "\n";
    std::snprintf(buf, sizeof(buf), "%.1f%%", consensus.stats.pct_no_consensus);
    md += "\nImages without consensus (excluded): " + std::string(buf) + "\n";
    md += "\nImages lacking a label on either side (excluded): " + std::to_string(tab.excluded) + "\n";
    return {{"confusion.csv", csv.str()}, {"confusion.md", md}};
}

inline std::vector<ReportFile> sweep_report(const std::vector<SweepCell>& cells) {
    CsvWriter csv;
    csv.row({"n", "m", "recall", "effective_fraction", "error"});
    std::string md = "## Generation sweep\n\n";
    md += detail::md_header({"n", "m", "recall", "effective fraction", "error"});
    for (const auto& cell : cells) {
        std::string r = cell.point ? format_double(cell.point->recall) : "";
        std::string f = cell.point ? format_double(cell.point->effective_fraction) : "";
        csv.row({std::to_string(cell.n), std::to_string(cell.m), r, f, cell.error});
        md += detail::md_row({std::to_string(cell.n), std::to_string(cell.m),
                              cell.point ? r : "n/a", cell.point ? f : "n/a",
                              cell.error.empty() ? "-" : cell.error});
    }
    return {{"sweep.csv", csv.str()}, {"sweep.md", md}};
}

}  // namespace attrlens
