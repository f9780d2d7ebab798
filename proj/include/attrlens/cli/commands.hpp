#pragma once

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "attrlens/cli/config.hpp"
#include "attrlens/core/validate.hpp"
#include "attrlens/llm/generate.hpp"
#include "attrlens/report.hpp"

namespace attrlens {

// Exit codes: 0 ok, 2 backend, 3 parse, 4 workflow gating, 5 analysis input,
// 1 anything else.
inline int exit_code_for(const Error& e) {
    if (dynamic_cast<const BackendError*>(&e) || dynamic_cast<const AuthError*>(&e) ||
        dynamic_cast<const DecodeError*>(&e))
        return 2;
    if (dynamic_cast<const ParseError*>(&e)) return 3;
    if (dynamic_cast<const WorkflowError*>(&e) || dynamic_cast<const InvalidAssignment*>(&e)) return 4;
    if (dynamic_cast<const EmptyInput*>(&e) || dynamic_cast<const LengthMismatch*>(&e) ||
        dynamic_cast<const UnknownCategory*>(&e) || dynamic_cast<const MissingClassLabel*>(&e) ||
        dynamic_cast<const SchemaMismatch*>(&e) || dynamic_cast<const CoverageError*>(&e) ||
        dynamic_cast<const EmptyIntersection*>(&e))
        return 5;
    return 1;
}

/// One command at a time per project, enforced with flock on a sidecar file.
class ProjectLock {
public:
    explicit ProjectLock(const std::filesystem::path& lock_path) {
        fd_ = ::open(lock_path.c_str(), O_CREAT | O_RDWR, 0644);
        if (fd_ < 0) throw IoError("cannot open lock file: " + lock_path.string());
        if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
            ::close(fd_);
            fd_ = -1;
            throw WorkflowError("another command holds the project lock: " + lock_path.string());
        }
    }
    ~ProjectLock() {
        if (fd_ >= 0) {
            ::flock(fd_, LOCK_UN);
            ::close(fd_);
        }
    }
    ProjectLock(const ProjectLock&) = delete;
    ProjectLock& operator=(const ProjectLock&) = delete;

private:
    int fd_ = -1;
};

inline constexpr std::string_view kZeroTimestamp = "1970-01-01T00:00:00Z";

// ---------------------------------------------------------------------------
// generate

inline int cmd_generate(const ProjectConfig& cfg, BackendInstances& backends, std::ostream& out,
                        std::ostream& err) {
    try {
        GenerateOptions opts;
        opts.model_id = cfg.backends.at("chat").model_id;
        opts.temperature = cfg.temperature;
        opts.max_parse_retries = cfg.max_parse_retries;
        if (cfg.zero_timestamps) opts.timestamp = kZeroTimestamp;

        AttributeSchema schema = generate_schema(cfg.domain, backends.chat(), opts);
        save_schema(cfg.resolve(cfg.paths.schema_file), schema);

        std::size_t pending = 0;
        for (const auto& c : schema.categories)
            if (c.needs_review) ++pending;
        out << "generated " << schema.categories.size() << " categories into "
            << cfg.paths.schema_file << " (" << pending << " pending template review)\n";
        return 0;
    } catch (const Error& e) {
        err << "generate failed: " << e.what() << "\n";
        return exit_code_for(e);
    }
}

// ---------------------------------------------------------------------------
// review

inline int cmd_review(const ProjectConfig& cfg,
                      const std::map<std::string, std::string>& assignments, std::ostream& out,
                      std::ostream& err) {
    try {
        auto schema_path = cfg.resolve(cfg.paths.schema_file);
        if (!std::filesystem::exists(schema_path))
            throw WorkflowError("schema file not found; run generate first: " + schema_path.string());
        AttributeSchema schema = load_schema(schema_path);

        for (const auto& [raw_name, raw_template] : assignments) {
            std::string name = normalize_name(raw_name);
            CaptionTemplate tmpl;
            try {
                tmpl = template_from_string(raw_template);
            } catch (const ConfigError&) {
                throw InvalidAssignment("unknown template for category " + name + ": " + raw_template);
            }
            bool found = false;
            for (auto& cat : schema.categories) {
                if (cat.name != name) continue;
                found = true;
                if (cat.kind == CategoryKind::ObjectLevel && tmpl != CaptionTemplate::Identity)
                    throw InvalidAssignment("object-level category " + name +
                                            " only accepts the identity template");
                cat.caption_template = tmpl;
                cat.needs_review = false;
            }
            if (!found) throw UnknownCategory("unknown category in assignment: " + name);
        }

        save_schema(schema_path, schema);
        std::size_t pending = 0;
        for (const auto& c : schema.categories)
            if (c.needs_review) ++pending;
        out << "applied " << assignments.size() << " assignment(s); " << pending
            << " categories still pending review\n";
        return 0;
    } catch (const UnknownCategory& e) {
        err << "review failed: " << e.what() << "\n";
        return 4;
    } catch (const Error& e) {
        err << "review failed: " << e.what() << "\n";
        return exit_code_for(e);
    }
}

// ---------------------------------------------------------------------------
// annotate

inline int cmd_annotate(const ProjectConfig& cfg, BackendInstances& backends, std::ostream& out,
                        std::ostream& err) {
    try {
        auto schema_path = cfg.resolve(cfg.paths.schema_file);
        if (!std::filesystem::exists(schema_path))
            throw WorkflowError("schema file not found; run generate first: " + schema_path.string());
        AttributeSchema schema = load_schema(schema_path);

        std::vector<std::string> pending;
        for (const auto& c : schema.categories)
            if (c.needs_review) pending.push_back(c.name);
        if (!pending.empty()) {
            std::string names;
            for (const auto& n : pending) names += (names.empty() ? "" : ", ") + n;
            throw WorkflowError("categories pending template review: " + names + "; run review first");
        }

        auto manifest_path = cfg.resolve(cfg.paths.corpus_manifest);
        std::vector<ImageRef> images = load_manifest(manifest_path);
        for (auto& img : images) {
            if (img.uri.rfind("http://", 0) == 0 || img.uri.rfind("https://", 0) == 0) continue;
            std::filesystem::path p(img.uri);
            if (!p.is_absolute()) img.uri = (manifest_path.parent_path() / p).string();
        }

        auto store_path = cfg.resolve(cfg.paths.store_file);
        std::optional<AnnotationStore> existing;
        if (std::filesystem::exists(store_path)) {
            existing = load_store(store_path);
            if (!same_schema(existing->schema, schema))
                throw WorkflowError("existing store was built with a different schema; "
                                    "remove it or regenerate: " + store_path.string());
            if (existing->alpha != cfg.annotator.alpha)
                throw WorkflowError("existing store used alpha " + format_double(existing->alpha) +
                                    " but the run is configured with " +
                                    format_double(cfg.annotator.alpha));
        }

        bool existed = static_cast<bool>(existing);
        std::filesystem::create_directories(store_path.parent_path().empty()
                                                ? std::filesystem::path(".")
                                                : store_path.parent_path());
        std::ofstream append(store_path, std::ios::app | std::ios::binary);
        if (!append) throw IoError("cannot open store file for append: " + store_path.string());
        if (!existed) {
            AnnotationStore header;
            header.schema = schema;
            header.alpha = cfg.annotator.alpha;
            append << store_header_json(header).dump() << "\n";
            append.flush();
        }
        RecordSink sink = [&](const AnnotationRecord& rec) {
            append << to_json(rec).dump() << "\n";
            append.flush();
        };
        LogFn log = [&](const std::string& msg) { err << msg << "\n"; };

        AnnotateResult result =
            annotate_corpus(images, schema, cfg.annotator, backends.itm(), backends.detect(),
                            existing ? &existing->records : nullptr, log, sink);
        append.close();
        save_store(store_path, result.store);

        out << "annotated " << result.stats.computed << " record(s) (" << result.stats.resumed
            << " resumed, " << result.stats.skipped << " skipped); store has "
            << result.store.records.size() << " record(s)\n";
        return 0;
    } catch (const Error& e) {
        err << "annotate failed: " << e.what() << "\n";
        return exit_code_for(e);
    }
}

// ---------------------------------------------------------------------------
// report

inline const std::set<std::string> kReportNames = {"histograms", "crosstab", "diff",
                                                   "auc", "confusion", "sweep"};

inline int cmd_report(const ProjectConfig& cfg, BackendInstances& backends,
                      const std::vector<std::string>& which, std::ostream& out, std::ostream& err) {
    std::vector<std::string> requested = which.empty() ? std::vector<std::string>{"histograms"} : which;
    for (const auto& name : requested)
        if (!kReportNames.count(name)) {
            err << "unknown report: " << name << "\n";
            return 1;
        }

    AnnotationStore store;
    try {
        auto store_path = cfg.resolve(cfg.paths.store_file);
        if (!std::filesystem::exists(store_path))
            throw WorkflowError("store file not found; run annotate first: " + store_path.string());
        store = load_store(store_path);
    } catch (const Error& e) {
        err << "report failed: " << e.what() << "\n";
        return exit_code_for(e);
    }

    auto report_dir = cfg.resolve(cfg.paths.report_dir);
    std::filesystem::create_directories(report_dir);
    std::vector<std::string> failures;

    auto produce = [&](const std::string& name, auto&& fn) {
        try {
            for (const ReportFile& file : fn())
                write_file_atomic(report_dir / file.name, file.content);
            out << "wrote " << name << " report\n";
        } catch (const Error& e) {
            failures.push_back(name + ": " + e.what());
            err << "report " << name << " failed: " << e.what() << "\n";
        }
    };

    for (const auto& name : requested) {
        if (name == "histograms") {
            produce(name, [&] { return histogram_report(store); });
        } else if (name == "crosstab") {
            produce(name, [&] {
                std::vector<ImageRef> images = load_manifest(cfg.resolve(cfg.paths.corpus_manifest));
                std::vector<std::string> categories = cfg.reports.crosstab_categories;
                if (categories.empty())
                    for (const auto& c : store.schema.categories) categories.push_back(c.name);
                return crosstab_report(store, images, categories);
            });
        } else if (name == "diff") {
            produce(name, [&] {
                if (cfg.reports.compare_store.empty())
                    throw SchemaMismatch("diff report needs reports.compare_store in the config");
                AnnotationStore cmp = load_store(cfg.resolve(cfg.reports.compare_store));
                return diff_report(store, cmp);
            });
        } else if (name == "auc") {
            produce(name, [&] {
                if (cfg.reports.ground_truth_csv.empty())
                    throw CoverageError("auc report needs reports.ground_truth_csv in the config");
                GroundTruth gt =
                    parse_ground_truth_csv(read_file(cfg.resolve(cfg.reports.ground_truth_csv)));
                return auc_report(store, gt);
            });
        } else if (name == "confusion") {
            produce(name, [&] {
                if (cfg.reports.human_csv.empty() || cfg.reports.confusion_category.empty())
                    throw CoverageError(
                        "confusion report needs reports.human_csv and reports.confusion_category");
                auto human = parse_human_csv(read_file(cfg.resolve(cfg.reports.human_csv)));
                return confusion_report(store, human, cfg.reports.confusion_category);
            });
        } else if (name == "sweep") {
            produce(name, [&] {
                if (cfg.reports.sweep_real_attrs.empty())
                    throw CoverageError("sweep report needs reports.sweep.real_attrs");
                GenerateOptions opts;
                opts.model_id = cfg.backends.at("chat").model_id;
                opts.temperature = cfg.temperature;
                opts.max_parse_retries = cfg.max_parse_retries;
                if (cfg.zero_timestamps) opts.timestamp = kZeroTimestamp;
                std::vector<SweepCell> cells = run_sweep(
                    cfg.reports.sweep_real_attrs, cfg.domain, cfg.reports.sweep_n_values,
                    cfg.reports.sweep_m_values, backends.chat(), backends.embed(), opts, cfg.recall);
                return sweep_report(cells);
            });
        }
    }

    if (!failures.empty()) {
        err << failures.size() << " report(s) failed\n";
        return 5;
    }
    return 0;
}

}  // namespace attrlens
