#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"

#include "attrlens/analysis/embedding_metrics.hpp"
#include "attrlens/annotator.hpp"
#include "attrlens/backends/cache.hpp"
#include "attrlens/backends/http.hpp"
#include "attrlens/backends/mock.hpp"
#include "attrlens/core/json_io.hpp"

namespace attrlens {

inline const std::vector<std::string> kBackendRoles = {"chat", "itm", "detect", "embed"};

struct ProjectPaths {
    std::string corpus_manifest;
    std::string schema_file;
    std::string store_file;
    std::string report_dir;
    std::string cache_dir;  // empty disables the response cache
};

struct ReportInputs {
    std::string ground_truth_csv;
    std::string human_csv;
    std::string confusion_category;
    std::string compare_store;
    std::vector<std::string> crosstab_categories;  // empty = every category
    std::vector<std::string> sweep_real_attrs;
    std::vector<int> sweep_n_values{3, 5, 10, 15, 20};
    std::vector<int> sweep_m_values{3, 5, 7, 10, 15, 20};
};

struct ProjectConfig {
    DomainSpec domain;
    std::map<std::string, BackendConfig> backends;  // keyed by role
    AnnotatorConfig annotator;
    RecallConfig recall;
    ProjectPaths paths;
    ReportInputs reports;
    double temperature = 0.3;
    int max_parse_retries = 3;
    bool zero_timestamps = false;  // pin provenance timestamps for reproducible runs
    std::filesystem::path base_dir;

    std::filesystem::path resolve(const std::string& p) const {
        std::filesystem::path path(p);
        return path.is_absolute() ? path : base_dir / path;
    }
};

namespace detail {

inline BackendConfig backend_config_from_json(const json& j, const std::string& role) {
    BackendConfig c;
    if (!j.contains("endpoint_url"))
        throw ConfigError("backend " + role + " needs an endpoint_url");
    c.endpoint_url = j.at("endpoint_url").get<std::string>();
    c.model_id = j.value("model_id", "");
    c.api_key_env = j.value("api_key_env", "");
    c.timeout_s = j.value("timeout_s", 30.0);
    c.max_retries = j.value("max_retries", 2);
    validate_backend_config(c);
    return c;
}

}  // namespace detail

inline ProjectConfig load_project_config(const std::filesystem::path& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw ConfigError("malformed project config " + path.string() + ": " + e.what());
    }
    try {
        ProjectConfig cfg;
        cfg.base_dir = std::filesystem::absolute(path).parent_path();
        cfg.domain = domain_from_json(j.at("domain"));
        validate_domain(cfg.domain);

        const json& backends = j.at("backends");
        for (const auto& role : kBackendRoles) {
            if (!backends.contains(role))
                throw ConfigError("config must define backends." + role + " (mocks are allowed)");
            cfg.backends[role] = detail::backend_config_from_json(backends.at(role), role);
        }

        if (j.contains("annotator")) {
            const json& a = j.at("annotator");
            cfg.annotator.alpha = a.value("alpha", 0.3);
            cfg.annotator.parallelism = a.value("parallelism", 1);
            std::string policy = a.value("fail_policy", "skip");
            if (policy == "skip" || policy == "skip_record")
                cfg.annotator.fail_policy = FailPolicy::SkipRecord;
            else if (policy == "abort" || policy == "abort_run")
                cfg.annotator.fail_policy = FailPolicy::AbortRun;
            else
                throw ConfigError("unknown fail_policy: " + policy);
        }
        validate_annotator_config(cfg.annotator);

        if (j.contains("recall")) {
            const json& r = j.at("recall");
            cfg.recall.beta = r.value("beta", 0.8);
            cfg.recall.embedding_model_id = r.value("embedding_model_id", "");
        }
        if (cfg.recall.embedding_model_id.empty())
            cfg.recall.embedding_model_id = cfg.backends.at("embed").model_id;
        validate_recall_config(cfg.recall);

        const json& paths = j.at("paths");
        cfg.paths.corpus_manifest = paths.at("corpus_manifest").get<std::string>();
        cfg.paths.schema_file = paths.at("schema_file").get<std::string>();
        cfg.paths.store_file = paths.at("store_file").get<std::string>();
        cfg.paths.report_dir = paths.at("report_dir").get<std::string>();
        cfg.paths.cache_dir = paths.value("cache_dir", "");
        if (cfg.paths.corpus_manifest.empty() || cfg.paths.schema_file.empty() ||
            cfg.paths.store_file.empty() || cfg.paths.report_dir.empty())
            throw ConfigError("paths.corpus_manifest, schema_file, store_file and report_dir must be non-empty");

        if (j.contains("reports")) {
            const json& r = j.at("reports");
            cfg.reports.ground_truth_csv = r.value("ground_truth_csv", "");
            cfg.reports.human_csv = r.value("human_csv", "");
            cfg.reports.confusion_category = r.value("confusion_category", "");
            cfg.reports.compare_store = r.value("compare_store", "");
            if (r.contains("crosstab_categories"))
                cfg.reports.crosstab_categories =
                    r.at("crosstab_categories").get<std::vector<std::string>>();
            if (r.contains("sweep")) {
                const json& s = r.at("sweep");
                if (s.contains("real_attrs"))
                    cfg.reports.sweep_real_attrs = s.at("real_attrs").get<std::vector<std::string>>();
                if (s.contains("n_values"))
                    cfg.reports.sweep_n_values = s.at("n_values").get<std::vector<int>>();
                if (s.contains("m_values"))
                    cfg.reports.sweep_m_values = s.at("m_values").get<std::vector<int>>();
            }
        }

        cfg.temperature = j.value("temperature", 0.3);
        cfg.max_parse_retries = j.value("max_parse_retries", 3);
        cfg.zero_timestamps = j.value("zero_timestamps", false);
        return cfg;
    } catch (const json::exception& e) {
        throw ConfigError("invalid project config " + path.string() + ": " + e.what());
    }
}

/// Owns the configured backend stack for one command invocation: raw
/// clients (HTTP or scripted mocks), and cache decorators when a cache
/// directory is configured.
struct BackendInstances {
    std::map<std::string, std::shared_ptr<FixtureSet>> fixture_files;
    std::unique_ptr<ResponseCache> cache;

    std::unique_ptr<ChatBackend> chat_raw;
    std::unique_ptr<ItmBackend> itm_raw;
    std::unique_ptr<DetectBackend> detect_raw;
    std::unique_ptr<EmbedBackend> embed_raw;

    std::unique_ptr<ChatBackend> chat_cached;
    std::unique_ptr<ItmBackend> itm_cached;
    std::unique_ptr<DetectBackend> detect_cached;
    std::unique_ptr<EmbedBackend> embed_cached;

    ChatBackend& chat() { return chat_cached ? *chat_cached : *chat_raw; }
    ItmBackend& itm() { return itm_cached ? *itm_cached : *itm_raw; }
    DetectBackend& detect() { return detect_cached ? *detect_cached : *detect_raw; }
    EmbedBackend& embed() { return embed_cached ? *embed_cached : *embed_raw; }
};

namespace detail {

inline std::shared_ptr<FixtureSet> fixture_for(BackendInstances& out, const std::filesystem::path& path) {
    std::string key = path.string();
    auto it = out.fixture_files.find(key);
    if (it != out.fixture_files.end()) return it->second;
    auto set = std::make_shared<FixtureSet>(FixtureSet::load(path));
    out.fixture_files[key] = set;
    return set;
}

}  // namespace detail

/// Builds the four role backends from the config. Endpoint schemes:
///   http(s)://...          remote JSON-over-HTTP service
///   mock://<fixtures.jsonl> scripted mock (path relative to the config file)
///   hashembed://<dim>[/<seed>] deterministic embedding mock (embed role only)
/// A non-empty `mock_fixtures_override` routes every role to that fixture file.
inline BackendInstances make_backends(const ProjectConfig& cfg,
                                      const std::string& mock_fixtures_override = "") {
    BackendInstances out;
    for (const auto& role : kBackendRoles) {
        BackendConfig bc = cfg.backends.at(role);
        std::string url = bc.endpoint_url;
        if (!mock_fixtures_override.empty()) url = "mock://" + mock_fixtures_override;

        if (url.rfind("mock://", 0) == 0) {
            auto fixtures = detail::fixture_for(out, cfg.resolve(url.substr(7)));
            if (role == "chat")
                out.chat_raw = std::make_unique<ScriptedChatBackend>(*fixtures);
            else if (role == "itm")
                out.itm_raw = std::make_unique<ScriptedItmBackend>(*fixtures, bc.model_id);
            else if (role == "detect")
                out.detect_raw = std::make_unique<ScriptedDetectBackend>(*fixtures, bc.model_id);
            else
                out.embed_raw = std::make_unique<ScriptedEmbedBackend>(*fixtures, bc.model_id);
        } else if (url.rfind("hashembed://", 0) == 0) {
            if (role != "embed")
                throw ConfigError("hashembed:// is only valid for the embed role");
            std::string spec = url.substr(12);
            std::uint64_t seed = 0;
            std::size_t dim = 0;
            auto slash = spec.find('/');
            dim = static_cast<std::size_t>(std::stoul(spec.substr(0, slash)));
            if (slash != std::string::npos) seed = std::stoull(spec.substr(slash + 1));
            out.embed_raw = std::make_unique<HashEmbedBackend>(dim, seed);
        } else {
            if (role == "chat")
                out.chat_raw = std::make_unique<HttpChatBackend>(bc);
            else if (role == "itm")
                out.itm_raw = std::make_unique<HttpItmBackend>(bc);
            else if (role == "detect")
                out.detect_raw = std::make_unique<HttpDetectBackend>(bc);
            else
                out.embed_raw = std::make_unique<HttpEmbedBackend>(bc);
        }
    }

    if (!cfg.paths.cache_dir.empty()) {
        out.cache = std::make_unique<ResponseCache>(cfg.resolve(cfg.paths.cache_dir));
        out.chat_cached = std::make_unique<CachedChatBackend>(*out.chat_raw, *out.cache);
        out.itm_cached = std::make_unique<CachedItmBackend>(*out.itm_raw, *out.cache,
                                                            cfg.backends.at("itm").model_id);
        out.detect_cached = std::make_unique<CachedDetectBackend>(*out.detect_raw, *out.cache,
                                                                  cfg.backends.at("detect").model_id);
        out.embed_cached = std::make_unique<CachedEmbedBackend>(*out.embed_raw, *out.cache,
                                                                cfg.backends.at("embed").model_id);
    }
    return out;
}

}  // namespace attrlens
