#pragma once

#include <chrono>
#include <cstdio>
#include <ctime>
#include <string>
#include <vector>

#include "attrlens/backends/backend.hpp"
#include "attrlens/core/types.hpp"
#include "attrlens/llm/aggregate.hpp"
#include "attrlens/llm/parse.hpp"
#include "attrlens/llm/prompts.hpp"

namespace attrlens {

struct GenerateOptions {
    std::string model_id;
    double temperature = 0.3;
    int max_parse_retries = 3;
    /// Provenance timestamp; empty means "now" (UTC, ISO 8601).
    std::string timestamp;
};

inline std::string now_iso8601_utc() {
    std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
    return buf;
}

namespace detail {

inline std::string rep_tag(int rep, int retry) {
    std::string tag = "rep:" + std::to_string(rep);
    if (retry > 0) tag += ";retry:" + std::to_string(retry);
    return tag;
}

/// Issues one repetition of a list prompt, re-issuing on malformed output
/// up to max_parse_retries consecutive failures.
inline std::vector<std::string> run_list_prompt(ChatBackend& chat, const std::string& prompt,
                                                const GenerateOptions& opts, int rep) {
    for (int attempt = 0;; ++attempt) {
        LlmRequest req{prompt, opts.temperature, opts.model_id, rep_tag(rep, attempt)};
        std::string text = chat.complete(req);
        try {
            return parse_list_response(text);
        } catch (const ParseError&) {
            if (attempt + 1 >= opts.max_parse_retries)
                throw ParseError("response stayed unparseable after " +
                                 std::to_string(opts.max_parse_retries) +
                                 " attempts for prompt: " + prompt.substr(0, 80));
        }
    }
}

inline RunSet repeat_list_prompt(ChatBackend& chat, const std::string& prompt,
                                 const GenerateOptions& opts, int reps) {
    RunSet set;
    for (int rep = 0; rep < reps; ++rep) set.runs.push_back(run_list_prompt(chat, prompt, opts, rep));
    return set;
}

inline CategoryKind vote_kind(ChatBackend& chat, const std::string& prompt,
                              const GenerateOptions& opts, int reps) {
    int yes = 0, no = 0;
    for (int rep = 0; rep < reps; ++rep) {
        LlmRequest req{prompt, opts.temperature, opts.model_id, rep_tag(rep, 0)};
        switch (parse_yes_no(chat.complete(req))) {
            case YesNo::Yes: ++yes; break;
            case YesNo::No: ++no; break;
            case YesNo::Ambiguous: break;
        }
    }
    // Ties (including all-ambiguous) fall back to the image-level annotator.
    return yes > no ? CategoryKind::ObjectLevel : CategoryKind::ImageLevel;
}

}  // namespace detail

/// Full generation pass: repeated category discovery, repeated per-category
/// attribute discovery, and a majority vote on object- vs image-level.
/// Templates stay Identity; image-level categories are flagged for review.
inline AttributeSchema generate_schema(const DomainSpec& domain, ChatBackend& chat,
                                       const GenerateOptions& opts) {
    DomainSpec d = domain;
    validate_domain(d);

    AttributeSchema schema;
    schema.domain = d;

    RunSet category_runs = detail::repeat_list_prompt(chat, build_q1(d), opts, d.reps_categories);
    std::vector<std::string> names =
        aggregate_top_k(category_runs, static_cast<std::size_t>(d.n_categories));

    for (const auto& name : names) {
        RunSet attr_runs = detail::repeat_list_prompt(chat, build_q2(d, name), opts, d.reps_attributes);
        std::vector<std::string> attrs =
            aggregate_top_k(attr_runs, static_cast<std::size_t>(d.m_attributes));
        if (attrs.empty()) continue;  // a category with no usable attributes is dropped

        AttributeCategory cat;
        cat.name = name;
        cat.attributes = std::move(attrs);
        cat.kind = detail::vote_kind(chat, build_q3(cat.attributes), opts, d.reps_kind);
        cat.caption_template = CaptionTemplate::Identity;
        cat.needs_review = cat.kind == CategoryKind::ImageLevel;
        schema.categories.push_back(std::move(cat));
    }

    schema.provenance = {
        {"model_id", opts.model_id},
        {"temperature", std::to_string(opts.temperature)},
        {"generated_at", opts.timestamp.empty() ? now_iso8601_utc() : opts.timestamp},
        {"reps_categories", std::to_string(d.reps_categories)},
        {"reps_attributes", std::to_string(d.reps_attributes)},
        {"reps_kind", std::to_string(d.reps_kind)},
    };
    return schema;
}

}  // namespace attrlens
