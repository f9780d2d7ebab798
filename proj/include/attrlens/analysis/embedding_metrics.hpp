#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "attrlens/analysis/linalg.hpp"
#include "attrlens/backends/backend.hpp"
#include "attrlens/core/types.hpp"
#include "attrlens/llm/generate.hpp"

namespace attrlens {

struct RecallConfig {
    double beta = 0.8;  // cosine threshold for a match, exclusive
    std::string embedding_model_id;
};

inline void validate_recall_config(const RecallConfig& c) {
    if (!(c.beta > 0.0 && c.beta < 1.0)) throw ConfigError("beta must lie in (0, 1)");
}

/// Fraction of reference vectors whose best cosine match among the
/// generated vectors strictly exceeds beta.
inline double recall_from_vectors(const std::vector<std::vector<double>>& real_vecs,
                                  const std::vector<std::vector<double>>& gen_vecs, double beta) {
    if (real_vecs.empty() || gen_vecs.empty())
        throw EmptyInput("recall needs non-empty attribute sets");
    std::size_t matched = 0;
    for (const auto& r : real_vecs) {
        double best = -1.0;
        for (const auto& g : gen_vecs) best = std::max(best, cosine_similarity(r, g));
        if (best > beta) ++matched;
    }
    return static_cast<double>(matched) / static_cast<double>(real_vecs.size());
}

/// Fraction of a dataset's known attribute names recovered by the generated
/// set, judged by best cosine similarity between text embeddings.
inline double recall(const std::vector<std::string>& real_attrs,
                     const std::vector<std::string>& gen_attrs, EmbedBackend& embed,
                     const RecallConfig& config) {
    validate_recall_config(config);
    if (real_attrs.empty() || gen_attrs.empty())
        throw EmptyInput("recall needs non-empty attribute lists");
    std::vector<std::vector<double>> real_vecs, gen_vecs;
    real_vecs.reserve(real_attrs.size());
    gen_vecs.reserve(gen_attrs.size());
    for (const auto& a : real_attrs) real_vecs.push_back(embed.embed(a).values);
    for (const auto& a : gen_attrs) gen_vecs.push_back(embed.embed(a).values);
    return recall_from_vectors(real_vecs, gen_vecs, config.beta);
}

struct EffectiveDimension {
    std::size_t k = 0;       // principal components needed to reach the variance threshold
    double fraction = 0.0;   // k divided by the number of attributes
    std::vector<double> variances;  // eigenvalues of the centered scatter, descending
};

/// Principal-component count needed to capture `variance_threshold` of the
/// variance of the embedding set (cumulative sum meeting the threshold
/// counts). Zero total variance yields k = 0. The eigenproblem is solved on
/// the smaller of the feature-space scatter and the sample Gram matrix.
inline EffectiveDimension effective_dimension_from_vectors(
    const std::vector<std::vector<double>>& vecs, double variance_threshold = 0.95) {
    if (vecs.empty()) throw EmptyInput("effective dimension needs at least one vector");
    if (!(variance_threshold > 0.0 && variance_threshold <= 1.0))
        throw ConfigError("variance threshold must lie in (0, 1]");
    const std::size_t n = vecs.size();
    const std::size_t d = vecs.front().size();
    for (const auto& v : vecs)
        if (v.size() != d) throw LengthMismatch("embedding dimensions differ");

    std::vector<double> mean(d, 0.0);
    for (const auto& v : vecs)
        for (std::size_t j = 0; j < d; ++j) mean[j] += v[j];
    for (auto& m : mean) m /= static_cast<double>(n);
    std::vector<std::vector<double>> centered(n, std::vector<double>(d));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) centered[i][j] = vecs[i][j] - mean[j];

    std::vector<std::vector<double>> m;
    if (d <= n) {
        m.assign(d, std::vector<double>(d, 0.0));
        for (const auto& row : centered)
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = 0; j < d; ++j) m[i][j] += row[i] * row[j];
    } else {
        m.assign(n, std::vector<double>(n, 0.0));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                double dot = 0;
                for (std::size_t c = 0; c < d; ++c) dot += centered[i][c] * centered[j][c];
                m[i][j] = dot;
            }
    }

    EffectiveDimension out;
    out.variances = symmetric_eigenvalues(std::move(m));
    double total = 0;
    for (auto& v : out.variances) {
        if (v < 0) v = 0;  // numerical fuzz on rank-deficient inputs
        total += v;
    }
    if (total == 0.0) {
        out.k = 0;
        out.fraction = 0.0;
        return out;
    }
    double cum = 0;
    for (std::size_t i = 0; i < out.variances.size(); ++i) {
        cum += out.variances[i];
        if (cum >= variance_threshold * total) {
            out.k = i + 1;
            break;
        }
    }
    if (out.k == 0) out.k = out.variances.size();  // guard against rounding shortfall
    out.fraction = static_cast<double>(out.k) / static_cast<double>(n);
    return out;
}

inline EffectiveDimension effective_dimension(const std::vector<std::string>& attrs,
                                              EmbedBackend& embed,
                                              double variance_threshold = 0.95) {
    if (attrs.empty()) throw EmptyInput("effective dimension needs at least one attribute");
    std::vector<std::vector<double>> vecs;
    vecs.reserve(attrs.size());
    for (const auto& a : attrs) vecs.push_back(embed.embed(a).values);
    return effective_dimension_from_vectors(vecs, variance_threshold);
}

struct SweepPoint {
    int n = 0;
    int m = 0;
    double recall = 0.0;
    double effective_fraction = 0.0;
};

struct SweepCell {
    int n = 0;
    int m = 0;
    std::optional<SweepPoint> point;
    std::string error;  // per-point failure marker; empty on success
};

/// Pools the distinct attributes of a generated schema, in schema order.
inline std::vector<std::string> pooled_attributes(const AttributeSchema& schema) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto& cat : schema.categories)
        for (const auto& attr : cat.attributes)
            if (seen.insert(attr).second) out.push_back(attr);
    return out;
}

/// Grid evaluation of generation quality: for every (n, m) pair a schema is
/// generated, its pooled attributes are scored for recall against the known
/// labels and for effective dimension. Failures mark their cell and do not
/// stop the sweep.
inline std::vector<SweepCell> run_sweep(const std::vector<std::string>& real_attrs,
                                        const DomainSpec& base_domain,
                                        const std::vector<int>& n_values,
                                        const std::vector<int>& m_values, ChatBackend& chat,
                                        EmbedBackend& embed, const GenerateOptions& gen_opts,
                                        const RecallConfig& recall_config,
                                        double variance_threshold = 0.95) {
    if (n_values.empty() || m_values.empty()) throw EmptyInput("sweep grids must be non-empty");
    if (real_attrs.empty()) throw EmptyInput("sweep needs reference attributes");

    std::vector<SweepCell> cells;
    for (int n : n_values)
        for (int m : m_values) {
            SweepCell cell;
            cell.n = n;
            cell.m = m;
            try {
                DomainSpec d = base_domain;
                d.n_categories = n;
                d.m_attributes = m;
                AttributeSchema schema = generate_schema(d, chat, gen_opts);
                std::vector<std::string> pooled = pooled_attributes(schema);
                if (pooled.empty()) throw EmptyInput("generation produced no attributes");
                SweepPoint point{n, m, 0.0, 0.0};
                point.recall = recall(real_attrs, pooled, embed, recall_config);
                point.effective_fraction =
                    effective_dimension(pooled, embed, variance_threshold).fraction;
                cell.point = point;
            } catch (const Error& e) {
                cell.error = e.what();
            }
            cells.push_back(std::move(cell));
        }
    return cells;
}

}  // namespace attrlens
