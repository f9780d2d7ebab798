#pragma once

#include <Eigen/Dense>

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "attrlens/attrlens.hpp"

namespace attrlens::testing {

class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("attrlens_" + tag + "_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

// ---------------------------------------------------------------------------
// Small function-backed backends for driving the real code paths in tests.

class LambdaChatBackend : public ChatBackend {
public:
    explicit LambdaChatBackend(std::function<std::string(const LlmRequest&)> fn)
        : fn_(std::move(fn)) {}
    std::string complete(const LlmRequest& request) override {
        ++calls_;
        return fn_(request);
    }
    long calls() const { return calls_.load(); }

private:
    std::function<std::string(const LlmRequest&)> fn_;
    std::atomic<long> calls_{0};
};

class LambdaItmBackend : public ItmBackend {
public:
    explicit LambdaItmBackend(std::function<double(const std::string&, const std::string&)> fn)
        : fn_(std::move(fn)) {}
    double score(const std::string& image_bytes, const std::string& caption) override {
        ++calls_;
        return fn_(image_bytes, caption);
    }
    long calls() const { return calls_.load(); }

private:
    std::function<double(const std::string&, const std::string&)> fn_;
    std::atomic<long> calls_{0};
};

class LambdaDetectBackend : public DetectBackend {
public:
    explicit LambdaDetectBackend(
        std::function<std::vector<Detection>(const std::string&, const std::vector<std::string>&)> fn)
        : fn_(std::move(fn)) {}
    std::vector<Detection> detect(const std::string& image_bytes,
                                  const std::vector<std::string>& queries) override {
        ++calls_;
        return fn_(image_bytes, queries);
    }
    long calls() const { return calls_.load(); }

private:
    std::function<std::vector<Detection>(const std::string&, const std::vector<std::string>&)> fn_;
    std::atomic<long> calls_{0};
};

// ---------------------------------------------------------------------------
// Independent oracles. These deliberately avoid the library's own code paths.

/// Double-loop recomputation of the embedding-match recall definition.
inline double brute_force_recall(const std::vector<std::vector<double>>& real_vecs,
                                 const std::vector<std::vector<double>>& gen_vecs, double beta) {
    std::size_t matched = 0;
    for (const auto& r : real_vecs) {
        double best = -2.0;
        for (const auto& g : gen_vecs) {
            double dot = 0, nr = 0, ng = 0;
            for (std::size_t i = 0; i < r.size(); ++i) {
                dot += r[i] * g[i];
                nr += r[i] * r[i];
                ng += g[i] * g[i];
            }
            double cos = (nr == 0.0 || ng == 0.0) ? 0.0 : dot / (std::sqrt(nr) * std::sqrt(ng));
            if (cos > best) best = cos;
        }
        if (best > beta) ++matched;
    }
    return static_cast<double>(matched) / static_cast<double>(real_vecs.size());
}

struct OracleEffectiveDimension {
    std::size_t k = 0;
    std::vector<double> variances;  // descending
};

/// Dense symmetric eigendecomposition (Eigen) of the full feature-space
/// scatter of the mean-centered data, plus the cumulative-variance count.
inline OracleEffectiveDimension oracle_effective_dimension(
    const std::vector<std::vector<double>>& vecs, double threshold = 0.95) {
    const std::size_t n = vecs.size();
    const std::size_t d = vecs.front().size();
    Eigen::MatrixXd x(n, d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = vecs[i][j];
    Eigen::RowVectorXd mean = x.colwise().mean();
    Eigen::MatrixXd centered = x.rowwise() - mean;
    Eigen::MatrixXd scatter = centered.transpose() * centered;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(scatter);
    OracleEffectiveDimension out;
    Eigen::VectorXd eig = solver.eigenvalues().reverse();
    double total = 0;
    for (Eigen::Index i = 0; i < eig.size(); ++i) {
        double v = std::max(0.0, eig(i));
        out.variances.push_back(v);
        total += v;
    }
    if (total == 0.0) return out;
    double cum = 0;
    for (std::size_t i = 0; i < out.variances.size(); ++i) {
        cum += out.variances[i];
        if (cum >= threshold * total) {
            out.k = i + 1;
            break;
        }
    }
    if (out.k == 0) out.k = out.variances.size();
    return out;
}

/// O(P*N) pairwise AUC with half-credit for tied scores.
inline std::optional<double> pairwise_auc(const std::vector<double>& scores,
                                          const std::vector<int>& labels) {
    std::vector<double> pos, neg;
    for (std::size_t i = 0; i < scores.size(); ++i)
        (labels[i] > 0 ? pos : neg).push_back(scores[i]);
    if (pos.empty() || neg.empty()) return std::nullopt;
    double wins = 0;
    for (double p : pos)
        for (double q : neg) {
            if (p > q) wins += 1.0;
            else if (p == q) wins += 0.5;
        }
    return wins / (static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

/// Straight-line restatement of the image-level multiclass rule: the winner
/// is the first attribute whose score no later attribute strictly beats, and
/// it must strictly exceed the base score.
inline std::optional<std::size_t> reference_image_level_choice(const std::vector<double>& attr_scores,
                                                               double base_score) {
    if (attr_scores.empty()) return std::nullopt;
    std::size_t winner = 0;
    for (std::size_t i = 1; i < attr_scores.size(); ++i)
        if (attr_scores[i] > attr_scores[winner]) winner = i;
    if (attr_scores[winner] > base_score) return winner;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Fixture builders.

inline DomainSpec test_domain(int n = 3, int m = 3, int reps = 1) {
    DomainSpec d;
    d.caption = "a photo of a widget";
    d.noun = "widget";
    d.n_categories = n;
    d.m_attributes = m;
    d.reps_categories = reps;
    d.reps_attributes = reps;
    d.reps_kind = reps;
    return d;
}

inline AttributeCategory make_category(std::string name, std::vector<std::string> attrs,
                                       CategoryKind kind = CategoryKind::ImageLevel,
                                       CaptionTemplate tmpl = CaptionTemplate::Identity) {
    AttributeCategory c;
    c.name = std::move(name);
    c.attributes = std::move(attrs);
    c.kind = kind;
    c.caption_template = tmpl;
    return c;
}

inline std::vector<double> random_unit_vector(std::mt19937& rng, std::size_t dim) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> v(dim);
    double norm2 = 0;
    do {
        norm2 = 0;
        for (auto& x : v) {
            x = gauss(rng);
            norm2 += x * x;
        }
    } while (norm2 == 0.0);
    double inv = 1.0 / std::sqrt(norm2);
    for (auto& x : v) x *= inv;
    return v;
}

/// A random store pair sharing one schema, for diff properties.
inline AnnotationStore random_store(const AttributeSchema& schema, std::size_t n_images,
                                    std::mt19937& rng, double alpha = 0.3) {
    AnnotationStore store;
    store.schema = schema;
    store.alpha = alpha;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t i = 0; i < n_images; ++i) {
        std::string id = "img" + std::to_string(i);
        for (const auto& cat : schema.categories) {
            AnnotationRecord rec;
            rec.image_id = id;
            rec.category_name = cat.name;
            rec.kind = cat.kind;
            if (cat.kind == CategoryKind::ImageLevel) {
                double base = unit(rng);
                double best = -1.0;
                std::size_t best_idx = 0;
                for (std::size_t a = 0; a < cat.attributes.size(); ++a) {
                    double s = unit(rng);
                    rec.attribute_scores[cat.attributes[a]] = s;
                    if (s > best) {
                        best = s;
                        best_idx = a;
                    }
                }
                rec.attribute_scores[std::string(kBaseScoreKey)] = base;
                if (best > base) rec.chosen_attribute = cat.attributes[best_idx];
            } else {
                for (const auto& attr : cat.attributes) {
                    double s = unit(rng);
                    rec.attribute_scores[attr] = s;
                    if (s > alpha)
                        rec.detections[attr] = {DetectionBox{0, 0, 10, 10, s}};
                }
            }
            store.insert(std::move(rec));
        }
    }
    return store;
}

}  // namespace attrlens::testing
