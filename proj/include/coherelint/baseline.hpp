#pragma once

// Bag-of-words baseline: TF-IDF features and a linear SVM trained with the
// Pegasos stochastic sub-gradient method.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "coherelint/corpus.hpp"
#include "coherelint/error.hpp"
#include "coherelint/random.hpp"
#include "coherelint/serialize.hpp"
#include "coherelint/tokenizer.hpp"

namespace coherelint {

/// Sorted (column, value) entries.
struct SparseVector {
    std::vector<std::pair<std::uint32_t, double>> entries;

    double norm() const {
        double sq = 0.0;
        for (const auto& [_, v] : entries) sq += v * v;
        return std::sqrt(sq);
    }
};

/// Scales `v` to unit L2 norm; the zero vector stays zero.
inline void l2_normalize(SparseVector& v) {
    const double n = v.norm();
    if (n == 0.0) return;
    for (auto& [_, x] : v.entries) x /= n;
}

struct TfidfModel {
    std::unordered_map<std::string, std::uint32_t> vocabulary;
    std::vector<std::string> terms;  // column -> token
    std::vector<double> idf;
    /// Raw term counts: no idf weighting and no normalization.
    bool raw_counts = false;

    std::size_t dim() const noexcept { return terms.size(); }
};

/// idf_t = ln((1 + N) / (1 + df_t)) + 1 over the training pairs. Columns are
/// assigned in lexicographic token order.
inline TfidfModel tfidf_fit(const std::vector<TokenSequence>& docs, bool raw_counts = false) {
    if (docs.empty()) throw Error(ErrorKind::EmptyCorpus, "TF-IDF needs at least one training document");
    std::map<std::string, std::size_t> df;
    for (const auto& d : docs) {
        std::vector<std::string> unique(d.tokens);
        std::sort(unique.begin(), unique.end());
        unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
        for (auto& t : unique) ++df[t];
    }
    TfidfModel model;
    model.raw_counts = raw_counts;
    const double n = static_cast<double>(docs.size());
    for (const auto& [term, count] : df) {
        model.vocabulary.emplace(term, static_cast<std::uint32_t>(model.terms.size()));
        model.terms.push_back(term);
        model.idf.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(count))) + 1.0);
    }
    return model;
}

inline TfidfModel tfidf_fit(const std::vector<CodeCommentPair>& pairs, bool raw_counts = false,
                            const TokenizerOptions& tok = {}) {
    std::vector<TokenSequence> docs;
    docs.reserve(pairs.size());
    for (const auto& p : pairs) docs.push_back(pair_tokens(p, tok));
    return tfidf_fit(docs, raw_counts);
}

/// Tokens unseen at fit time are dropped.
inline SparseVector tfidf_transform(const TfidfModel& model, const TokenSequence& doc) {
    std::map<std::uint32_t, double> counts;
    for (const auto& t : doc.tokens) {
        auto it = model.vocabulary.find(t);
        if (it != model.vocabulary.end()) counts[it->second] += 1.0;
    }
    SparseVector out;
    out.entries.reserve(counts.size());
    for (const auto& [col, tf] : counts) out.entries.emplace_back(col, model.raw_counts ? tf : tf * model.idf[col]);
    if (!model.raw_counts) l2_normalize(out);
    return out;
}

inline SparseVector tfidf_transform(const TfidfModel& model, const CodeCommentPair& pair,
                                    const TokenizerOptions& tok = {}) {
    return tfidf_transform(model, pair_tokens(pair, tok));
}

struct LinearSvm {
    std::vector<double> w;
    double b = 0.0;
    double lambda = 1e-4;
};

inline double label_sign(Label label) { return label == Label::Coherent ? 1.0 : -1.0; }

inline double svm_margin(const LinearSvm& model, const SparseVector& x) {
    double m = model.b;
    for (const auto& [col, v] : x.entries) {
        if (col >= model.w.size()) {
            throw Error(ErrorKind::DimensionMismatch, "feature column " + std::to_string(col) +
                                                          " exceeds model dimension " + std::to_string(model.w.size()));
        }
        m += model.w[col] * v;
    }
    return m;
}

struct SvmPrediction {
    Label label = Label::Coherent;
    double margin = 0.0;
};

/// Coherent iff w.x + b >= 0.
inline SvmPrediction svm_predict(const LinearSvm& model, const SparseVector& x) {
    const double m = svm_margin(model, x);
    return {m >= 0.0 ? Label::Coherent : Label::Incoherent, m};
}

/// Dense-input overload; `x` must have exactly as many entries as `w`.
inline SvmPrediction svm_predict(const LinearSvm& model, std::span<const double> x) {
    if (x.size() != model.w.size()) {
        throw Error(ErrorKind::DimensionMismatch, "input has " + std::to_string(x.size()) + " features, model has " +
                                                      std::to_string(model.w.size()));
    }
    double m = model.b;
    for (std::size_t i = 0; i < x.size(); ++i) m += model.w[i] * x[i];
    return {m >= 0.0 ? Label::Coherent : Label::Incoherent, m};
}

/// lambda/2 (|w|^2 + b^2) + mean hinge loss.
inline double svm_objective(const LinearSvm& model, std::span<const SparseVector> xs, std::span<const Label> ys) {
    double hinge = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i)
        hinge += std::max(0.0, 1.0 - label_sign(ys[i]) * svm_margin(model, xs[i]));
    double sq = model.b * model.b;
    for (double v : model.w) sq += v * v;
    return 0.5 * model.lambda * sq + hinge / static_cast<double>(xs.size());
}

struct SvmConfig {
    double lambda = 1e-4;
    std::size_t epochs = 50;
    std::uint64_t seed = 42;
};

struct SvmTrainResult {
    LinearSvm model;
    /// Objective after each epoch; entry 0 is the objective of the zero model.
    std::vector<double> objective;
};

/// Pegasos: one pass over a fresh permutation per epoch, step 1/(lambda t),
/// followed by projection onto the ball of radius 1/sqrt(lambda). The bias is
/// learned as the weight of a constant feature.
inline SvmTrainResult svm_train(std::span<const SparseVector> xs, std::span<const Label> ys, std::size_t dim,
                                const SvmConfig& cfg) {
    if (xs.size() != ys.size()) throw Error(ErrorKind::LengthMismatch, "vectors and labels differ in length");
    require(cfg.lambda > 0.0, "SVM lambda must be positive");
    require(cfg.epochs >= 1, "SVM epochs must be at least 1");
    const bool has_pos = std::find(ys.begin(), ys.end(), Label::Coherent) != ys.end();
    const bool has_neg = std::find(ys.begin(), ys.end(), Label::Incoherent) != ys.end();
    if (!has_pos || !has_neg)
        throw Error(ErrorKind::SingleClassTrainingSet, "SVM training needs both coherent and incoherent examples");
    for (const auto& x : xs) {
        for (const auto& [col, _] : x.entries)
            if (col >= dim) throw Error(ErrorKind::DimensionMismatch, "feature column exceeds declared dimension");
    }

    // w = scale * v keeps the shrink step O(1).
    std::vector<double> v(dim + 1, 0.0);
    double scale = 1.0;
    double sq_norm = 0.0;  // |scale * v|^2
    const std::size_t bias = dim;

    auto snapshot = [&] {
        LinearSvm m;
        m.lambda = cfg.lambda;
        m.w.resize(dim);
        for (std::size_t i = 0; i < dim; ++i) m.w[i] = scale * v[i];
        m.b = scale * v[bias];
        return m;
    };

    SvmTrainResult result;
    result.objective.push_back(svm_objective(snapshot(), xs, ys));

    Rng rng(derive_seed(cfg.seed, "pegasos"));
    std::vector<std::size_t> order(xs.size());
    std::iota(order.begin(), order.end(), 0);
    std::uint64_t t = 0;
    const double radius_sq = 1.0 / cfg.lambda;

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        shuffle(order, rng);
        for (std::size_t i : order) {
            ++t;
            const double eta = 1.0 / (cfg.lambda * static_cast<double>(t));
            const double y = label_sign(ys[i]);
            double margin = v[bias];
            for (const auto& [col, val] : xs[i].entries) margin += v[col] * val;
            margin *= scale;

            const double shrink = 1.0 - eta * cfg.lambda;
            if (shrink <= 0.0) {
                std::fill(v.begin(), v.end(), 0.0);
                scale = 1.0;
                sq_norm = 0.0;
            } else {
                scale *= shrink;
                sq_norm *= shrink * shrink;
            }
            if (y * margin < 1.0) {
                const double step = eta * y / scale;
                auto add = [&](std::size_t col, double val) {
                    const double before = v[col];
                    v[col] += step * val;
                    sq_norm += scale * scale * (v[col] * v[col] - before * before);
                };
                for (const auto& [col, val] : xs[i].entries) add(col, val);
                add(bias, 1.0);
            }
            if (sq_norm > radius_sq) {
                const double f = std::sqrt(radius_sq / sq_norm);
                scale *= f;
                sq_norm = radius_sq;
            }
            if (scale < 1e-100) {
                for (double& x : v) x *= scale;
                scale = 1.0;
            }
        }
        result.objective.push_back(svm_objective(snapshot(), xs, ys));
    }
    result.model = snapshot();
    return result;
}

struct SvmClassifier {
    TfidfModel features;
    LinearSvm svm;
};

inline void write_svm(ByteWriter& out, const SvmClassifier& clf) {
    out.header(ModelKind::LinearSvm);
    out.u8(clf.features.raw_counts ? 1 : 0);
    out.f64(clf.svm.lambda);
    out.u32(static_cast<std::uint32_t>(clf.features.dim()));
    for (std::size_t i = 0; i < clf.features.dim(); ++i) {
        out.str(clf.features.terms[i]);
        out.f64(clf.features.idf[i]);
    }
    out.f64s(clf.svm.w);
    out.f64(clf.svm.b);
}

inline SvmClassifier read_svm_body(ByteReader& in, ModelKind kind) {
    if (kind != ModelKind::LinearSvm) throw Error(ErrorKind::CorruptFile, in.origin() + ": not an SVM model");
    SvmClassifier clf;
    clf.features.raw_counts = in.u8() != 0;
    clf.svm.lambda = in.f64();
    const auto dim = in.u32();
    for (std::uint32_t i = 0; i < dim; ++i) {
        clf.features.terms.push_back(in.str());
        clf.features.idf.push_back(in.f64());
        if (!clf.features.vocabulary.emplace(clf.features.terms.back(), i).second)
            throw Error(ErrorKind::CorruptFile, in.origin() + ": duplicate vocabulary term");
    }
    clf.svm.w.resize(dim);
    in.f64s(clf.svm.w);
    clf.svm.b = in.f64();
    return clf;
}

inline void save_svm(const SvmClassifier& clf, const std::string& path) {
    ByteWriter out;
    write_svm(out, clf);
    out.save(path);
}

inline SvmClassifier load_svm(const std::string& path) {
    ByteReader in(read_file(path), path);
    auto clf = read_svm_body(in, in.header());
    in.expect_end();
    return clf;
}

}  // namespace coherelint
