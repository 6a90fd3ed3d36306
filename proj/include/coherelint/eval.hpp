#pragma once

// Classification metrics, per-project result tables and the embedding-time
// benchmark.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "coherelint/baseline.hpp"
#include "coherelint/corpus.hpp"
#include "coherelint/embedding.hpp"
#include "coherelint/error.hpp"
#include "coherelint/neurnet.hpp"

namespace coherelint {

enum class DegenerateFlag { NoPositivePredictions, NoPositiveLabels };

struct MetricsReport {
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
    double accuracy = 0.0, precision = 0.0, recall = 0.0, f1 = 0.0;
    Label positive_class = Label::Coherent;
    std::set<DegenerateFlag> degenerate;

    std::size_t total() const noexcept { return tp + fp + fn + tn; }
    bool operator==(const MetricsReport&) const = default;
};

/// Derives the four rates from the confusion counts. A zero denominator gives
/// 0 and raises the matching flag.
inline MetricsReport from_counts(std::size_t tp, std::size_t fp, std::size_t fn, std::size_t tn,
                                 Label positive = Label::Coherent) {
    MetricsReport r;
    r.tp = tp;
    r.fp = fp;
    r.fn = fn;
    r.tn = tn;
    r.positive_class = positive;
    const auto d = [](std::size_t v) { return static_cast<double>(v); };
    if (r.total() > 0) r.accuracy = d(tp + tn) / d(r.total());
    if (tp + fp > 0) r.precision = d(tp) / d(tp + fp);
    else r.degenerate.insert(DegenerateFlag::NoPositivePredictions);
    if (tp + fn > 0) r.recall = d(tp) / d(tp + fn);
    else r.degenerate.insert(DegenerateFlag::NoPositiveLabels);
    if (r.precision + r.recall > 0.0) r.f1 = 2.0 * r.precision * r.recall / (r.precision + r.recall);
    return r;
}

inline MetricsReport compute_metrics(std::span<const Label> predictions, std::span<const Label> labels,
                                     Label positive = Label::Coherent) {
    if (predictions.size() != labels.size())
        throw Error(ErrorKind::LengthMismatch, std::to_string(predictions.size()) + " predictions for " +
                                                   std::to_string(labels.size()) + " labels");
    require(!labels.empty(), "metrics need at least one prediction");
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const bool pred = predictions[i] == positive, truth = labels[i] == positive;
        if (pred && truth) ++tp;
        else if (pred) ++fp;
        else if (truth) ++fn;
        else ++tn;
    }
    return from_counts(tp, fp, fn, tn, positive);
}

/// Sums confusion counts and recomputes the rates.
inline MetricsReport pool(std::span<const MetricsReport> reports) {
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
    Label positive = reports.empty() ? Label::Coherent : reports.front().positive_class;
    for (const auto& r : reports) {
        tp += r.tp;
        fp += r.fp;
        fn += r.fn;
        tn += r.tn;
    }
    return from_counts(tp, fp, fn, tn, positive);
}

inline std::vector<Label> predict_all(const RecurrentModel& model, std::span<const EmbeddedPair> inputs) {
    std::vector<Label> out;
    out.reserve(inputs.size());
    for (const auto& x : inputs) out.push_back(predict(model, x.matrix));
    return out;
}

inline std::vector<Label> predict_all(const SvmClassifier& clf, std::span<const CodeCommentPair> pairs,
                                      const TokenizerOptions& tok = {}) {
    std::vector<Label> out;
    out.reserve(pairs.size());
    for (const auto& p : pairs) out.push_back(svm_predict(clf.svm, tfidf_transform(clf.features, p, tok)).label);
    return out;
}

inline std::vector<Label> labels_of(std::span<const CodeCommentPair> pairs) {
    std::vector<Label> out;
    out.reserve(pairs.size());
    for (const auto& p : pairs) out.push_back(p.label);
    return out;
}

inline MetricsReport evaluate(const RecurrentModel& model, std::span<const EmbeddedPair> inputs,
                              std::span<const Label> labels) {
    return compute_metrics(predict_all(model, inputs), labels);
}

inline MetricsReport evaluate(const SvmClassifier& clf, std::span<const CodeCommentPair> test_set,
                              const TokenizerOptions& tok = {}) {
    return compute_metrics(predict_all(clf, test_set, tok), labels_of(test_set));
}

inline constexpr std::string_view kAllRow = "All";
inline constexpr std::string_view kMissingCell = "—";

/// Rows x methods grid of metric reports.
class ReportTable {
public:
    ReportTable() {
        for (auto p : kKnownProjects) rows_.emplace_back(p);
        rows_.emplace_back(kAllRow);
    }

    void set(const std::string& row, const std::string& method, const MetricsReport& report) {
        if (std::find(rows_.begin(), rows_.end(), row) == rows_.end()) rows_.insert(rows_.end() - 1, row);
        if (std::find(methods_.begin(), methods_.end(), method) == methods_.end()) methods_.push_back(method);
        cells_[{row, method}] = report;
    }

    /// Declares a method column even if it has no results yet.
    void add_method(const std::string& method) {
        if (std::find(methods_.begin(), methods_.end(), method) == methods_.end()) methods_.push_back(method);
    }

    const MetricsReport* get(const std::string& row, const std::string& method) const {
        auto it = cells_.find({row, method});
        return it == cells_.end() ? nullptr : &it->second;
    }

    const std::vector<std::string>& rows() const noexcept { return rows_; }
    const std::vector<std::string>& methods() const noexcept { return methods_; }

private:
    std::vector<std::string> rows_;
    std::vector<std::string> methods_;
    std::map<std::pair<std::string, std::string>, MetricsReport> cells_;
};

/// Fills one method column from per-item predictions: a row per project with
/// test items, and the All row from the pooled confusion counts.
inline void add_predictions(ReportTable& table, const std::string& method, std::span<const std::string> projects,
                            std::span<const Label> predictions, std::span<const Label> labels) {
    if (projects.size() != predictions.size() || predictions.size() != labels.size())
        throw Error(ErrorKind::LengthMismatch, "projects, predictions and labels differ in length");
    table.add_method(method);
    std::map<std::string, std::pair<std::vector<Label>, std::vector<Label>>> by_project;
    for (std::size_t i = 0; i < projects.size(); ++i) {
        by_project[projects[i]].first.push_back(predictions[i]);
        by_project[projects[i]].second.push_back(labels[i]);
    }
    std::vector<MetricsReport> parts;
    for (const auto& [project, pl] : by_project) {
        parts.push_back(compute_metrics(pl.first, pl.second));
        table.set(project, method, parts.back());
    }
    if (!parts.empty()) table.set(std::string(kAllRow), method, pool(parts));
}

/// Builds the table for several methods evaluated on the same test pairs.
inline ReportTable per_project_report(
    std::span<const CodeCommentPair> test_set,
    const std::vector<std::pair<std::string, std::vector<Label>>>& method_predictions) {
    std::vector<std::string> projects;
    for (const auto& p : test_set) projects.push_back(p.project);
    const auto labels = labels_of(test_set);
    ReportTable table;
    for (const auto& [method, preds] : method_predictions) add_predictions(table, method, projects, preds, labels);
    return table;
}

inline constexpr std::array<std::string_view, 4> kRateMetrics = {"accuracy", "precision", "recall", "f1"};

inline std::optional<double> metric_value(const MetricsReport& r, std::string_view metric) {
    if (metric == "accuracy") return r.accuracy;
    if (metric == "precision") return r.precision;
    if (metric == "recall") return r.recall;
    if (metric == "f1") return r.f1;
    if (metric == "tp") return static_cast<double>(r.tp);
    if (metric == "fp") return static_cast<double>(r.fp);
    if (metric == "fn") return static_cast<double>(r.fn);
    if (metric == "tn") return static_cast<double>(r.tn);
    return std::nullopt;
}

inline std::string format_fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

/// `row,method,metric,value` with rates to 6 decimals and confusion counts as
/// integers; absent cells hold an em dash.
inline void write_report_csv(std::ostream& out, const ReportTable& table) {
    out << "row,method,metric,value\n";
    static constexpr std::array<std::string_view, 8> metrics = {"accuracy", "precision", "recall", "f1",
                                                                "tp",       "fp",        "fn",     "tn"};
    for (const auto& row : table.rows()) {
        for (const auto& method : table.methods()) {
            const auto* cell = table.get(row, method);
            for (std::size_t m = 0; m < metrics.size(); ++m) {
                std::string value(kMissingCell);
                if (cell) {
                    const double v = *metric_value(*cell, metrics[m]);
                    value = m < 4 ? format_fixed(v, 6) : std::to_string(static_cast<std::size_t>(v));
                }
                csv::write_row(out, {row, method, metrics[m], value});
            }
        }
    }
}

struct ReportEntry {
    std::string row, method, metric;
    std::optional<double> value;
    bool operator==(const ReportEntry&) const = default;
};

inline std::vector<ReportEntry> parse_report_csv(std::string_view text) {
    auto records = csv::parse(text);
    if (records.empty() || records[0].fields != std::vector<std::string>{"row", "method", "metric", "value"})
        throw Error(ErrorKind::BadHeader, "report CSV must start with 'row,method,metric,value'");
    std::vector<ReportEntry> out;
    for (std::size_t i = 1; i < records.size(); ++i) {
        const auto& f = records[i].fields;
        if (f.size() != 4)
            throw Error(ErrorKind::MalformedRow, "report line " + std::to_string(records[i].line) + " needs 4 fields");
        ReportEntry e{f[0], f[1], f[2], std::nullopt};
        if (f[3] != kMissingCell) {
            try {
                std::size_t used = 0;
                e.value = std::stod(f[3], &used);
                if (used != f[3].size()) throw std::invalid_argument(f[3]);
            } catch (const std::exception&) {
                throw Error(ErrorKind::MalformedRow, "report line " + std::to_string(records[i].line) +
                                                         ": bad value '" + f[3] + "'");
            }
        }
        out.push_back(std::move(e));
    }
    return out;
}

/// Aligned text rendering, one block per metric with rows x methods.
inline void write_report_text(std::ostream& out, const ReportTable& table) {
    out << "positive class: " << to_string(Label::Coherent) << '\n';
    std::size_t row_width = 7;
    for (const auto& r : table.rows()) row_width = std::max(row_width, r.size());
    std::size_t col_width = 7;
    for (const auto& m : table.methods()) col_width = std::max(col_width, m.size() + 1);
    for (auto metric : kRateMetrics) {
        out << '\n' << std::left << std::setw(static_cast<int>(row_width + 2)) << metric;
        for (const auto& m : table.methods()) out << std::right << std::setw(static_cast<int>(col_width)) << m;
        out << '\n';
        for (const auto& row : table.rows()) {
            out << std::left << std::setw(static_cast<int>(row_width + 2)) << row;
            for (const auto& m : table.methods()) {
                const auto* cell = table.get(row, m);
                // The em dash is three bytes but one column wide.
                const std::string text = cell ? format_fixed(*metric_value(*cell, metric), 3) : std::string(kMissingCell);
                const std::size_t shown = cell ? text.size() : 1;
                out << std::string(col_width > shown ? col_width - shown : 0, ' ') << text;
            }
            out << '\n';
        }
    }
}

struct TimingRecord {
    std::string dataset;
    std::string method;
    double wall_minutes = 0.0;
};

struct NamedDataset {
    std::string name;
    std::vector<CodeCommentPair> pairs;
};

/// A text-to-features conversion to be timed.
struct EmbeddingMethod {
    std::string name;
    std::function<void(const std::vector<CodeCommentPair>&)> run;
};

inline EmbeddingMethod word_vector_method(const VectorStore& store, EncoderConfig cfg, TokenizerOptions tok = {}) {
    return {"word-vectors", [&store, cfg, tok](const std::vector<CodeCommentPair>& pairs) {
                auto encoded = encode_dataset(pairs, store, cfg, tok);
                (void)encoded;
            }};
}

inline EmbeddingMethod tfidf_method(bool raw_counts = false, TokenizerOptions tok = {}) {
    return {"tfidf", [raw_counts, tok](const std::vector<CodeCommentPair>& pairs) {
                if (pairs.empty()) return;
                const auto model = tfidf_fit(pairs, raw_counts, tok);
                std::size_t nnz = 0;
                for (const auto& p : pairs) nnz += tfidf_transform(model, p, tok).entries.size();
                (void)nnz;
            }};
}

/// Times every method on every dataset, serially.
inline std::vector<TimingRecord> benchmark_embedding(const std::vector<NamedDataset>& datasets,
                                                     const std::vector<EmbeddingMethod>& methods) {
    std::vector<TimingRecord> out;
    for (const auto& d : datasets) {
        for (const auto& m : methods) {
            const auto start = std::chrono::steady_clock::now();
            m.run(d.pairs);
            auto elapsed = std::chrono::duration<double, std::ratio<60>>(std::chrono::steady_clock::now() - start);
            const double minutes = std::max(elapsed.count(), 1e-12);
            out.push_back({d.name, m.name, minutes});
        }
    }
    return out;
}

inline void write_timings_csv(std::ostream& out, const std::vector<TimingRecord>& records) {
    out << "dataset,method,wall_minutes\n";
    for (const auto& r : records) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.9f", r.wall_minutes);
        csv::write_row(out, {r.dataset, r.method, buf});
    }
}

inline void write_timings_text(std::ostream& out, const std::vector<TimingRecord>& records) {
    std::size_t dw = 7, mw = 6;
    for (const auto& r : records) {
        dw = std::max(dw, r.dataset.size());
        mw = std::max(mw, r.method.size());
    }
    out << std::left << std::setw(static_cast<int>(dw + 2)) << "dataset" << std::setw(static_cast<int>(mw + 2))
        << "method" << "minutes\n";
    for (const auto& r : records) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.6f", r.wall_minutes);
        out << std::left << std::setw(static_cast<int>(dw + 2)) << r.dataset << std::setw(static_cast<int>(mw + 2))
            << r.method << buf << '\n';
    }
}

}  // namespace coherelint
