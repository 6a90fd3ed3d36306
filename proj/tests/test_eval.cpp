#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "coherelint/eval.hpp"
#include "support/synthetic.hpp"

using namespace coherelint;

namespace {

constexpr Label C = Label::Coherent;
constexpr Label I = Label::Incoherent;

std::vector<Label> random_labels(Rng& rng, std::size_t n) {
    std::vector<Label> out(n);
    for (auto& l : out) l = uniform_index(rng, 2) ? C : I;
    return out;
}

// Direct transcription of the textbook definitions, kept apart from the
// library's counting code.
struct Reference {
    double accuracy, precision, recall, f1;
};

Reference reference_metrics(const std::vector<Label>& pred, const std::vector<Label>& truth) {
    double tp = 0, fp = 0, fn = 0, correct = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        correct += pred[i] == truth[i];
        tp += pred[i] == C && truth[i] == C;
        fp += pred[i] == C && truth[i] == I;
        fn += pred[i] == I && truth[i] == C;
    }
    Reference r{};
    r.accuracy = correct / static_cast<double>(pred.size());
    r.precision = tp + fp > 0 ? tp / (tp + fp) : 0.0;
    r.recall = tp + fn > 0 ? tp / (tp + fn) : 0.0;
    r.f1 = r.precision + r.recall > 0 ? 2 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
    return r;
}

}  // namespace

TEST(Metrics, SmallWorkedExample) {
    const std::vector<Label> pred = {C, C, C, I, I}, truth = {C, C, I, C, I};
    const auto r = compute_metrics(pred, truth);
    EXPECT_EQ(r.tp, 2u);
    EXPECT_EQ(r.fp, 1u);
    EXPECT_EQ(r.fn, 1u);
    EXPECT_EQ(r.tn, 1u);
    EXPECT_DOUBLE_EQ(r.accuracy, 0.6);
    EXPECT_EQ(format_fixed(r.precision, 4), "0.6667");
    EXPECT_EQ(format_fixed(r.recall, 4), "0.6667");
    EXPECT_EQ(format_fixed(r.f1, 4), "0.6667");
    EXPECT_TRUE(r.degenerate.empty());
}

TEST(Metrics, PerfectPredictions) {
    const std::vector<Label> truth = {C, I, C, C, I};
    const auto r = compute_metrics(truth, truth);
    EXPECT_EQ(r.accuracy, 1.0);
    EXPECT_EQ(r.precision, 1.0);
    EXPECT_EQ(r.recall, 1.0);
    EXPECT_EQ(r.f1, 1.0);
}

TEST(Metrics, NoPositivePredictionsIsFlagged) {
    const std::vector<Label> pred = {I, I, I, I}, truth = {C, I, C, I};
    const auto r = compute_metrics(pred, truth);
    EXPECT_EQ(r.precision, 0.0);
    EXPECT_EQ(r.f1, 0.0);
    EXPECT_DOUBLE_EQ(r.accuracy, 0.5);
    EXPECT_TRUE(r.degenerate.contains(DegenerateFlag::NoPositivePredictions));
    EXPECT_FALSE(r.degenerate.contains(DegenerateFlag::NoPositiveLabels));

    const auto none = compute_metrics(std::vector<Label>{I, I}, std::vector<Label>{I, I});
    EXPECT_TRUE(none.degenerate.contains(DegenerateFlag::NoPositiveLabels));
    EXPECT_EQ(none.accuracy, 1.0);
}

TEST(Metrics, MatchesReferenceOnRandomVectors) {
    Rng rng(99);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + uniform_index(rng, 200);
        const auto pred = random_labels(rng, n), truth = random_labels(rng, n);
        const auto r = compute_metrics(pred, truth);
        const auto ref = reference_metrics(pred, truth);
        EXPECT_NEAR(r.accuracy, ref.accuracy, 1e-12);
        EXPECT_NEAR(r.precision, ref.precision, 1e-12);
        EXPECT_NEAR(r.recall, ref.recall, 1e-12);
        EXPECT_NEAR(r.f1, ref.f1, 1e-12);
        EXPECT_GE(r.f1, std::min(r.precision, r.recall) - 1e-12);
        EXPECT_LE(r.f1, std::max(r.precision, r.recall) + 1e-12);
        EXPECT_EQ(r.total(), n);
    }
}

TEST(Metrics, PermutationInvariant) {
    Rng rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + uniform_index(rng, 50);
        auto pred = random_labels(rng, n), truth = random_labels(rng, n);
        const auto before = compute_metrics(pred, truth);
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        shuffle(order, rng);
        std::vector<Label> p2, t2;
        for (auto i : order) {
            p2.push_back(pred[i]);
            t2.push_back(truth[i]);
        }
        EXPECT_EQ(compute_metrics(p2, t2), before);
    }
}

TEST(Metrics, LengthMismatchAndEmpty) {
    try {
        compute_metrics(std::vector<Label>{C}, std::vector<Label>{C, I});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::LengthMismatch);
    }
    EXPECT_THROW(compute_metrics(std::vector<Label>{}, std::vector<Label>{}), Error);
}

TEST(Metrics, AlwaysCoherentOnBalancedSet) {
    std::vector<Label> truth;
    for (int i = 0; i < 100; ++i) truth.push_back(i % 2 ? C : I);
    const auto r = compute_metrics(std::vector<Label>(100, C), truth);
    EXPECT_DOUBLE_EQ(r.accuracy, 0.5);
    EXPECT_DOUBLE_EQ(r.recall, 1.0);
}

TEST(Metrics, PoolingSumsCounts) {
    const std::vector<MetricsReport> parts = {from_counts(2, 1, 0, 3), from_counts(1, 0, 2, 4)};
    const auto all = pool(parts);
    EXPECT_EQ(all.tp, 3u);
    EXPECT_EQ(all.tn, 7u);
    EXPECT_DOUBLE_EQ(all.accuracy, 10.0 / 13.0);
}

TEST(Report, AlwaysListsKnownProjectsAndAll) {
    ReportTable table;
    ASSERT_EQ(table.rows().size(), 6u);
    for (std::size_t i = 0; i < kKnownProjects.size(); ++i) EXPECT_EQ(table.rows()[i], kKnownProjects[i]);
    EXPECT_EQ(table.rows().back(), kAllRow);

    const auto pairs = synth::java_like_corpus(4, 3, 2);
    const auto report = per_project_report(pairs, {{"SVM", labels_of(pairs)}});
    EXPECT_EQ(report.rows().size(), 6u);
    EXPECT_TRUE(report.get(std::string(kKnownProjects[0]), "SVM"));
    EXPECT_FALSE(report.get(std::string(kKnownProjects[4]), "SVM"));

    std::ostringstream csv;
    write_report_csv(csv, report);
    EXPECT_NE(csv.str().find(std::string(kKnownProjects[4]) + ",SVM,accuracy,—"), std::string::npos);
}

TEST(Report, AllRowIsPooledNotAveraged) {
    const auto pairs = synth::java_like_corpus(10, 12);
    Rng rng(5);
    const auto preds = random_labels(rng, pairs.size());
    const auto table = per_project_report(pairs, {{"C2", preds}});
    const auto* all = table.get(std::string(kAllRow), "C2");
    ASSERT_TRUE(all);
    EXPECT_EQ(*all, compute_metrics(preds, labels_of(pairs)));
}

TEST(Report, CsvParsesBack) {
    const auto pairs = synth::java_like_corpus(6, 4);
    Rng rng(1);
    const auto table = per_project_report(pairs, {{"C1", random_labels(rng, pairs.size())},
                                                  {"SVM", random_labels(rng, pairs.size())}});
    std::ostringstream csv;
    write_report_csv(csv, table);
    const auto entries = parse_report_csv(csv.str());
    EXPECT_EQ(entries.size(), 6u * 2u * 8u);
    for (const auto& e : entries) {
        const auto* cell = table.get(e.row, e.method);
        ASSERT_TRUE(cell);
        ASSERT_TRUE(e.value);
        EXPECT_NEAR(*e.value, *metric_value(*cell, e.metric), 5e-7);
    }
    EXPECT_THROW(parse_report_csv("a,b\n"), Error);

    std::ostringstream text;
    write_report_text(text, table);
    EXPECT_EQ(text.str().rfind("positive class: coherent", 0), 0u);
}

TEST(Bench, OneRecordPerDatasetAndMethod) {
    const std::vector<NamedDataset> datasets = {{"small", synth::java_like_corpus(2, 1)},
                                                {"large", synth::java_like_corpus(8, 1)}};
    const auto records = benchmark_embedding(datasets, {tfidf_method()});
    ASSERT_EQ(records.size(), 2u);
    EXPECT_EQ(records[0].dataset, "small");
    EXPECT_EQ(records[1].method, "tfidf");
    for (const auto& r : records) EXPECT_GT(r.wall_minutes, 0.0);
    EXPECT_TRUE(benchmark_embedding(datasets, {}).empty());

    std::ostringstream csv;
    write_timings_csv(csv, records);
    EXPECT_EQ(csv.str().rfind("dataset,method,wall_minutes\n", 0), 0u);
}

TEST(Bench, NestedDatasetsTakeLonger) {
    // Encoding cost is linear in pairs; a 20x superset is reliably slower.
    const auto big = synth::java_like_corpus(400, 2);
    const std::vector<CodeCommentPair> small(big.begin(), big.begin() + 100);
    std::vector<std::string> vocab;
    for (const auto& t : token_inventory(big)) vocab.push_back(t);
    const auto store = synth::random_store(vocab, 64, 1);
    const auto records =
        benchmark_embedding({{"small", small}, {"big", big}}, {word_vector_method(store, {50, 64})});
    EXPECT_LT(records[0].wall_minutes, records[1].wall_minutes);
}
