#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "coherelint/embedding.hpp"
#include "support/synthetic.hpp"

using namespace coherelint;

namespace {

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("coherelint_" + name);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

ErrorKind load_error(const std::filesystem::path& path, VectorFormat format, std::string* message = nullptr) {
    try {
        load_word_vectors(path.string(), format);
    } catch (const Error& e) {
        if (message) *message = e.what();
        return e.kind();
    }
    ADD_FAILURE() << "expected a load error";
    return ErrorKind::InvalidArgument;
}

double cosine(std::span<const float> a, std::span<const float> b) {
    double ab = 0, aa = 0, bb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ab += a[i] * b[i];
        aa += a[i] * a[i];
        bb += b[i] * b[i];
    }
    return ab / std::sqrt(aa * bb);
}

}  // namespace

TEST(VectorStore, ParsesTextFormat) {
    const auto path = temp_file("vec_small.txt");
    write_text(path, "2 3\nfoo 1 0 0\nbar 0 1 0");
    const auto store = load_word_vectors(path.string(), VectorFormat::Text);
    EXPECT_EQ(store.size(), 2u);
    EXPECT_EQ(store.dim(), 3u);
    const auto foo = store.find("foo");
    ASSERT_TRUE(foo);
    EXPECT_EQ(std::vector<float>(foo->begin(), foo->end()), (std::vector<float>{1, 0, 0}));
    std::filesystem::remove(path);
}

TEST(VectorStore, TextDimensionMismatchNamesLine) {
    const auto path = temp_file("vec_bad.txt");
    write_text(path, "2 3\nfoo 1 0 0\nbar 0 1\n");
    std::string message;
    EXPECT_EQ(load_error(path, VectorFormat::Text, &message), ErrorKind::DimensionMismatch);
    EXPECT_NE(message.find("line 3"), std::string::npos) << message;
    std::filesystem::remove(path);
}

TEST(VectorStore, HeaderAndTruncationErrors) {
    const auto path = temp_file("vec_err.txt");
    write_text(path, "two 3\nfoo 1 0 0\n");
    EXPECT_EQ(load_error(path, VectorFormat::Text), ErrorKind::BadHeader);
    write_text(path, "3 3\nfoo 1 0 0\nbar 0 1 0\n");
    EXPECT_EQ(load_error(path, VectorFormat::Text), ErrorKind::TruncatedFile);

    VectorStore store(4);
    store.add("alpha", std::vector<float>{1, 2, 3, 4});
    store.add("beta", std::vector<float>{5, 6, 7, 8});
    save_word_vectors(store, path.string(), VectorFormat::Binary);
    const auto size = std::filesystem::file_size(path);
    std::filesystem::resize_file(path, size - 3);
    EXPECT_EQ(load_error(path, VectorFormat::Binary), ErrorKind::TruncatedFile);
    std::filesystem::remove(path);
}

TEST(VectorStore, BinaryLayoutIsWord2VecConvention) {
    VectorStore store(2);
    store.add("ab", std::vector<float>{1.0f, -2.5f});
    const auto path = temp_file("vec_layout.bin");
    save_word_vectors(store, path.string(), VectorFormat::Binary);
    std::ifstream in(path, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)), {});
    // "1 2\n" "ab " then two little-endian floats
    const std::string expected = std::string("1 2\nab ") + std::string("\x00\x00\x80\x3f", 4) +
                                 std::string("\x00\x00\x20\xc0", 4);
    EXPECT_EQ(bytes, expected);
    std::filesystem::remove(path);
}

TEST(VectorStore, BinaryReaderToleratesNewlineAfterVectors) {
    const auto path = temp_file("vec_nl.bin");
    std::string bytes = "2 1\nx " + std::string("\x00\x00\x80\x3f", 4) + "\ny " + std::string("\x00\x00\x00\x40", 4) + "\n";
    write_text(path, bytes);
    const auto store = load_word_vectors(path.string(), VectorFormat::Binary);
    ASSERT_EQ(store.size(), 2u);
    EXPECT_EQ((*store.find("y"))[0], 2.0f);
    std::filesystem::remove(path);
}

TEST(VectorStore, RoundTripBothFormats) {
    const auto store = synth::random_store(synth::filler_words(200), 17, 3);
    for (auto format : {VectorFormat::Binary, VectorFormat::Text}) {
        const auto path = temp_file(format == VectorFormat::Binary ? "rt.bin" : "rt.txt");
        save_word_vectors(store, path.string(), format);
        EXPECT_EQ(load_word_vectors(path.string(), format), store);
        std::filesystem::remove(path);
    }
}

TEST(VectorStore, DuplicatesLastWinsAndFilteredLoad) {
    const auto path = temp_file("vec_dup.txt");
    write_text(path, "3 2\na 1 1\nb 2 2\na 3 3\n");
    const auto store = load_word_vectors(path.string(), VectorFormat::Text);
    EXPECT_EQ(store.size(), 2u);
    EXPECT_EQ(store.duplicates(), 1u);
    EXPECT_EQ((*store.find("a"))[0], 3.0f);

    const std::unordered_set<std::string> keep = {"b"};
    const auto filtered = load_word_vectors(path.string(), VectorFormat::Text, &keep);
    EXPECT_EQ(filtered.size(), 1u);
    EXPECT_TRUE(filtered.find("b"));
    std::filesystem::remove(path);
}

TEST(VectorStore, LookupFallsBackToLowercase) {
    VectorStore store(1);
    store.add("inventory", std::vector<float>{1});
    store.add("Name", std::vector<float>{2});
    EXPECT_EQ((*store.lookup("Inventory"))[0], 1.0f);
    EXPECT_EQ((*store.lookup("Name"))[0], 2.0f);
    EXPECT_FALSE(store.lookup("name"));
    EXPECT_FALSE(store.lookup("missing"));
}

TEST(SkipGram, VocabularyAndShape) {
    const auto pairs = synth::java_like_corpus(6, 4);
    std::set<std::string> distinct;
    for (const auto& p : pairs)
        for (const auto& t : pair_tokens(p).tokens) distinct.insert(t);
    SkipGramConfig cfg;
    cfg.dim = 16;
    cfg.epochs = 1;
    const auto store = train_skipgram(pairs, cfg);
    EXPECT_EQ(store.size(), distinct.size());
    EXPECT_EQ(store.dim(), 16u);
    for (std::size_t i = 0; i < store.size(); ++i) EXPECT_EQ(store.vector_at(i).size(), 16u);
}

TEST(SkipGram, DeterministicAndMinCount) {
    const auto pairs = synth::java_like_corpus(6, 4);
    SkipGramConfig cfg;
    cfg.dim = 8;
    cfg.epochs = 2;
    cfg.seed = 9;
    EXPECT_EQ(train_skipgram(pairs, cfg), train_skipgram(pairs, cfg));
    cfg.min_count = 1000000;
    try {
        train_skipgram(pairs, cfg);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::EmptyCorpus);
    }
    try {
        train_skipgram({}, SkipGramConfig{});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::EmptyCorpus);
    }
}

TEST(SkipGram, CooccurringWordsEndUpCloser) {
    // Filler words come in six topics and a sentence draws from one topic, so
    // random filler pairs mostly span topics. "open"/"close" always sit next
    // to "file" and appear in sentences of every topic.
    Rng rng(12);
    const auto filler = synth::filler_words(60);
    auto topic_word = [&](std::size_t topic) { return filler[topic * 10 + uniform_index(rng, 10)]; };
    std::vector<CodeCommentPair> pairs;
    for (int i = 0; i < 600; ++i) {
        const std::size_t topic = uniform_index(rng, 6);
        std::string text;
        for (int k = 0; k < 6; ++k) text += topic_word(topic) + " ";
        if (i % 2 == 0) text += (i % 4 == 0 ? "open file " : "close file ");
        for (int k = 0; k < 6; ++k) text += topic_word(topic) + " ";
        pairs.push_back({std::to_string(i), "P", text, "", Label::Coherent});
    }
    SkipGramConfig cfg;
    cfg.dim = 24;
    cfg.epochs = 5;
    cfg.window = 2;
    cfg.seed = 3;
    const auto store = train_skipgram(pairs, cfg);
    const double target = cosine(*store.find("open"), *store.find("file"));
    double mean = 0.0;
    for (int i = 0; i < 100; ++i) {
        const auto& a = filler[uniform_index(rng, filler.size())];
        auto b = filler[uniform_index(rng, filler.size())];
        while (b == a) b = filler[uniform_index(rng, filler.size())];
        mean += cosine(*store.find(a), *store.find(b)) / 100.0;
    }
    EXPECT_GT(target, mean);
    EXPECT_GT(cosine(*store.find("close"), *store.find("file")), mean);
}

TEST(Encode, PadsShortSequences) {
    const auto store = synth::random_store({"a", "b", "c"}, 4, 1);
    const auto x = encode_pair({{"a", "b", "c"}, "id"}, store, {50, 4});
    EXPECT_EQ(x.matrix.rows(), 50u);
    EXPECT_EQ(x.matrix.cols(), 4u);
    EXPECT_EQ(x.true_len, 3u);
    EXPECT_EQ(x.oov_count, 0u);
    for (std::size_t t = 0; t < 3; ++t) {
        const auto v = *store.find(std::string(1, static_cast<char>('a' + t)));
        for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(x.matrix(t, j), static_cast<double>(v[j]));
    }
    for (std::size_t t = 3; t < 50; ++t)
        for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(x.matrix(t, j), 0.0);
}

TEST(Encode, TruncatesToPrefix) {
    auto words = synth::filler_words(120);
    const auto store = synth::random_store(words, 3, 2);
    const auto x = encode_pair({words, "long"}, store, {50, 3});
    EXPECT_EQ(x.true_len, 50u);
    EXPECT_EQ(x.matrix.rows(), 50u);
    // row 49 is token 50 (w49); tokens 51..120 never appear
    EXPECT_EQ(x.matrix(49, 0), static_cast<double>((*store.find("w49"))[0]));
}

TEST(Encode, OovOnlyGivesZeroMatrix) {
    const auto store = synth::random_store({"a"}, 5, 1);
    const auto x = encode_pair({{"zzz"}, "o"}, store, {50, 5});
    EXPECT_EQ(x.oov_count, 1u);
    EXPECT_EQ(x.true_len, 1u);
    for (double v : x.matrix.flat()) EXPECT_EQ(v, 0.0);
}

TEST(Encode, DimensionMustMatchStore) {
    const auto store = synth::random_store({"a"}, 5, 1);
    EXPECT_THROW(encode_pair({{"a"}, "x"}, store, {50, 6}), Error);
}

TEST(Encode, DatasetKeepsOrderAndTimes) {
    const auto pairs = synth::java_like_corpus(5, 3);
    const auto store = synth::random_store(synth::filler_words(5), 6, 1);
    const auto out = encode_dataset(pairs, store, {50, 6});
    ASSERT_EQ(out.items.size(), pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) EXPECT_EQ(out.items[i].source_id, pairs[i].id);
    EXPECT_GT(out.elapsed.count(), 0);
    EXPECT_TRUE(encode_dataset({}, store, {50, 6}).items.empty());
}
