#include <gtest/gtest.h>

#include "coherelint/tokenizer.hpp"
#include "support/synthetic.hpp"

using namespace coherelint;

using Tokens = std::vector<std::string>;

namespace {

bool is_word(const std::string& t) { return !detail::is_punct(t[0]); }

Tokens words_only(const Tokens& tokens) {
    Tokens out;
    for (const auto& t : tokens)
        if (is_word(t)) out.push_back(t);
    return out;
}

std::string join(const Tokens& tokens) {
    std::string s;
    for (const auto& t : tokens) {
        if (!s.empty()) s += ' ';
        s += t;
    }
    return s;
}

}  // namespace

TEST(Tokenize, WhitespaceSplit) { EXPECT_EQ(tokenize("return the inventory"), (Tokens{"return", "the", "inventory"})); }

TEST(Tokenize, PunctuationAndCompoundOperators) {
    EXPECT_EQ(tokenize("if (x==y) return;"), (Tokens{"if", "(", "x", "==", "y", ")", "return", ";"}));
    EXPECT_EQ(tokenize("a!=b&&c||d->e<=f>=g++ h--"),
              (Tokens{"a", "!=", "b", "&&", "c", "||", "d", "->", "e", "<=", "f", ">=", "g", "++", "h", "--"}));
    EXPECT_EQ(tokenize("x+=1;"), (Tokens{"x", "+", "=", "1", ";"}));
    EXPECT_EQ(tokenize("@Override"), (Tokens{"@", "Override"}));
}

TEST(Tokenize, EmptyInput) {
    EXPECT_TRUE(tokenize("").empty());
    EXPECT_TRUE(tokenize("   \n\t ").empty());
}

TEST(Tokenize, StripsCommentMarkers) {
    EXPECT_EQ(tokenize("/**\n * Returns the name.\n */"), (Tokens{"Returns", "the", "name", "."}));
    EXPECT_EQ(tokenize("// adds one"), (Tokens{"adds", "one"}));
    EXPECT_EQ(tokenize("/* inline */"), (Tokens{"inline"}));
    // markers only at line starts: a multiplication inside code survives
    EXPECT_EQ(tokenize("a = b * c;"), (Tokens{"a", "=", "b", "*", "c", ";"}));
}

TEST(Tokenize, IdentifierSplittingIsOptIn) {
    EXPECT_EQ(tokenize("getItemCount max_value"), (Tokens{"getItemCount", "max_value"}));
    TokenizerOptions split{true};
    EXPECT_EQ(tokenize("getItemCount max_value HTTPServer", split),
              (Tokens{"get", "Item", "Count", "max", "value", "HTTP", "Server"}));
}

TEST(PairTokens, CommentThenCode) {
    CodeCommentPair p{"1", "P", "returns x", "return x;", Label::Coherent};
    const auto seq = pair_tokens(p);
    EXPECT_EQ(seq.tokens, (Tokens{"returns", "x", "return", "x", ";"}));
    EXPECT_EQ(seq.source_id, "1");
    p.comment.clear();
    EXPECT_EQ(pair_tokens(p).tokens, (Tokens{"return", "x", ";"}));
}

TEST(PairTokens, JavadocPairStartsWithCommentWord) {
    // A coherent getter in the style of the reference dataset.
    CodeCommentPair p{"fig", "CoffeeMaker", "/**\n * Returns the inventory of the coffee maker.\n */",
                      "public String checkInventory() {\n    return inventory.toString();\n}", Label::Coherent};
    const auto seq = pair_tokens(p);
    ASSERT_FALSE(seq.tokens.empty());
    EXPECT_EQ(seq.tokens.front(), "Returns");
    EXPECT_EQ(seq.tokens.back(), "}");
}

TEST(TokenizeProperty, NoWhitespaceOrEmptyTokens) {
    Rng rng(1);
    const std::string alphabet = "abXY_09 \t\n(){}[];,.+-*/=<>!&|%^~?:@#\"'";
    for (int trial = 0; trial < 300; ++trial) {
        std::string text;
        const auto len = uniform_index(rng, 80);
        for (std::size_t i = 0; i < len; ++i) text.push_back(alphabet[uniform_index(rng, alphabet.size())]);
        for (const auto& t : tokenize(text)) {
            ASSERT_FALSE(t.empty());
            for (char c : t) ASSERT_FALSE(detail::is_space(c)) << "in '" << t << "'";
        }
        // word tokens survive a re-tokenization of the space-joined output
        const auto once = tokenize(text);
        EXPECT_EQ(words_only(tokenize(join(once))), words_only(once)) << text;
    }
}

TEST(TokenizeProperty, SwappingWordsSwapsTokens) {
    Rng rng(5);
    const auto vocab = synth::filler_words(30);
    for (int trial = 0; trial < 200; ++trial) {
        Tokens words;
        const auto n = 2 + uniform_index(rng, 10);
        for (std::size_t i = 0; i < n; ++i) words.push_back(vocab[uniform_index(rng, vocab.size())]);
        const auto i = uniform_index(rng, n), j = uniform_index(rng, n);
        if (words[i] == words[j]) continue;
        Tokens swapped = words;
        std::swap(swapped[i], swapped[j]);
        auto expected = tokenize(join(words));
        std::swap(expected[i], expected[j]);
        EXPECT_EQ(tokenize(join(swapped)), expected);
    }
}

TEST(CorpusStats, MeanMaxHistogram) {
    std::vector<CodeCommentPair> pairs = {
        {"a", "P", "w w w w w w w w w w", "", Label::Coherent},
        {"b", "P", "w w w w w w w w w w", "w w w w w w w w w w", Label::Incoherent},
    };
    const auto s = corpus_stats(pairs, 10);
    EXPECT_DOUBLE_EQ(s.mean_length, 15.0);
    EXPECT_EQ(s.max_length, 20u);
    EXPECT_EQ(s.histogram.at(10), 1u);
    EXPECT_EQ(s.histogram.at(20), 1u);

    const auto single = corpus_stats({pairs[0]});
    EXPECT_DOUBLE_EQ(single.mean_length, 10.0);
}

TEST(CorpusStats, EmptyCorpusRejected) {
    try {
        corpus_stats({});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::EmptyCorpus);
    }
}

TEST(CorpusStats, PrintsAlignedTable) {
    std::ostringstream out;
    print_stats(out, corpus_stats(synth::java_like_corpus(5, 1)));
    EXPECT_NE(out.str().find("mean length"), std::string::npos);
    EXPECT_NE(out.str().find("25-49"), std::string::npos);
}
