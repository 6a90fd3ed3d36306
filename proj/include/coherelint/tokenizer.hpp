#pragma once

// Order-preserving tokenization of comments and code.

#include <algorithm>
#include <cctype>
#include <iomanip>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "coherelint/corpus.hpp"
#include "coherelint/error.hpp"

namespace coherelint {

struct TokenizerOptions {
    /// Split identifiers at camelCase humps and underscores.
    bool split_identifiers = false;
};

struct TokenSequence {
    std::vector<std::string> tokens;
    std::string source_id;
};

namespace detail {

inline constexpr std::string_view kPunctuation = "(){}[];,.+-*/=<>!&|%^~?:@#\"'";

inline constexpr std::string_view kCompoundOperators[] = {"==", "!=", "<=", ">=", "&&",
                                                           "||", "++", "--", "->"};

inline bool is_punct(char c) { return kPunctuation.find(c) != std::string_view::npos; }

inline bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

/// Drops comment markers (`//`, `/*`, `*/`, `*`) at the start of a line and a
/// closing `*/` at its end.
inline std::string_view strip_comment_markers(std::string_view line) {
    auto skip_space = [&] {
        while (!line.empty() && is_space(line.front())) line.remove_prefix(1);
    };
    skip_space();
    for (;;) {
        if (line.starts_with("//")) {
            while (!line.empty() && line.front() == '/') line.remove_prefix(1);
        } else if (line.starts_with("/*")) {
            line.remove_prefix(2);
            while (!line.empty() && line.front() == '*' && !line.starts_with("*/")) line.remove_prefix(1);
        } else if (line.starts_with("*/")) {
            line.remove_prefix(2);
        } else if (line.starts_with("*")) {
            line.remove_prefix(1);
        } else {
            break;
        }
        skip_space();
    }
    while (!line.empty() && is_space(line.back())) line.remove_suffix(1);
    if (line.ends_with("*/")) {
        line.remove_suffix(2);
        while (!line.empty() && line.back() == '*') line.remove_suffix(1);
    }
    return line;
}

inline void split_identifier(const std::string& word, std::vector<std::string>& out) {
    std::string current;
    auto flush = [&] {
        if (!current.empty()) out.push_back(std::move(current));
        current.clear();
    };
    for (std::size_t i = 0; i < word.size(); ++i) {
        const auto c = static_cast<unsigned char>(word[i]);
        if (c == '_') {
            flush();
            continue;
        }
        if (std::isupper(c) && !current.empty()) {
            const auto prev = static_cast<unsigned char>(current.back());
            const bool next_lower =
                i + 1 < word.size() && std::islower(static_cast<unsigned char>(word[i + 1]));
            // fooBar -> foo|Bar, HTTPServer -> HTTP|Server
            if (std::islower(prev) || std::isdigit(prev) || (std::isupper(prev) && next_lower)) flush();
        }
        current.push_back(static_cast<char>(c));
    }
    flush();
}

}  // namespace detail

/// Splits text into words, punctuation and the compound operators
/// `== != <= >= && || ++ -- ->`. Deterministic; empty input yields no tokens.
inline std::vector<std::string> tokenize(std::string_view text, const TokenizerOptions& options = {}) {
    std::vector<std::string> tokens;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        const std::string_view line = detail::strip_comment_markers(text.substr(start, end - start));

        std::size_t i = 0;
        while (i < line.size()) {
            const char c = line[i];
            if (detail::is_space(c)) {
                ++i;
                continue;
            }
            if (detail::is_punct(c)) {
                std::size_t width = 1;
                for (auto op : detail::kCompoundOperators) {
                    if (line.substr(i, 2) == op) {
                        width = 2;
                        break;
                    }
                }
                tokens.emplace_back(line.substr(i, width));
                i += width;
                continue;
            }
            std::size_t j = i;
            while (j < line.size() && !detail::is_space(line[j]) && !detail::is_punct(line[j])) ++j;
            std::string word(line.substr(i, j - i));
            if (options.split_identifiers) {
                detail::split_identifier(word, tokens);
            } else {
                tokens.push_back(std::move(word));
            }
            i = j;
        }
        start = end + 1;
    }
    return tokens;
}

/// Comment tokens followed by code tokens.
inline TokenSequence pair_tokens(const CodeCommentPair& pair, const TokenizerOptions& options = {}) {
    TokenSequence seq{tokenize(pair.comment, options), pair.id};
    auto code = tokenize(pair.code, options);
    seq.tokens.insert(seq.tokens.end(), std::make_move_iterator(code.begin()),
                      std::make_move_iterator(code.end()));
    return seq;
}

struct CorpusStats {
    double mean_length = 0.0;
    std::size_t max_length = 0;
    std::size_t bucket_width = 25;
    /// Bucket lower bound -> number of pairs whose length falls in [bound, bound + width).
    std::map<std::size_t, std::size_t> histogram;
    std::size_t pairs = 0;
};

inline CorpusStats corpus_stats(const std::vector<CodeCommentPair>& pairs, std::size_t bucket_width = 25,
                                const TokenizerOptions& options = {}) {
    if (pairs.empty()) throw Error(ErrorKind::EmptyCorpus, "corpus_stats needs at least one pair");
    require(bucket_width >= 1, "histogram bucket width must be positive");
    CorpusStats stats;
    stats.bucket_width = bucket_width;
    stats.pairs = pairs.size();
    std::size_t total = 0;
    for (const auto& p : pairs) {
        const std::size_t len = pair_tokens(p, options).tokens.size();
        total += len;
        stats.max_length = std::max(stats.max_length, len);
        ++stats.histogram[len / bucket_width * bucket_width];
    }
    stats.mean_length = static_cast<double>(total) / static_cast<double>(pairs.size());
    return stats;
}

inline void print_stats(std::ostream& out, const CorpusStats& stats) {
    out << "pairs        " << stats.pairs << '\n'
        << "mean length  " << std::fixed << std::setprecision(2) << stats.mean_length << '\n'
        << "max length   " << stats.max_length << '\n'
        << std::setw(14) << std::left << "length" << std::right << std::setw(8) << "pairs" << '\n';
    for (const auto& [lo, count] : stats.histogram) {
        const std::string range = std::to_string(lo) + "-" + std::to_string(lo + stats.bucket_width - 1);
        out << std::setw(14) << std::left << range << std::right << std::setw(8) << count << '\n';
    }
    out << std::defaultfloat;
}

}  // namespace coherelint
