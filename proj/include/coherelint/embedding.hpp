#pragma once

// Word-vector stores and the fixed-shape sequence encoder.

#include <algorithm>
#include <bit>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "coherelint/corpus.hpp"
#include "coherelint/error.hpp"
#include "coherelint/matrix.hpp"
#include "coherelint/random.hpp"
#include "coherelint/tokenizer.hpp"

namespace coherelint {

enum class VectorFormat { Text, Binary };

/// Word -> dense vector map. Vectors are held as 32-bit floats, the precision
/// of the on-disk formats; encoding widens them to double. Words absent from
/// the store encode as zero vectors.
class VectorStore {
public:
    VectorStore() = default;
    explicit VectorStore(std::size_t dim) : dim_(dim) { require(dim >= 1, "vector dimension must be positive"); }

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return words_.size(); }
    const std::vector<std::string>& words() const noexcept { return words_; }
    /// Words that were inserted more than once (the last insertion wins).
    std::size_t duplicates() const noexcept { return duplicates_; }

    void add(std::string_view word, std::span<const float> values) {
        if (values.size() != dim_) {
            throw Error(ErrorKind::DimensionMismatch, "vector for '" + std::string(word) + "' has " +
                                                          std::to_string(values.size()) + " entries, expected " +
                                                          std::to_string(dim_));
        }
        for (float v : values) {
            if (!std::isfinite(v))
                throw Error(ErrorKind::InvalidArgument, "non-finite entry in vector for '" + std::string(word) + "'");
        }
        auto [it, inserted] = index_.try_emplace(std::string(word), words_.size());
        if (inserted) {
            words_.emplace_back(word);
            data_.insert(data_.end(), values.begin(), values.end());
        } else {
            ++duplicates_;
            std::copy(values.begin(), values.end(), data_.begin() + static_cast<std::ptrdiff_t>(it->second * dim_));
        }
    }

    std::span<const float> vector_at(std::size_t index) const { return {data_.data() + index * dim_, dim_}; }

    std::optional<std::span<const float>> find(std::string_view word) const {
        auto it = index_.find(std::string(word));
        if (it == index_.end()) return std::nullopt;
        return vector_at(it->second);
    }

    /// Exact match first, then the ASCII-lowercased form.
    std::optional<std::span<const float>> lookup(std::string_view token) const {
        if (auto hit = find(token)) return hit;
        std::string lower(token);
        bool changed = false;
        for (char& c : lower) {
            if (c >= 'A' && c <= 'Z') {
                c = static_cast<char>(c - 'A' + 'a');
                changed = true;
            }
        }
        return changed ? find(lower) : std::nullopt;
    }

    bool operator==(const VectorStore& other) const {
        return dim_ == other.dim_ && words_ == other.words_ && data_ == other.data_;
    }

private:
    std::size_t dim_ = 0;
    std::vector<std::string> words_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<float> data_;
    std::size_t duplicates_ = 0;
};

namespace detail {

inline std::pair<std::size_t, std::size_t> parse_vector_header(std::string_view line, const std::string& path) {
    auto bad = [&] { return Error(ErrorKind::BadHeader, path + ": header must be '<vocab_size> <dim>'"); };
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.remove_suffix(1);
    const auto space = line.find(' ');
    if (space == std::string_view::npos) throw bad();
    std::size_t vocab = 0, dim = 0;
    const auto a = line.substr(0, space);
    auto b = line.substr(space + 1);
    while (!b.empty() && b.front() == ' ') b.remove_prefix(1);
    auto r1 = std::from_chars(a.data(), a.data() + a.size(), vocab);
    auto r2 = std::from_chars(b.data(), b.data() + b.size(), dim);
    if (r1.ec != std::errc{} || r1.ptr != a.data() + a.size() || r2.ec != std::errc{} ||
        r2.ptr != b.data() + b.size() || dim == 0) {
        throw bad();
    }
    return {vocab, dim};
}

inline void put_f32_le(std::ostream& out, float value) {
    const auto bits = std::bit_cast<std::uint32_t>(value);
    const char bytes[4] = {static_cast<char>(bits & 0xff), static_cast<char>((bits >> 8) & 0xff),
                           static_cast<char>((bits >> 16) & 0xff), static_cast<char>((bits >> 24) & 0xff)};
    out.write(bytes, 4);
}

inline float get_f32_le(const unsigned char* p) {
    const std::uint32_t bits = static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
                               (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
    return std::bit_cast<float>(bits);
}

}  // namespace detail

/// Reads a word-vector file. When `keep` is given only those words are stored,
/// which keeps multi-million-word pretrained files tractable.
inline VectorStore load_word_vectors(const std::string& path, VectorFormat format,
                                     const std::unordered_set<std::string>* keep = nullptr) {
    const std::string bytes = read_file(path);
    const std::string_view text(bytes);
    const auto eol = text.find('\n');
    if (eol == std::string_view::npos) throw Error(ErrorKind::BadHeader, path + ": missing header line");
    const auto [vocab, dim] = detail::parse_vector_header(text.substr(0, eol), path);

    VectorStore store(dim);
    std::vector<float> values(dim);
    std::size_t pos = eol + 1;

    if (format == VectorFormat::Binary) {
        for (std::size_t w = 0; w < vocab; ++w) {
            // word2vec's own writer puts a newline after each vector; tolerate it.
            while (pos < text.size() && (text[pos] == '\n' || text[pos] == '\r')) ++pos;
            const auto space = text.find(' ', pos);
            if (space == std::string_view::npos || space + 1 + 4 * dim > text.size()) {
                throw Error(ErrorKind::TruncatedFile, path + ": file ends inside entry " + std::to_string(w + 1) +
                                                          " of " + std::to_string(vocab));
            }
            const auto word = text.substr(pos, space - pos);
            const auto* p = reinterpret_cast<const unsigned char*>(text.data() + space + 1);
            pos = space + 1 + 4 * dim;
            if (keep && !keep->contains(std::string(word))) continue;
            for (std::size_t d = 0; d < dim; ++d) values[d] = detail::get_f32_le(p + 4 * d);
            store.add(word, values);
        }
        return store;
    }

    std::size_t line_no = 1;
    std::size_t read = 0;
    while (read < vocab) {
        if (pos >= text.size()) {
            throw Error(ErrorKind::TruncatedFile, path + ": expected " + std::to_string(vocab) + " vectors, found " +
                                                      std::to_string(read));
        }
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.remove_suffix(1);
        if (line.empty()) continue;
        ++read;

        const auto space = line.find(' ');
        const auto word = line.substr(0, space);
        std::size_t count = 0;
        if (space != std::string_view::npos) {
            const char* p = line.data() + space;
            const char* last = line.data() + line.size();
            while (p < last) {
                while (p < last && *p == ' ') ++p;
                if (p == last) break;
                float v = 0.0f;
                auto r = std::from_chars(p, last, v);
                if (r.ec != std::errc{}) {
                    throw Error(ErrorKind::DimensionMismatch,
                                path + ": line " + std::to_string(line_no) + " has a non-numeric entry");
                }
                if (count < dim) values[count] = v;
                ++count;
                p = r.ptr;
            }
        }
        if (count != dim) {
            throw Error(ErrorKind::DimensionMismatch, path + ": line " + std::to_string(line_no) + " has " +
                                                          std::to_string(count) + " values, expected " +
                                                          std::to_string(dim));
        }
        if (keep && !keep->contains(std::string(word))) continue;
        store.add(word, values);
    }
    return store;
}

inline void save_word_vectors(const VectorStore& store, const std::string& path, VectorFormat format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, "cannot write '" + path + "'");
    out << store.size() << ' ' << store.dim() << '\n';
    char buf[32];
    for (std::size_t w = 0; w < store.size(); ++w) {
        out << store.words()[w];
        const auto vec = store.vector_at(w);
        if (format == VectorFormat::Binary) {
            out << ' ';
            for (float v : vec) detail::put_f32_le(out, v);
        } else {
            for (float v : vec) {
                auto r = std::to_chars(buf, buf + sizeof buf, v);
                out << ' ' << std::string_view(buf, static_cast<std::size_t>(r.ptr - buf));
            }
            out << '\n';
        }
    }
    if (!out) throw Error(ErrorKind::Io, "write to '" + path + "' failed");
}

struct SkipGramConfig {
    std::size_t dim = 100;
    std::size_t window = 5;
    std::size_t negatives = 5;
    std::size_t epochs = 5;
    std::uint64_t seed = 1;
    std::size_t min_count = 1;
    double learning_rate = 0.025;
};

/// Skip-gram with negative sampling over the token streams of `pairs`.
/// A word's stored vector is the sum of its input and output vectors, so
/// words that occur next to each other also end up close.
/// Vocabulary is ordered by descending count, ties broken lexicographically;
/// negatives are drawn from the unigram distribution raised to 0.75; the
/// learning rate decays linearly to 1e-4 of its start value.
inline VectorStore train_skipgram(const std::vector<CodeCommentPair>& pairs, const SkipGramConfig& cfg,
                                  const TokenizerOptions& tok = {}) {
    if (pairs.empty()) throw Error(ErrorKind::EmptyCorpus, "skip-gram training needs at least one pair");
    require(cfg.dim >= 2, "skip-gram dimension must be at least 2");
    require(cfg.window >= 1 && cfg.epochs >= 1, "skip-gram window and epochs must be positive");

    std::vector<std::vector<std::string>> sentences;
    std::unordered_map<std::string, std::size_t> counts;
    for (const auto& p : pairs) {
        auto seq = pair_tokens(p, tok);
        for (const auto& t : seq.tokens) ++counts[t];
        sentences.push_back(std::move(seq.tokens));
    }
    std::vector<std::pair<std::string, std::size_t>> vocab;
    for (auto& [word, count] : counts)
        if (count >= cfg.min_count) vocab.emplace_back(word, count);
    if (vocab.empty()) throw Error(ErrorKind::EmptyCorpus, "no token reaches min_count");
    std::sort(vocab.begin(), vocab.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < vocab.size(); ++i) index.emplace(vocab[i].first, i);

    std::vector<std::vector<std::size_t>> streams;
    std::size_t total_tokens = 0;
    for (const auto& s : sentences) {
        std::vector<std::size_t> ids;
        for (const auto& t : s) {
            auto it = index.find(t);
            if (it != index.end()) ids.push_back(it->second);
        }
        total_tokens += ids.size();
        streams.push_back(std::move(ids));
    }

    std::vector<double> cumulative(vocab.size());
    double mass = 0.0;
    for (std::size_t i = 0; i < vocab.size(); ++i) {
        mass += std::pow(static_cast<double>(vocab[i].second), 0.75);
        cumulative[i] = mass;
    }

    const std::size_t v = vocab.size();
    const std::size_t dim = cfg.dim;
    Rng rng(cfg.seed);
    std::vector<double> in(v * dim), out(v * dim, 0.0), grad(dim);
    for (double& x : in) x = uniform(rng, -0.5, 0.5) / static_cast<double>(dim);

    auto draw_negative = [&] {
        const double u = uniform01(rng) * mass;
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        return std::min(static_cast<std::size_t>(it - cumulative.begin()), v - 1);
    };

    const double planned = static_cast<double>(total_tokens * cfg.epochs) + 1.0;
    std::size_t processed = 0;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        for (const auto& ids : streams) {
            for (std::size_t pos = 0; pos < ids.size(); ++pos, ++processed) {
                const double alpha =
                    cfg.learning_rate * std::max(1e-4, 1.0 - static_cast<double>(processed) / planned);
                const std::size_t reach = 1 + static_cast<std::size_t>(uniform_index(rng, cfg.window));
                const std::size_t lo = pos >= reach ? pos - reach : 0;
                const std::size_t hi = std::min(ids.size() - 1, pos + reach);
                double* center = in.data() + ids[pos] * dim;
                for (std::size_t ctx = lo; ctx <= hi; ++ctx) {
                    if (ctx == pos) continue;
                    std::fill(grad.begin(), grad.end(), 0.0);
                    for (std::size_t k = 0; k <= cfg.negatives; ++k) {
                        std::size_t target = ids[ctx];
                        double label = 1.0;
                        if (k > 0) {
                            target = draw_negative();
                            if (target == ids[ctx]) continue;
                            label = 0.0;
                        }
                        double* o = out.data() + target * dim;
                        double f = 0.0;
                        for (std::size_t d = 0; d < dim; ++d) f += center[d] * o[d];
                        const double g = (label - sigmoid(f)) * alpha;
                        for (std::size_t d = 0; d < dim; ++d) {
                            grad[d] += g * o[d];
                            o[d] += g * center[d];
                        }
                    }
                    for (std::size_t d = 0; d < dim; ++d) center[d] += grad[d];
                }
            }
        }
    }

    VectorStore store(dim);
    std::vector<float> row(dim);
    for (std::size_t i = 0; i < v; ++i) {
        for (std::size_t d = 0; d < dim; ++d) row[d] = static_cast<float>(in[i * dim + d] + out[i * dim + d]);
        store.add(vocab[i].first, row);
    }
    return store;
}

struct EncoderConfig {
    std::size_t max_len = 50;
    std::size_t dim = 300;
};

/// One max_len x dim slice of the encoded dataset tensor.
struct EmbeddedPair {
    Matrix matrix;
    std::size_t true_len = 0;
    std::size_t oov_count = 0;
    std::string source_id;
};

/// Row t holds the vector of token t for the first max_len tokens; the rest is
/// zero. Out-of-vocabulary tokens also leave a zero row and are counted.
inline EmbeddedPair encode_pair(const TokenSequence& seq, const VectorStore& store, const EncoderConfig& cfg) {
    require(cfg.max_len >= 1, "encoder max_len must be positive");
    if (cfg.dim != store.dim()) {
        throw Error(ErrorKind::DimensionMismatch, "encoder dim " + std::to_string(cfg.dim) +
                                                      " does not match vector store dim " +
                                                      std::to_string(store.dim()));
    }
    EmbeddedPair out{Matrix(cfg.max_len, cfg.dim), std::min(seq.tokens.size(), cfg.max_len), 0, seq.source_id};
    for (std::size_t t = 0; t < out.true_len; ++t) {
        auto vec = store.lookup(seq.tokens[t]);
        if (!vec) {
            ++out.oov_count;
            continue;
        }
        auto row = out.matrix.row(t);
        std::copy(vec->begin(), vec->end(), row.begin());
    }
    return out;
}

struct EncodedDataset {
    std::vector<EmbeddedPair> items;
    std::chrono::nanoseconds elapsed{0};
    std::size_t oov_tokens = 0;
};

/// Tokenizes and encodes every pair, in input order, timing the whole conversion.
inline EncodedDataset encode_dataset(const std::vector<CodeCommentPair>& pairs, const VectorStore& store,
                                     const EncoderConfig& cfg, const TokenizerOptions& tok = {}) {
    const auto start = std::chrono::steady_clock::now();
    EncodedDataset out;
    out.items.reserve(pairs.size());
    for (const auto& p : pairs) {
        out.items.push_back(encode_pair(pair_tokens(p, tok), store, cfg));
        out.oov_tokens += out.items.back().oov_count;
    }
    out.elapsed = std::max(std::chrono::nanoseconds{1}, std::chrono::duration_cast<std::chrono::nanoseconds>(
                                                            std::chrono::steady_clock::now() - start));
    return out;
}

/// Every distinct token of `pairs`, plus lowercase forms, for filtered loading.
inline std::unordered_set<std::string> token_inventory(const std::vector<CodeCommentPair>& pairs,
                                                       const TokenizerOptions& tok = {}) {
    std::unordered_set<std::string> words;
    for (const auto& p : pairs) {
        for (auto& t : pair_tokens(p, tok).tokens) {
            std::string lower = t;
            for (char& c : lower)
                if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
            words.insert(std::move(lower));
            words.insert(std::move(t));
        }
    }
    return words;
}

}  // namespace coherelint
