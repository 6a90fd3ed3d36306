#pragma once

// Labeled code-comment dataset: canonical CSV I/O and train/test splitting.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "coherelint/error.hpp"
#include "coherelint/random.hpp"

namespace coherelint {

enum class Label : std::uint8_t { Incoherent = 0, Coherent = 1 };

constexpr std::string_view to_string(Label label) {
    return label == Label::Coherent ? "coherent" : "incoherent";
}

inline std::optional<Label> parse_label(std::string_view text) {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "coherent") return Label::Coherent;
    if (lower == "incoherent") return Label::Incoherent;
    return std::nullopt;
}

/// Projects of the reference dataset, in reporting order.
inline constexpr std::array<std::string_view, 5> kKnownProjects = {
    "Benchmark", "CoffeeMaker", "JFreeChart060", "JFreeChart071", "JHotDraw741"};

struct CodeCommentPair {
    std::string id;
    std::string project;
    std::string comment;
    std::string code;
    Label label = Label::Coherent;

    bool operator==(const CodeCommentPair&) const = default;
};

struct DatasetSplit {
    std::vector<CodeCommentPair> train;
    std::vector<CodeCommentPair> test;
    std::uint64_t seed = 0;
    double ratio = 0.8;
};

namespace csv {

/// One parsed record and the 1-based line it starts on.
struct Record {
    std::vector<std::string> fields;
    std::size_t line = 0;
};

/// RFC-4180 reader: quoted fields may hold commas, doubled quotes and newlines.
/// Accepts LF or CRLF line endings and a leading UTF-8 byte-order mark.
inline std::vector<Record> parse(std::string_view text) {
    std::vector<Record> records;
    if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

    std::size_t line = 1;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        Record record;
        record.line = line;
        std::string field;
        bool end_of_record = false;
        while (!end_of_record) {
            field.clear();
            if (i < n && text[i] == '"') {
                const std::size_t open_line = line;
                ++i;
                bool closed = false;
                while (i < n) {
                    char c = text[i];
                    if (c == '"') {
                        if (i + 1 < n && text[i + 1] == '"') {
                            field.push_back('"');
                            i += 2;
                            continue;
                        }
                        ++i;
                        closed = true;
                        break;
                    }
                    if (c == '\n') ++line;
                    field.push_back(c);
                    ++i;
                }
                if (!closed) {
                    throw Error(ErrorKind::MalformedRow,
                                "unterminated quoted field starting on line " +
                                    std::to_string(open_line));
                }
                if (i < n && text[i] != ',' && text[i] != '\n' && text[i] != '\r') {
                    throw Error(ErrorKind::MalformedRow,
                                "unexpected character after closing quote on line " +
                                    std::to_string(line));
                }
            } else {
                while (i < n && text[i] != ',' && text[i] != '\n' && text[i] != '\r') {
                    field.push_back(text[i]);
                    ++i;
                }
            }
            record.fields.push_back(field);
            if (i < n && text[i] == ',') {
                ++i;
                continue;
            }
            if (i < n && text[i] == '\r') ++i;
            if (i < n && text[i] == '\n') ++i;
            ++line;
            end_of_record = true;
        }
        // Blank lines carry no data.
        if (record.fields.size() == 1 && record.fields[0].empty()) continue;
        records.push_back(std::move(record));
    }
    return records;
}

inline bool needs_quotes(std::string_view field) {
    return field.find_first_of(",\"\r\n") != std::string_view::npos;
}

inline void write_field(std::ostream& out, std::string_view field) {
    if (!needs_quotes(field)) {
        out << field;
        return;
    }
    out << '"';
    for (char c : field) {
        if (c == '"') out << '"';
        out << c;
    }
    out << '"';
}

inline void write_row(std::ostream& out, const std::vector<std::string_view>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out << ',';
        write_field(out, fields[i]);
    }
    out << '\n';
}

}  // namespace csv

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

inline constexpr std::array<std::string_view, 5> kCsvColumns = {"id", "project", "comment", "code",
                                                               "label"};

/// Parses canonical dataset CSV text. `origin` names the source in error messages.
inline std::vector<CodeCommentPair> parse_pairs_csv(std::string_view text,
                                                    const std::string& origin = "<memory>") {
    auto records = csv::parse(text);
    if (records.empty()) throw Error(ErrorKind::EmptyFile, origin + " has no header row");

    std::array<std::size_t, 5> column{};
    const auto& header = records.front().fields;
    for (std::size_t c = 0; c < kCsvColumns.size(); ++c) {
        auto it = std::find_if(header.begin(), header.end(), [&](const std::string& h) {
            std::string name;
            for (char ch : h) {
                if (!std::isspace(static_cast<unsigned char>(ch)))
                    name.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
            }
            return name == kCsvColumns[c];
        });
        if (it == header.end()) {
            throw Error(ErrorKind::MissingColumn,
                        origin + ": header lacks column '" + std::string(kCsvColumns[c]) + "'");
        }
        column[c] = static_cast<std::size_t>(it - header.begin());
    }
    if (records.size() == 1) throw Error(ErrorKind::EmptyFile, origin + " has no data rows");

    std::vector<CodeCommentPair> pairs;
    pairs.reserve(records.size() - 1);
    std::unordered_set<std::string> seen;
    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& rec = records[r];
        const std::string where =
            origin + ": row " + std::to_string(r) + " (line " + std::to_string(rec.line) + ")";
        if (rec.fields.size() != header.size()) {
            throw Error(ErrorKind::MalformedRow, where + " has " + std::to_string(rec.fields.size()) +
                                                     " fields, expected " +
                                                     std::to_string(header.size()));
        }
        CodeCommentPair pair;
        pair.id = rec.fields[column[0]];
        pair.project = rec.fields[column[1]];
        pair.comment = rec.fields[column[2]];
        pair.code = rec.fields[column[3]];
        auto label = parse_label(rec.fields[column[4]]);
        if (!label) throw Error(ErrorKind::BadLabel, where + ": bad label '" + rec.fields[column[4]] + "'");
        pair.label = *label;
        if (pair.id.empty()) throw Error(ErrorKind::InvalidPair, where + ": empty id");
        if (pair.comment.empty() && pair.code.empty())
            throw Error(ErrorKind::InvalidPair, where + ": comment and code are both empty");
        if (!seen.insert(pair.id).second)
            throw Error(ErrorKind::DuplicateId, where + ": duplicate id '" + pair.id + "'");
        pairs.push_back(std::move(pair));
    }
    return pairs;
}

inline std::vector<CodeCommentPair> load_csv(const std::string& path) {
    return parse_pairs_csv(read_file(path), path);
}

inline void write_csv(std::ostream& out, const std::vector<CodeCommentPair>& pairs) {
    out << "id,project,comment,code,label\n";
    for (const auto& p : pairs) csv::write_row(out, {p.id, p.project, p.comment, p.code, to_string(p.label)});
}

inline void write_csv(const std::string& path, const std::vector<CodeCommentPair>& pairs) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, "cannot write '" + path + "'");
    write_csv(out, pairs);
}

/// Pairs per project, keyed by project name.
inline std::map<std::string, std::size_t> count_by_project(const std::vector<CodeCommentPair>& pairs) {
    std::map<std::string, std::size_t> counts;
    for (const auto& p : pairs) ++counts[p.project];
    return counts;
}

inline std::vector<CodeCommentPair> filter_project(const std::vector<CodeCommentPair>& pairs,
                                                   std::string_view project) {
    std::vector<CodeCommentPair> out;
    for (const auto& p : pairs)
        if (p.project == project) out.push_back(p);
    return out;
}

/// Number of training items drawn from a stratum of `n` pairs.
inline std::size_t train_quota(double ratio, std::size_t n) {
    return static_cast<std::size_t>(std::floor(ratio * static_cast<double>(n) + 1e-9));
}

/// Partitions `pairs` into train and test. Each stratum (project and label when
/// stratifying, the whole input otherwise) is shuffled with a generator derived
/// from the seed and the stratum key, and its first floor(ratio * n) members go
/// to train. Both sides keep input order.
///
/// Because the per-stratum shuffle depends only on (seed, stratum key), splitting
/// one project alone gives exactly that project's slice of the pooled split.
inline DatasetSplit split(const std::vector<CodeCommentPair>& pairs, double ratio, std::uint64_t seed,
                          bool stratify = true) {
    require(ratio > 0.0 && ratio < 1.0, "split ratio must lie in (0, 1)");
    if (pairs.size() < 2) throw Error(ErrorKind::TooFewPairs, "need at least 2 pairs to split");

    std::vector<std::string> keys;
    std::map<std::string, std::vector<std::size_t>> strata;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        std::string key;
        if (stratify) {
            key = pairs[i].project;
            key.push_back('\x1f');
            key += to_string(pairs[i].label);
        }
        auto [it, inserted] = strata.try_emplace(key);
        if (inserted) keys.push_back(key);
        it->second.push_back(i);
    }

    std::vector<bool> in_train(pairs.size(), false);
    for (const auto& key : keys) {
        auto members = strata[key];
        Rng rng(derive_seed(seed, key));
        shuffle(members, rng);
        const std::size_t quota = train_quota(ratio, members.size());
        for (std::size_t k = 0; k < quota; ++k) in_train[members[k]] = true;
    }

    DatasetSplit out;
    out.seed = seed;
    out.ratio = ratio;
    for (std::size_t i = 0; i < pairs.size(); ++i) (in_train[i] ? out.train : out.test).push_back(pairs[i]);
    if (out.train.empty() || out.test.empty()) {
        throw Error(ErrorKind::TooFewPairs, "split leaves the " +
                                                std::string(out.train.empty() ? "train" : "test") +
                                                " side empty");
    }
    return out;
}

}  // namespace coherelint
