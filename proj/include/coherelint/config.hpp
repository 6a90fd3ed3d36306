#pragma once

// Flat `key = value` run configuration.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "coherelint/corpus.hpp"
#include "coherelint/error.hpp"

namespace coherelint {

struct ConfigKey {
    std::string_view name;
    std::string_view default_value;
    std::string_view help;
};

inline constexpr ConfigKey kConfigKeys[] = {
    {"data.csv", "", "dataset CSV (id,project,comment,code,label)"},
    {"data.vectors", "", "word-vector file"},
    {"data.vectors_format", "binary", "word-vector file format: text|binary"},
    {"split.ratio", "0.8", "fraction of each stratum used for training"},
    {"split.seed", "42", "split seed"},
    {"split.stratify", "true", "stratify by (project, label)"},
    {"split.dir", "split", "directory receiving train.csv and test.csv"},
    {"encoder.max_len", "50", "tokens kept per pair"},
    {"encoder.dim", "300", "word-vector dimension"},
    {"tokenizer.split_identifiers", "false", "split camelCase and snake_case identifiers"},
    {"model.cell", "lstm", "classifier: rnn|lstm|svm"},
    {"model.hidden", "100", "recurrent hidden units"},
    {"model.clip", "5.0", "gradient-norm clip, 0 disables"},
    {"model.out", "model.co3d", "model file written by train and read by eval/explain"},
    {"train.batch", "50", "mini-batch size"},
    {"train.epochs", "30", "training epochs"},
    {"train.lr", "0.001", "Adam learning rate"},
    {"train.seed", "42", "initialization and shuffling seed"},
    {"train.shuffle", "true", "reshuffle the training set every epoch"},
    {"train.threads", "1", "worker threads for gradients (results do not depend on it)"},
    {"train.project", "", "restrict training and evaluation to one project"},
    {"svm.lambda", "0.0001", "SVM regularization"},
    {"svm.epochs", "50", "Pegasos epochs"},
    {"svm.raw_counts", "false", "raw term counts instead of TF-IDF"},
    {"skipgram.window", "5", "skip-gram context window"},
    {"skipgram.negatives", "5", "negative samples per context"},
    {"skipgram.epochs", "5", "skip-gram epochs"},
    {"skipgram.min_count", "1", "minimum token count"},
    {"skipgram.seed", "42", "skip-gram seed"},
    {"skipgram.lr", "0.025", "skip-gram starting learning rate"},
    {"report.csv", "report.csv", "evaluation report CSV"},
    {"report.text", "", "optional evaluation text table"},
    {"report.history", "", "optional per-epoch training history CSV"},
    {"bench.csv", "bench.csv", "embedding-time benchmark CSV"},
};

inline bool is_config_key(std::string_view key) {
    return std::any_of(std::begin(kConfigKeys), std::end(kConfigKeys),
                       [&](const ConfigKey& k) { return k.name == key; });
}

class RunConfig {
public:
    RunConfig() {
        for (const auto& k : kConfigKeys) values_[std::string(k.name)] = std::string(k.default_value);
    }

    void set(const std::string& key, const std::string& value) {
        if (!is_config_key(key)) throw Error(ErrorKind::InvalidArgument, "unknown config key '" + key + "'");
        values_[key] = value;
    }

    /// Applies `key = value` lines; `#` starts a comment.
    void merge_text(std::string_view text, const std::string& origin) {
        std::size_t line_no = 0, start = 0;
        while (start <= text.size()) {
            auto end = text.find('\n', start);
            if (end == std::string_view::npos) end = text.size();
            std::string line(text.substr(start, end - start));
            start = end + 1;
            ++line_no;
            if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            const auto trimmed = trim(line);
            if (trimmed.empty()) continue;
            const auto eq = trimmed.find('=');
            const std::string where = origin + ":" + std::to_string(line_no);
            if (eq == std::string::npos)
                throw Error(ErrorKind::InvalidArgument, where + ": expected 'key = value'");
            const std::string key = trim(trimmed.substr(0, eq));
            if (!is_config_key(key)) throw Error(ErrorKind::InvalidArgument, where + ": unknown config key '" + key + "'");
            values_[key] = trim(trimmed.substr(eq + 1));
        }
    }

    void merge_file(const std::string& path) { merge_text(read_file(path), path); }

    const std::string& str(const std::string& key) const {
        auto it = values_.find(key);
        if (it == values_.end()) throw Error(ErrorKind::InvalidArgument, "unknown config key '" + key + "'");
        return it->second;
    }

    std::uint64_t u64(const std::string& key) const {
        const auto& v = str(key);
        std::uint64_t out = 0;
        auto r = std::from_chars(v.data(), v.data() + v.size(), out);
        if (r.ec != std::errc{} || r.ptr != v.data() + v.size() || v.empty())
            throw Error(ErrorKind::InvalidArgument, key + " must be a non-negative integer, got '" + v + "'");
        return out;
    }

    std::size_t size(const std::string& key) const { return static_cast<std::size_t>(u64(key)); }

    double real(const std::string& key) const {
        const auto& v = str(key);
        try {
            std::size_t used = 0;
            const double out = std::stod(v, &used);
            if (used == v.size()) return out;
        } catch (const std::exception&) {
        }
        throw Error(ErrorKind::InvalidArgument, key + " must be a number, got '" + v + "'");
    }

    bool flag(const std::string& key) const {
        const auto& v = str(key);
        if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
        if (v == "false" || v == "0" || v == "no" || v == "off") return false;
        throw Error(ErrorKind::InvalidArgument, key + " must be true or false, got '" + v + "'");
    }

    const std::map<std::string, std::string>& values() const noexcept { return values_; }

private:
    static std::string trim(std::string_view s) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
        return std::string(s);
    }

    std::map<std::string, std::string> values_;
};

}  // namespace coherelint
