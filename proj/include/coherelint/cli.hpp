#pragma once

// The coherelint command line: split, train, eval, bench, explain, embed.
// Exit codes: 0 success, 1 validation error, 2 runtime or numeric error.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "coherelint/baseline.hpp"
#include "coherelint/config.hpp"
#include "coherelint/corpus.hpp"
#include "coherelint/embedding.hpp"
#include "coherelint/error.hpp"
#include "coherelint/eval.hpp"
#include "coherelint/interpret.hpp"
#include "coherelint/neurnet.hpp"
#include "coherelint/tokenizer.hpp"

namespace coherelint::cli {

using AnyModel = std::variant<RecurrentModel, SvmClassifier>;

inline AnyModel load_any_model(const std::string& path) {
    ByteReader in(read_file(path), path);
    const auto kind = in.header();
    if (kind == ModelKind::LinearSvm) {
        auto clf = read_svm_body(in, kind);
        in.expect_end();
        return clf;
    }
    auto model = read_model_body(in, kind);
    in.expect_end();
    return model;
}

/// Column name used in reports for each classifier.
inline std::string method_name(const AnyModel& model) {
    if (std::holds_alternative<SvmClassifier>(model)) return "SVM";
    return std::get<RecurrentModel>(model).config().cell == CellKind::LSTM ? "C2" : "C1";
}

class Pipeline {
public:
    Pipeline(RunConfig cfg, std::ostream& out) : cfg_(std::move(cfg)), out_(out) {}

    const RunConfig& config() const noexcept { return cfg_; }

    TokenizerOptions tokenizer() const { return {cfg_.flag("tokenizer.split_identifiers")}; }

    EncoderConfig encoder() const { return {cfg_.size("encoder.max_len"), cfg_.size("encoder.dim")}; }

    const std::vector<CodeCommentPair>& dataset() {
        if (!dataset_) {
            const auto& path = cfg_.str("data.csv");
            require(!path.empty(), "data.csv is not set");
            dataset_ = load_csv(path);
        }
        return *dataset_;
    }

    /// Dataset restricted to train.project when it is set.
    std::vector<CodeCommentPair> scoped_dataset() {
        const auto& project = cfg_.str("train.project");
        if (project.empty()) return dataset();
        auto subset = filter_project(dataset(), project);
        if (subset.empty()) throw Error(ErrorKind::InvalidArgument, "no pairs belong to project '" + project + "'");
        return subset;
    }

    DatasetSplit make_split() {
        return split(scoped_dataset(), cfg_.real("split.ratio"), cfg_.u64("split.seed"), cfg_.flag("split.stratify"));
    }

    VectorFormat vector_format(const std::string& text) const {
        if (text == "text") return VectorFormat::Text;
        if (text == "binary") return VectorFormat::Binary;
        throw Error(ErrorKind::InvalidArgument, "vector format must be text or binary, got '" + text + "'");
    }

    /// Loads only the words needed for `pairs`.
    VectorStore vectors_for(const std::vector<CodeCommentPair>& pairs) {
        const auto& path = cfg_.str("data.vectors");
        require(!path.empty(), "data.vectors is not set");
        const auto words = token_inventory(pairs, tokenizer());
        auto store = load_word_vectors(path, vector_format(cfg_.str("data.vectors_format")), &words);
        if (store.dim() != encoder().dim) {
            throw Error(ErrorKind::DimensionMismatch, path + " holds " + std::to_string(store.dim()) +
                                                          "-dim vectors but encoder.dim is " +
                                                          std::to_string(encoder().dim));
        }
        return store;
    }

    ModelConfig model_config(CellKind cell) const {
        ModelConfig m;
        m.cell = cell;
        m.input_dim = encoder().dim;
        m.hidden = cfg_.size("model.hidden");
        const double clip = cfg_.real("model.clip");
        if (clip > 0.0) m.clip_norm = clip;
        else m.clip_norm.reset();
        return m;
    }

    TrainConfig train_config() const {
        TrainConfig tc;
        tc.batch_size = cfg_.size("train.batch");
        tc.epochs = cfg_.size("train.epochs");
        tc.seed = cfg_.u64("train.seed");
        tc.shuffle = cfg_.flag("train.shuffle");
        tc.adam.lr = cfg_.real("train.lr");
        tc.threads = std::max<std::size_t>(1, cfg_.size("train.threads"));
        return tc;
    }

    int cmd_split() {
        const auto s = make_split();
        const std::filesystem::path dir = cfg_.str("split.dir");
        std::filesystem::create_directories(dir);
        write_csv((dir / "train.csv").string(), s.train);
        write_csv((dir / "test.csv").string(), s.test);
        out_ << "train " << s.train.size() << "  test " << s.test.size() << "  -> " << dir.string() << '\n';
        for (const auto& [project, n] : count_by_project(scoped_dataset())) out_ << "  " << project << ' ' << n << '\n';
        print_stats(out_, corpus_stats(scoped_dataset(), 25, tokenizer()));
        return 0;
    }

    int cmd_train() {
        const auto cell = cfg_.str("model.cell");
        const auto s = make_split();
        const auto& out_path = cfg_.str("model.out");
        if (cell == "svm") {
            SvmClassifier clf;
            clf.features = tfidf_fit(s.train, cfg_.flag("svm.raw_counts"), tokenizer());
            std::vector<SparseVector> xs;
            for (const auto& p : s.train) xs.push_back(tfidf_transform(clf.features, p, tokenizer()));
            const auto labels = labels_of(s.train);
            SvmConfig sc{cfg_.real("svm.lambda"), cfg_.size("svm.epochs"), cfg_.u64("train.seed")};
            auto result = svm_train(xs, labels, clf.features.dim(), sc);
            clf.svm = result.model;
            out_ << "svm vocabulary " << clf.features.dim() << ", objective " << result.objective.front() << " -> "
                 << result.objective.back() << '\n';
            save_svm(clf, out_path);
            out_ << "saved " << out_path << '\n';
            return 0;
        }
        if (cell != "rnn" && cell != "lstm")
            throw Error(ErrorKind::InvalidArgument, "model.cell must be rnn, lstm or svm, got '" + cell + "'");

        const auto store = vectors_for(s.train);
        const auto encoded = encode_dataset(s.train, store, encoder(), tokenizer());
        const auto labels = labels_of(s.train);
        const auto samples = make_samples(encoded.items, labels);
        out_ << "encoded " << encoded.items.size() << " pairs (" << encoded.oov_tokens << " OOV tokens)\n";

        std::vector<EpochStats> history;
        auto result = train(model_config(cell == "lstm" ? CellKind::LSTM : CellKind::SimpleRNN), samples,
                            train_config(), [&](const EpochStats& e, const RecurrentModel&) {
                                out_ << "epoch " << e.epoch << "  loss " << format_fixed(e.loss, 6) << "  accuracy "
                                     << format_fixed(e.train_accuracy, 4) << '\n';
                                return true;
                            });
        save_model(result.model, out_path);
        out_ << "saved " << out_path << '\n';
        if (const auto& hist = cfg_.str("report.history"); !hist.empty()) {
            std::ofstream h(hist, std::ios::binary);
            if (!h) throw Error(ErrorKind::Io, "cannot write '" + hist + "'");
            h << "epoch,loss,train_accuracy\n";
            for (const auto& e : result.history)
                h << e.epoch << ',' << format_fixed(e.loss, 9) << ',' << format_fixed(e.train_accuracy, 6) << '\n';
        }
        return 0;
    }

    int cmd_eval(const std::vector<std::string>& model_paths) {
        const auto s = make_split();
        std::vector<std::pair<std::string, std::vector<Label>>> columns;
        std::optional<VectorStore> store;
        std::optional<EncodedDataset> encoded;
        for (const auto& path : model_paths) {
            const auto model = load_any_model(path);
            std::string name = method_name(model);
            for (const auto& c : columns)
                if (c.first == name) name += "#" + std::to_string(columns.size() + 1);
            if (const auto* svm = std::get_if<SvmClassifier>(&model)) {
                columns.emplace_back(name, predict_all(*svm, s.test, tokenizer()));
                continue;
            }
            const auto& rnn = std::get<RecurrentModel>(model);
            if (rnn.config().input_dim != encoder().dim) {
                throw Error(ErrorKind::DimensionMismatch, path + " expects " +
                                                              std::to_string(rnn.config().input_dim) +
                                                              "-dim input but encoder.dim is " +
                                                              std::to_string(encoder().dim));
            }
            if (!encoded) {
                store = vectors_for(s.test);
                encoded = encode_dataset(s.test, *store, encoder(), tokenizer());
            }
            columns.emplace_back(name, predict_all(rnn, encoded->items));
        }
        const auto table = per_project_report(s.test, columns);
        const auto& csv_path = cfg_.str("report.csv");
        {
            std::ofstream f(csv_path, std::ios::binary);
            if (!f) throw Error(ErrorKind::Io, "cannot write '" + csv_path + "'");
            write_report_csv(f, table);
        }
        write_report_text(out_, table);
        if (const auto& txt = cfg_.str("report.text"); !txt.empty()) {
            std::ofstream f(txt, std::ios::binary);
            if (!f) throw Error(ErrorKind::Io, "cannot write '" + txt + "'");
            write_report_text(f, table);
        }
        out_ << "\nwrote " << csv_path << '\n';
        return 0;
    }

    int cmd_bench() {
        const auto& all = scoped_dataset();
        std::vector<NamedDataset> datasets;
        const auto counts = count_by_project(all);
        std::vector<std::string> order;
        for (auto p : kKnownProjects)
            if (counts.contains(std::string(p))) order.emplace_back(p);
        for (const auto& [p, _] : counts)
            if (std::find(order.begin(), order.end(), p) == order.end()) order.push_back(p);
        for (const auto& p : order) datasets.push_back({p, filter_project(all, p)});
        datasets.push_back({std::string(kAllRow), all});

        std::optional<VectorStore> store;
        std::vector<EmbeddingMethod> methods;
        if (!cfg_.str("data.vectors").empty()) {
            store = vectors_for(all);
            methods.push_back(word_vector_method(*store, encoder(), tokenizer()));
        }
        methods.push_back(tfidf_method(cfg_.flag("svm.raw_counts"), tokenizer()));
        const auto records = benchmark_embedding(datasets, methods);
        const auto& path = cfg_.str("bench.csv");
        std::ofstream f(path, std::ios::binary);
        if (!f) throw Error(ErrorKind::Io, "cannot write '" + path + "'");
        write_timings_csv(f, records);
        write_timings_text(out_, records);
        out_ << "wrote " << path << '\n';
        return 0;
    }

    int cmd_explain(const std::string& model_path, const std::string& pair_id, const std::string& out_path,
                    const std::string& method) {
        require(method == "grad" || method == "occlusion", "--method must be grad or occlusion");
        const auto& pairs = dataset();
        auto it = std::find_if(pairs.begin(), pairs.end(), [&](const auto& p) { return p.id == pair_id; });
        if (it == pairs.end()) throw Error(ErrorKind::InvalidArgument, "no pair with id '" + pair_id + "'");
        const auto model = load_any_model(model_path);
        const auto* rnn = std::get_if<RecurrentModel>(&model);
        if (!rnn) throw Error(ErrorKind::InvalidArgument, model_path + " is an SVM; explain needs a recurrent model");

        const std::vector<CodeCommentPair> one{*it};
        const auto store = vectors_for(one);
        const auto seq = pair_tokens(*it, tokenizer());
        const auto x = encode_pair(seq, store, encoder());
        const auto report =
            method == "grad" ? saliency_grad_input(*rnn, seq, x) : saliency_occlusion(*rnn, seq, x);

        std::ofstream html(out_path, std::ios::binary);
        if (!html) throw Error(ErrorKind::Io, "cannot write '" + out_path + "'");
        html << render_html(report);
        const auto csv_path = std::filesystem::path(out_path).replace_extension(".csv").string();
        std::ofstream scores(csv_path, std::ios::binary);
        if (!scores) throw Error(ErrorKind::Io, "cannot write '" + csv_path + "'");
        write_scores_csv(scores, report);
        out_ << pair_id << ": predicted " << to_string(report.predicted) << " (p = "
             << format_fixed(report.predicted_prob, 4) << "), " << report.tokens.size() << " tokens -> " << out_path
             << ", " << csv_path << '\n';
        return 0;
    }

    int cmd_embed(const std::string& vectors_out, const std::string& format, const std::string& from,
                  const std::string& from_format) {
        VectorStore store;
        if (!from.empty()) {
            store = load_word_vectors(from, vector_format(from_format));
        } else {
            SkipGramConfig sg;
            sg.dim = encoder().dim;
            sg.window = cfg_.size("skipgram.window");
            sg.negatives = cfg_.size("skipgram.negatives");
            sg.epochs = cfg_.size("skipgram.epochs");
            sg.seed = cfg_.u64("skipgram.seed");
            sg.min_count = cfg_.size("skipgram.min_count");
            sg.learning_rate = cfg_.real("skipgram.lr");
            store = train_skipgram(make_split().train, sg, tokenizer());
        }
        save_word_vectors(store, vectors_out, vector_format(format));
        out_ << "wrote " << store.size() << " vectors of dim " << store.dim() << " to " << vectors_out << '\n';
        return 0;
    }

private:
    RunConfig cfg_;
    std::ostream& out_;
    std::optional<std::vector<CodeCommentPair>> dataset_;
};

inline std::string key_help() {
    std::string text = "Config keys (set in --config file as 'key = value' or as --key flags):\n";
    for (const auto& k : kConfigKeys) {
        text += "  " + std::string(k.name) + " = " +
                (k.default_value.empty() ? std::string("\"\"") : std::string(k.default_value)) + "    " +
                std::string(k.help) + "\n";
    }
    return text;
}

/// Parses `argv`, runs one subcommand and maps failures to exit codes.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"coherelint: code-comment coherence detection"};
    app.name("coherelint");
    app.require_subcommand(1);
    app.footer(key_help());

    std::string config_path;
    std::map<std::string, std::string> flag_values;
    std::map<std::string, CLI::Option*> flag_options;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "flat key = value config file");
        for (const auto& k : kConfigKeys) {
            const std::string key(k.name);
            const std::string help = std::string(k.help) + " (default: " +
                                     (k.default_value.empty() ? std::string("\"\"") : std::string(k.default_value)) +
                                     ")";
            flag_options[key + "@" + sub->get_name()] = sub->add_option("--" + key, flag_values[key], help);
        }
        sub->footer(key_help());
    };

    auto* split_cmd = app.add_subcommand("split", "write the train/test split and corpus statistics");
    auto* train_cmd = app.add_subcommand("train", "train a recurrent model or the SVM baseline");
    auto* eval_cmd = app.add_subcommand("eval", "evaluate models and write the per-project report");
    auto* bench_cmd = app.add_subcommand("bench", "time the text-embedding methods per dataset");
    auto* explain_cmd = app.add_subcommand("explain", "render per-token importance for one pair");
    auto* embed_cmd = app.add_subcommand("embed", "train skip-gram vectors or convert a vector file");
    for (auto* sub : {split_cmd, train_cmd, eval_cmd, bench_cmd, explain_cmd, embed_cmd}) add_common(sub);

    std::vector<std::string> eval_models;
    eval_cmd->add_option("--model", eval_models, "model file(s) to evaluate (default: model.out)");

    std::string explain_model, pair_id, explain_out = "explanation.html", explain_method = "grad";
    explain_cmd->add_option("--model", explain_model, "recurrent model file (default: model.out)");
    explain_cmd->add_option("--pair-id", pair_id, "id of the pair to explain")->required();
    explain_cmd->add_option("--out", explain_out, "HTML output; scores go to the same name with .csv")
        ->capture_default_str();
    explain_cmd->add_option("--method", explain_method, "grad or occlusion")->capture_default_str();

    std::string embed_vectors, embed_format = "binary", embed_from, embed_from_format = "binary";
    embed_cmd->add_option("--vectors", embed_vectors, "output vector file")->required();
    embed_cmd->add_option("--format", embed_format, "output format: text|binary")->capture_default_str();
    embed_cmd->add_option("--from", embed_from, "convert this vector file instead of training skip-gram");
    embed_cmd->add_option("--from-format", embed_from_format, "format of --from: text|binary")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        RunConfig cfg;
        if (!config_path.empty()) cfg.merge_file(config_path);
        for (const auto& [id, opt] : flag_options) {
            if (opt->count() == 0) continue;
            const auto key = id.substr(0, id.find('@'));
            cfg.set(key, flag_values[key]);
        }
        Pipeline pipeline(std::move(cfg), out);
        const auto& model_out = pipeline.config().str("model.out");
        if (*split_cmd) return pipeline.cmd_split();
        if (*train_cmd) return pipeline.cmd_train();
        if (*eval_cmd) return pipeline.cmd_eval(eval_models.empty() ? std::vector<std::string>{model_out} : eval_models);
        if (*bench_cmd) return pipeline.cmd_bench();
        if (*explain_cmd)
            return pipeline.cmd_explain(explain_model.empty() ? model_out : explain_model, pair_id, explain_out,
                                        explain_method);
        if (*embed_cmd) return pipeline.cmd_embed(embed_vectors, embed_format, embed_from, embed_from_format);
    } catch (const Error& e) {
        err << "coherelint: " << e.what() << '\n';
        return is_numeric(e.kind()) ? 2 : 1;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "coherelint: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "coherelint: runtime error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}

}  // namespace coherelint::cli
