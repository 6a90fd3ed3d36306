#pragma once

// Recurrent sequence classifiers (SimpleRNN, LSTM) with a two-way softmax
// head, trained by backpropagation through time and Adam.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "coherelint/corpus.hpp"
#include "coherelint/embedding.hpp"
#include "coherelint/error.hpp"
#include "coherelint/matrix.hpp"
#include "coherelint/random.hpp"
#include "coherelint/serialize.hpp"

namespace coherelint {

enum class CellKind : std::uint8_t { SimpleRNN = 0, LSTM = 1 };

constexpr std::string_view to_string(CellKind cell) { return cell == CellKind::LSTM ? "lstm" : "rnn"; }

struct ModelConfig {
    CellKind cell = CellKind::LSTM;
    std::size_t input_dim = 300;
    std::size_t hidden = 100;
    std::size_t classes = 2;
    /// Global gradient-norm ceiling; nullopt disables clipping.
    std::optional<double> clip_norm = 5.0;

    bool operator==(const ModelConfig&) const = default;
};

inline void validate(const ModelConfig& cfg) {
    require(cfg.hidden >= 1, "hidden size must be at least 1");
    require(cfg.input_dim >= 1, "input dimension must be at least 1");
    require(cfg.classes == 2, "the classifier head has exactly 2 classes");
    require(!cfg.clip_norm || *cfg.clip_norm > 0.0, "clip norm must be positive");
}

/// LSTM gate order used for parameter layout.
enum Gate : std::size_t { kInputGate = 0, kForgetGate = 1, kCellGate = 2, kOutputGate = 3 };

using Gradients = std::vector<Matrix>;

/// Parameters in declared order.
///   SimpleRNN: W_x, W_h, b, W_o, b_o
///   LSTM:      (W_x, W_h, b) for input, forget, cell, output gates, then W_o, b_o
/// Biases are column matrices (n x 1).
class RecurrentModel {
public:
    RecurrentModel() = default;

    static RecurrentModel zeros(const ModelConfig& cfg) {
        validate(cfg);
        RecurrentModel m;
        m.config_ = cfg;
        const std::size_t h = cfg.hidden, in = cfg.input_dim;
        const std::size_t blocks = cfg.cell == CellKind::LSTM ? 4 : 1;
        for (std::size_t g = 0; g < blocks; ++g) {
            m.params_.emplace_back(h, in);
            m.params_.emplace_back(h, h);
            m.params_.emplace_back(h, 1);
        }
        m.params_.emplace_back(cfg.classes, h);
        m.params_.emplace_back(cfg.classes, 1);
        return m;
    }

    /// Glorot-uniform weights, zero biases, forget-gate bias 1.
    static RecurrentModel glorot(const ModelConfig& cfg, std::uint64_t seed) {
        RecurrentModel m = zeros(cfg);
        Rng rng(derive_seed(seed, "init"));
        for (auto& p : m.params_) {
            if (p.cols() == 1) continue;
            const double limit = std::sqrt(6.0 / static_cast<double>(p.rows() + p.cols()));
            for (double& v : p.flat()) v = uniform(rng, -limit, limit);
        }
        if (cfg.cell == CellKind::LSTM) m.gate_b(kForgetGate).fill(1.0);
        return m;
    }

    const ModelConfig& config() const noexcept { return config_; }
    void set_clip_norm(std::optional<double> clip) {
        require(!clip || *clip > 0.0, "clip norm must be positive");
        config_.clip_norm = clip;
    }
    std::vector<Matrix>& params() noexcept { return params_; }
    const std::vector<Matrix>& params() const noexcept { return params_; }

    static std::vector<std::string> param_names(CellKind cell) {
        if (cell == CellKind::SimpleRNN) return {"W_x", "W_h", "b", "W_o", "b_o"};
        std::vector<std::string> names;
        for (const char* g : {"input", "forget", "cell", "output"}) {
            names.push_back(std::string("W_x.") + g);
            names.push_back(std::string("W_h.") + g);
            names.push_back(std::string("b.") + g);
        }
        names.insert(names.end(), {"W_o", "b_o"});
        return names;
    }

    // SimpleRNN uses gate 0.
    Matrix& gate_wx(std::size_t g) { return params_[3 * g]; }
    Matrix& gate_wh(std::size_t g) { return params_[3 * g + 1]; }
    Matrix& gate_b(std::size_t g) { return params_[3 * g + 2]; }
    const Matrix& gate_wx(std::size_t g) const { return params_[3 * g]; }
    const Matrix& gate_wh(std::size_t g) const { return params_[3 * g + 1]; }
    const Matrix& gate_b(std::size_t g) const { return params_[3 * g + 2]; }
    Matrix& head_w() { return params_[params_.size() - 2]; }
    Matrix& head_b() { return params_.back(); }
    const Matrix& head_w() const { return params_[params_.size() - 2]; }
    const Matrix& head_b() const { return params_.back(); }

    Gradients zero_like() const {
        Gradients g;
        g.reserve(params_.size());
        for (const auto& p : params_) g.emplace_back(p.rows(), p.cols());
        return g;
    }

    bool operator==(const RecurrentModel&) const = default;

private:
    ModelConfig config_;
    std::vector<Matrix> params_;
};

struct ForwardResult {
    Matrix hidden_states;  // T x hidden
    Vector logits;
    Vector probs;
};

namespace detail {

struct ForwardCache {
    Matrix h;               // T x H
    Matrix c, tanh_c;       // LSTM only
    std::array<Matrix, 4> gates;  // activated i, f, c~, o (LSTM only)
    Vector logits, probs;
};

inline void run_forward(const RecurrentModel& model, const Matrix& x, ForwardCache& cache) {
    const auto& cfg = model.config();
    if (x.cols() != cfg.input_dim) {
        throw Error(ErrorKind::DimensionMismatch, "input has " + std::to_string(x.cols()) +
                                                      " columns, model expects " + std::to_string(cfg.input_dim));
    }
    require(x.rows() >= 1, "input sequence must have at least one row");
    const std::size_t steps = x.rows(), h = cfg.hidden;
    cache.h.resize(steps, h);
    const Vector zero(h, 0.0);

    if (cfg.cell == CellKind::SimpleRNN) {
        for (std::size_t t = 0; t < steps; ++t) {
            auto out = cache.h.row(t);
            const auto& b = model.gate_b(0).flat();
            std::copy(b.begin(), b.end(), out.begin());
            gemv_add(model.gate_wx(0), x.row(t), out);
            gemv_add(model.gate_wh(0), t ? std::span<const double>(cache.h.row(t - 1)) : std::span<const double>(zero), out);
            for (double& v : out) v = std::tanh(v);
        }
    } else {
        cache.c.resize(steps, h);
        cache.tanh_c.resize(steps, h);
        for (auto& g : cache.gates) g.resize(steps, h);
        for (std::size_t t = 0; t < steps; ++t) {
            const std::span<const double> h_prev = t ? std::span<const double>(cache.h.row(t - 1)) : zero;
            const std::span<const double> c_prev = t ? std::span<const double>(cache.c.row(t - 1)) : zero;
            for (std::size_t g = 0; g < 4; ++g) {
                auto z = cache.gates[g].row(t);
                const auto& b = model.gate_b(g).flat();
                std::copy(b.begin(), b.end(), z.begin());
                gemv_add(model.gate_wx(g), x.row(t), z);
                gemv_add(model.gate_wh(g), h_prev, z);
                if (g == kCellGate) {
                    for (double& v : z) v = std::tanh(v);
                } else {
                    for (double& v : z) v = sigmoid(v);
                }
            }
            auto c = cache.c.row(t), tc = cache.tanh_c.row(t), out = cache.h.row(t);
            for (std::size_t k = 0; k < h; ++k) {
                c[k] = cache.gates[kForgetGate](t, k) * c_prev[k] +
                       cache.gates[kInputGate](t, k) * cache.gates[kCellGate](t, k);
                tc[k] = std::tanh(c[k]);
                out[k] = cache.gates[kOutputGate](t, k) * tc[k];
            }
        }
    }

    cache.logits.assign(model.head_b().flat().begin(), model.head_b().flat().end());
    gemv_add(model.head_w(), cache.h.row(steps - 1), cache.logits);
    if (!all_finite(cache.logits))
        throw Error(ErrorKind::NonFiniteActivation, "non-finite logits; consider enabling clip_norm");
    cache.probs = softmax(cache.logits);
}

/// Backpropagates `dlogits` through the cached forward pass. Adds parameter
/// gradients into `grads` and writes input gradients into `dx` when given.
inline void run_backward(const RecurrentModel& model, const Matrix& x, const ForwardCache& cache,
                         std::span<const double> dlogits, Gradients* grads, Matrix* dx) {
    const auto& cfg = model.config();
    const std::size_t steps = x.rows(), h = cfg.hidden;
    const std::size_t head = model.params().size() - 2;
    if (dx) dx->resize(steps, cfg.input_dim);

    Vector dh(h, 0.0), dh_prev(h), dc(h, 0.0);
    gemv_t_add(model.head_w(), dlogits, dh);
    if (grads) {
        outer_add((*grads)[head], dlogits, cache.h.row(steps - 1));
        axpy(1.0, dlogits, (*grads)[head + 1].flat());
    }
    const Vector zero(h, 0.0);

    if (cfg.cell == CellKind::SimpleRNN) {
        Vector da(h);
        for (std::size_t t = steps; t-- > 0;) {
            const auto ht = cache.h.row(t);
            for (std::size_t k = 0; k < h; ++k) da[k] = dh[k] * (1.0 - ht[k] * ht[k]);
            const std::span<const double> h_prev = t ? std::span<const double>(cache.h.row(t - 1)) : zero;
            if (grads) {
                outer_add((*grads)[0], da, x.row(t));
                outer_add((*grads)[1], da, h_prev);
                axpy(1.0, da, (*grads)[2].flat());
            }
            if (dx) gemv_t_add(model.gate_wx(0), da, dx->row(t));
            std::fill(dh_prev.begin(), dh_prev.end(), 0.0);
            gemv_t_add(model.gate_wh(0), da, dh_prev);
            std::swap(dh, dh_prev);
        }
        return;
    }

    std::array<Vector, 4> dz;
    for (auto& v : dz) v.resize(h);
    const auto& gi = cache.gates[kInputGate];
    const auto& gf = cache.gates[kForgetGate];
    const auto& gc = cache.gates[kCellGate];
    const auto& go = cache.gates[kOutputGate];
    for (std::size_t t = steps; t-- > 0;) {
        const std::span<const double> h_prev = t ? std::span<const double>(cache.h.row(t - 1)) : zero;
        const std::span<const double> c_prev = t ? std::span<const double>(cache.c.row(t - 1)) : zero;
        for (std::size_t k = 0; k < h; ++k) {
            const double i = gi(t, k), f = gf(t, k), g = gc(t, k), o = go(t, k), tc = cache.tanh_c(t, k);
            const double dct = dc[k] + dh[k] * o * (1.0 - tc * tc);
            dz[kOutputGate][k] = dh[k] * tc * o * (1.0 - o);
            dz[kInputGate][k] = dct * g * i * (1.0 - i);
            dz[kCellGate][k] = dct * i * (1.0 - g * g);
            dz[kForgetGate][k] = dct * c_prev[k] * f * (1.0 - f);
            dc[k] = dct * f;
        }
        std::fill(dh_prev.begin(), dh_prev.end(), 0.0);
        for (std::size_t g = 0; g < 4; ++g) {
            if (grads) {
                outer_add((*grads)[3 * g], dz[g], x.row(t));
                outer_add((*grads)[3 * g + 1], dz[g], h_prev);
                axpy(1.0, dz[g], (*grads)[3 * g + 2].flat());
            }
            if (dx) gemv_t_add(model.gate_wx(g), dz[g], dx->row(t));
            gemv_t_add(model.gate_wh(g), dz[g], dh_prev);
        }
        std::swap(dh, dh_prev);
    }
}

}  // namespace detail

inline ForwardResult forward(const RecurrentModel& model, const Matrix& x) {
    detail::ForwardCache cache;
    detail::run_forward(model, x, cache);
    return {std::move(cache.h), std::move(cache.logits), std::move(cache.probs)};
}

inline ForwardResult forward(const RecurrentModel& model, const EmbeddedPair& x) { return forward(model, x.matrix); }

inline std::size_t label_index(Label label) { return static_cast<std::size_t>(label); }

/// Coherent iff its probability is at least that of Incoherent.
inline Label predict_label(std::span<const double> probs) {
    return probs[1] >= probs[0] ? Label::Coherent : Label::Incoherent;
}

inline Label predict(const RecurrentModel& model, const Matrix& x) { return predict_label(forward(model, x).probs); }

/// One training instance: a borrowed input matrix and its label.
struct Sample {
    const Matrix* input = nullptr;
    Label label = Label::Coherent;
};

inline std::vector<Sample> make_samples(std::span<const EmbeddedPair> inputs, std::span<const Label> labels) {
    if (inputs.size() != labels.size())
        throw Error(ErrorKind::LengthMismatch, "inputs and labels differ in length");
    std::vector<Sample> out;
    out.reserve(inputs.size());
    for (std::size_t i = 0; i < inputs.size(); ++i) out.push_back({&inputs[i].matrix, labels[i]});
    return out;
}

struct LossAndGrad {
    double loss = 0.0;
    Gradients grads;
    double grad_norm = 0.0;  // before clipping
    std::size_t correct = 0; // argmax hits in this batch
};

inline double global_norm(const Gradients& grads) {
    double sq = 0.0;
    for (const auto& g : grads)
        for (double v : g.flat()) sq += v * v;
    return std::sqrt(sq);
}

/// Mean categorical cross-entropy over `batch` and its gradient by full BPTT.
/// Per-example gradients are reduced in batch order, so the result does not
/// depend on `threads`.
inline LossAndGrad loss_and_grad(const RecurrentModel& model, std::span<const Sample> batch, std::size_t threads = 1) {
    require(!batch.empty(), "loss_and_grad needs a nonempty batch");
    const std::size_t n = batch.size();
    std::vector<double> losses(n);
    std::vector<Label> predicted(n);

    auto one = [&](std::size_t i, Gradients& into) {
        detail::ForwardCache cache;
        detail::run_forward(model, *batch[i].input, cache);
        const std::size_t y = label_index(batch[i].label);
        const double peak = std::max(cache.logits[0], cache.logits[1]);
        const double lse = peak + std::log(std::exp(cache.logits[0] - peak) + std::exp(cache.logits[1] - peak));
        losses[i] = lse - cache.logits[y];
        predicted[i] = predict_label(cache.probs);
        Vector dlogits = cache.probs;
        dlogits[y] -= 1.0;
        detail::run_backward(model, *batch[i].input, cache, dlogits, &into, nullptr);
    };

    LossAndGrad out;
    out.grads = model.zero_like();
    auto accumulate = [&](const Gradients& g) {
        for (std::size_t p = 0; p < g.size(); ++p) axpy(1.0, g[p].flat(), out.grads[p].flat());
    };

    threads = std::max<std::size_t>(1, std::min(threads, n));
    if (threads == 1) {
        Gradients scratch = model.zero_like();
        for (std::size_t i = 0; i < n; ++i) {
            for (auto& g : scratch) g.fill(0.0);
            one(i, scratch);
            accumulate(scratch);
        }
    } else {
        std::vector<Gradients> per_example(n);
        std::vector<std::exception_ptr> failures(threads);
        {
            std::vector<std::jthread> pool;
            for (std::size_t w = 0; w < threads; ++w) {
                pool.emplace_back([&, w] {
                    try {
                        for (std::size_t i = w; i < n; i += threads) {
                            per_example[i] = model.zero_like();
                            one(i, per_example[i]);
                        }
                    } catch (...) {
                        failures[w] = std::current_exception();
                    }
                });
            }
        }
        for (auto& f : failures)
            if (f) std::rethrow_exception(f);
        for (const auto& g : per_example) accumulate(g);
    }

    const double scale = 1.0 / static_cast<double>(n);
    for (auto& g : out.grads)
        for (double& v : g.flat()) v *= scale;
    for (double l : losses) out.loss += l;
    out.loss *= scale;
    for (std::size_t i = 0; i < n; ++i) out.correct += predicted[i] == batch[i].label;

    out.grad_norm = global_norm(out.grads);
    if (!std::isfinite(out.grad_norm) || !std::isfinite(out.loss))
        throw Error(ErrorKind::NonFiniteGradient, "non-finite loss or gradient");
    if (const auto clip = model.config().clip_norm; clip && out.grad_norm > *clip) {
        const double shrink = *clip / out.grad_norm;
        for (auto& g : out.grads)
            for (double& v : g.flat()) v *= shrink;
    }
    return out;
}

struct AdamHyper {
    double lr = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct AdamState {
    std::uint64_t step = 0;
    Gradients m, v;
    AdamHyper hyper;
};

/// Bias-corrected Adam update applied in place.
inline void adam_step(std::vector<Matrix>& params, const Gradients& grads, AdamState& state) {
    if (grads.size() != params.size()) throw Error(ErrorKind::DimensionMismatch, "gradient/parameter count mismatch");
    if (state.m.empty()) {
        for (const auto& p : params) {
            state.m.emplace_back(p.rows(), p.cols());
            state.v.emplace_back(p.rows(), p.cols());
        }
    }
    const auto& hp = state.hyper;
    ++state.step;
    const double t = static_cast<double>(state.step);
    const double correct1 = 1.0 - std::pow(hp.beta1, t);
    const double correct2 = 1.0 - std::pow(hp.beta2, t);
    for (std::size_t p = 0; p < params.size(); ++p) {
        if (grads[p].size() != params[p].size())
            throw Error(ErrorKind::DimensionMismatch, "gradient shape mismatch at parameter " + std::to_string(p));
        auto theta = params[p].flat();
        auto g = grads[p].flat();
        auto m = state.m[p].flat();
        auto v = state.v[p].flat();
        for (std::size_t k = 0; k < theta.size(); ++k) {
            m[k] = hp.beta1 * m[k] + (1.0 - hp.beta1) * g[k];
            v[k] = hp.beta2 * v[k] + (1.0 - hp.beta2) * g[k] * g[k];
            const double m_hat = m[k] / correct1;
            const double v_hat = v[k] / correct2;
            theta[k] -= hp.lr * m_hat / (std::sqrt(v_hat) + hp.epsilon);
        }
    }
}

inline void adam_step(RecurrentModel& model, const Gradients& grads, AdamState& state) {
    adam_step(model.params(), grads, state);
}

struct TrainConfig {
    std::size_t batch_size = 50;
    std::size_t epochs = 30;
    std::uint64_t seed = 42;
    bool shuffle = true;
    AdamHyper adam;
    /// Worker threads for per-example gradients; results are identical for any value.
    std::size_t threads = 1;
};

struct EpochStats {
    std::size_t epoch = 0;  // 1-based
    double loss = 0.0;
    double train_accuracy = 0.0;
};

struct TrainResult {
    RecurrentModel model;
    std::vector<EpochStats> history;
};

/// Called after every epoch; returning false ends training early.
using EpochCallback = std::function<bool(const EpochStats&, const RecurrentModel&)>;

/// Mini-batch Adam training from a Glorot initialization. Epoch loss and
/// accuracy are accumulated over the batches as they are visited.
inline TrainResult train(const ModelConfig& model_cfg, std::span<const Sample> train_set, const TrainConfig& tc,
                         const EpochCallback& on_epoch = {}) {
    require(!train_set.empty(), "training set is empty");
    require(tc.batch_size >= 1, "batch size must be at least 1");
    require(tc.epochs >= 1, "epochs must be at least 1");

    TrainResult result{RecurrentModel::glorot(model_cfg, tc.seed), {}};
    AdamState adam;
    adam.hyper = tc.adam;
    Rng order_rng(derive_seed(tc.seed, "shuffle"));
    std::vector<std::size_t> order(train_set.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<Sample> batch;

    for (std::size_t epoch = 1; epoch <= tc.epochs; ++epoch) {
        if (tc.shuffle) shuffle(order, order_rng);
        double loss_sum = 0.0;
        std::size_t correct = 0;
        for (std::size_t start = 0; start < order.size(); start += tc.batch_size) {
            const std::size_t end = std::min(order.size(), start + tc.batch_size);
            batch.clear();
            for (std::size_t k = start; k < end; ++k) batch.push_back(train_set[order[k]]);
            auto lg = loss_and_grad(result.model, batch, tc.threads);
            loss_sum += lg.loss * static_cast<double>(batch.size());
            correct += lg.correct;
            adam_step(result.model, lg.grads, adam);
        }
        const double n = static_cast<double>(train_set.size());
        result.history.push_back({epoch, loss_sum / n, static_cast<double>(correct) / n});
        if (on_epoch && !on_epoch(result.history.back(), result.model)) break;
    }
    return result;
}

inline double accuracy(const RecurrentModel& model, std::span<const Sample> samples) {
    if (samples.empty()) return 0.0;
    std::size_t hits = 0;
    for (const auto& s : samples) hits += predict(model, *s.input) == s.label;
    return static_cast<double>(hits) / static_cast<double>(samples.size());
}

struct GradCheckResult {
    double max_relative_error = 0.0;
    std::size_t entries = 0;
    bool all_finite = true;
};

/// Compares analytic gradients (clipping disabled) with central differences,
/// entry by entry, using |a - n| / max(|a|, |n|, 1e-8).
inline GradCheckResult grad_check(const RecurrentModel& model, std::span<const Sample> batch, double delta = 1e-4) {
    RecurrentModel unclipped = model;
    unclipped.set_clip_norm(std::nullopt);

    const auto analytic = loss_and_grad(unclipped, batch).grads;
    GradCheckResult result;
    for (std::size_t p = 0; p < unclipped.params().size(); ++p) {
        auto values = unclipped.params()[p].flat();
        for (std::size_t k = 0; k < values.size(); ++k) {
            const double saved = values[k];
            values[k] = saved + delta;
            const double up = loss_and_grad(unclipped, batch).loss;
            values[k] = saved - delta;
            const double down = loss_and_grad(unclipped, batch).loss;
            values[k] = saved;
            const double numeric = (up - down) / (2.0 * delta);
            const double a = analytic[p].flat()[k];
            if (!std::isfinite(a) || !std::isfinite(numeric)) result.all_finite = false;
            const double rel = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-8});
            result.max_relative_error = std::max(result.max_relative_error, rel);
            ++result.entries;
        }
    }
    return result;
}

/// Gradient check on a Glorot-initialized model and a random batch of
/// `batch_size` sequences of `steps` rows with uniform(-1, 1) entries.
inline GradCheckResult random_grad_check(const ModelConfig& cfg, std::size_t steps, std::size_t batch_size,
                                         std::uint64_t seed, double delta = 1e-4) {
    const auto model = RecurrentModel::glorot(cfg, seed);
    Rng rng(derive_seed(seed, "gradcheck-data"));
    std::vector<Matrix> inputs;
    std::vector<Sample> batch;
    for (std::size_t i = 0; i < batch_size; ++i) {
        Matrix x(steps, cfg.input_dim);
        for (double& v : x.flat()) v = uniform(rng, -1.0, 1.0);
        inputs.push_back(std::move(x));
    }
    for (std::size_t i = 0; i < batch_size; ++i)
        batch.push_back({&inputs[i], uniform_index(rng, 2) ? Label::Coherent : Label::Incoherent});
    return grad_check(model, batch, delta);
}

inline void write_model(ByteWriter& out, const RecurrentModel& model) {
    const auto& cfg = model.config();
    out.header(cfg.cell == CellKind::LSTM ? ModelKind::LSTM : ModelKind::SimpleRNN);
    out.u32(static_cast<std::uint32_t>(cfg.input_dim));
    out.u32(static_cast<std::uint32_t>(cfg.hidden));
    out.u32(static_cast<std::uint32_t>(cfg.classes));
    out.u8(cfg.clip_norm ? 1 : 0);
    out.f64(cfg.clip_norm.value_or(0.0));
    out.u32(static_cast<std::uint32_t>(model.params().size()));
    for (const auto& p : model.params()) {
        out.u32(static_cast<std::uint32_t>(p.rows()));
        out.u32(static_cast<std::uint32_t>(p.cols()));
        out.f64s(p.flat());
    }
}

/// Reads the config block and parameters that follow an already-consumed header.
inline RecurrentModel read_model_body(ByteReader& in, ModelKind kind) {
    if (kind == ModelKind::LinearSvm) throw Error(ErrorKind::CorruptFile, in.origin() + ": holds an SVM, not a recurrent model");
    ModelConfig cfg;
    cfg.cell = kind == ModelKind::LSTM ? CellKind::LSTM : CellKind::SimpleRNN;
    cfg.input_dim = in.u32();
    cfg.hidden = in.u32();
    cfg.classes = in.u32();
    const bool has_clip = in.u8() != 0;
    const double clip = in.f64();
    if (has_clip) cfg.clip_norm = clip;
    else cfg.clip_norm.reset();
    RecurrentModel model;
    try {
        model = RecurrentModel::zeros(cfg);
    } catch (const Error& e) {
        throw Error(ErrorKind::CorruptFile, in.origin() + ": invalid config block (" + e.what() + ")");
    }
    if (in.u32() != model.params().size()) throw Error(ErrorKind::CorruptFile, in.origin() + ": wrong parameter count");
    for (auto& p : model.params()) {
        const auto rows = in.u32(), cols = in.u32();
        if (rows != p.rows() || cols != p.cols())
            throw Error(ErrorKind::CorruptFile, in.origin() + ": parameter shape disagrees with config");
        in.f64s(p.flat());
        if (!all_finite(p.flat())) throw Error(ErrorKind::CorruptFile, in.origin() + ": non-finite parameter");
    }
    return model;
}

inline void save_model(const RecurrentModel& model, const std::string& path) {
    ByteWriter out;
    write_model(out, model);
    out.save(path);
}

inline RecurrentModel load_model(const std::string& path) {
    ByteReader in(read_file(path), path);
    auto model = read_model_body(in, in.header());
    in.expect_end();
    return model;
}

}  // namespace coherelint
