#pragma once

// Per-token attribution for trained recurrent models and its HTML rendering.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "coherelint/embedding.hpp"
#include "coherelint/error.hpp"
#include "coherelint/neurnet.hpp"

namespace coherelint {

enum class SaliencyMethod { GradInput, Occlusion };

constexpr std::string_view to_string(SaliencyMethod m) {
    return m == SaliencyMethod::GradInput ? "grad-input" : "occlusion";
}

struct SaliencyReport {
    std::vector<std::string> tokens;
    std::vector<double> scores;  // positive supports the predicted class
    SaliencyMethod method = SaliencyMethod::GradInput;
    Label predicted = Label::Coherent;
    double predicted_prob = 0.0;
    std::string source_id;
};

namespace detail {

inline std::vector<std::string> kept_tokens(const TokenSequence& seq, const EmbeddedPair& x) {
    if (seq.tokens.size() < x.true_len)
        throw Error(ErrorKind::LengthMismatch, "token sequence is shorter than the encoded pair");
    return {seq.tokens.begin(), seq.tokens.begin() + static_cast<std::ptrdiff_t>(x.true_len)};
}

}  // namespace detail

/// score_t = sum_j d logit_pred / d x_tj * x_tj over the non-padding rows.
inline SaliencyReport saliency_grad_input(const RecurrentModel& model, const TokenSequence& seq, const EmbeddedPair& x) {
    detail::ForwardCache cache;
    detail::run_forward(model, x.matrix, cache);
    SaliencyReport report;
    report.method = SaliencyMethod::GradInput;
    report.tokens = detail::kept_tokens(seq, x);
    report.predicted = predict_label(cache.probs);
    report.predicted_prob = cache.probs[label_index(report.predicted)];
    report.source_id = x.source_id;

    Vector seed(cache.logits.size(), 0.0);
    seed[label_index(report.predicted)] = 1.0;
    Matrix dx;
    detail::run_backward(model, x.matrix, cache, seed, nullptr, &dx);
    for (std::size_t t = 0; t < x.true_len; ++t) report.scores.push_back(dot(dx.row(t), x.matrix.row(t)));
    if (!all_finite(report.scores)) throw Error(ErrorKind::NonFiniteGradient, "non-finite saliency score");
    return report;
}

/// score_t = p_pred(x) - p_pred(x with row t zeroed).
inline SaliencyReport saliency_occlusion(const RecurrentModel& model, const TokenSequence& seq, const EmbeddedPair& x) {
    const auto base = forward(model, x.matrix);
    SaliencyReport report;
    report.method = SaliencyMethod::Occlusion;
    report.tokens = detail::kept_tokens(seq, x);
    report.predicted = predict_label(base.probs);
    const std::size_t k = label_index(report.predicted);
    report.predicted_prob = base.probs[k];
    report.source_id = x.source_id;

    Matrix masked = x.matrix;
    for (std::size_t t = 0; t < x.true_len; ++t) {
        const auto row = x.matrix.row(t);
        if (std::all_of(row.begin(), row.end(), [](double v) { return v == 0.0; })) {
            report.scores.push_back(0.0);
            continue;
        }
        auto target = masked.row(t);
        std::fill(target.begin(), target.end(), 0.0);
        report.scores.push_back(base.probs[k] - forward(model, masked).probs[k]);
        std::copy(row.begin(), row.end(), target.begin());
    }
    return report;
}

/// Fraction of pairs where the grad-input top-1 token (by |score|) has the
/// same sign under occlusion. Pairs with no tokens are skipped.
inline double top1_sign_agreement(const RecurrentModel& model, std::span<const TokenSequence> seqs,
                                  std::span<const EmbeddedPair> inputs) {
    if (seqs.size() != inputs.size()) throw Error(ErrorKind::LengthMismatch, "sequences and inputs differ in length");
    std::size_t considered = 0, agree = 0;
    for (std::size_t i = 0; i < seqs.size(); ++i) {
        if (inputs[i].true_len == 0) continue;
        const auto g = saliency_grad_input(model, seqs[i], inputs[i]);
        const auto o = saliency_occlusion(model, seqs[i], inputs[i]);
        std::size_t top = 0;
        for (std::size_t t = 1; t < g.scores.size(); ++t)
            if (std::abs(g.scores[t]) > std::abs(g.scores[top])) top = t;
        ++considered;
        const auto sign = [](double v) { return (v > 0.0) - (v < 0.0); };
        agree += sign(g.scores[top]) == sign(o.scores[top]);
    }
    return considered ? static_cast<double>(agree) / static_cast<double>(considered) : 1.0;
}

inline std::string html_escape(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\'': out += "&#39;"; break;
        default: out.push_back(c);
        }
    }
    return out;
}

/// Opacity level in 0..255 relative to the largest |score| in the report.
inline int opacity_level(double score, double max_abs) {
    if (max_abs <= 0.0) return 0;
    return static_cast<int>(std::lround(255.0 * std::abs(score) / max_abs));
}

/// Self-contained XHTML-compatible page: green backgrounds for positive
/// scores, red for negative, opacity proportional to |score| / max |score|.
inline std::string render_html(const SaliencyReport& report) {
    double max_abs = 0.0;
    for (double s : report.scores) max_abs = std::max(max_abs, std::abs(s));

    std::ostringstream out;
    out << "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\" />\n"
        << "<title>Token importance " << html_escape(report.source_id) << "</title>\n"
        << "<style>span.tok { padding: 1px 2px; margin: 1px; display: inline-block; font-family: monospace; }</style>\n"
        << "</head>\n<body>\n";
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.4f", report.predicted_prob);
    out << "<p class=\"prediction\">Predicted: <b>" << to_string(report.predicted) << "</b> (p = " << buf
        << "), method: " << to_string(report.method) << "</p>\n"
        << "<p class=\"legend\"><span style=\"background-color: rgba(0, 160, 0, 1.0000)\">green</span> supports the "
           "prediction, <span style=\"background-color: rgba(220, 0, 0, 1.0000)\">red</span> opposes it; "
           "opacity shows relative strength.</p>\n"
        << "<div class=\"tokens\">\n";
    for (std::size_t t = 0; t < report.tokens.size(); ++t) {
        const double s = report.scores[t];
        const int level = opacity_level(s, max_abs);
        out << "<span class=\"tok\" data-score=\"";
        std::snprintf(buf, sizeof buf, "%.6g", s);
        out << buf << "\" data-level=\"" << level << "\"";
        if (level > 0) {
            std::snprintf(buf, sizeof buf, "%s, %.4f)", s > 0 ? "rgba(0, 160, 0" : "rgba(220, 0, 0",
                          static_cast<double>(level) / 255.0);
            out << " style=\"background-color: " << buf << "\"";
        }
        out << ">" << html_escape(report.tokens[t]) << "</span>\n";
    }
    out << "</div>\n</body>\n</html>\n";
    return out.str();
}

/// `index,token,score` rows for the raw attribution values.
inline void write_scores_csv(std::ostream& out, const SaliencyReport& report) {
    out << "index,token,score\n";
    char buf[64];
    for (std::size_t t = 0; t < report.tokens.size(); ++t) {
        std::snprintf(buf, sizeof buf, "%.17g", report.scores[t]);
        csv::write_row(out, {std::to_string(t), report.tokens[t], buf});
    }
}

}  // namespace coherelint
