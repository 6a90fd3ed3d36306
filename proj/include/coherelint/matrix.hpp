#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace coherelint {

/// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    std::span<double> flat() noexcept { return data_; }
    std::span<const double> flat() const noexcept { return data_; }

    void fill(double value) { std::fill(data_.begin(), data_.end(), value); }
    void resize(std::size_t rows, std::size_t cols) {
        rows_ = rows;
        cols_ = cols;
        data_.assign(rows * cols, 0.0);
    }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

using Vector = std::vector<double>;

// y += W x
inline void gemv_add(const Matrix& w, std::span<const double> x, std::span<double> y) {
    assert(w.cols() == x.size() && w.rows() == y.size());
    const std::size_t cols = w.cols();
    const double* p = w.flat().data();
    for (std::size_t r = 0; r < w.rows(); ++r, p += cols) {
        double acc = 0.0;
        for (std::size_t c = 0; c < cols; ++c) acc += p[c] * x[c];
        y[r] += acc;
    }
}

// y += W^T x
inline void gemv_t_add(const Matrix& w, std::span<const double> x, std::span<double> y) {
    assert(w.rows() == x.size() && w.cols() == y.size());
    const std::size_t cols = w.cols();
    const double* p = w.flat().data();
    for (std::size_t r = 0; r < w.rows(); ++r, p += cols) {
        const double xr = x[r];
        if (xr == 0.0) continue;
        for (std::size_t c = 0; c < cols; ++c) y[c] += p[c] * xr;
    }
}

// G += a b^T
inline void outer_add(Matrix& g, std::span<const double> a, std::span<const double> b) {
    assert(g.rows() == a.size() && g.cols() == b.size());
    const std::size_t cols = g.cols();
    double* p = g.flat().data();
    for (std::size_t r = 0; r < g.rows(); ++r, p += cols) {
        const double ar = a[r];
        if (ar == 0.0) continue;
        for (std::size_t c = 0; c < cols; ++c) p[c] += ar * b[c];
    }
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    assert(x.size() == y.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    assert(a.size() == b.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

inline bool all_finite(std::span<const double> values) {
    return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

inline double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

/// Numerically stable softmax.
inline Vector softmax(std::span<const double> logits) {
    Vector out(logits.begin(), logits.end());
    const double peak = *std::max_element(out.begin(), out.end());
    double total = 0.0;
    for (double& v : out) {
        v = std::exp(v - peak);
        total += v;
    }
    for (double& v : out) v /= total;
    return out;
}

}  // namespace coherelint
