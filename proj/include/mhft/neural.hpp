#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "mhft/errors.hpp"
#include "mhft/rng.hpp"

namespace mhft {

// ============================================================================
// Dense row-major matrix. All network tensors are 2-D (batch x features);
// everything here is small MLP machinery, so no broadcasting beyond that.
// ============================================================================
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    double* row(std::size_t r) { return data.data() + r * cols; }
    const double* row(std::size_t r) const { return data.data() + r * cols; }
    std::size_t size() const { return data.size(); }

    void fill(double v) { std::fill(data.begin(), data.end(), v); }

    bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }
};

inline void check_shape(bool ok, const std::string& what) {
    if (!ok) throw ShapeMismatch(what);
}

// y = a * b
inline Matrix matmul(const Matrix& a, const Matrix& b) {
    check_shape(a.cols == b.rows, "matmul inner dimensions");
    Matrix y(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i) {
        const double* arow = a.row(i);
        double* yrow = y.row(i);
        for (std::size_t k = 0; k < a.cols; ++k) {
            const double av = arow[k];
            if (av == 0.0) continue;
            const double* brow = b.row(k);
            for (std::size_t j = 0; j < b.cols; ++j) yrow[j] += av * brow[j];
        }
    }
    return y;
}

// y = a * b^T
inline Matrix matmul_nt(const Matrix& a, const Matrix& b) {
    check_shape(a.cols == b.cols, "matmul_nt inner dimensions");
    Matrix y(a.rows, b.rows);
    for (std::size_t i = 0; i < a.rows; ++i) {
        const double* arow = a.row(i);
        for (std::size_t j = 0; j < b.rows; ++j) {
            const double* brow = b.row(j);
            double acc = 0.0;
            for (std::size_t k = 0; k < a.cols; ++k) acc += arow[k] * brow[k];
            y.at(i, j) = acc;
        }
    }
    return y;
}

// y = a^T * b
inline Matrix matmul_tn(const Matrix& a, const Matrix& b) {
    check_shape(a.rows == b.rows, "matmul_tn inner dimensions");
    Matrix y(a.cols, b.cols);
    for (std::size_t r = 0; r < a.rows; ++r) {
        const double* arow = a.row(r);
        const double* brow = b.row(r);
        for (std::size_t i = 0; i < a.cols; ++i) {
            const double av = arow[i];
            if (av == 0.0) continue;
            double* yrow = y.row(i);
            for (std::size_t j = 0; j < b.cols; ++j) yrow[j] += av * brow[j];
        }
    }
    return y;
}

// ============================================================================
// Parameter: named value + gradient pair registered with the optimizer.
// ============================================================================
struct Parameter {
    std::string name;
    Matrix value;
    Matrix grad;

    Parameter() = default;
    Parameter(std::string n, std::size_t rows, std::size_t cols)
        : name(std::move(n)), value(rows, cols), grad(rows, cols) {}

    void zero_grad() { grad.fill(0.0); }
};

inline void zero_grads(const std::vector<Parameter*>& params) {
    for (Parameter* p : params) p->zero_grad();
}

// ============================================================================
// Layers. Each caches what its backward pass needs; backward ACCUMULATES
// into parameter gradients and returns the input gradient.
// ============================================================================

class Dense {
public:
    Dense() = default;
    Dense(const std::string& name, std::size_t in, std::size_t out, Rng& rng)
        : w(name + ".w", out, in), b(name + ".b", 1, out) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(in));
        for (auto& v : w.value.data) v = rng.uniform(-bound, bound);
    }

    std::size_t in_dim() const { return w.value.cols; }
    std::size_t out_dim() const { return w.value.rows; }

    Matrix forward(const Matrix& x) {
        check_shape(x.cols == in_dim(), "dense input width");
        x_cache_ = x;
        Matrix y = matmul_nt(x, w.value);
        for (std::size_t r = 0; r < y.rows; ++r)
            for (std::size_t c = 0; c < y.cols; ++c) y.at(r, c) += b.value.at(0, c);
        return y;
    }

    Matrix backward(const Matrix& dy) {
        check_shape(dy.cols == out_dim() && dy.rows == x_cache_.rows, "dense upstream gradient");
        const Matrix dw = matmul_tn(dy, x_cache_);
        for (std::size_t i = 0; i < dw.size(); ++i) w.grad.data[i] += dw.data[i];
        for (std::size_t r = 0; r < dy.rows; ++r)
            for (std::size_t c = 0; c < dy.cols; ++c) b.grad.at(0, c) += dy.at(r, c);
        return matmul(dy, w.value);
    }

    Parameter w;
    Parameter b;

private:
    Matrix x_cache_;
};

// Normalizes each row to zero mean and unit variance (population convention,
// eps inside the square root, no learned affine).
class LayerNorm {
public:
    static constexpr double kEps = 1e-5;

    Matrix forward(const Matrix& x) {
        check_shape(x.cols >= 2, "layer norm needs dimension >= 2");
        y_cache_ = Matrix(x.rows, x.cols);
        inv_std_.assign(x.rows, 0.0);
        const double d = static_cast<double>(x.cols);
        for (std::size_t r = 0; r < x.rows; ++r) {
            const double* xr = x.row(r);
            double mean = 0.0;
            for (std::size_t c = 0; c < x.cols; ++c) mean += xr[c];
            mean /= d;
            double var = 0.0;
            for (std::size_t c = 0; c < x.cols; ++c) var += (xr[c] - mean) * (xr[c] - mean);
            var /= d;
            const double inv = 1.0 / std::sqrt(var + kEps);
            inv_std_[r] = inv;
            double* yr = y_cache_.row(r);
            for (std::size_t c = 0; c < x.cols; ++c) yr[c] = (xr[c] - mean) * inv;
        }
        return y_cache_;
    }

    Matrix backward(const Matrix& dy) {
        check_shape(dy.same_shape(y_cache_), "layer norm upstream gradient");
        Matrix dx(dy.rows, dy.cols);
        const double d = static_cast<double>(dy.cols);
        for (std::size_t r = 0; r < dy.rows; ++r) {
            const double* dyr = dy.row(r);
            const double* yr = y_cache_.row(r);
            double mean_dy = 0.0;
            double mean_dy_y = 0.0;
            for (std::size_t c = 0; c < dy.cols; ++c) {
                mean_dy += dyr[c];
                mean_dy_y += dyr[c] * yr[c];
            }
            mean_dy /= d;
            mean_dy_y /= d;
            double* dxr = dx.row(r);
            for (std::size_t c = 0; c < dy.cols; ++c)
                dxr[c] = inv_std_[r] * (dyr[c] - mean_dy - yr[c] * mean_dy_y);
        }
        return dx;
    }

private:
    Matrix y_cache_;
    std::vector<double> inv_std_;
};

class Relu {
public:
    Matrix forward(const Matrix& x) {
        mask_ = Matrix(x.rows, x.cols);
        Matrix y(x.rows, x.cols);
        for (std::size_t i = 0; i < x.size(); ++i) {
            const bool on = x.data[i] > 0.0;
            mask_.data[i] = on ? 1.0 : 0.0;
            y.data[i] = on ? x.data[i] : 0.0;
        }
        return y;
    }

    Matrix backward(const Matrix& dy) {
        check_shape(dy.same_shape(mask_), "relu upstream gradient");
        Matrix dx(dy.rows, dy.cols);
        for (std::size_t i = 0; i < dy.size(); ++i) dx.data[i] = dy.data[i] * mask_.data[i];
        return dx;
    }

private:
    Matrix mask_;
};

// Row-lookup table; gradients accumulate only into the selected rows.
class Embedding {
public:
    Embedding() = default;
    Embedding(const std::string& name, std::size_t entries, std::size_t dim, Rng& rng)
        : table(name, entries, dim) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(dim));
        for (auto& v : table.value.data) v = rng.uniform(-bound, bound);
    }

    Matrix forward(const std::vector<int>& indices) {
        idx_cache_ = indices;
        Matrix y(indices.size(), table.value.cols);
        for (std::size_t r = 0; r < indices.size(); ++r) {
            const int idx = indices[r];
            if (idx < 0 || static_cast<std::size_t>(idx) >= table.value.rows)
                throw IndexOutOfRange("embedding index " + std::to_string(idx) + " out of [0, " +
                                      std::to_string(table.value.rows) + ")");
            const double* src = table.value.row(static_cast<std::size_t>(idx));
            std::copy(src, src + table.value.cols, y.row(r));
        }
        return y;
    }

    void backward(const Matrix& dy) {
        check_shape(dy.rows == idx_cache_.size() && dy.cols == table.value.cols,
                    "embedding upstream gradient");
        for (std::size_t r = 0; r < dy.rows; ++r) {
            double* dst = table.grad.row(static_cast<std::size_t>(idx_cache_[r]));
            const double* src = dy.row(r);
            for (std::size_t c = 0; c < dy.cols; ++c) dst[c] += src[c];
        }
    }

    Parameter table;

private:
    std::vector<int> idx_cache_;
};

// ============================================================================
// Softmax / KL utilities (vector form; batch handled by the callers).
// ============================================================================

inline constexpr double kProbFloor = 1e-12;

inline std::vector<double> softmax(const std::vector<double>& logits, double temperature = 1.0) {
    std::vector<double> p(logits.size());
    double max_logit = logits[0];
    for (double z : logits) max_logit = std::max(max_logit, z);
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        p[i] = std::exp((logits[i] - max_logit) / temperature);
        sum += p[i];
    }
    for (auto& v : p) v /= sum;
    return p;
}

// KL(p || q) with both distributions floored at kProbFloor before the log.
inline double kl_divergence(const std::vector<double>& p, const std::vector<double>& q) {
    check_shape(p.size() == q.size(), "KL operand sizes");
    double kl = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double pi = std::max(p[i], kProbFloor);
        const double qi = std::max(q[i], kProbFloor);
        kl += pi * std::log(pi / qi);
    }
    return kl;
}

// ============================================================================
// Adam with bias correction; moments live alongside the registry order.
// ============================================================================
struct AdamConfig {
    double lr = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

class Adam {
public:
    Adam() = default;
    Adam(const std::vector<Parameter*>& params, AdamConfig cfg) : cfg_(cfg) {
        m_.reserve(params.size());
        v_.reserve(params.size());
        for (const Parameter* p : params) {
            m_.emplace_back(p->value.rows, p->value.cols);
            v_.emplace_back(p->value.rows, p->value.cols);
        }
    }

    void step(const std::vector<Parameter*>& params) {
        check_shape(params.size() == m_.size(), "adam parameter registry changed");
        ++t_;
        const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
        const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
        for (std::size_t i = 0; i < params.size(); ++i) {
            Parameter& p = *params[i];
            for (std::size_t k = 0; k < p.value.size(); ++k) {
                const double g = p.grad.data[k];
                if (!std::isfinite(g))
                    throw NonFiniteGradient("non-finite gradient in " + p.name);
                double& m = m_[i].data[k];
                double& v = v_[i].data[k];
                m = cfg_.beta1 * m + (1.0 - cfg_.beta1) * g;
                v = cfg_.beta2 * v + (1.0 - cfg_.beta2) * g * g;
                const double mhat = m / bc1;
                const double vhat = v / bc2;
                p.value.data[k] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
            }
        }
    }

    long steps() const { return t_; }

private:
    AdamConfig cfg_;
    std::vector<Matrix> m_;
    std::vector<Matrix> v_;
    long t_ = 0;
};

// ============================================================================
// Central finite-difference gradient checker.
// ============================================================================
struct GradCheckReport {
    double max_rel_err = 0.0;
    std::size_t checked = 0;

    bool pass(double tol) const { return checked > 0 && max_rel_err < tol; }
};

// `loss` must recompute the scalar loss from current parameter values;
// `compute_grads` must zero and refill every registered gradient.
inline GradCheckReport grad_check(const std::function<double()>& loss,
                                  const std::function<void()>& compute_grads,
                                  const std::vector<Parameter*>& params, Rng& rng,
                                  int samples_per_param = 4, double fd_step = 1e-5) {
    compute_grads();
    std::vector<Matrix> analytic;
    analytic.reserve(params.size());
    for (const Parameter* p : params) analytic.push_back(p->grad);

    GradCheckReport report;
    for (std::size_t i = 0; i < params.size(); ++i) {
        Parameter& p = *params[i];
        const std::size_t n = p.value.size();
        for (int s = 0; s < samples_per_param && s < static_cast<int>(n); ++s) {
            const std::size_t k = static_cast<std::size_t>(rng.below(n));
            const double w0 = p.value.data[k];
            const double h = fd_step * std::max(1.0, std::abs(w0));
            p.value.data[k] = w0 + h;
            const double up = loss();
            p.value.data[k] = w0 - h;
            const double down = loss();
            p.value.data[k] = w0;
            const double fd = (up - down) / (2.0 * h);
            const double an = analytic[i].data[k];
            const double rel = std::abs(fd - an) / std::max(std::abs(fd) + std::abs(an), 1e-6);
            report.max_rel_err = std::max(report.max_rel_err, rel);
            ++report.checked;
        }
    }
    return report;
}

}  // namespace mhft
