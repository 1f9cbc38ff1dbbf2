// L2-regularized logistic regression fit by damped Newton steps.

#include <cmath>

#include "lvmotion/classify.hpp"

namespace lvmotion {

namespace {

constexpr std::size_t kDim = kSegmentCount + 1;

double softplus(double z) noexcept
{
    return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double sigmoid(double z) noexcept
{
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double linear(const Feature& w, double b, const Feature& x) noexcept
{
    double z = b;
    for (std::size_t j = 0; j < x.size(); ++j) z += w[j] * x[j];
    return z;
}

// Solves a (kDim x kDim) system in place; false when singular.
bool solve(std::array<std::array<double, kDim + 1>, kDim>& m, std::array<double, kDim>& out)
{
    for (std::size_t col = 0; col < kDim; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < kDim; ++r) {
            if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
        }
        if (std::abs(m[piv][col]) < 1e-300) return false;
        std::swap(m[col], m[piv]);
        for (std::size_t r = col + 1; r < kDim; ++r) {
            const double f = m[r][col] / m[col][col];
            for (std::size_t k = col; k <= kDim; ++k) m[r][k] -= f * m[col][k];
        }
    }
    for (std::size_t r = kDim; r-- > 0;) {
        double s = m[r][kDim];
        for (std::size_t k = r + 1; k < kDim; ++k) s -= m[r][k] * out[k];
        out[r] = s / m[r][r];
    }
    return true;
}

}  // namespace

double logistic_objective(const std::vector<Feature>& x, const std::vector<int>& y, const Feature& w, double b,
                          double lambda)
{
    double f = 0.0;
    for (double v : w) f += 0.5 * lambda * v * v;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double z = linear(w, b, x[i]);
        f += softplus(z) - (y[i] ? z : 0.0);
    }
    return f;
}

std::array<double, 7> logistic_gradient(const std::vector<Feature>& x, const std::vector<int>& y,
                                        const Feature& w, double b, double lambda)
{
    std::array<double, kDim> g{};
    for (std::size_t j = 0; j < kSegmentCount; ++j) g[j] = lambda * w[j];
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = sigmoid(linear(w, b, x[i])) - (y[i] ? 1.0 : 0.0);
        for (std::size_t j = 0; j < kSegmentCount; ++j) g[j] += r * x[i][j];
        g[kSegmentCount] += r;
    }
    return g;
}

double LogisticModel::decision(const Feature& raw) const noexcept
{
    return linear(w, b, standardizer.apply(raw));
}

LogisticModel train_logistic(const std::vector<Feature>& raw_x, const std::vector<int>& y, const Hyperparams& hp)
{
    LogisticModel m;
    m.standardizer = Standardizer::fit(raw_x);
    const auto x = m.standardizer.apply(raw_x);
    const double lambda = hp.lr_lambda;
    m.converged = false;
    double f = logistic_objective(x, y, m.w, m.b, lambda);
    int iter = 0;
    for (; iter < hp.lr_max_iter; ++iter) {
        const auto g = logistic_gradient(x, y, m.w, m.b, lambda);
        double gnorm = 0.0;
        for (double v : g) gnorm += v * v;
        if (std::sqrt(gnorm) <= hp.lr_gradient_tolerance) {
            m.converged = true;
            break;
        }
        std::array<std::array<double, kDim + 1>, kDim> h{};
        for (std::size_t j = 0; j < kSegmentCount; ++j) h[j][j] = lambda;
        for (const auto& xi : x) {
            const double p = sigmoid(linear(m.w, m.b, xi));
            const double s = p * (1.0 - p);
            std::array<double, kDim> v{};
            for (std::size_t j = 0; j < kSegmentCount; ++j) v[j] = xi[j];
            v[kSegmentCount] = 1.0;
            for (std::size_t r = 0; r < kDim; ++r) {
                for (std::size_t c = 0; c < kDim; ++c) h[r][c] += s * v[r] * v[c];
            }
        }
        for (std::size_t r = 0; r < kDim; ++r) h[r][kDim] = -g[r];
        std::array<double, kDim> step{};
        if (!solve(h, step)) {
            for (std::size_t r = 0; r < kDim; ++r) step[r] = -g[r];
        }
        // Backtracking keeps every iterate a descent step.
        double t = 1.0;
        for (int k = 0; k < 40; ++k) {
            Feature w2 = m.w;
            for (std::size_t j = 0; j < kSegmentCount; ++j) w2[j] += t * step[j];
            const double b2 = m.b + t * step[kSegmentCount];
            const double f2 = logistic_objective(x, y, w2, b2, lambda);
            if (f2 <= f) {
                m.w = w2;
                m.b = b2;
                f = f2;
                break;
            }
            t *= 0.5;
        }
    }
    m.iterations = iter;
    return m;
}

}  // namespace lvmotion
