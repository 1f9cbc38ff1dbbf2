// C-SVC with an RBF kernel, solved by SMO with second-order working-set
// selection (the scheme used by libsvm).

#include <cmath>
#include <limits>

#include "lvmotion/classify.hpp"
#include "lvmotion/kernels.hpp"

namespace lvmotion {

namespace {

constexpr double kTau = 1e-12;

std::vector<double> column_major(const std::vector<Feature>& x)
{
    std::vector<double> cols(kSegmentCount * x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t j = 0; j < kSegmentCount; ++j) cols[j * x.size() + i] = x[i][j];
    }
    return cols;
}

}  // namespace

double SvmModel::kernel(const Feature& a, const Feature& b) const noexcept
{
    double d = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double t = b[j] - a[j];
        d = d + t * t;
    }
    return std::exp(-gamma * d);
}

double SvmModel::decision(const Feature& raw) const
{
    const Feature q = standardizer.apply(raw);
    std::vector<double> d2(support_vectors.size());
    if (!support_vectors.empty()) {
        const auto cols = column_major(support_vectors);
        kernels::squared_distances(cols, support_vectors.size(), q, d2);
    }
    double f = 0.0;
    for (std::size_t i = 0; i < support_vectors.size(); ++i) f += coef[i] * std::exp(-gamma * d2[i]);
    return f - rho;
}

SvmModel train_svm(const std::vector<Feature>& raw_x, const std::vector<int>& labels, const Hyperparams& hp)
{
    SvmModel m;
    m.standardizer = Standardizer::fit(raw_x);
    m.train_x = m.standardizer.apply(raw_x);
    const std::size_t n = raw_x.size();
    m.train_y.resize(n);
    for (std::size_t i = 0; i < n; ++i) m.train_y[i] = labels[i] ? 1 : -1;

    // gamma = 1 / (d * var(all standardized entries)).
    double mean = 0.0;
    for (const auto& f : m.train_x) {
        for (double v : f) mean += v;
    }
    const double cnt = static_cast<double>(n * kSegmentCount);
    mean /= cnt;
    double var = 0.0;
    for (const auto& f : m.train_x) {
        for (double v : f) var += (v - mean) * (v - mean);
    }
    var /= cnt;
    m.gamma = var > 0.0 ? 1.0 / (static_cast<double>(kSegmentCount) * var) : 1.0 / static_cast<double>(kSegmentCount);

    // Kernel matrix, Q_ij = y_i y_j K_ij.
    const auto cols = column_major(m.train_x);
    std::vector<double> q(n * n);
    std::vector<double> d2(n);
    for (std::size_t i = 0; i < n; ++i) {
        kernels::squared_distances(cols, n, m.train_x[i], d2);
        for (std::size_t j = 0; j < n; ++j) {
            q[i * n + j] = m.train_y[i] * m.train_y[j] * std::exp(-m.gamma * d2[j]);
        }
    }
    const auto& y = m.train_y;
    const double c = hp.svm_c;
    std::vector<double> alpha(n, 0.0);
    std::vector<double> g(n, -1.0);
    auto upper = [&](std::size_t t) { return alpha[t] >= c; };
    auto lower = [&](std::size_t t) { return alpha[t] <= 0.0; };
    auto qd = [&](std::size_t t) { return q[t * n + t]; };

    m.converged = false;
    int iter = 0;
    while (iter < hp.svm_max_iter) {
        double gmax = -std::numeric_limits<double>::infinity();
        double gmax2 = -std::numeric_limits<double>::infinity();
        std::ptrdiff_t ii = -1;
        for (std::size_t t = 0; t < n; ++t) {
            if (y[t] == 1) {
                if (!upper(t) && -g[t] >= gmax) {
                    gmax = -g[t];
                    ii = static_cast<std::ptrdiff_t>(t);
                }
            } else if (!lower(t) && g[t] >= gmax) {
                gmax = g[t];
                ii = static_cast<std::ptrdiff_t>(t);
            }
        }
        std::ptrdiff_t jj = -1;
        double best = std::numeric_limits<double>::infinity();
        if (ii >= 0) {
            const auto i = static_cast<std::size_t>(ii);
            for (std::size_t t = 0; t < n; ++t) {
                double grad_diff = 0.0;
                double quad = 0.0;
                if (y[t] == 1) {
                    if (lower(t)) continue;
                    grad_diff = gmax + g[t];
                    if (g[t] >= gmax2) gmax2 = g[t];
                    quad = qd(i) + qd(t) - 2.0 * y[i] * q[i * n + t];
                } else {
                    if (upper(t)) continue;
                    grad_diff = gmax - g[t];
                    if (-g[t] >= gmax2) gmax2 = -g[t];
                    quad = qd(i) + qd(t) + 2.0 * y[i] * q[i * n + t];
                }
                if (grad_diff > 0.0) {
                    const double obj = -(grad_diff * grad_diff) / (quad > 0.0 ? quad : kTau);
                    if (obj <= best) {
                        best = obj;
                        jj = static_cast<std::ptrdiff_t>(t);
                    }
                }
            }
        }
        if (ii < 0 || jj < 0 || gmax + gmax2 < hp.svm_tolerance) {
            m.converged = true;
            break;
        }
        ++iter;
        const auto i = static_cast<std::size_t>(ii);
        const auto j = static_cast<std::size_t>(jj);
        const double old_i = alpha[i];
        const double old_j = alpha[j];
        if (y[i] != y[j]) {
            double quad = qd(i) + qd(j) + 2.0 * q[i * n + j];
            if (quad <= 0.0) quad = kTau;
            const double delta = (-g[i] - g[j]) / quad;
            const double diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if (diff > 0.0) {
                if (alpha[j] < 0.0) {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if (alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if (diff > 0.0) {
                if (alpha[i] > c) {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if (alpha[j] > c) {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            double quad = qd(i) + qd(j) - 2.0 * q[i * n + j];
            if (quad <= 0.0) quad = kTau;
            const double delta = (g[i] - g[j]) / quad;
            const double sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if (sum > c) {
                if (alpha[i] > c) {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if (alpha[j] < 0.0) {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if (sum > c) {
                if (alpha[j] > c) {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if (alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        const double da = alpha[i] - old_i;
        const double db = alpha[j] - old_j;
        for (std::size_t t = 0; t < n; ++t) g[t] += q[i * n + t] * da + q[j * n + t] * db;
    }
    m.iterations = iter;

    // Offset from free vectors, or the middle of the feasible interval.
    double ub = std::numeric_limits<double>::infinity();
    double lb = -std::numeric_limits<double>::infinity();
    double sum_free = 0.0;
    int free = 0;
    for (std::size_t t = 0; t < n; ++t) {
        const double yg = y[t] * g[t];
        if (upper(t)) {
            if (y[t] == -1) ub = std::min(ub, yg);
            else lb = std::max(lb, yg);
        } else if (lower(t)) {
            if (y[t] == 1) ub = std::min(ub, yg);
            else lb = std::max(lb, yg);
        } else {
            ++free;
            sum_free += yg;
        }
    }
    m.rho = free > 0 ? sum_free / free : (ub + lb) / 2.0;

    m.alpha = alpha;
    for (std::size_t t = 0; t < n; ++t) {
        if (alpha[t] > 0.0) {
            m.support_vectors.push_back(m.train_x[t]);
            m.coef.push_back(alpha[t] * y[t]);
        }
    }
    return m;
}

}  // namespace lvmotion
