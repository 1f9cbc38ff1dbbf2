#include <algorithm>
#include <numeric>

#include "lvmotion/classify.hpp"
#include "lvmotion/kernels.hpp"

namespace lvmotion {

KnnModel train_knn(const std::vector<Feature>& x, const std::vector<int>& y, const Hyperparams& hp)
{
    KnnModel m;
    m.k = hp.knn_k;
    m.standardizer = Standardizer::fit(x);
    m.rows = x.size();
    m.columns.resize(kSegmentCount * x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const Feature s = m.standardizer.apply(x[i]);
        for (std::size_t j = 0; j < kSegmentCount; ++j) m.columns[j * x.size() + i] = s[j];
    }
    m.labels.reserve(y.size());
    for (int v : y) m.labels.push_back(v ? 1 : 0);
    return m;
}

int KnnModel::predict(const Feature& raw) const
{
    if (rows == 0 || k < 1) return 0;
    const Feature q = standardizer.apply(raw);
    std::vector<double> d(rows);
    kernels::squared_distances(columns, rows, q, d);
    std::vector<std::size_t> idx(rows);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    const std::size_t kk = std::min(rows, static_cast<std::size_t>(k));
    // Equal distances keep the lower training index.
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(kk), idx.end(),
                      [&](std::size_t a, std::size_t b) { return d[a] < d[b] || (d[a] == d[b] && a < b); });
    std::size_t pos = 0;
    for (std::size_t i = 0; i < kk; ++i) pos += static_cast<std::size_t>(labels[idx[i]]);
    return 2 * pos > kk ? 1 : 0;
}

}  // namespace lvmotion
