// CART-style decision tree on Gini impurity, grown until nodes are pure or
// hold fewer than two samples.

#include <algorithm>
#include <numeric>

#include "lvmotion/classify.hpp"

namespace lvmotion {

namespace {

double gini(int n0, int n1) noexcept
{
    const int n = n0 + n1;
    if (n == 0) return 0.0;
    const double p0 = static_cast<double>(n0) / n;
    const double p1 = static_cast<double>(n1) / n;
    return 1.0 - p0 * p0 - p1 * p1;
}

int grow(TreeModel& t, const std::vector<Feature>& x, const std::vector<int>& y, std::vector<std::size_t> idx)
{
    TreeNode node;
    for (std::size_t i : idx) ++node.counts[static_cast<std::size_t>(y[i] ? 1 : 0)];
    node.label = node.counts[1] > node.counts[0] ? 1 : 0;
    const int id = static_cast<int>(t.nodes.size());
    t.nodes.push_back(node);
    if (idx.size() < 2 || node.counts[0] == 0 || node.counts[1] == 0) return id;

    const auto n = static_cast<double>(idx.size());
    int best_feature = -1;
    double best_threshold = 0.0;
    double best_score = 0.0;
    for (std::size_t f = 0; f < kSegmentCount; ++f) {
        std::vector<std::size_t> order = idx;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a][f] < x[b][f]; });
        std::array<int, 2> left{};
        for (std::size_t k = 0; k + 1 < order.size(); ++k) {
            ++left[static_cast<std::size_t>(y[order[k]] ? 1 : 0)];
            const double a = x[order[k]][f];
            const double b = x[order[k + 1]][f];
            if (!(a < b)) continue;
            double thr = a + (b - a) / 2.0;
            if (!(thr < b)) thr = a;
            const int l0 = left[0];
            const int l1 = left[1];
            const int r0 = node.counts[0] - l0;
            const int r1 = node.counts[1] - l1;
            const double score = ((l0 + l1) * gini(l0, l1) + (r0 + r1) * gini(r0, r1)) / n;
            // Strict improvement only: earlier features and lower thresholds win ties.
            if (best_feature < 0 || score < best_score) {
                best_feature = static_cast<int>(f);
                best_threshold = thr;
                best_score = score;
            }
        }
    }
    if (best_feature < 0) return id;

    std::vector<std::size_t> l;
    std::vector<std::size_t> r;
    for (std::size_t i : idx) {
        (x[i][static_cast<std::size_t>(best_feature)] <= best_threshold ? l : r).push_back(i);
    }
    t.nodes[static_cast<std::size_t>(id)].feature = best_feature;
    t.nodes[static_cast<std::size_t>(id)].threshold = best_threshold;
    const int li = grow(t, x, y, std::move(l));
    const int ri = grow(t, x, y, std::move(r));
    t.nodes[static_cast<std::size_t>(id)].left = li;
    t.nodes[static_cast<std::size_t>(id)].right = ri;
    return id;
}

}  // namespace

TreeModel train_tree(const std::vector<Feature>& x, const std::vector<int>& y)
{
    TreeModel t;
    std::vector<std::size_t> idx(x.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    grow(t, x, y, std::move(idx));
    return t;
}

int TreeModel::predict(const Feature& raw) const noexcept
{
    if (nodes.empty()) return 0;
    std::size_t i = 0;
    while (nodes[i].feature >= 0) {
        const auto& n = nodes[i];
        i = static_cast<std::size_t>(raw[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
    }
    return nodes[i].label;
}

}  // namespace lvmotion
