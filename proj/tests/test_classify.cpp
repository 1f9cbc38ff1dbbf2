#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "lvmotion/classify.hpp"
#include "lvmotion/error.hpp"
#include "lvmotion/random.hpp"
#include "test_util.hpp"

using namespace lvmotion;
using lvtest::code_of;

namespace {

const std::vector<ClassifierKind> kKinds{ClassifierKind::Svm, ClassifierKind::Lr, ClassifierKind::Dt,
                                         ClassifierKind::Knn};

// Two Gaussian blobs whose means are `distance` pooled standard deviations apart.
std::vector<LabeledSample> blobs(std::uint64_t seed, int n, double distance)
{
    Rng rng(seed);
    const double shift = distance / std::sqrt(static_cast<double>(kSegmentCount));
    std::vector<LabeledSample> out;
    for (int i = 0; i < n; ++i) {
        LabeledSample s;
        s.video_id = "s" + std::to_string(i);
        s.label = i % 2;
        for (double& v : s.feature) v = rng.normal() + (s.label ? shift : 0.0);
        out.push_back(s);
    }
    return out;
}

std::vector<Feature> features(const std::vector<LabeledSample>& d)
{
    std::vector<Feature> x;
    for (const auto& s : d) x.push_back(s.feature);
    return x;
}

std::vector<int> labels(const std::vector<LabeledSample>& d)
{
    std::vector<int> y;
    for (const auto& s : d) y.push_back(s.label);
    return y;
}

double training_accuracy(const std::vector<LabeledSample>& d, ClassifierKind kind)
{
    const auto m = train(d, kind);
    int ok = 0;
    for (const auto& s : d) ok += predict(m, s.feature) == s.label;
    return static_cast<double>(ok) / static_cast<double>(d.size());
}

}  // namespace

TEST_SUITE("classify")
{
    TEST_CASE("stratified folds: 7 positive, 3 negative, k = 5")
    {
        const std::vector<int> y{1, 1, 0, 1, 1, 0, 1, 1, 0, 1};
        const auto split = stratified_kfold(y, 5, 42);
        REQUIRE(split.folds.size() == 5);
        std::vector<int> pos;
        for (const auto& f : split.folds) {
            CHECK(f.size() == 2);
            int p = 0;
            for (auto i : f) p += y[i];
            pos.push_back(p);
        }
        std::sort(pos.begin(), pos.end());
        CHECK(pos == std::vector<int>{1, 1, 1, 2, 2});
    }

    TEST_CASE("stratified folds: properties")
    {
        Rng rng(12);
        for (int trial = 0; trial < 100; ++trial) {
            const auto n = 5 + rng.below(80);
            std::vector<int> y(n);
            for (int& v : y) v = rng.uniform() < 0.3 ? 1 : 0;
            y[0] = 1;
            y[1] = 0;
            const int k = 2 + static_cast<int>(rng.below(std::min<std::uint64_t>(n - 1, 9)));
            const auto split = stratified_kfold(y, k, trial);
            std::vector<int> seen(n, 0);
            const double total_pos = std::count(y.begin(), y.end(), 1);
            for (const auto& f : split.folds) {
                double p = 0;
                for (auto i : f) {
                    ++seen[i];
                    p += y[i];
                }
                CHECK(std::abs(p - total_pos / k) <= 1.0);
            }
            for (int s : seen) CHECK(s == 1);
            CHECK(stratified_kfold(y, k, trial).folds == split.folds);
        }
    }

    TEST_CASE("k equal to the sample count is leave-one-out")
    {
        const std::vector<int> y{0, 1, 0, 1, 1, 0, 0};
        const auto split = stratified_kfold(y, 7, 1);
        std::set<std::size_t> all;
        for (const auto& f : split.folds) {
            CHECK(f.size() == 1);
            all.insert(f[0]);
        }
        CHECK(all.size() == 7);
    }

    TEST_CASE("bad k")
    {
        const std::vector<int> y{0, 1, 0, 1};
        CHECK(code_of([&] { stratified_kfold(y, 1, 0); }) == ErrorCode::BadK);
        CHECK(code_of([&] { stratified_kfold(y, 5, 0); }) == ErrorCode::BadK);
    }

    TEST_CASE("separable blobs: training accuracy")
    {
        const auto d = blobs(1, 200, 4.0);
        for (auto kind : kKinds) {
            INFO(to_string(kind));
            CHECK(training_accuracy(d, kind) >= 0.95);
        }
    }

    TEST_CASE("KNN with k = 1 memorizes")
    {
        const auto d = blobs(2, 120, 0.5);
        const auto x = features(d);
        const auto y = labels(d);
        Hyperparams hp;
        hp.knn_k = 1;
        const auto m = train_knn(x, y, hp);
        for (std::size_t i = 0; i < x.size(); ++i) CHECK(m.predict(x[i]) == y[i]);
    }

    TEST_CASE("single class")
    {
        auto d = blobs(3, 20, 4.0);
        for (auto& s : d) s.label = 1;
        CHECK(code_of([&] { train(d, ClassifierKind::Dt); }) == ErrorCode::DegenerateData);
        CHECK(code_of([&] { train(d, ClassifierKind::Lr); }) == ErrorCode::DegenerateData);
        CHECK(code_of([&] { train(d, ClassifierKind::Svm); }) == ErrorCode::DegenerateData);
        const auto knn = train(d, ClassifierKind::Knn);
        CHECK(predict(knn, d[0].feature) == 1);
    }

    TEST_CASE("decision tree split by seg1 >= 0.5")
    {
        std::vector<LabeledSample> d{{"a", {0.1, 0.7, 0.2, 0.0, 0.5, 0.3}, 0},
                                     {"b", {0.3, 0.2, 0.9, 0.4, 0.1, 0.6}, 0},
                                     {"c", {0.6, 0.5, 0.3, 0.8, 0.2, 0.1}, 1},
                                     {"d", {0.8, 0.1, 0.6, 0.2, 0.9, 0.4}, 1}};
        const auto m = train(d, ClassifierKind::Dt);
        const auto& tree = std::get<TreeModel>(m.model);
        REQUIRE(tree.nodes.size() == 3);
        CHECK(tree.nodes[0].feature == 0);
        CHECK(tree.nodes[0].threshold > 0.3);
        CHECK(tree.nodes[0].threshold < 0.6);
        CHECK(predict(m, {0.9, 0, 0, 0, 0, 0}) == 1);
        CHECK(predict(m, {0.2, 1, 1, 1, 1, 1}) == 0);
    }

    TEST_CASE("KNN majority among the 5 nearest")
    {
        std::vector<Feature> x{{0.50, 0.5, 0.5, 0.5, 0.5, 0.5}, {0.52, 0.5, 0.5, 0.5, 0.5, 0.5},
                               {0.48, 0.5, 0.5, 0.5, 0.5, 0.5}, {0.5, 0.52, 0.5, 0.5, 0.5, 0.5},
                               {0.5, 0.48, 0.5, 0.5, 0.5, 0.5}, {0.0, 0.0, 0.0, 0.0, 0.0, 0.0},
                               {1.0, 1.0, 1.0, 1.0, 1.0, 1.0}, {0.0, 1.0, 0.0, 1.0, 0.0, 1.0}};
        const std::vector<int> y{1, 1, 1, 0, 0, 0, 0, 0};
        const auto m = train_knn(x, y);
        CHECK(m.predict({0.5, 0.5, 0.5, 0.5, 0.5, 0.5}) == 1);
    }

    TEST_CASE("LR with zero parameters ties to 0")
    {
        ClassifierModel m;
        m.kind = ClassifierKind::Lr;
        LogisticModel lr;
        lr.standardizer.scale.fill(1.0);
        m.model = lr;
        CHECK(lr.decision({0.3, 0.1, 0.9, 0.2, 0.4, 0.5}) == 0.0);
        CHECK(predict(m, {0.3, 0.1, 0.9, 0.2, 0.4, 0.5}) == 0);
    }

    TEST_CASE("LR gradient matches central differences")
    {
        const auto d = blobs(5, 60, 2.0);
        const auto x = features(d);
        const auto y = labels(d);
        Rng rng(77);
        for (int point = 0; point < 10; ++point) {
            Feature w{};
            for (double& v : w) v = rng.uniform(-2.0, 2.0);
            const double b = rng.uniform(-1.0, 1.0);
            const auto g = logistic_gradient(x, y, w, b, 1.0);
            for (std::size_t j = 0; j < 7; ++j) {
                const double h = 1e-6;
                Feature wp = w, wm = w;
                double bp = b, bm = b;
                if (j < 6) {
                    wp[j] += h;
                    wm[j] -= h;
                } else {
                    bp += h;
                    bm -= h;
                }
                const double fd =
                    (logistic_objective(x, y, wp, bp, 1.0) - logistic_objective(x, y, wm, bm, 1.0)) / (2 * h);
                CHECK(std::abs(fd - g[j]) / std::max(1.0, std::abs(g[j])) <= 1e-5);
            }
        }
    }

    TEST_CASE("LR converges to a zero gradient")
    {
        const auto d = blobs(6, 100, 1.5);
        const auto x = features(d);
        const auto y = labels(d);
        const auto m = train_logistic(x, y);
        CHECK(m.converged);
        const auto g = logistic_gradient(m.standardizer.apply(x), y, m.w, m.b, 1.0);
        double norm = 0.0;
        for (double v : g) norm += v * v;
        CHECK(std::sqrt(norm) <= 1e-4);
    }

    TEST_CASE("SVM dual satisfies the KKT conditions")
    {
        for (std::uint64_t seed : {7u, 8u}) {
            const auto d = blobs(seed, 120, 1.5);
            const auto m = train_svm(features(d), labels(d));
            CHECK(m.converged);
            const double c = 1.0;
            const double tol = 1e-3;
            for (std::size_t i = 0; i < m.train_x.size(); ++i) {
                const double a = m.alpha[i];
                CHECK(a >= -tol);
                CHECK(a <= c + tol);
                double f = -m.rho;
                for (std::size_t j = 0; j < m.train_x.size(); ++j) {
                    f += m.alpha[j] * m.train_y[j] * m.kernel(m.train_x[j], m.train_x[i]);
                }
                const double margin = m.train_y[i] * f;
                if (a <= tol) CHECK(margin >= 1.0 - tol);
                else if (a >= c - tol) CHECK(margin <= 1.0 + tol);
                else CHECK(std::abs(margin - 1.0) <= tol);
            }
        }
    }

    TEST_CASE("cross-validation on blobs and on noise")
    {
        const auto d = lvtest::separable_blobs(42, 200, 4.0, 0.5);
        for (auto kind : kKinds) {
            INFO(to_string(kind));
            const auto r = cross_validate(d, kind, 5, 42);
            CHECK(*r.pooled.accuracy >= 0.95);
            CHECK(r.folds.size() == 5);
            CHECK(r.predictions.size() == d.size());
            CHECK(r.pooled_confusion.total() == d.size());
            CHECK(to_json(cross_validate(d, kind, 5, 42)).dump() == to_json(r).dump());
        }

        Rng rng(99);
        std::vector<LabeledSample> noise;
        for (int i = 0; i < 200; ++i) {
            LabeledSample s;
            s.video_id = std::to_string(i);
            s.label = static_cast<int>(rng.below(2));
            for (double& v : s.feature) v = rng.uniform();
            noise.push_back(s);
        }
        const auto r = cross_validate(noise, ClassifierKind::Knn, 5, 42);
        CHECK(*r.pooled.accuracy >= 0.35);
        CHECK(*r.pooled.accuracy <= 0.65);
    }

    TEST_CASE("held-out samples never influence their own fold's model")
    {
        const auto d = blobs(11, 60, 1.0);
        for (auto kind : kKinds) {
            INFO(to_string(kind));
            const auto base = cross_validate(d, kind, 5, 3);
            const auto& fold = base.split.folds[2];
            auto altered = d;
            const std::size_t victim = fold[0];
            for (double& v : altered[victim].feature) v = 50.0;
            const auto changed = cross_validate(altered, kind, 5, 3);
            CHECK(changed.split.folds == base.split.folds);
            for (std::size_t i : fold) {
                if (i != victim) CHECK(changed.predictions[i] == base.predictions[i]);
            }
        }
        // Standardizer statistics come from the rows they are fit on only.
        std::vector<Feature> train{{0, 0, 0, 0, 0, 0}, {2, 2, 2, 2, 2, 2}};
        const auto s = Standardizer::fit(train);
        CHECK(s.mean[0] == 1.0);
        CHECK(s.apply(Feature{3, 3, 3, 3, 3, 3})[0] == doctest::Approx(2.0));
    }

    TEST_CASE("classifier names")
    {
        CHECK(parse_classifier("svm") == ClassifierKind::Svm);
        CHECK(parse_classifier("knn") == ClassifierKind::Knn);
        CHECK(to_string(ClassifierKind::Dt) == "dt");
        CHECK_THROWS_AS(parse_classifier("rf"), std::invalid_argument);
    }
}
