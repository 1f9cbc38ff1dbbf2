#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "lvmotion/ensemble.hpp"
#include "lvmotion/error.hpp"
#include "lvmotion/random.hpp"
#include "test_util.hpp"

using namespace lvmotion;
using lvtest::code_of;

namespace {

// Published per-segment IoUs of two networks, segments 1, 2, 3, 5, 6, 7.
const ModelMetrics kPan{"PAN", {0.858, 0.938, 0.729, 0.901, 0.864, 0.845}};
const ModelMetrics kUnet{"UNet", {0.868, 0.845, 0.877, 0.905, 0.979, 0.894}};

MotionFeature feature(const std::string& id, SegmentVector v)
{
    MotionFeature f;
    f.video_id = id;
    f.values = v;
    return f;
}

ModelMetrics random_metrics(Rng& rng)
{
    ModelMetrics m;
    for (double& v : m.values) v = rng.uniform(0.01, 1.0);
    if (rng.below(4) == 0) m.values[rng.below(kSegmentCount)] = 1.0;
    return m;
}

}  // namespace

TEST_SUITE("ensemble")
{
    TEST_CASE("equal metrics give equal weights")
    {
        const ModelMetrics half{"a", {0.5, 0.5, 0.5, 0.5, 0.5, 0.5}};
        const auto w = compute_weights({half, half});
        for (const auto& row : w) {
            for (double v : row) CHECK(v == 0.5);
        }
    }

    TEST_CASE("PAN and UNet segment-2 weights")
    {
        const auto w = compute_weights({kPan, kUnet});
        // Independent arithmetic on the same inputs.
        const double pan = 0.938 / (0.938 + 0.845);
        const double unet = 0.845 / (0.938 + 0.845);
        CHECK(std::abs(w[0][1] - pan) <= 1e-12);
        CHECK(std::abs(w[1][1] - unet) <= 1e-12);
        CHECK(std::abs(w[0][1] - 0.5261) <= 1e-4);
        CHECK(std::abs(w[1][1] - 0.4739) <= 1e-4);
    }

    TEST_CASE("a single model gets weight 1")
    {
        const auto w = compute_weights({kPan});
        REQUIRE(w.size() == 1);
        for (double v : w[0]) CHECK(v == 1.0);
        const auto f = feature("v", {0.1, 0.2, 0.3, 0.4, 0.5, 1.0});
        CHECK(accumulate({f}, w).values == f.values);
    }

    TEST_CASE("metric validation")
    {
        CHECK(code_of([] { compute_weights({}); }) == ErrorCode::EmptyModelList);
        ModelMetrics zero = kPan;
        zero.values[3] = 0.0;
        CHECK(code_of([&] { compute_weights({kPan, zero}); }) == ErrorCode::NonPositiveMetric);
        ModelMetrics neg = kPan;
        neg.values[0] = -0.2;
        CHECK(code_of([&] { compute_weights({neg}); }) == ErrorCode::NonPositiveMetric);
        ModelMetrics big = kPan;
        big.values[0] = 1.5;
        CHECK_THROWS_AS(compute_weights({big}), Error);
    }

    TEST_CASE("random metric sets: column sums, scale invariance, convexity")
    {
        Rng rng(17);
        for (int trial = 0; trial < 300; ++trial) {
            const auto n = 1 + rng.below(5);
            std::vector<ModelMetrics> ms;
            for (std::uint64_t i = 0; i < n; ++i) ms.push_back(random_metrics(rng));
            const auto w = compute_weights(ms);
            REQUIRE(w.size() == n);
            for (std::size_t j = 0; j < kSegmentCount; ++j) {
                double sum = 0.0;
                for (const auto& row : w) {
                    CHECK(row[j] > 0.0);
                    CHECK(row[j] <= 1.0);
                    sum += row[j];
                }
                CHECK(std::abs(sum - 1.0) <= 1e-9);
            }

            // Scaling every model by the same c leaves W unchanged.
            const double c = rng.uniform(0.05, 1.0);
            auto scaled = ms;
            for (auto& m : scaled) {
                for (double& v : m.values) v *= c;
            }
            const auto ws = compute_weights(scaled);
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < kSegmentCount; ++j) CHECK(std::abs(ws[i][j] - w[i][j]) <= 1e-12);
            }

            std::vector<MotionFeature> fs;
            for (std::uint64_t i = 0; i < n; ++i) {
                SegmentVector v{};
                for (double& x : v) x = rng.uniform();
                fs.push_back(feature("vid", v));
            }
            const auto acc = accumulate(fs, w);
            for (std::size_t j = 0; j < kSegmentCount; ++j) {
                double lo = 1e9, hi = -1e9;
                for (const auto& f : fs) {
                    lo = std::min(lo, f.values[j]);
                    hi = std::max(hi, f.values[j]);
                }
                CHECK(acc.values[j] >= lo - 1e-12);
                CHECK(acc.values[j] <= hi + 1e-12);
            }
        }
    }

    TEST_CASE("identical features are a fixed point")
    {
        const auto f = feature("x", {0.3, 1.0, 0.0, 0.25, 0.5, 0.75});
        const auto acc = accumulate({f, f}, compute_weights({kPan, kUnet}));
        for (std::size_t j = 0; j < kSegmentCount; ++j) CHECK(acc.values[j] == doctest::Approx(f.values[j]).epsilon(1e-15));
    }

    TEST_CASE("hand evaluation of the weighted sum")
    {
        const auto a = feature("v", {1, 0, 0, 0, 0, 0});
        const auto b = feature("v", {0, 1, 0, 0, 0, 0});
        const WeightMatrix half{{0.5, 0.5, 0.5, 0.5, 0.5, 0.5}, {0.5, 0.5, 0.5, 0.5, 0.5, 0.5}};
        const SegmentVector expected{0.5, 0.5, 0, 0, 0, 0};
        CHECK(accumulate({a, b}, half).values == expected);
        CHECK(average_accumulate({a, b}).values == expected);
        CHECK(average_accumulate({a}).values == a.values);
    }

    TEST_CASE("averaging equals weighting with equal metrics, exactly")
    {
        Rng rng(23);
        for (int trial = 0; trial < 200; ++trial) {
            const auto n = 1 + rng.below(5);
            std::vector<MotionFeature> fs;
            for (std::uint64_t i = 0; i < n; ++i) {
                SegmentVector v{};
                for (double& x : v) x = rng.uniform();
                fs.push_back(feature("v", v));
            }
            const double m = rng.uniform(0.1, 1.0);
            const std::vector<ModelMetrics> equal(n, ModelMetrics{"m", {m, m, m, m, m, m}});
            CHECK(accumulate(fs, compute_weights(equal)).values == average_accumulate(fs).values);
        }
    }

    TEST_CASE("degenerate flag and input checks")
    {
        auto a = feature("v", {});
        a.degenerate = true;
        auto b = a;
        const WeightMatrix half{{0.5, 0.5, 0.5, 0.5, 0.5, 0.5}, {0.5, 0.5, 0.5, 0.5, 0.5, 0.5}};
        CHECK(accumulate({a, b}, half).degenerate);
        b = feature("v", {1, 0, 0, 0, 0, 0});
        CHECK_FALSE(accumulate({a, b}, half).degenerate);
        CHECK(code_of([&] { accumulate({a}, half); }) == ErrorCode::CountMismatch);
        CHECK(code_of([&] { accumulate({a, feature("w", {})}, half); }) == ErrorCode::VideoIdMismatch);
        CHECK(code_of([&] { average_accumulate({}); }) == ErrorCode::EmptyModelList);
    }

    TEST_CASE("renormalize")
    {
        const auto r = renormalize(feature("v", {0.25, 0.5, 0.125, 0, 0, 0}));
        CHECK(r.values == SegmentVector{0.5, 1.0, 0.25, 0, 0, 0});
        CHECK(renormalize(feature("v", {})).values == SegmentVector{});
    }

    TEST_CASE("fuse tables over shared ids, ordered by id")
    {
        io::FeatureTable a, b;
        a.rows.push_back({"c", {1, 0, 0, 0, 0, 0}, 1});
        a.rows.push_back({"a", {0, 1, 0, 0, 0, 0}, 0});
        a.rows.push_back({"only_a", {0, 0, 1, 0, 0, 0}, std::nullopt});
        b.rows.push_back({"a", {1, 1, 0, 0, 0, 0}, std::nullopt});
        b.rows.push_back({"c", {0, 0, 0, 0, 0, 1}, std::nullopt});
        const WeightMatrix half{{0.5, 0.5, 0.5, 0.5, 0.5, 0.5}, {0.5, 0.5, 0.5, 0.5, 0.5, 0.5}};
        const auto fused = fuse_tables({a, b}, half, false);
        REQUIRE(fused.rows.size() == 2);
        CHECK(fused.rows[0].video_id == "a");
        CHECK(fused.rows[0].values == SegmentVector{0.5, 1.0, 0, 0, 0, 0});
        CHECK(fused.rows[0].label == 0);
        CHECK(fused.rows[1].video_id == "c");
        CHECK(fused.rows[1].label == 1);
        const auto renormed = fuse_tables({a, b}, half, true);
        CHECK(renormed.rows[1].values == SegmentVector{1, 0, 0, 0, 0, 1});
    }

    TEST_CASE("metrics JSON round-trip and weight export")
    {
        lvtest::TempDir dir;
        io::write_text(dir / "pan.json", metrics_to_json(kPan).dump(2));
        const auto back = read_metrics_json(dir / "pan.json");
        CHECK(back.model == "PAN");
        CHECK(back.values == kPan.values);
        io::write_text(dir / "bad.json", R"({"model":"x","segment_iou":[1,2]})");
        CHECK_THROWS_AS(read_metrics_json(dir / "bad.json"), Error);
        const auto j = weights_to_json({kPan, kUnet}, compute_weights({kPan, kUnet}));
        CHECK(j.dump().find("PAN") != std::string::npos);
    }
}
