#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "lvmotion/error.hpp"
#include "lvmotion/metrics.hpp"
#include "lvmotion/random.hpp"
#include "lvmotion/synth.hpp"
#include "test_util.hpp"

using namespace lvmotion;
using lvtest::code_of;

namespace {

MaskFrame rect(int w, int h, int x0, int y0, int rw, int rh)
{
    MaskFrame f(w, h);
    for (int y = y0; y < y0 + rh; ++y) {
        for (int x = x0; x < x0 + rw; ++x) f.set(x, y, 1);
    }
    return f;
}

std::vector<int> coins(Rng& rng, std::size_t n)
{
    std::vector<int> v(n);
    for (int& x : v) x = static_cast<int>(rng.below(2));
    return v;
}

MaskSequence small_sequence()
{
    SyntheticHeartSpec spec;
    spec.frames = 5;
    spec.amplitudes = {4, 4, 4, 4, 4, 4};
    return generate(spec, 1).sequence;
}

}  // namespace

TEST_SUITE("metrics")
{
    TEST_CASE("iou examples")
    {
        const auto a = rect(10, 10, 1, 1, 4, 2);
        CHECK(iou(a, a).value == 1.0);
        CHECK(iou(a, rect(10, 10, 6, 6, 2, 2)).value == 0.0);
        // Two 2x4 rectangles sharing a 2x2 block.
        const auto b = rect(10, 10, 3, 1, 4, 2);
        CHECK(iou(a, b).value == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
        const auto e = iou(MaskFrame(4, 4), MaskFrame(4, 4));
        CHECK(e.both_empty);
        CHECK(e.value == 1.0);
        CHECK(code_of([] { (void)iou(MaskFrame(4, 4), MaskFrame(4, 5)); }) == ErrorCode::DimensionMismatch);
    }

    TEST_CASE("iou is symmetric and bounded")
    {
        Rng rng(31);
        for (int trial = 0; trial < 100; ++trial) {
            MaskFrame a(33, 17), b(33, 17);
            for (auto& p : a.pixels()) p = static_cast<std::uint8_t>(rng.below(2));
            for (auto& p : b.pixels()) p = static_cast<std::uint8_t>(rng.below(3) == 0);
            const double ab = iou(a, b).value;
            CHECK(ab == iou(b, a).value);
            CHECK(ab >= 0.0);
            CHECK(ab <= 1.0);
        }
    }

    TEST_CASE("per-segment iou: identity, deleted segment, empty prediction")
    {
        const auto gt = small_sequence();
        const auto same = per_segment_iou(gt, gt);
        for (double v : same.values) CHECK(v == 1.0);

        for (std::size_t k : {0u, 2u, 4u}) {
            MaskSequence pred = gt;
            for (std::size_t t = 0; t < gt.frames.size(); ++t) {
                const auto labels = segment_label_map(gt.frames[t], gt.frames[t]);
                auto& f = pred.frames[t];
                for (std::size_t i = 0; i < labels.size(); ++i) {
                    if (labels[i] == k) f.pixels()[i] = 0;
                }
            }
            const auto m = per_segment_iou(pred, gt);
            for (std::size_t j = 0; j < kSegmentCount; ++j) {
                if (j == k) CHECK(m.values[j] == 0.0);
                else CHECK(std::abs(m.values[j] - 1.0) <= 0.05);
            }
        }

        MaskSequence empty = gt;
        for (auto& f : empty.frames) f = MaskFrame(f.width(), f.height());
        for (double v : per_segment_iou(empty, gt).values) CHECK(v == 0.0);

        MaskSequence short_seq = gt;
        short_seq.frames.pop_back();
        CHECK(code_of([&] { per_segment_iou(short_seq, gt); }) == ErrorCode::CountMismatch);
    }

    TEST_CASE("label map: every wall pixel gets its nearest sample's segment")
    {
        const auto gt = small_sequence().frames[2];
        const auto labels = segment_label_map(gt, gt);
        std::set<int> seen;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (gt.pixels()[i]) {
                CHECK(labels[i] < kSegmentCount);
                seen.insert(labels[i]);
            } else {
                CHECK(labels[i] == kernels::kNoLabel);
            }
        }
        CHECK(seen.size() == kSegmentCount);
    }

    TEST_CASE("accumulators merge by summing counts")
    {
        const auto gt = small_sequence();
        MaskSequence pred = gt;
        pred.frames[1] = lvtest::shifted(pred.frames[1], 1, 0);
        SegmentIouAccumulator a, b, both;
        a.add(pred, gt);
        b.add(gt, gt);
        both.add(pred, gt);
        both.add(gt, gt);
        a += b;
        CHECK(a.counts() == both.counts());
    }

    TEST_CASE("confusion examples and naive oracle")
    {
        CHECK(confusion({1, 1, 0, 0}, {1, 1, 0, 0}) == ConfusionMatrix{2, 0, 2, 0});
        CHECK(confusion({1, 0}, {0, 1}) == ConfusionMatrix{0, 1, 0, 1});
        CHECK(code_of([] { confusion({1}, {1, 0}); }) == ErrorCode::LengthMismatch);
        CHECK(code_of([] { confusion({}, {}); }) == ErrorCode::Empty);

        Rng rng(5);
        for (int trial = 0; trial < 20; ++trial) {
            const auto truth = coins(rng, 1000);
            const auto pred = coins(rng, 1000);
            std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0;
            for (std::size_t i = 0; i < truth.size(); ++i) {
                if (truth[i] == 1 && pred[i] == 1) ++tp;
                if (truth[i] == 0 && pred[i] == 1) ++fp;
                if (truth[i] == 0 && pred[i] == 0) ++tn;
                if (truth[i] == 1 && pred[i] == 0) ++fn;
            }
            const auto cm = confusion(truth, pred);
            CHECK(cm == ConfusionMatrix{tp, fp, tn, fn});
            const auto s = summarize(cm);
            std::uint64_t agree = 0;
            for (std::size_t i = 0; i < truth.size(); ++i) agree += truth[i] == pred[i];
            CHECK(*s.accuracy == static_cast<double>(agree) / 1000.0);
        }
    }

    TEST_CASE("summary examples")
    {
        const auto s = summarize({8, 7, 3, 2});
        CHECK(*s.sensitivity == doctest::Approx(0.8));
        CHECK(*s.specificity == doctest::Approx(0.3));
        CHECK(*s.precision == doctest::Approx(8.0 / 15.0));
        CHECK(*s.accuracy == doctest::Approx(0.55));
        CHECK(*s.f_beta == doctest::Approx(0.64));

        const double f1 = *f_beta_score(0.913, 0.947, 1.0);
        CHECK(std::abs(f1 - 2 * 0.913 * 0.947 / (0.913 + 0.947)) <= 1e-15);
        CHECK(std::abs(f1 - 0.9297) <= 1e-4);

        const auto only_tp = summarize({5, 0, 0, 0});
        CHECK(*only_tp.sensitivity == 1.0);
        CHECK(*only_tp.precision == 1.0);
        CHECK_FALSE(only_tp.specificity.has_value());

        const auto none = summarize({0, 0, 4, 0});
        CHECK_FALSE(none.sensitivity.has_value());
        CHECK_FALSE(none.precision.has_value());
        CHECK_FALSE(none.f_beta.has_value());
        CHECK(to_json(none)["sensitivity"].is_null());
        CHECK(to_json(none)["specificity"] == 1.0);

        // F2 leans toward sensitivity.
        CHECK(*f_beta_score(0.5, 1.0, 2.0) == doctest::Approx(5.0 * 0.5 / (4.0 * 0.5 + 1.0)));
        CHECK_FALSE(f_beta_score(0.0, 0.0, 1.0).has_value());
    }

    TEST_CASE("macro average skips undefined values")
    {
        MetricBundle a, b;
        a.sensitivity = 0.5;
        b.sensitivity = 1.0;
        a.specificity = 0.25;
        const auto m = macro_average({a, b});
        CHECK(*m.sensitivity == 0.75);
        CHECK(*m.specificity == 0.25);
        CHECK_FALSE(m.precision.has_value());
    }

    TEST_CASE("kappa examples")
    {
        const auto k = cohens_kappa({1, 1, 0, 0, 1}, {1, 0, 0, 0, 1});
        CHECK(k.observed_agreement == doctest::Approx(0.8));
        CHECK(k.expected_agreement == doctest::Approx(0.48));
        CHECK(std::abs(*k.kappa - 0.32 / 0.52) <= 1e-12);
        CHECK(std::abs(*k.kappa - 0.6154) <= 1e-4);

        CHECK(*cohens_kappa({1, 0, 1, 0}, {1, 0, 1, 0}).kappa == 1.0);
        CHECK(*cohens_kappa({1, 0, 1, 0}, {0, 1, 0, 1}).kappa == -1.0);
        // Both raters constant and equal: p_e = 1 and p_o = 1.
        CHECK(*cohens_kappa({1, 1, 1}, {1, 1, 1}).kappa == 1.0);
        CHECK(*cohens_kappa({1, 1, 1}, {0, 0, 0}).kappa == 0.0);
        CHECK(code_of([] { cohens_kappa({1, 0}, {1}); }) == ErrorCode::LengthMismatch);
    }

    TEST_CASE("kappa bounds and rater symmetry")
    {
        Rng rng(41);
        for (int trial = 0; trial < 200; ++trial) {
            const auto n = 2 + rng.below(40);
            const auto a = coins(rng, n);
            const auto b = coins(rng, n);
            const auto ab = cohens_kappa(a, b);
            const auto ba = cohens_kappa(b, a);
            CHECK(ab.kappa.has_value() == ba.kappa.has_value());
            if (ab.kappa) {
                CHECK(*ab.kappa == *ba.kappa);
                CHECK(*ab.kappa >= -1.0);
                CHECK(*ab.kappa <= 1.0);
            }
        }
    }

    TEST_CASE("kappa protocol")
    {
        Rng rng(2);
        const auto base = coins(rng, 50);
        const auto same = kappa_protocol({base, base, base, base}, 20, 42);
        CHECK(same.pairs.size() == 6);
        CHECK(same.indices.size() == 20);
        CHECK(std::set<std::size_t>(same.indices.begin(), same.indices.end()).size() == 20);
        CHECK(*same.mean == 1.0);

        const auto other = coins(rng, 50);
        const auto two = kappa_protocol({base, other}, 50, 1);
        REQUIRE(two.pairs.size() == 1);
        CHECK(*two.mean == *two.pairs[0].result.kappa);
        CHECK(*two.mean == doctest::Approx(*cohens_kappa(base, other).kappa));

        CHECK(kappa_protocol({base, other}, 20, 9).indices == kappa_protocol({base, other}, 20, 9).indices);

        std::vector<std::vector<int>> sets;
        for (int i = 0; i < 4; ++i) sets.push_back(coins(rng, 10000));
        CHECK(std::abs(*kappa_protocol(sets, 10000, 42).mean) <= 0.05);

        CHECK(code_of([&] { kappa_protocol({base}, 10, 1); }) == ErrorCode::TooFewSets);
        CHECK(code_of([&] { kappa_protocol({base, base}, 51, 1); }) == ErrorCode::SampleTooLarge);
    }

    TEST_CASE("binary cross-entropy")
    {
        CHECK(bce(1.0, 1) <= 1e-11);
        CHECK(bce(0.0, 0) <= 1e-11);
        CHECK(bce(0.5, 1) == doctest::Approx(std::numbers::ln2));
        CHECK(bce(0.5, 0) == doctest::Approx(std::numbers::ln2));
        CHECK(std::isfinite(bce(0.0, 1)));
        double prev = bce(0.01, 1);
        for (double p = 0.02; p < 1.0; p += 0.01) {
            CHECK(bce(p, 1) < prev);
            prev = bce(p, 1);
        }
        prev = bce(0.99, 0);
        for (double p = 0.98; p > 0.0; p -= 0.01) {
            CHECK(bce(p, 0) < prev);
            prev = bce(p, 0);
        }
    }
}
