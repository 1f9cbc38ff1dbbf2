#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "lvmotion/boundary.hpp"
#include "lvmotion/error.hpp"
#include "lvmotion/mask_io.hpp"
#include "lvmotion/metrics.hpp"
#include "lvmotion/synth.hpp"
#include "test_util.hpp"

using namespace lvmotion;
using lvtest::code_of;

namespace {

double mean_frame_iou(const MaskSequence& a, const MaskSequence& b)
{
    double sum = 0.0;
    for (std::size_t t = 0; t < a.frames.size(); ++t) sum += iou(a.frames[t], b.frames[t]).value;
    return sum / static_cast<double>(a.frames.size());
}

SyntheticHeartSpec moving_spec()
{
    SyntheticHeartSpec spec;
    spec.amplitudes = {8, 1, 1, 8, 8, 8};
    return spec;
}

}  // namespace

TEST_SUITE("synth")
{
    TEST_CASE("zero amplitudes give a static sequence")
    {
        SyntheticHeartSpec spec;
        const auto s = generate(spec, 3);
        REQUIRE(s.sequence.frames.size() == 25);
        for (const auto& f : s.sequence.frames) CHECK(f == s.sequence.frames[0]);
        for (const auto& curve : s.truth) {
            REQUIRE(curve.size() == 25);
            for (double v : curve) CHECK(v == 0.0);
        }
    }

    TEST_CASE("same spec and seed reproduce the sequence bit for bit")
    {
        const auto a = generate(moving_spec(), 9);
        const auto b = generate(moving_spec(), 9);
        CHECK(a.sequence.frames == b.sequence.frames);
        CHECK(a.truth == b.truth);
        CHECK(generate(moving_spec(), 10).sequence.frames != a.sequence.frames);
    }

    TEST_CASE("ground-truth curves follow the half-sine profile")
    {
        const auto spec = moving_spec();
        const auto s = generate(spec, 0);
        for (std::size_t k = 0; k < kSegmentCount; ++k) {
            for (int t = 0; t < spec.frames; ++t) {
                const double expected = spec.amplitudes[k] * std::sin(std::numbers::pi * t / (spec.frames - 1));
                CHECK(s.truth[k][static_cast<std::size_t>(t)] == doctest::Approx(expected).epsilon(1e-12));
            }
        }
        CHECK(phase(0, 25) == 0.0);
        CHECK(phase(12, 25) == doctest::Approx(1.0));
        CHECK(std::abs(phase(24, 25)) <= 1e-12);
    }

    TEST_CASE("amplitude taper is continuous and flat inside segments")
    {
        const auto spec = moving_spec();
        const auto borders = segment_borders(spec);
        for (std::size_t i = 1; i < borders.size(); ++i) CHECK(borders[i] > borders[i - 1]);
        double prev = amplitude_at(spec, borders[0] - 0.5);
        for (double th = borders[0] - 0.5; th <= borders[4] + 0.5; th += 1e-3) {
            const double a = amplitude_at(spec, th);
            CHECK(std::abs(a - prev) <= 0.05);
            CHECK(a >= 1.0 - 1e-12);
            CHECK(a <= 8.0 + 1e-12);
            prev = a;
        }
        // Middle of segment 2 sits well away from both borders.
        CHECK(amplitude_at(spec, 0.5 * (borders[0] + borders[1])) == doctest::Approx(1.0));
    }

    TEST_CASE("every generated frame validates and has a boundary")
    {
        for (std::uint64_t seed = 0; seed < 3; ++seed) {
            const auto s = generate(moving_spec(), seed);
            s.sequence.validate();
            for (const auto& f : s.sequence.frames) CHECK_NOTHROW(extract_endocardial_boundary(f));
        }
        const PointF off = raster_offset(5);
        CHECK(off.x >= -0.5);
        CHECK(off.x < 0.5);
        CHECK(off.y >= -0.5);
        CHECK(off.y < 0.5);
    }

    TEST_CASE("spec validation")
    {
        auto bad = [](auto edit) {
            SyntheticHeartSpec s;
            edit(s);
            return code_of([&] { s.validate(); });
        };
        CHECK(bad([](auto& s) { s.inner_radius = 19.0; }) == ErrorCode::SpecError);
        CHECK(bad([](auto& s) { s.wall_thickness = 3.9; }) == ErrorCode::SpecError);
        CHECK(bad([](auto& s) { s.amplitudes[2] = -0.1; }) == ErrorCode::SpecError);
        CHECK(bad([](auto& s) { s.amplitudes[0] = 20.0; }) == ErrorCode::SpecError);
        CHECK(bad([](auto& s) { s.frames = 2; }) == ErrorCode::SpecError);
        CHECK(bad([](auto& s) { s.opening_half_angle = 9.0; }) == ErrorCode::SpecError);
        CHECK(bad([](auto& s) { s.opening_half_angle = 61.0; }) == ErrorCode::SpecError);
        SyntheticHeartSpec ok;
        ok.opening_half_angle = 60.0;
        ok.amplitudes[0] = 19.9;
        CHECK_NOTHROW(ok.validate());
        CHECK(code_of([] {
                  SyntheticHeartSpec s;
                  s.frames = 1;
                  (void)generate(s, 0);
              }) == ErrorCode::SpecError);
    }

    TEST_CASE("spec JSON round-trip")
    {
        SyntheticHeartSpec spec = moving_spec();
        spec.video_id = "mi_007";
        spec.rigid_offset_x = 2;
        spec.label = 1;
        spec.segment_labels = std::array<int, kSegmentCount>{0, 1, 1, 0, 0, 0};
        const auto back = spec_from_json(nlohmann::json::parse(spec_to_json(spec).dump()));
        CHECK(spec_to_json(back).dump() == spec_to_json(spec).dump());
        CHECK(back.amplitudes == spec.amplitudes);
        CHECK(back.segment_labels == spec.segment_labels);
        CHECK(code_of([] { (void)spec_from_json(nlohmann::json::parse(R"({"frames":"x"})")); }) ==
              ErrorCode::SpecError);
    }

    TEST_CASE("corruption: identity, determinism, validity")
    {
        const auto seq = generate(moving_spec(), 1).sequence;
        CorruptionSpec none;
        none.seed = 5;
        CHECK(corrupt(seq, none).sequence.frames == seq.frames);

        CorruptionSpec c;
        c.jitter_sigma = 1.5;
        c.hole_rate = 0.1;
        c.protrusion_rate = 0.1;
        c.seed = 77;
        const auto a = corrupt(seq, c);
        const auto b = corrupt(seq, c);
        CHECK(a.sequence.frames == b.sequence.frames);
        CHECK(a.fallback_frames == b.fallback_frames);
        CHECK(a.sequence.frames != seq.frames);
        a.sequence.validate();
        for (const auto& f : a.sequence.frames) CHECK_NOTHROW(extract_endocardial_boundary(f));

        CorruptionSpec bad;
        bad.hole_rate = 0.3;
        CHECK(code_of([&] { bad.validate(); }) == ErrorCode::SpecError);
        bad = {};
        bad.jitter_sigma = -1.0;
        CHECK(code_of([&] { bad.validate(); }) == ErrorCode::SpecError);
    }

    TEST_CASE("stronger jitter lowers IoU against the original")
    {
        for (std::uint64_t seed = 0; seed < 3; ++seed) {
            const auto seq = generate(moving_spec(), seed).sequence;
            CorruptionSpec weak, strong;
            weak.jitter_sigma = 0.5;
            strong.jitter_sigma = 2.0;
            weak.seed = strong.seed = seed + 100;
            CHECK(mean_frame_iou(corrupt(seq, strong).sequence, seq) <
                  mean_frame_iou(corrupt(seq, weak).sequence, seq));
        }
    }

    TEST_CASE("segment-restricted corruption leaves other segments alone")
    {
        const auto seq = generate(moving_spec(), 2).sequence;
        CorruptionSpec c;
        c.jitter_sigma = 2.0;
        c.hole_rate = 0.1;
        c.seed = 4;
        c.segments = {1, 2, 3};
        const auto out = corrupt(seq, c).sequence;
        const auto m = per_segment_iou(out, seq);
        double restricted = 0.0, free = 0.0;
        for (std::size_t k = 0; k < 3; ++k) restricted += m.values[k];
        for (std::size_t k = 3; k < kSegmentCount; ++k) free += m.values[k];
        CHECK(free / 3.0 > restricted / 3.0);
        for (std::size_t k = 3; k < kSegmentCount; ++k) CHECK(m.values[k] >= 0.95);
    }

    TEST_CASE("corpus composition")
    {
        CorpusOptions opt;
        opt.mi = 6;
        opt.normal = 4;
        opt.seed = 3;
        const auto corpus = make_corpus(opt);
        REQUIRE(corpus.size() == 10);
        int mi = 0;
        std::set<std::string> ids;
        for (const auto& e : corpus) {
            e.spec.validate();
            ids.insert(e.spec.video_id);
            REQUIRE(e.spec.label.has_value());
            mi += *e.spec.label;
            int reduced = 0;
            for (double a : e.spec.amplitudes) {
                if (*e.spec.label == 0) {
                    CHECK(a >= 6.0);
                    CHECK(a <= 9.0);
                } else if (a < 6.0) {
                    CHECK(a >= 0.5);
                    CHECK(a <= 2.5);
                    ++reduced;
                }
            }
            if (*e.spec.label == 1) {
                CHECK(reduced >= 1);
                CHECK(reduced <= 2);
            }
        }
        CHECK(mi == 6);
        CHECK(ids.size() == 10);
        const auto again = make_corpus(opt);
        for (std::size_t i = 0; i < corpus.size(); ++i) {
            CHECK(spec_to_json(again[i].spec).dump() == spec_to_json(corpus[i].spec).dump());
            CHECK(again[i].seed == corpus[i].seed);
        }
    }

    TEST_CASE("generated recordings survive a save and load")
    {
        lvtest::TempDir dir;
        const auto s = generate(moving_spec(), 4);
        const auto manifest = io::save_sequence(s.sequence, dir / "rec");
        const auto back = io::load_sequence(manifest);
        CHECK(back.frames == s.sequence.frames);
        CHECK(back.video_id == s.sequence.video_id);
    }
}
