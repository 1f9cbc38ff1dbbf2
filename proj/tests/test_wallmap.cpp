#include <doctest.h>

#include <cmath>
#include <numbers>

#include "lvmotion/error.hpp"
#include "lvmotion/synth.hpp"
#include "lvmotion/wallmap.hpp"
#include "test_util.hpp"

using namespace lvmotion;
using lvtest::code_of;

namespace {

EndocardialBoundary line(int length)
{
    std::vector<Point> pts;
    for (int y = 0; y <= length; ++y) pts.push_back({0, y});
    return EndocardialBoundary::from_points(std::move(pts));
}

// Partition whose every arc is the whole polyline; isolates the sampler.
SegmentPartition whole(const EndocardialBoundary& b)
{
    SegmentPartition p;
    for (auto& a : p.arcs) a = {0, b.size() - 1};
    return p;
}

EndocardialBoundary translated(const EndocardialBoundary& b, int dx, int dy)
{
    auto pts = b.points;
    for (auto& p : pts) {
        p.x += dx;
        p.y += dy;
    }
    return EndocardialBoundary::from_points(std::move(pts));
}

double arc_length(const EndocardialBoundary& b, IndexRange r)
{
    return b.arclengths[r.last] - b.arclengths[r.first];
}

void check_cover(const SegmentPartition& p, std::size_t n)
{
    std::vector<int> hits(n, 0);
    for (const auto& a : p.arcs) {
        REQUIRE(a.first <= a.last);
        REQUIRE(a.last < n);
        for (std::size_t i = a.first; i <= a.last; ++i) ++hits[i];
    }
    for (std::size_t i = 0; i < n; ++i) CHECK(hits[i] == (i == p.apex_index ? 0 : 1));
    for (std::size_t k = 1; k < kSegmentCount; ++k) CHECK(p.arcs[k].first > p.arcs[k - 1].last);
    CHECK(p.arcs[2].last < p.apex_index);
    CHECK(p.arcs[3].first > p.apex_index);
}

std::vector<EndocardialBoundary> phantom_boundaries()
{
    std::vector<EndocardialBoundary> out;
    SyntheticHeartSpec spec;
    spec.amplitudes = {8, 1, 1, 8, 8, 8};
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const auto s = generate(spec, seed);
        for (std::size_t t = 0; t < s.sequence.frames.size(); t += 4) {
            out.push_back(extract_endocardial_boundary(s.sequence.frames[t]));
        }
    }
    out.push_back(extract_endocardial_boundary(lvtest::half_annulus(128, 128, 64, 60, 40.0, 8.0)));
    return out;
}

}  // namespace

TEST_SUITE("wallmap")
{
    TEST_CASE("symmetric half annulus splits evenly")
    {
        const auto b = extract_endocardial_boundary(lvtest::half_annulus(128, 128, 64, 60, 40.0, 8.0));
        const auto p = partition_boundary(b);
        CHECK(std::abs(p.L - p.R) / std::max(p.L, p.R) <= 0.02);
        const double s1 = arc_length(b, p.arcs[0]);
        const double s7 = arc_length(b, p.arcs[5]);
        CHECK(std::abs(s1 - s7) / std::max(s1, s7) <= 0.02);
        CHECK(std::abs(b.points[p.apex_index].x - 64) <= 1);
    }

    TEST_CASE("three point boundary is degenerate")
    {
        const auto b = EndocardialBoundary::from_points({{0, 0}, {1, 1}, {2, 0}});
        CHECK(code_of([&] { partition_boundary(b); }) == ErrorCode::DegenerateBoundary);
    }

    TEST_CASE("arcs are disjoint, ordered and cover everything but the apex")
    {
        for (const auto& b : phantom_boundaries()) {
            const auto p = partition_boundary(b);
            check_cover(p, b.size());
            const double step = std::sqrt(2.0);
            for (std::size_t k = 0; k < 3; ++k) CHECK(std::abs(arc_length(b, p.arcs[k]) - p.L / 3) <= 2 * step);
            for (std::size_t k = 3; k < 6; ++k) CHECK(std::abs(arc_length(b, p.arcs[k]) - p.R / 3) <= 2 * step);
            CHECK(p.L + p.R == doctest::Approx(b.length()));
        }
    }

    TEST_CASE("N = 20 gives 20 points per segment")
    {
        const auto b = phantom_boundaries().front();
        const auto p = partition_boundary(b);
        const auto s = sample_segments(p, b, 20);
        for (std::size_t k = 0; k < kSegmentCount; ++k) {
            CHECK(s[k].segment_id == kSegmentIds[k]);
            CHECK(s[k].points.size() == 20);
        }
        CHECK(sample_segments(p, b, 20) == s);
    }

    TEST_CASE("N = 2 gives the arc endpoints")
    {
        const auto b = phantom_boundaries().back();
        const auto p = partition_boundary(b);
        const auto s = sample_segments(p, b, 2);
        for (std::size_t k = 0; k < kSegmentCount; ++k) {
            REQUIRE(s[k].points.size() == 2);
            CHECK(s[k].points[0] == b.points[p.arcs[k].first]);
            CHECK(s[k].points[1] == b.points[p.arcs[k].last]);
        }
    }

    TEST_CASE("straight arc (0,0)..(0,9) with N = 4")
    {
        const auto b = line(9);
        const auto s = sample_segments(whole(b), b, 4);
        const std::vector<Point> expected{{0, 0}, {0, 3}, {0, 6}, {0, 9}};
        for (const auto& seg : s) CHECK(seg.points == expected);
    }

    TEST_CASE("N < 2 is rejected")
    {
        const auto b = line(9);
        CHECK(code_of([&] { sample_segments(whole(b), b, 1); }) == ErrorCode::BadSampleCount);
        CHECK(code_of([&] { sample_segments(whole(b), b, 0); }) == ErrorCode::BadSampleCount);
    }

    TEST_CASE("refinement: N and 2N-1 agree on shared positions")
    {
        for (int len : {9, 12, 30, 47}) {
            const auto b = line(len);
            for (int n = 2; n <= 12; ++n) {
                const auto coarse = sample_segments(whole(b), b, n)[0].points;
                const auto fine = sample_segments(whole(b), b, 2 * n - 1)[0].points;
                for (int i = 0; i < n; ++i) CHECK(coarse[static_cast<std::size_t>(i)] == fine[static_cast<std::size_t>(2 * i)]);
            }
        }
    }

    TEST_CASE("sampled points advance along the arc")
    {
        for (const auto& b : phantom_boundaries()) {
            const auto p = partition_boundary(b);
            const auto s = sample_segments(p, b, 20);
            for (std::size_t k = 0; k < kSegmentCount; ++k) {
                // Each sample rounds to a point within one pixel of the arc.
                for (const auto& q : s[k].points) {
                    double best = 1e9;
                    for (std::size_t i = p.arcs[k].first; i <= p.arcs[k].last; ++i) {
                        best = std::min(best, std::hypot(q.x - b.points[i].x, q.y - b.points[i].y));
                    }
                    CHECK(best <= 1.0);
                }
            }
        }
    }

    TEST_CASE("apex moves with an integer translation, L and R do not")
    {
        for (const auto& b : phantom_boundaries()) {
            const auto p = partition_boundary(b);
            const auto q = partition_boundary(translated(b, 7, -5));
            CHECK(q.apex_index == p.apex_index);
            CHECK(q.L == p.L);
            CHECK(q.R == p.R);
        }
    }

    TEST_CASE("tracked partition: translation invariant, knots between arcs")
    {
        for (const auto& b : phantom_boundaries()) {
            const auto ref = polar_reference(b);
            const auto p = tracked_partition(b, ref);
            check_cover(p, b.size());
            CHECK(p.L + p.R == doctest::Approx(b.length()));
            for (std::size_t k = 0; k < 4; ++k) CHECK(p.knots[k] > 0.0);
            CHECK(p.knots[1] < p.L);
            CHECK(p.knots[2] > p.L);

            const auto moved = translated(b, -3, 11);
            const auto ref_m = polar_reference(moved);
            CHECK(ref_m.center.x == doctest::Approx(ref.center.x - 3).epsilon(1e-12));
            CHECK(ref_m.center.y == doctest::Approx(ref.center.y + 11).epsilon(1e-12));
            CHECK(tracked_partition(moved, ref_m).arcs == p.arcs);
        }
    }

    TEST_CASE("reference knot angles are increasing, fitted center near the phantom's")
    {
        SyntheticHeartSpec spec;
        const auto s = generate(spec, 3);
        const auto b = extract_endocardial_boundary(s.sequence.frames[0]);
        const auto ref = polar_reference(b);
        for (std::size_t k = 1; k < 5; ++k) CHECK(ref.knot_angles[k] > ref.knot_angles[k - 1]);
        const PointF off = raster_offset(3);
        CHECK(std::hypot(ref.center.x - (spec.center_x + off.x), ref.center.y - (spec.center_y + off.y)) < 1.5);
        CHECK(ref.knot_angles[2] == doctest::Approx(std::numbers::pi).epsilon(0.03));
    }

    TEST_CASE("polar angle convention")
    {
        const PointF c{10, 10};
        CHECK(polar_angle({10, 20}, c) == doctest::Approx(0.0));
        CHECK(polar_angle({0, 10}, c) == doctest::Approx(std::numbers::pi / 2));
        CHECK(polar_angle({10, 0}, c) == doctest::Approx(std::numbers::pi));
        CHECK(polar_angle({20, 10}, c) == doctest::Approx(3 * std::numbers::pi / 2));
    }

    TEST_CASE("level split must be positive")
    {
        const auto b = phantom_boundaries().back();
        CHECK(code_of([&] { partition_boundary(b, {0.0, 0.5, 0.5}); }) == ErrorCode::ValidationError);
        const auto p = partition_boundary(b, {0.5, 0.25, 0.25});
        CHECK(p.knots[0] == doctest::Approx(p.L * 0.5));
        CHECK(p.knots[3] == doctest::Approx(p.L + p.R * 0.5));
    }
}
