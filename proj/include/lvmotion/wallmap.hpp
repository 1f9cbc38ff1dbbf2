#pragma once

#include <array>
#include <vector>

#include "lvmotion/boundary.hpp"
#include "lvmotion/types.hpp"

namespace lvmotion {

/// Inclusive index range into a boundary polyline.
struct IndexRange {
    std::size_t first = 0;
    std::size_t last = 0;

    [[nodiscard]] std::size_t size() const noexcept { return last - first + 1; }
    friend bool operator==(const IndexRange&, const IndexRange&) = default;
};

struct SegmentPartition {
    std::size_t apex_index = 0;
    double L = 0.0;  // basal-left endpoint to apex
    double R = 0.0;  // apex to basal-right endpoint
    std::array<IndexRange, kSegmentCount> arcs{};
    /// Arclength positions of the four level borders (1|2, 2|3, 5|6, 6|7).
    std::array<double, 4> knots{};

    friend bool operator==(const SegmentPartition&, const SegmentPartition&) = default;
};

/// Basal, mid and apical share of each wall side; must be positive.
struct LevelSplit {
    double basal = 1.0 / 3.0;
    double mid = 1.0 / 3.0;
    double apical = 1.0 / 3.0;
};

/// Apex = farthest point from the basal midpoint (points within a pixel of
/// the maximum are ties, resolved to the middle of the tied stretch); each
/// side is cut into levels by arclength. Throws Error(DegenerateBoundary).
SegmentPartition partition_boundary(const EndocardialBoundary& b, const LevelSplit& split = {});

struct SampledSegment {
    int segment_id = 0;
    std::vector<Point> points;

    friend bool operator==(const SampledSegment&, const SampledSegment&) = default;
};

using SampledWall = std::array<SampledSegment, kSegmentCount>;

/// N points per arc at arclength k*len/(N-1) from the arc's first point,
/// linearly interpolated and rounded. Throws Error(BadSampleCount) for N < 2.
SampledWall sample_segments(const SegmentPartition& part, const EndocardialBoundary& b, int n);

/// Polar angle about `center`, 0 pointing down (+y), increasing through the
/// left side (pi/2) to the apex (pi). Range [0, 2*pi).
double polar_angle(PointF p, PointF center) noexcept;

/// Angular landmarks of a reference partition: the five knots (the four
/// level borders plus the apex) seen from the wall's fitted center.
struct PolarReference {
    PointF center;
    std::array<double, 5> knot_angles{};
};

/// Center of concentric arcs (one radius per segment, shared center) fitted
/// to the boundary, where segments are the angular sectors between
/// `knot_angles`. Points near a knot are ignored.
PointF fit_wall_center(const EndocardialBoundary& b, const std::array<double, 5>& knot_angles);

/// Angular landmarks of the reference frame: a shared-center fit iterated
/// with an arclength partition whose apex lies straight across from the
/// basal chord as seen from the fitted center.
PolarReference polar_reference(const EndocardialBoundary& b, const LevelSplit& split = {});

/// Partition of another frame of the same recording: knots are placed where
/// the boundary crosses the reference knot angles about this frame's own
/// fitted center. L and R are measured on this boundary.
SegmentPartition tracked_partition(const EndocardialBoundary& b, const PolarReference& ref);

}  // namespace lvmotion
