#pragma once

#include <vector>

#include "lvmotion/types.hpp"

namespace lvmotion {

/// Ordered inner (endocardial) border of the wall, basal-left -> apex ->
/// basal-right. Consecutive points are 8-neighbours.
struct EndocardialBoundary {
    std::vector<Point> points;
    /// Cumulative Euclidean length, arclengths[0] == 0.
    std::vector<double> arclengths;

    [[nodiscard]] std::size_t size() const noexcept { return points.size(); }
    [[nodiscard]] double length() const noexcept
    {
        return arclengths.empty() ? 0.0 : arclengths.back();
    }

    /// Builds the arclength table for an 8-connected point chain.
    static EndocardialBoundary from_points(std::vector<Point> points);

    friend bool operator==(const EndocardialBoundary&, const EndocardialBoundary&) = default;
};

inline constexpr int kMinComponentPixels = 20;  // larger wall components count as separate walls
inline constexpr int kMaxFilledHole = 10;       // enclosed background blobs below this are filled
inline constexpr std::size_t kMinBoundaryPoints = 20;

/// Throws Error(EmptyMask | MultipleComponents | ClosedWall | DegenerateBoundary).
EndocardialBoundary extract_endocardial_boundary(const MaskFrame& mask);

/// Wall mask after dropping speckle components and filling small holes; the
/// exact input the tracer works on.
MaskFrame clean_wall(const MaskFrame& mask);

/// Background pixels whose centers lie strictly inside the convex hull of the
/// wall. The hull edge across the basal opening closes the cavity off, and the
/// cavity is the largest 4-connected part of this set.
MaskFrame hull_background(const MaskFrame& wall);

}  // namespace lvmotion
