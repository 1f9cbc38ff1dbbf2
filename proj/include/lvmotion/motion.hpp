#pragma once

#include <array>
#include <string>
#include <vector>

#include "lvmotion/types.hpp"
#include "lvmotion/wallmap.hpp"

namespace lvmotion {

struct DisplacementCurve {
    int segment_id = 0;
    /// Mean L1 displacement per frame against the reference frame.
    std::vector<double> values;
};

struct MotionFeature {
    std::string video_id;
    SegmentVector values{};
    bool degenerate = false;
};

enum class NormMode { Max, Anatomical };
enum class PartitionMode { Tracked, Independent };

struct MotionOptions {
    int points = 20;
    NormMode norm = NormMode::Max;
    PartitionMode partition = PartitionMode::Tracked;
    LevelSplit split{};
    /// Report segments in reverse order (7,6,5,3,2,1 mapped onto 1..7).
    bool mirror_segments = false;
};

struct MotionResult {
    MotionFeature feature;
    std::array<DisplacementCurve, kSegmentCount> curves;
    /// Per-segment maximum of the curves, before normalization.
    SegmentVector raw_max{};
};

[[nodiscard]] int point_displacement(Point p_t, Point p_ref) noexcept;

/// Mean L1 distance between index-paired samples. Throws Error(SegmentMismatch).
[[nodiscard]] double segment_displacement(const SampledSegment& seg_t, const SampledSegment& seg_ref);

/// Samples of every frame, using the reference frame's partition as the
/// anchor for tracked partitions. Errors carry the failing frame index.
std::vector<SampledWall> sample_sequence(const MaskSequence& seq, const MotionOptions& opt,
                                         SegmentPartition* ref_partition = nullptr);

MotionResult motion_feature(const MaskSequence& seq, const MotionOptions& opt = {});

/// Scales the 6 maxima to unit maximum; all-zero input sets `degenerate`.
MotionFeature normalize_max(const std::string& video_id, const SegmentVector& raw);

}  // namespace lvmotion
