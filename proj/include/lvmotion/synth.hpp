#pragma once

// Parametric horseshoe phantom with known per-segment radial motion, and a
// corruption model that imitates an imperfect segmentation network.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lvmotion/types.hpp"

namespace lvmotion {

struct SyntheticHeartSpec {
    std::string video_id = "phantom";
    int width = 128;
    int height = 128;
    double center_x = 64.0;
    double center_y = 60.0;
    double inner_radius = 40.0;
    double wall_thickness = 8.0;
    /// Half-angle of the basal cut, degrees from the downward axis.
    double opening_half_angle = 45.0;
    int frames = 25;
    /// Peak inward motion per segment, pixels, order 1,2,3,5,6,7.
    SegmentVector amplitudes{};
    /// Whole-wall shift at peak phase (rounded per frame); zero for none.
    int rigid_offset_x = 0;
    int rigid_offset_y = 0;
    double fps = 25.0;
    std::optional<int> label;
    std::optional<std::array<int, kSegmentCount>> segment_labels;

    /// Throws Error(SpecError).
    void validate() const;
};

SyntheticHeartSpec spec_from_json(const nlohmann::json& j);
nlohmann::ordered_json spec_to_json(const SyntheticHeartSpec& spec);

struct SyntheticSequence {
    MaskSequence sequence;
    /// Ground-truth radial displacement per segment and frame.
    std::array<std::vector<double>, kSegmentCount> truth;
};

/// Temporal profile sin(pi * t / (T - 1)).
[[nodiscard]] double phase(int t, int frames) noexcept;

/// Segment amplitude at polar angle theta (radians, 0 = down) including the
/// cosine taper at segment borders.
[[nodiscard]] double amplitude_at(const SyntheticHeartSpec& spec, double theta);

/// Level borders used to assign amplitudes: five angles (radians) between
/// segments 1|2, 2|3, 3|5, 5|6, 6|7.
[[nodiscard]] std::array<double, 5> segment_borders(const SyntheticHeartSpec& spec);

/// `seed` picks the sub-pixel phase of the raster grid.
SyntheticSequence generate(const SyntheticHeartSpec& spec, std::uint64_t seed);

/// Sub-pixel center offset drawn for `seed`, each coordinate in [-0.5, 0.5).
[[nodiscard]] PointF raster_offset(std::uint64_t seed);

struct CorruptionSpec {
    double jitter_sigma = 0.0;
    double hole_rate = 0.0;
    double protrusion_rate = 0.0;
    std::uint64_t seed = 0;
    /// Restrict every change to these segment ids; empty means all.
    std::vector<int> segments;

    /// Throws Error(SpecError).
    void validate() const;
};

struct CorruptionResult {
    MaskSequence sequence;
    /// Frames where no valid corruption was found and the input was kept.
    std::vector<int> fallback_frames;
};

CorruptionResult corrupt(const MaskSequence& seq, const CorruptionSpec& c);

struct CorpusOptions {
    int mi = 30;
    int normal = 30;
    std::uint64_t seed = 42;
    int frames = 25;
};

struct CorpusEntry {
    SyntheticHeartSpec spec;
    std::uint64_t seed = 0;
};

/// Normal recordings move every segment 6-9 px; MI recordings have one or
/// two segments reduced to 0.5-2.5 px. Geometry varies per recording.
std::vector<CorpusEntry> make_corpus(const CorpusOptions& opt);

}  // namespace lvmotion
