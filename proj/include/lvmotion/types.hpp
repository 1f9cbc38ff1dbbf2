#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lvmotion {

/// Retained wall segments of the 7-segment apical four-chamber model, in
/// feature order. Segment 4 (apical cap) is never measured.
inline constexpr std::array<int, 6> kSegmentIds{1, 2, 3, 5, 6, 7};
inline constexpr std::size_t kSegmentCount = kSegmentIds.size();

/// One value per retained segment, ordered like kSegmentIds.
using SegmentVector = std::array<double, kSegmentCount>;

/// Pixel coordinate: x to the right, y down.
struct Point {
    std::int32_t x = 0;
    std::int32_t y = 0;

    friend bool operator==(const Point&, const Point&) = default;
};

struct PointF {
    double x = 0.0;
    double y = 0.0;
};

/// Binary LV-wall mask, row-major, one byte per pixel holding 0 or 1.
class MaskFrame {
public:
    MaskFrame() = default;
    MaskFrame(int width, int height);

    /// Thresholds an 8-bit grayscale buffer: values >= threshold become wall.
    static MaskFrame from_gray(int width, int height, std::span<const std::uint8_t> gray,
                               std::uint8_t threshold = 128);

    [[nodiscard]] int width() const noexcept { return width_; }
    [[nodiscard]] int height() const noexcept { return height_; }
    [[nodiscard]] bool empty() const noexcept { return pixels_.empty(); }
    [[nodiscard]] bool contains(int x, int y) const noexcept
    {
        return x >= 0 && y >= 0 && x < width_ && y < height_;
    }

    [[nodiscard]] std::uint8_t at(int x, int y) const noexcept
    {
        return pixels_[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                       static_cast<std::size_t>(x)];
    }
    /// 0 outside the frame.
    [[nodiscard]] std::uint8_t value_or_zero(int x, int y) const noexcept
    {
        return contains(x, y) ? at(x, y) : std::uint8_t{0};
    }
    void set(int x, int y, std::uint8_t v) noexcept
    {
        pixels_[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                static_cast<std::size_t>(x)] = v ? 1 : 0;
    }

    [[nodiscard]] std::span<const std::uint8_t> pixels() const noexcept { return pixels_; }
    [[nodiscard]] std::span<std::uint8_t> pixels() noexcept { return pixels_; }
    [[nodiscard]] std::size_t count() const noexcept;

    /// Horizontal mirror (x -> width-1-x).
    [[nodiscard]] MaskFrame mirrored() const;

    friend bool operator==(const MaskFrame&, const MaskFrame&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> pixels_;
};

/// Per-frame masks of one recording (one cardiac cycle).
struct MaskSequence {
    std::string video_id;
    std::vector<MaskFrame> frames;
    double fps = 25.0;
    int reference_index = 0;
    std::optional<int> label;
    std::optional<std::array<int, kSegmentCount>> segment_labels;

    /// Throws Error(EmptySequence | DimensionMismatch | ValidationError).
    void validate() const;
};

}  // namespace lvmotion
