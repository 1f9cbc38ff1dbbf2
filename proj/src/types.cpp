#include "lvmotion/types.hpp"

#include <algorithm>
#include <numeric>

#include "lvmotion/error.hpp"
#include "lvmotion/kernels.hpp"

namespace lvmotion {

MaskFrame::MaskFrame(int width, int height) : width_(width), height_(height)
{
    if (width <= 0 || height <= 0) {
        throw Error(ErrorCode::ValidationError, "mask dimensions must be positive");
    }
    pixels_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0);
}

MaskFrame MaskFrame::from_gray(int width, int height, std::span<const std::uint8_t> gray,
                               std::uint8_t threshold)
{
    MaskFrame m(width, height);
    if (gray.size() != m.pixels_.size()) {
        throw Error(ErrorCode::DimensionMismatch, "gray buffer size does not match dimensions");
    }
    kernels::binarize(gray, m.pixels_, threshold);
    return m;
}

std::size_t MaskFrame::count() const noexcept
{
    return std::accumulate(pixels_.begin(), pixels_.end(), std::size_t{0});
}

MaskFrame MaskFrame::mirrored() const
{
    MaskFrame m = *this;
    for (int y = 0; y < height_; ++y) {
        auto row = m.pixels_.begin() + static_cast<std::ptrdiff_t>(y) * width_;
        std::reverse(row, row + width_);
    }
    return m;
}

void MaskSequence::validate() const
{
    if (frames.empty()) {
        throw Error(ErrorCode::EmptySequence, "sequence '" + video_id + "' has no frames");
    }
    const int w = frames.front().width();
    const int h = frames.front().height();
    if (w <= 0 || h <= 0) {
        throw Error(ErrorCode::ValidationError, "frame 0 has no pixels");
    }
    for (std::size_t i = 1; i < frames.size(); ++i) {
        if (frames[i].width() != w || frames[i].height() != h) {
            throw Error(ErrorCode::DimensionMismatch,
                        "frame " + std::to_string(i) + " is " + std::to_string(frames[i].width()) +
                            "x" + std::to_string(frames[i].height()) + ", expected " +
                            std::to_string(w) + "x" + std::to_string(h));
        }
    }
    if (reference_index < 0 || static_cast<std::size_t>(reference_index) >= frames.size()) {
        throw Error(ErrorCode::ValidationError, "reference_index out of range");
    }
    if (!(fps > 0.0)) {
        throw Error(ErrorCode::ValidationError, "fps must be positive");
    }
    if (label && *label != 0 && *label != 1) {
        throw Error(ErrorCode::ValidationError, "label must be 0 or 1");
    }
    if (segment_labels) {
        for (int v : *segment_labels) {
            if (v != 0 && v != 1) {
                throw Error(ErrorCode::ValidationError, "segment_labels must be 0 or 1");
            }
        }
    }
}

}  // namespace lvmotion
