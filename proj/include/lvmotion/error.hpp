#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace lvmotion {

enum class ErrorCode {
    // mask_io
    MissingFile,
    SchemaError,
    DimensionMismatch,
    EmptySequence,
    IoError,
    ValidationError,
    // boundary / wallmap
    EmptyMask,
    MultipleComponents,
    ClosedWall,
    DegenerateBoundary,
    BadSampleCount,
    // motion
    SegmentMismatch,
    // ensemble
    EmptyModelList,
    NonPositiveMetric,
    CountMismatch,
    VideoIdMismatch,
    // classify
    BadK,
    DegenerateData,
    // metrics
    LengthMismatch,
    Empty,
    TooFewSets,
    SampleTooLarge,
    // synth
    SpecError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library. `frame()` is set when the error was
/// raised while processing one frame of a sequence.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);
    Error(ErrorCode code, const std::string& message, int frame);

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }
    [[nodiscard]] std::optional<int> frame() const noexcept { return frame_; }
    /// what() without the leading "<Code>: ".
    [[nodiscard]] const std::string& detail() const noexcept { return detail_; }

    /// Copy of this error tagged with the frame it came from.
    [[nodiscard]] Error at_frame(int frame) const;

private:
    ErrorCode code_;
    std::optional<int> frame_;
    std::string detail_;
};

}  // namespace lvmotion
