#include "lvmotion/error.hpp"

namespace lvmotion {

std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptySequence: return "EmptySequence";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::EmptyMask: return "EmptyMask";
    case ErrorCode::MultipleComponents: return "MultipleComponents";
    case ErrorCode::ClosedWall: return "ClosedWall";
    case ErrorCode::DegenerateBoundary: return "DegenerateBoundary";
    case ErrorCode::BadSampleCount: return "BadSampleCount";
    case ErrorCode::SegmentMismatch: return "SegmentMismatch";
    case ErrorCode::EmptyModelList: return "EmptyModelList";
    case ErrorCode::NonPositiveMetric: return "NonPositiveMetric";
    case ErrorCode::CountMismatch: return "CountMismatch";
    case ErrorCode::VideoIdMismatch: return "VideoIdMismatch";
    case ErrorCode::BadK: return "BadK";
    case ErrorCode::DegenerateData: return "DegenerateData";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::Empty: return "Empty";
    case ErrorCode::TooFewSets: return "TooFewSets";
    case ErrorCode::SampleTooLarge: return "SampleTooLarge";
    case ErrorCode::SpecError: return "SpecError";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), detail_(message)
{
}

Error::Error(ErrorCode code, const std::string& message, int frame)
    : std::runtime_error(std::string(to_string(code)) + ": frame " + std::to_string(frame) + ": " +
                         message),
      code_(code), frame_(frame), detail_("frame " + std::to_string(frame) + ": " + message)
{
}

Error Error::at_frame(int frame) const
{
    return Error(code_, detail_, frame);
}

}  // namespace lvmotion
