#pragma once

// Data-parallel inner loops. Each kernel has a scalar reference in
// kernels::scalar and a vectorized variant; the dispatching entry points in
// kernels:: pick the best variant the CPU supports at startup. Integer
// kernels are exact across variants; squared_distances evaluates the same
// operations in the same order per row (no FMA contraction), so it is
// bit-identical too.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

#include "lvmotion/types.hpp"

namespace lvmotion::kernels {

enum class Isa { Scalar, Avx2 };

[[nodiscard]] std::string_view name(Isa isa) noexcept;
[[nodiscard]] bool supported(Isa isa) noexcept;
[[nodiscard]] Isa active() noexcept;
/// Overrides the runtime choice; throws std::invalid_argument when unsupported.
void select(Isa isa);

struct OverlapCounts {
    std::uint64_t intersection = 0;
    std::uint64_t union_count = 0;

    friend bool operator==(const OverlapCounts&, const OverlapCounts&) = default;
};

/// Label value that marks a pixel as belonging to no segment.
inline constexpr std::uint8_t kNoLabel = 0xFF;

// Entry points. Mask inputs hold 0/1 bytes; spans passed together must have
// equal length.

void binarize(std::span<const std::uint8_t> src, std::span<std::uint8_t> dst,
              std::uint8_t threshold);
[[nodiscard]] OverlapCounts overlap(std::span<const std::uint8_t> a,
                                    std::span<const std::uint8_t> b);
/// Overlap counts split by label (0..5); pixels labeled kNoLabel are skipped.
[[nodiscard]] std::array<OverlapCounts, kSegmentCount> labeled_overlap(
    std::span<const std::uint8_t> a, std::span<const std::uint8_t> b,
    std::span<const std::uint8_t> labels);
/// Sum over i of |a_i.x - b_i.x| + |a_i.y - b_i.y|.
[[nodiscard]] std::int64_t l1_distance_sum(std::span<const Point> a, std::span<const Point> b);
/// `columns` is a dim x rows column-major matrix; out[i] = ||row_i - query||^2.
void squared_distances(std::span<const double> columns, std::size_t rows,
                       std::span<const double> query, std::span<double> out);

namespace scalar {
void binarize(std::span<const std::uint8_t> src, std::span<std::uint8_t> dst,
              std::uint8_t threshold);
OverlapCounts overlap(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);
std::array<OverlapCounts, kSegmentCount> labeled_overlap(std::span<const std::uint8_t> a,
                                                         std::span<const std::uint8_t> b,
                                                         std::span<const std::uint8_t> labels);
std::int64_t l1_distance_sum(std::span<const Point> a, std::span<const Point> b);
void squared_distances(std::span<const double> columns, std::size_t rows,
                       std::span<const double> query, std::span<double> out);
}  // namespace scalar

// Only callable when supported(Isa::Avx2).
namespace avx2 {
void binarize(std::span<const std::uint8_t> src, std::span<std::uint8_t> dst,
              std::uint8_t threshold);
OverlapCounts overlap(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);
std::array<OverlapCounts, kSegmentCount> labeled_overlap(std::span<const std::uint8_t> a,
                                                         std::span<const std::uint8_t> b,
                                                         std::span<const std::uint8_t> labels);
std::int64_t l1_distance_sum(std::span<const Point> a, std::span<const Point> b);
void squared_distances(std::span<const double> columns, std::size_t rows,
                       std::span<const double> query, std::span<double> out);
}  // namespace avx2

}  // namespace lvmotion::kernels
