#include <cstdlib>

#include "lvmotion/kernels.hpp"

namespace lvmotion::kernels::scalar {

void binarize(std::span<const std::uint8_t> src, std::span<std::uint8_t> dst,
              std::uint8_t threshold)
{
    for (std::size_t i = 0; i < src.size(); ++i) {
        dst[i] = src[i] >= threshold ? 1 : 0;
    }
}

OverlapCounts overlap(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b)
{
    OverlapCounts c;
    for (std::size_t i = 0; i < a.size(); ++i) {
        c.intersection += static_cast<std::uint64_t>(a[i] & b[i]);
        c.union_count += static_cast<std::uint64_t>(a[i] | b[i]);
    }
    return c;
}

std::array<OverlapCounts, kSegmentCount> labeled_overlap(std::span<const std::uint8_t> a,
                                                         std::span<const std::uint8_t> b,
                                                         std::span<const std::uint8_t> labels)
{
    std::array<OverlapCounts, kSegmentCount> out{};
    for (std::size_t i = 0; i < a.size(); ++i) {
        const std::uint8_t l = labels[i];
        if (l >= kSegmentCount) {
            continue;
        }
        out[l].intersection += static_cast<std::uint64_t>(a[i] & b[i]);
        out[l].union_count += static_cast<std::uint64_t>(a[i] | b[i]);
    }
    return out;
}

std::int64_t l1_distance_sum(std::span<const Point> a, std::span<const Point> b)
{
    std::int64_t sum = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sum += std::abs(static_cast<std::int64_t>(a[i].x) - b[i].x) +
               std::abs(static_cast<std::int64_t>(a[i].y) - b[i].y);
    }
    return sum;
}

void squared_distances(std::span<const double> columns, std::size_t rows,
                       std::span<const double> query, std::span<double> out)
{
    const std::size_t dim = query.size();
    for (std::size_t i = 0; i < rows; ++i) {
        double acc = 0.0;
        for (std::size_t d = 0; d < dim; ++d) {
            const double diff = columns[d * rows + i] - query[d];
            acc = acc + diff * diff;
        }
        out[i] = acc;
    }
}

}  // namespace lvmotion::kernels::scalar
