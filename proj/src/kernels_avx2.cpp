#include "lvmotion/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64) || defined(__i386__)
#define LVMOTION_X86 1
#include <immintrin.h>
#else
#define LVMOTION_X86 0
#endif

#include <cstdlib>

namespace lvmotion::kernels::avx2 {

#if LVMOTION_X86

#define LVMOTION_AVX2 __attribute__((target("avx2")))

namespace {

LVMOTION_AVX2 inline std::uint64_t hsum_epi64(__m256i v)
{
    const __m128i lo = _mm256_castsi256_si128(v);
    const __m128i hi = _mm256_extracti128_si256(v, 1);
    const __m128i s = _mm_add_epi64(lo, hi);
    return static_cast<std::uint64_t>(_mm_cvtsi128_si64(s)) +
           static_cast<std::uint64_t>(_mm_extract_epi64(s, 1));
}

}  // namespace

LVMOTION_AVX2 void binarize(std::span<const std::uint8_t> src, std::span<std::uint8_t> dst,
                            std::uint8_t threshold)
{
    const std::size_t n = src.size();
    const __m256i thr = _mm256_set1_epi8(static_cast<char>(threshold));
    const __m256i one = _mm256_set1_epi8(1);
    std::size_t i = 0;
    for (; i + 32 <= n; i += 32) {
        const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(src.data() + i));
        // unsigned v >= thr  <=>  max(v, thr) == v
        const __m256i ge = _mm256_cmpeq_epi8(_mm256_max_epu8(v, thr), v);
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(dst.data() + i), _mm256_and_si256(ge, one));
    }
    for (; i < n; ++i) {
        dst[i] = src[i] >= threshold ? 1 : 0;
    }
}

LVMOTION_AVX2 OverlapCounts overlap(std::span<const std::uint8_t> a,
                                    std::span<const std::uint8_t> b)
{
    const std::size_t n = a.size();
    const __m256i zero = _mm256_setzero_si256();
    __m256i inter = zero;
    __m256i uni = zero;
    std::size_t i = 0;
    for (; i + 32 <= n; i += 32) {
        const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a.data() + i));
        const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b.data() + i));
        inter = _mm256_add_epi64(inter, _mm256_sad_epu8(_mm256_and_si256(va, vb), zero));
        uni = _mm256_add_epi64(uni, _mm256_sad_epu8(_mm256_or_si256(va, vb), zero));
    }
    OverlapCounts c{hsum_epi64(inter), hsum_epi64(uni)};
    for (; i < n; ++i) {
        c.intersection += static_cast<std::uint64_t>(a[i] & b[i]);
        c.union_count += static_cast<std::uint64_t>(a[i] | b[i]);
    }
    return c;
}

LVMOTION_AVX2 std::array<OverlapCounts, kSegmentCount> labeled_overlap(
    std::span<const std::uint8_t> a, std::span<const std::uint8_t> b,
    std::span<const std::uint8_t> labels)
{
    const std::size_t n = a.size();
    const __m256i zero = _mm256_setzero_si256();
    __m256i inter[kSegmentCount];
    __m256i uni[kSegmentCount];
    for (std::size_t s = 0; s < kSegmentCount; ++s) {
        inter[s] = zero;
        uni[s] = zero;
    }
    std::size_t i = 0;
    for (; i + 32 <= n; i += 32) {
        const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a.data() + i));
        const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b.data() + i));
        const __m256i vl = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(labels.data() + i));
        const __m256i vand = _mm256_and_si256(va, vb);
        const __m256i vor = _mm256_or_si256(va, vb);
        for (std::size_t s = 0; s < kSegmentCount; ++s) {
            const __m256i sel = _mm256_cmpeq_epi8(vl, _mm256_set1_epi8(static_cast<char>(s)));
            inter[s] = _mm256_add_epi64(inter[s], _mm256_sad_epu8(_mm256_and_si256(vand, sel), zero));
            uni[s] = _mm256_add_epi64(uni[s], _mm256_sad_epu8(_mm256_and_si256(vor, sel), zero));
        }
    }
    std::array<OverlapCounts, kSegmentCount> out{};
    for (std::size_t s = 0; s < kSegmentCount; ++s) {
        out[s] = {hsum_epi64(inter[s]), hsum_epi64(uni[s])};
    }
    for (; i < n; ++i) {
        const std::uint8_t l = labels[i];
        if (l >= kSegmentCount) {
            continue;
        }
        out[l].intersection += static_cast<std::uint64_t>(a[i] & b[i]);
        out[l].union_count += static_cast<std::uint64_t>(a[i] | b[i]);
    }
    return out;
}

LVMOTION_AVX2 std::int64_t l1_distance_sum(std::span<const Point> a, std::span<const Point> b)
{
    static_assert(sizeof(Point) == 2 * sizeof(std::int32_t));
    const std::size_t n = a.size() * 2;  // interleaved x,y
    const auto* pa = reinterpret_cast<const std::int32_t*>(a.data());
    const auto* pb = reinterpret_cast<const std::int32_t*>(b.data());
    __m256i acc = _mm256_setzero_si256();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(pa + i));
        const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(pb + i));
        // difference fits in 32 bits for pixel coordinates
        const __m256i d = _mm256_abs_epi32(_mm256_sub_epi32(va, vb));
        acc = _mm256_add_epi64(acc, _mm256_cvtepu32_epi64(_mm256_castsi256_si128(d)));
        acc = _mm256_add_epi64(acc, _mm256_cvtepu32_epi64(_mm256_extracti128_si256(d, 1)));
    }
    auto sum = static_cast<std::int64_t>(hsum_epi64(acc));
    for (; i < n; ++i) {
        sum += std::abs(static_cast<std::int64_t>(pa[i]) - pb[i]);
    }
    return sum;
}

LVMOTION_AVX2 void squared_distances(std::span<const double> columns, std::size_t rows,
                                     std::span<const double> query, std::span<double> out)
{
    const std::size_t dim = query.size();
    std::size_t i = 0;
    for (; i + 4 <= rows; i += 4) {
        __m256d acc = _mm256_setzero_pd();
        for (std::size_t d = 0; d < dim; ++d) {
            const __m256d diff = _mm256_sub_pd(_mm256_loadu_pd(columns.data() + d * rows + i),
                                               _mm256_set1_pd(query[d]));
            acc = _mm256_add_pd(acc, _mm256_mul_pd(diff, diff));
        }
        _mm256_storeu_pd(out.data() + i, acc);
    }
    for (; i < rows; ++i) {
        double acc = 0.0;
        for (std::size_t d = 0; d < dim; ++d) {
            const double diff = columns[d * rows + i] - query[d];
            acc = acc + diff * diff;
        }
        out[i] = acc;
    }
}

#else  // no x86: never selected, forward to the reference

void binarize(std::span<const std::uint8_t> src, std::span<std::uint8_t> dst,
              std::uint8_t threshold)
{
    scalar::binarize(src, dst, threshold);
}
OverlapCounts overlap(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b)
{
    return scalar::overlap(a, b);
}
std::array<OverlapCounts, kSegmentCount> labeled_overlap(std::span<const std::uint8_t> a,
                                                         std::span<const std::uint8_t> b,
                                                         std::span<const std::uint8_t> labels)
{
    return scalar::labeled_overlap(a, b, labels);
}
std::int64_t l1_distance_sum(std::span<const Point> a, std::span<const Point> b)
{
    return scalar::l1_distance_sum(a, b);
}
void squared_distances(std::span<const double> columns, std::size_t rows,
                       std::span<const double> query, std::span<double> out)
{
    scalar::squared_distances(columns, rows, query, out);
}

#endif

}  // namespace lvmotion::kernels::avx2
