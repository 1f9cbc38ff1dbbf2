#include <atomic>
#include <stdexcept>

#include "lvmotion/kernels.hpp"

namespace lvmotion::kernels {

namespace {

bool cpu_has_avx2() noexcept
{
#if defined(__x86_64__) || defined(__i386__)
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") != 0;
#else
    return false;
#endif
}

Isa detect() noexcept { return cpu_has_avx2() ? Isa::Avx2 : Isa::Scalar; }

std::atomic<Isa>& current()
{
    static std::atomic<Isa> isa{detect()};
    return isa;
}

}  // namespace

std::string_view name(Isa isa) noexcept
{
    return isa == Isa::Avx2 ? "avx2" : "scalar";
}

bool supported(Isa isa) noexcept
{
    switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2: return cpu_has_avx2();
    }
    return false;
}

Isa active() noexcept { return current().load(std::memory_order_relaxed); }

void select(Isa isa)
{
    if (!supported(isa)) {
        throw std::invalid_argument("kernel ISA not supported on this CPU: " + std::string(name(isa)));
    }
    current().store(isa, std::memory_order_relaxed);
}

void binarize(std::span<const std::uint8_t> src, std::span<std::uint8_t> dst,
              std::uint8_t threshold)
{
    if (active() == Isa::Avx2) {
        avx2::binarize(src, dst, threshold);
    } else {
        scalar::binarize(src, dst, threshold);
    }
}

OverlapCounts overlap(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b)
{
    return active() == Isa::Avx2 ? avx2::overlap(a, b) : scalar::overlap(a, b);
}

std::array<OverlapCounts, kSegmentCount> labeled_overlap(std::span<const std::uint8_t> a,
                                                         std::span<const std::uint8_t> b,
                                                         std::span<const std::uint8_t> labels)
{
    return active() == Isa::Avx2 ? avx2::labeled_overlap(a, b, labels)
                                 : scalar::labeled_overlap(a, b, labels);
}

std::int64_t l1_distance_sum(std::span<const Point> a, std::span<const Point> b)
{
    return active() == Isa::Avx2 ? avx2::l1_distance_sum(a, b) : scalar::l1_distance_sum(a, b);
}

void squared_distances(std::span<const double> columns, std::size_t rows,
                       std::span<const double> query, std::span<double> out)
{
    if (active() == Isa::Avx2) {
        avx2::squared_distances(columns, rows, query, out);
    } else {
        scalar::squared_distances(columns, rows, query, out);
    }
}

}  // namespace lvmotion::kernels
