#include <algorithm>
#include <cmath>
#include <numbers>

#include "lvmotion/boundary.hpp"
#include "lvmotion/error.hpp"
#include "lvmotion/random.hpp"
#include "lvmotion/synth.hpp"
#include "lvmotion/wallmap.hpp"

namespace lvmotion {

namespace {

constexpr int kKnotSpacingDeg = 8;
constexpr int kKnotCount = 360 / kKnotSpacingDeg;
constexpr int kMaxShift = 3;
constexpr int kAttempts = 16;
constexpr int kSegmentMapPoints = 20;

struct BorderPixel {
    Point p;
    bool inner = false;
};

// Smooth periodic field over angle: Gaussian knots, linear in between.
struct AngularField {
    std::array<double, kKnotCount> knots{};

    double at(double theta) const
    {
        const double deg = theta * 180.0 / std::numbers::pi;
        const double u = deg / kKnotSpacingDeg;
        const int i0 = static_cast<int>(std::floor(u));
        const double f = u - i0;
        const auto a = static_cast<std::size_t>(((i0 % kKnotCount) + kKnotCount) % kKnotCount);
        const auto b = (a + 1) % kKnotCount;
        return knots[a] * (1.0 - f) + knots[b] * f;
    }
};

// Segment id of each pixel's nearest sample on the frame's own boundary;
// 0 when no map is needed or the frame cannot be partitioned.
std::vector<int> segment_map(const MaskFrame& f, const std::vector<BorderPixel>& border)
{
    std::vector<int> ids(border.size(), 0);
    try {
        const auto b = extract_endocardial_boundary(f);
        const auto part = partition_boundary(b);
        const auto wall = sample_segments(part, b, kSegmentMapPoints);
        for (std::size_t i = 0; i < border.size(); ++i) {
            long best = -1;
            for (const auto& seg : wall) {
                for (const Point& q : seg.points) {
                    const long dx = border[i].p.x - q.x;
                    const long dy = border[i].p.y - q.y;
                    const long d = dx * dx + dy * dy;
                    if (best < 0 || d < best) {
                        best = d;
                        ids[i] = seg.segment_id;
                    }
                }
            }
        }
    } catch (const Error&) {
        std::fill(ids.begin(), ids.end(), 0);
    }
    return ids;
}

// Keeps the largest 8-connected component; false when a second sizeable
// component remains (the wall was cut in two).
bool keep_largest(MaskFrame& f)
{
    const int w = f.width();
    const int h = f.height();
    std::vector<int> label(static_cast<std::size_t>(w * h), -1);
    std::vector<int> sizes;
    std::vector<int> stack;
    for (int i = 0; i < w * h; ++i) {
        if (!f.pixels()[static_cast<std::size_t>(i)] || label[static_cast<std::size_t>(i)] >= 0) continue;
        const int id = static_cast<int>(sizes.size());
        int n = 0;
        label[static_cast<std::size_t>(i)] = id;
        stack.push_back(i);
        while (!stack.empty()) {
            const int p = stack.back();
            stack.pop_back();
            ++n;
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    const int x = p % w + dx;
                    const int y = p / w + dy;
                    if (x < 0 || y < 0 || x >= w || y >= h) continue;
                    const int q = y * w + x;
                    if (f.pixels()[static_cast<std::size_t>(q)] && label[static_cast<std::size_t>(q)] < 0) {
                        label[static_cast<std::size_t>(q)] = id;
                        stack.push_back(q);
                    }
                }
            }
        }
        sizes.push_back(n);
    }
    if (sizes.empty()) return false;
    const int keep = static_cast<int>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
    for (std::size_t k = 0; k < sizes.size(); ++k) {
        if (static_cast<int>(k) != keep && sizes[k] > kMinComponentPixels) return false;
    }
    for (int i = 0; i < w * h; ++i) {
        if (label[static_cast<std::size_t>(i)] != keep) f.pixels()[static_cast<std::size_t>(i)] = 0;
    }
    return true;
}

MaskFrame corrupt_frame(const MaskFrame& in, const CorruptionSpec& c, Rng& rng)
{
    const int w = in.width();
    const int h = in.height();
    const MaskFrame ts = hull_background(in);

    // Radial directions come from the centroid of wall plus cavity.
    double sx = 0.0, sy = 0.0, n = 0.0;
    std::vector<BorderPixel> border;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (in.at(x, y) || ts.at(x, y)) {
                sx += x;
                sy += y;
                n += 1.0;
            }
            if (!in.at(x, y)) continue;
            bool edge = false;
            bool inner = false;
            constexpr int dxs[4] = {1, -1, 0, 0};
            constexpr int dys[4] = {0, 0, 1, -1};
            for (int k = 0; k < 4; ++k) {
                const int nx = x + dxs[k];
                const int ny = y + dys[k];
                if (!in.value_or_zero(nx, ny)) {
                    edge = true;
                    if (in.contains(nx, ny) && ts.at(nx, ny)) inner = true;
                }
            }
            if (edge) border.push_back({{x, y}, inner});
        }
    }
    const PointF centroid{sx / n, sy / n};

    std::vector<std::size_t> allowed;
    {
        std::vector<int> ids;
        if (!c.segments.empty()) ids = segment_map(in, border);
        for (std::size_t i = 0; i < border.size(); ++i) {
            if (c.segments.empty() ||
                std::find(c.segments.begin(), c.segments.end(), ids[i]) != c.segments.end()) {
                allowed.push_back(i);
            }
        }
    }

    AngularField inner_field;
    AngularField outer_field;
    for (double& v : inner_field.knots) v = c.jitter_sigma * rng.normal();
    for (double& v : outer_field.knots) v = c.jitter_sigma * rng.normal();

    MaskFrame out = in;
    std::vector<Point> paint;
    std::vector<Point> erase;
    if (c.jitter_sigma > 0.0) {
        for (std::size_t i : allowed) {
            const Point p = border[i].p;
            const double dx = p.x - centroid.x;
            const double dy = p.y - centroid.y;
            const double len = std::hypot(dx, dy);
            if (len == 0.0) continue;
            const double theta = polar_angle({static_cast<double>(p.x), static_cast<double>(p.y)}, centroid);
            const double delta = border[i].inner ? inner_field.at(theta) : outer_field.at(theta);
            const int m = std::clamp(static_cast<int>(std::lround(delta)), -kMaxShift, kMaxShift);
            // Outward from the wall: away from the centroid on the outer
            // border, toward it on the inner border.
            const double sgn = border[i].inner ? -1.0 : 1.0;
            const double ux = sgn * dx / len;
            const double uy = sgn * dy / len;
            if (m > 0) {
                for (int k = 1; k <= m; ++k) {
                    paint.push_back({static_cast<std::int32_t>(std::lround(p.x + k * ux)),
                                     static_cast<std::int32_t>(std::lround(p.y + k * uy))});
                }
            } else if (m < 0) {
                for (int k = 0; k < -m; ++k) {
                    erase.push_back({static_cast<std::int32_t>(std::lround(p.x - k * ux)),
                                     static_cast<std::int32_t>(std::lround(p.y - k * uy))});
                }
            }
        }
    }

    auto disc = [&](std::vector<Point>& dst, std::size_t count) {
        for (std::size_t e = 0; e < count && !allowed.empty(); ++e) {
            const Point p = border[allowed[rng.below(allowed.size())]].p;
            const int r = 1 + static_cast<int>(rng.below(kMaxShift));
            for (int dy = -r; dy <= r; ++dy) {
                for (int dx = -r; dx <= r; ++dx) {
                    if (dx * dx + dy * dy <= r * r) dst.push_back({p.x + dx, p.y + dy});
                }
            }
        }
    };
    const double events = static_cast<double>(allowed.size()) / 8.0;
    disc(erase, static_cast<std::size_t>(std::lround(c.hole_rate * events)));
    disc(paint, static_cast<std::size_t>(std::lround(c.protrusion_rate * events)));

    for (const Point& p : paint) {
        if (out.contains(p.x, p.y)) out.set(p.x, p.y, 1);
    }
    for (const Point& p : erase) {
        if (out.contains(p.x, p.y)) out.set(p.x, p.y, 0);
    }
    return out;
}

bool acceptable(MaskFrame& f, const PolarReference* ref)
{
    if (!keep_largest(f)) return false;
    try {
        const auto b = extract_endocardial_boundary(f);
        const auto part = partition_boundary(b);
        if (ref) {
            (void)tracked_partition(b, *ref);
        }
        (void)sample_segments(part, b, 2);
    } catch (const Error&) {
        return false;
    }
    return true;
}

}  // namespace

void CorruptionSpec::validate() const
{
    if (!(jitter_sigma >= 0.0) || !std::isfinite(jitter_sigma)) {
        throw Error(ErrorCode::SpecError, "jitter sigma must be >= 0");
    }
    if (!(hole_rate >= 0.0 && hole_rate <= 0.2) || !(protrusion_rate >= 0.0 && protrusion_rate <= 0.2)) {
        throw Error(ErrorCode::SpecError, "hole and protrusion rates must lie in [0, 0.2]");
    }
    for (int s : segments) {
        if (std::find(kSegmentIds.begin(), kSegmentIds.end(), s) == kSegmentIds.end()) {
            throw Error(ErrorCode::SpecError, "unknown segment id " + std::to_string(s));
        }
    }
}

CorruptionResult corrupt(const MaskSequence& seq, const CorruptionSpec& c)
{
    c.validate();
    seq.validate();
    CorruptionResult res;
    res.sequence = seq;
    if (c.jitter_sigma == 0.0 && c.hole_rate == 0.0 && c.protrusion_rate == 0.0) {
        return res;
    }

    const auto tr = static_cast<std::size_t>(seq.reference_index);
    std::vector<std::size_t> order{tr};
    for (std::size_t t = 0; t < seq.frames.size(); ++t) {
        if (t != tr) order.push_back(t);
    }

    PolarReference polar;
    bool have_polar = false;
    for (std::size_t t : order) {
        bool done = false;
        for (int attempt = 0; attempt < kAttempts && !done; ++attempt) {
            Rng rng(mix_seed(mix_seed(c.seed, t), static_cast<std::uint64_t>(attempt)));
            MaskFrame f = corrupt_frame(seq.frames[t], c, rng);
            if (acceptable(f, have_polar ? &polar : nullptr)) {
                res.sequence.frames[t] = std::move(f);
                done = true;
            }
        }
        if (!done) {
            res.fallback_frames.push_back(static_cast<int>(t));
        }
        if (t == tr) {
            try {
                const auto b = extract_endocardial_boundary(res.sequence.frames[t]);
                polar = polar_reference(b);
                have_polar = true;
            } catch (const Error&) {
                have_polar = false;
            }
        }
    }
    std::sort(res.fallback_frames.begin(), res.fallback_frames.end());
    return res;
}

}  // namespace lvmotion
