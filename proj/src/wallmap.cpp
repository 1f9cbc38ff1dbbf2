#include "lvmotion/wallmap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "lvmotion/error.hpp"

namespace lvmotion {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::size_t kMinSideSteps = 6;
constexpr double kApexTieTolerance = 1.0;
constexpr double kKnotExclusion = 12.0 * std::numbers::pi / 180.0;
constexpr int kGridSteps = 8;
constexpr int kMaxHalvings = 30;
constexpr double kGridSpacing = 2.0;
constexpr int kFitIterations = 50;
constexpr double kFitTolerance = 1e-9;

double wrap_pi(double a) noexcept
{
    while (a > std::numbers::pi) a -= kTwoPi;
    while (a <= -std::numbers::pi) a += kTwoPi;
    return a;
}

// Point at arclength s, linear between neighbouring polyline points.
PointF point_at(const EndocardialBoundary& b, double s, std::size_t& seg)
{
    const auto& a = b.arclengths;
    auto it = std::upper_bound(a.begin(), a.end(), s);
    std::size_t hi = static_cast<std::size_t>(it - a.begin());
    if (hi == 0) {
        seg = 0;
        return {static_cast<double>(b.points.front().x), static_cast<double>(b.points.front().y)};
    }
    if (hi >= a.size()) {
        seg = a.size() - 1;
        return {static_cast<double>(b.points.back().x), static_cast<double>(b.points.back().y)};
    }
    const std::size_t lo = hi - 1;
    seg = lo;
    const double t = (s - a[lo]) / (a[hi] - a[lo]);
    const Point p = b.points[lo];
    const Point q = b.points[hi];
    return {p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)};
}

// Boundary angles about `c` (given relative to points[0]), unwrapped along the polyline.
std::vector<double> unwrapped_angles(const EndocardialBoundary& b, PointF c)
{
    const Point o = b.points.front();
    std::vector<double> th(b.size());
    double prev = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) {
        const double a = polar_angle({static_cast<double>(b.points[i].x - o.x),
                                      static_cast<double>(b.points[i].y - o.y)},
                                     c);
        th[i] = i == 0 ? a : th[i - 1] + wrap_pi(a - prev);
        prev = a;
    }
    return th;
}

// Algebraic circle fit in coordinates relative to points[0].
PointF kasa_center(const EndocardialBoundary& b)
{
    const Point o = b.points.front();
    double sxx = 0, sxy = 0, syy = 0, sx = 0, sy = 0, n = 0;
    double sxz = 0, syz = 0, sz = 0;
    for (const Point& p : b.points) {
        const double x = p.x - o.x;
        const double y = p.y - o.y;
        const double z = x * x + y * y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
        sx += x;
        sy += y;
        n += 1.0;
        sxz += x * z;
        syz += y * z;
        sz += z;
    }
    // Solve [sxx sxy sx; sxy syy sy; sx sy n] [D E F]^T = -[sxz syz sz]^T.
    double m[3][4] = {{sxx, sxy, sx, -sxz}, {sxy, syy, sy, -syz}, {sx, sy, n, -sz}};
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r) {
            if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
        }
        if (std::abs(m[piv][col]) < 1e-12) {
            return {sx / n, sy / n};
        }
        if (piv != col) {
            for (int k = 0; k < 4; ++k) std::swap(m[col][k], m[piv][k]);
        }
        for (int r = 0; r < 3; ++r) {
            if (r == col) continue;
            const double f = m[r][col] / m[col][col];
            for (int k = col; k < 4; ++k) m[r][k] -= f * m[col][k];
        }
    }
    const double d = m[0][3] / m[0][0];
    const double e = m[1][3] / m[1][1];
    return {-d / 2.0, -e / 2.0};
}

// Within-sector spread of the radial distance about `c`; the quantity the
// Gauss-Newton loop below minimizes.
double fit_cost(const EndocardialBoundary& b, const std::array<double, 5>& knots, PointF c)
{
    const Point o = b.points.front();
    const auto th = unwrapped_angles(b, c);
    std::array<double, 6> cnt{}, s1{}, s2{};
    for (std::size_t i = 0; i < b.size(); ++i) {
        bool skip = std::abs(th[i] - th.front()) < kKnotExclusion || std::abs(th[i] - th.back()) < kKnotExclusion;
        std::size_t s = 0;
        for (double k : knots) {
            if (th[i] >= k) ++s;
            if (std::abs(th[i] - k) < kKnotExclusion) skip = true;
        }
        if (skip) continue;
        const double d = std::hypot((b.points[i].x - o.x) - c.x, (b.points[i].y - o.y) - c.y);
        cnt[s] += 1.0;
        s1[s] += d;
        s2[s] += d * d;
    }
    double cost = 0.0;
    for (std::size_t s = 0; s < 6; ++s) {
        if (cnt[s] >= 3.0) cost += s2[s] - s1[s] * s1[s] / cnt[s];
    }
    return cost;
}

// Coarse grid search around `c`; the per-sector radius model has shallow
// local minima that Gauss-Newton alone falls into when the wall deforms.
PointF coarse_start(const EndocardialBoundary& b, const std::array<double, 5>& knots, PointF c)
{
    PointF best = c;
    double best_cost = fit_cost(b, knots, c);
    for (int gy = -kGridSteps; gy <= kGridSteps; ++gy) {
        for (int gx = -kGridSteps; gx <= kGridSteps; ++gx) {
            const PointF q{c.x + gx * kGridSpacing, c.y + gy * kGridSpacing};
            const double cost = fit_cost(b, knots, q);
            if (cost < best_cost) {
                best_cost = cost;
                best = q;
            }
        }
    }
    return best;
}

// Shared-center fit with relative coordinates; translation of the boundary
// by an integer offset leaves the relative result bit-identical.
PointF fit_relative(const EndocardialBoundary& b, const std::array<double, 5>& knots, PointF c)
{
    c = coarse_start(b, knots, c);
    const Point o = b.points.front();
    const std::size_t n = b.size();
    std::vector<double> dist(n);
    std::vector<PointF> unit(n);
    std::vector<int> sector(n);
    for (int iter = 0; iter < kFitIterations; ++iter) {
        const auto th = unwrapped_angles(b, c);
        std::array<double, 6> cnt{}, sum_d{}, sum_ux{}, sum_uy{};
        for (std::size_t i = 0; i < n; ++i) {
            int s = 0;
            // The basal end faces run radially, not along an arc.
            bool near_knot = std::abs(th[i] - th.front()) < kKnotExclusion ||
                             std::abs(th[i] - th.back()) < kKnotExclusion;
            for (double k : knots) {
                if (th[i] >= k) ++s;
                if (std::abs(th[i] - k) < kKnotExclusion) near_knot = true;
            }
            const double dx = (b.points[i].x - o.x) - c.x;
            const double dy = (b.points[i].y - o.y) - c.y;
            const double d = std::hypot(dx, dy);
            dist[i] = d;
            sector[i] = near_knot || d == 0.0 ? -1 : s;
            if (sector[i] < 0) continue;
            unit[i] = {dx / d, dy / d};
            const auto si = static_cast<std::size_t>(s);
            cnt[si] += 1.0;
            sum_d[si] += d;
            sum_ux[si] += unit[i].x;
            sum_uy[si] += unit[i].y;
        }
        double a11 = 0, a12 = 0, a22 = 0, g1 = 0, g2 = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (sector[i] < 0) continue;
            const auto si = static_cast<std::size_t>(sector[i]);
            if (cnt[si] < 3.0) continue;
            const double jx = -(unit[i].x - sum_ux[si] / cnt[si]);
            const double jy = -(unit[i].y - sum_uy[si] / cnt[si]);
            const double e = dist[i] - sum_d[si] / cnt[si];
            a11 += jx * jx;
            a12 += jx * jy;
            a22 += jy * jy;
            g1 += jx * e;
            g2 += jy * e;
        }
        const double det = a11 * a22 - a12 * a12;
        if (!(std::abs(det) > 1e-12)) break;
        double stepx = -(a22 * g1 - a12 * g2) / det;
        double stepy = -(a11 * g2 - a12 * g1) / det;
        // Sector membership moves with the center, so only accept steps
        // that lower the cost.
        const double cost = fit_cost(b, knots, c);
        int halvings = 0;
        while (halvings < kMaxHalvings && !(fit_cost(b, knots, {c.x + stepx, c.y + stepy}) < cost)) {
            stepx /= 2.0;
            stepy /= 2.0;
            ++halvings;
        }
        if (halvings == kMaxHalvings) break;
        c.x += stepx;
        c.y += stepy;
        if (std::hypot(stepx, stepy) < kFitTolerance) break;
    }
    return c;
}

std::array<double, 5> knot_angles_about(const EndocardialBoundary& b, const SegmentPartition& part,
                                        PointF c_rel)
{
    const auto th = unwrapped_angles(b, c_rel);
    const Point o = b.points.front();
    auto angle_at = [&](double s) {
        std::size_t seg = 0;
        const PointF p = point_at(b, s, seg);
        const double a = polar_angle({p.x - o.x, p.y - o.y}, c_rel);
        return th[seg] + wrap_pi(a - th[seg]);
    };
    return {angle_at(part.knots[0]), angle_at(part.knots[1]), th[part.apex_index],
            angle_at(part.knots[2]), angle_at(part.knots[3])};
}

void check_arcs(const SegmentPartition& p)
{
    for (std::size_t k = 0; k < kSegmentCount; ++k) {
        if (p.arcs[k].last < p.arcs[k].first) {
            throw Error(ErrorCode::DegenerateBoundary,
                        "segment " + std::to_string(kSegmentIds[k]) + " is empty");
        }
    }
}

// Arclength levels on each side of a given apex index.
SegmentPartition partition_at_apex(const EndocardialBoundary& b, std::size_t apex, const LevelSplit& split)
{
    const std::size_t n = b.size();
    if (apex < kMinSideSteps || n - 1 - apex < kMinSideSteps) {
        throw Error(ErrorCode::DegenerateBoundary, "apex too close to a basal endpoint");
    }

    const double total = b.length();
    const double share = split.basal + split.mid + split.apical;
    SegmentPartition part;
    part.apex_index = apex;
    part.L = b.arclengths[apex];
    part.R = total - part.L;
    part.knots = {part.L * split.basal / share, part.L * (split.basal + split.mid) / share,
                  part.L + part.R * split.apical / share,
                  part.L + part.R * (split.apical + split.mid) / share};

    std::array<std::size_t, kSegmentCount> first{};
    std::array<std::size_t, kSegmentCount> last{};
    std::array<bool, kSegmentCount> seen{};
    for (std::size_t i = 0; i < n; ++i) {
        if (i == apex) continue;
        const double s = b.arclengths[i];
        std::size_t seg = 0;
        if (i < apex) {
            seg = s < part.knots[0] ? 0 : (s < part.knots[1] ? 1 : 2);
        } else {
            seg = s <= part.knots[2] ? 3 : (s <= part.knots[3] ? 4 : 5);
        }
        if (!seen[seg]) {
            seen[seg] = true;
            first[seg] = i;
        }
        last[seg] = i;
    }
    for (std::size_t k = 0; k < kSegmentCount; ++k) {
        if (!seen[k]) {
            throw Error(ErrorCode::DegenerateBoundary,
                        "segment " + std::to_string(kSegmentIds[k]) + " is empty");
        }
        part.arcs[k] = {first[k], last[k]};
    }
    return part;
}

}  // namespace

double polar_angle(PointF p, PointF center) noexcept
{
    double a = std::atan2(-(p.x - center.x), p.y - center.y);
    if (a < 0.0) a += kTwoPi;
    if (a >= kTwoPi) a -= kTwoPi;
    return a;
}

SegmentPartition partition_boundary(const EndocardialBoundary& b, const LevelSplit& split)
{
    if (!(split.basal > 0.0 && split.mid > 0.0 && split.apical > 0.0)) {
        throw Error(ErrorCode::ValidationError, "level split shares must be positive");
    }
    const std::size_t n = b.size();
    if (n < 2 * kMinSideSteps + 1 || b.arclengths.size() != n) {
        throw Error(ErrorCode::DegenerateBoundary,
                    "boundary of " + std::to_string(n) + " points is too short to partition");
    }
    const Point p0 = b.points.front();
    const Point pn = b.points.back();
    std::vector<double> dist(n);
    double best = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
        // Doubled coordinates keep the midpoint integral.
        const std::int64_t dx = 2LL * b.points[i].x - p0.x - pn.x;
        const std::int64_t dy = 2LL * b.points[i].y - p0.y - pn.y;
        dist[i] = std::sqrt(static_cast<double>(dx * dx + dy * dy)) / 2.0;
        best = std::max(best, dist[i]);
    }
    // Points within a pixel of the farthest are ties; on a wall that is
    // nearly circular about the basal midpoint they span the whole arc, so
    // take the middle of the tied stretch.
    std::size_t lo = n;
    std::size_t hi = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (dist[i] >= best - kApexTieTolerance) {
            lo = std::min(lo, i);
            hi = i;
        }
    }
    const double target = (b.arclengths[lo] + b.arclengths[hi]) / 2.0;
    std::size_t apex = lo;
    for (std::size_t i = lo; i <= hi; ++i) {
        if (std::abs(b.arclengths[i] - target) < std::abs(b.arclengths[apex] - target)) apex = i;
    }
    return partition_at_apex(b, apex, split);
}

SampledWall sample_segments(const SegmentPartition& part, const EndocardialBoundary& b, int n)
{
    if (n < 2) {
        throw Error(ErrorCode::BadSampleCount, "need at least 2 samples per segment, got " + std::to_string(n));
    }
    SampledWall out;
    for (std::size_t k = 0; k < kSegmentCount; ++k) {
        const IndexRange arc = part.arcs[k];
        if (arc.last >= b.size() || arc.last < arc.first) {
            throw Error(ErrorCode::DegenerateBoundary, "arc outside boundary");
        }
        const double s0 = b.arclengths[arc.first];
        const double len = b.arclengths[arc.last] - s0;
        out[k].segment_id = kSegmentIds[k];
        out[k].points.reserve(static_cast<std::size_t>(n));
        std::size_t j = arc.first;
        for (int i = 0; i < n; ++i) {
            if (i == n - 1) {
                out[k].points.push_back(b.points[arc.last]);
                break;
            }
            const double s = s0 + (static_cast<double>(i) * len) / static_cast<double>(n - 1);
            while (j + 1 < arc.last && b.arclengths[j + 1] <= s) ++j;
            const double a0 = b.arclengths[j];
            const double a1 = b.arclengths[std::min(j + 1, arc.last)];
            const Point p = b.points[j];
            const Point q = b.points[std::min(j + 1, arc.last)];
            const double t = a1 > a0 ? (s - a0) / (a1 - a0) : 0.0;
            const double x = p.x + t * (q.x - p.x);
            const double y = p.y + t * (q.y - p.y);
            out[k].points.push_back({static_cast<std::int32_t>(std::lround(x)),
                                     static_cast<std::int32_t>(std::lround(y))});
        }
    }
    return out;
}

PointF fit_wall_center(const EndocardialBoundary& b, const std::array<double, 5>& knot_angles)
{
    if (b.size() < 3) {
        throw Error(ErrorCode::DegenerateBoundary, "boundary too short for a center fit");
    }
    const PointF rel = fit_relative(b, knot_angles, kasa_center(b));
    return {rel.x + b.points.front().x, rel.y + b.points.front().y};
}

PolarReference polar_reference(const EndocardialBoundary& b, const LevelSplit& split)
{
    SegmentPartition part = partition_boundary(b, split);
    const Point o = b.points.front();
    const Point e = b.points.back();
    // Unit normal of the basal chord, pointing into the wall.
    PointF normal{static_cast<double>(e.y - o.y), static_cast<double>(o.x - e.x)};
    {
        const double len = std::hypot(normal.x, normal.y);
        normal = {normal.x / len, normal.y / len};
        double side = 0.0;
        for (const Point& p : b.points) {
            side += (p.x - o.x - (e.x - o.x) / 2.0) * normal.x + (p.y - o.y - (e.y - o.y) / 2.0) * normal.y;
        }
        if (side < 0.0) normal = {-normal.x, -normal.y};
    }
    PointF c = kasa_center(b);
    std::array<double, 5> knots = knot_angles_about(b, part, c);
    for (int iter = 0; iter < kFitIterations; ++iter) {
        const PointF next = fit_relative(b, knots, kasa_center(b));
        const double step = std::hypot(next.x - c.x, next.y - c.y);
        c = next;
        // On a near-circular wall the farthest point from the basal midpoint
        // is poorly conditioned; take the point straight across from the
        // basal chord as seen from the fitted center instead.
        const auto th = unwrapped_angles(b, c);
        const double target = polar_angle({c.x + normal.x, c.y + normal.y}, c);
        std::size_t apex = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < b.size(); ++i) {
            const double d = std::abs(wrap_pi(th[i] - target));
            if (d < best) {
                best = d;
                apex = i;
            }
        }
        part = partition_at_apex(b, apex, split);
        knots = knot_angles_about(b, part, c);
        if (step < kFitTolerance) break;
    }
    // `c` is exactly what fit_relative returns for `knots`, so partitioning the
    // reference frame itself with this reference is self-consistent.
    c = fit_relative(b, knots, kasa_center(b));
    PolarReference ref;
    ref.center = {c.x + o.x, c.y + o.y};
    ref.knot_angles = knots;
    return ref;
}

SegmentPartition tracked_partition(const EndocardialBoundary& b, const PolarReference& ref)
{
    const std::size_t n = b.size();
    if (n < 2 * kMinSideSteps + 1) {
        throw Error(ErrorCode::DegenerateBoundary,
                    "boundary of " + std::to_string(n) + " points is too short to partition");
    }
    const PointF c = fit_relative(b, ref.knot_angles, kasa_center(b));
    const auto th = unwrapped_angles(b, c);

    // First index after `from` whose angle reaches `phi`; otherwise the
    // nearest angle after `from`.
    auto crossing = [&](std::size_t from, double phi) -> std::size_t {
        for (std::size_t i = from + 1; i < n; ++i) {
            if (th[i] >= phi) return i;
        }
        if (from + 1 >= n) {
            throw Error(ErrorCode::DegenerateBoundary, "boundary ends before a segment border");
        }
        std::size_t best = from + 1;
        for (std::size_t i = from + 1; i < n; ++i) {
            if (std::abs(th[i] - phi) < std::abs(th[best] - phi)) best = i;
        }
        return best;
    };
    const std::size_t c1 = crossing(0, ref.knot_angles[0]);
    const std::size_t c2 = crossing(c1, ref.knot_angles[1]);
    const std::size_t ca = crossing(c2, ref.knot_angles[2]);
    std::size_t apex = ca;
    if (ca - 1 > c2 && std::abs(th[ca - 1] - ref.knot_angles[2]) <= std::abs(th[ca] - ref.knot_angles[2])) {
        apex = ca - 1;
    }
    const std::size_t c3 = crossing(apex, ref.knot_angles[3]);
    const std::size_t c4 = crossing(c3, ref.knot_angles[4]);

    SegmentPartition part;
    part.apex_index = apex;
    part.L = b.arclengths[apex];
    part.R = b.length() - part.L;
    part.knots = {b.arclengths[c1], b.arclengths[c2], b.arclengths[c3], b.arclengths[c4]};
    part.arcs = {IndexRange{0, c1 - 1}, IndexRange{c1, c2 - 1}, IndexRange{c2, apex - 1},
                 IndexRange{apex + 1, c3 - 1}, IndexRange{c3, c4 - 1}, IndexRange{c4, n - 1}};
    if (apex <= c2 || c3 <= apex + 1 || c4 >= n) {
        throw Error(ErrorCode::DegenerateBoundary, "tracked segment borders collapse");
    }
    check_arcs(part);
    if (apex < kMinSideSteps || n - 1 - apex < kMinSideSteps) {
        throw Error(ErrorCode::DegenerateBoundary, "apex too close to a basal endpoint");
    }
    return part;
}

}  // namespace lvmotion
