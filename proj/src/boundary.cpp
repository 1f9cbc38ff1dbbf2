#include "lvmotion/boundary.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <limits>

#include "lvmotion/error.hpp"

namespace lvmotion {

namespace {

constexpr std::array<int, 4> kDx4{1, 0, -1, 0};
constexpr std::array<int, 4> kDy4{0, 1, 0, -1};

// Connected-component labelling by flood fill. Returns a label per pixel
// (-1 where pred is false) and the size of every component.
template <class Pred>
std::vector<int> label_components(int w, int h, Pred pred, bool eight, std::vector<int>& sizes)
{
    std::vector<int> labels(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), -1);
    std::vector<int> stack;
    sizes.clear();
    for (int y0 = 0; y0 < h; ++y0) {
        for (int x0 = 0; x0 < w; ++x0) {
            const int start = y0 * w + x0;
            if (labels[static_cast<std::size_t>(start)] != -1 || !pred(x0, y0)) {
                continue;
            }
            const int id = static_cast<int>(sizes.size());
            int count = 0;
            labels[static_cast<std::size_t>(start)] = id;
            stack.push_back(start);
            while (!stack.empty()) {
                const int p = stack.back();
                stack.pop_back();
                ++count;
                const int px = p % w;
                const int py = p / w;
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        if ((dx == 0 && dy == 0) || (!eight && dx != 0 && dy != 0)) {
                            continue;
                        }
                        const int nx = px + dx;
                        const int ny = py + dy;
                        if (nx < 0 || ny < 0 || nx >= w || ny >= h) {
                            continue;
                        }
                        const int q = ny * w + nx;
                        if (labels[static_cast<std::size_t>(q)] == -1 && pred(nx, ny)) {
                            labels[static_cast<std::size_t>(q)] = id;
                            stack.push_back(q);
                        }
                    }
                }
            }
            sizes.push_back(count);
        }
    }
    return labels;
}

struct Corner {
    std::int64_t x = 0;
    std::int64_t y = 0;
};

std::int64_t cross(Corner o, Corner a, Corner b)
{
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

// Convex hull of the wall on the pixel-corner lattice (monotone chain).
// Only the leftmost and rightmost wall pixel of each row can be on it.
std::vector<Corner> corner_hull(const MaskFrame& m)
{
    std::vector<Corner> pts;
    for (int y = 0; y < m.height(); ++y) {
        int first = -1;
        int last = -1;
        for (int x = 0; x < m.width(); ++x) {
            if (m.at(x, y)) {
                if (first < 0) first = x;
                last = x;
            }
        }
        if (first < 0) continue;
        pts.push_back({first, y});
        pts.push_back({first, y + 1});
        pts.push_back({last + 1, y});
        pts.push_back({last + 1, y + 1});
    }
    std::sort(pts.begin(), pts.end(), [](Corner a, Corner b) { return a.x != b.x ? a.x < b.x : a.y < b.y; });
    if (pts.size() < 3) return pts;
    std::vector<Corner> hull(2 * pts.size());
    std::size_t k = 0;
    for (const Corner& p : pts) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
        hull[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

}  // namespace

MaskFrame hull_background(const MaskFrame& wall)
{
    MaskFrame out(wall.width(), wall.height());
    const auto hull = corner_hull(wall);
    if (hull.size() < 3) return out;
    for (int y = 0; y < wall.height(); ++y) {
        // Pixel centers sit on half-integer rows, never on a hull vertex, so
        // the row crosses the boundary exactly twice or not at all.
        const double yc = y + 0.5;
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (std::size_t i = 0; i < hull.size(); ++i) {
            const Corner a = hull[i];
            const Corner b = hull[(i + 1) % hull.size()];
            if ((a.y < yc) == (b.y < yc)) continue;
            const double x = static_cast<double>(a.x) +
                             (yc - static_cast<double>(a.y)) * static_cast<double>(b.x - a.x) /
                                 static_cast<double>(b.y - a.y);
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
        for (int x = 0; x < wall.width(); ++x) {
            const double xc = x + 0.5;
            if (!wall.at(x, y) && xc > lo && xc < hi) out.set(x, y, 1);
        }
    }
    return out;
}

EndocardialBoundary EndocardialBoundary::from_points(std::vector<Point> points)
{
    EndocardialBoundary b;
    b.arclengths.reserve(points.size());
    double s = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (i > 0) {
            const int dx = std::abs(points[i].x - points[i - 1].x);
            const int dy = std::abs(points[i].y - points[i - 1].y);
            s += (dx != 0 && dy != 0) ? std::sqrt(2.0) : static_cast<double>(dx + dy);
        }
        b.arclengths.push_back(s);
    }
    b.points = std::move(points);
    return b;
}

MaskFrame clean_wall(const MaskFrame& mask)
{
    const int w = mask.width();
    const int h = mask.height();
    if (mask.empty() || mask.count() == 0) {
        throw Error(ErrorCode::EmptyMask, "mask has no wall pixels");
    }

    std::vector<int> sizes;
    auto labels = label_components(w, h, [&](int x, int y) { return mask.at(x, y) != 0; }, true, sizes);
    int keep = -1;
    int big = 0;
    for (int i = 0; i < static_cast<int>(sizes.size()); ++i) {
        if (sizes[static_cast<std::size_t>(i)] > kMinComponentPixels) {
            ++big;
            keep = i;
        }
    }
    if (big == 0) {
        throw Error(ErrorCode::EmptyMask, "mask holds only speckle components");
    }
    if (big > 1) {
        throw Error(ErrorCode::MultipleComponents,
                    std::to_string(big) + " wall components above " + std::to_string(kMinComponentPixels) +
                        " pixels");
    }

    MaskFrame out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (labels[static_cast<std::size_t>(y * w + x)] == keep) out.set(x, y, 1);
        }
    }

    // Fill small background pockets that do not reach the image border.
    auto bg = label_components(w, h, [&](int x, int y) { return out.at(x, y) == 0; }, false, sizes);
    std::vector<std::uint8_t> touches(sizes.size(), 0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const int l = bg[static_cast<std::size_t>(y * w + x)];
            if (l >= 0 && (x == 0 || y == 0 || x == w - 1 || y == h - 1)) {
                touches[static_cast<std::size_t>(l)] = 1;
            }
        }
    }
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const int l = bg[static_cast<std::size_t>(y * w + x)];
            if (l >= 0 && !touches[static_cast<std::size_t>(l)] && sizes[static_cast<std::size_t>(l)] < kMaxFilledHole) {
                out.set(x, y, 1);
            }
        }
    }
    return out;
}

EndocardialBoundary extract_endocardial_boundary(const MaskFrame& mask)
{
    const MaskFrame wall = clean_wall(mask);
    const int w = wall.width();
    const int h = wall.height();

    // Cavity: largest 4-connected region of background inside the hull.
    const MaskFrame inside = hull_background(wall);
    std::vector<int> sizes;
    auto cav = label_components(w, h, [&](int x, int y) { return inside.at(x, y) != 0; }, false, sizes);
    if (sizes.empty()) {
        throw Error(ErrorCode::DegenerateBoundary, "no background enclosed by the wall");
    }
    const int cavity = static_cast<int>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
    auto in_cavity = [&](int x, int y) {
        return x >= 0 && y >= 0 && x < w && y < h && cav[static_cast<std::size_t>(y * w + x)] == cavity;
    };

    // A cavity inside an enclosed background component means the wall is a closed ring.
    std::vector<int> bg_sizes;
    auto bg = label_components(w, h, [&](int x, int y) { return wall.at(x, y) == 0; }, false, bg_sizes);
    int start_x = -1;
    int start_y = -1;
    for (int y = 0; y < h && start_x < 0; ++y) {
        for (int x = 0; x < w; ++x) {
            if (in_cavity(x, y)) {
                start_x = x;
                start_y = y;
                break;
            }
        }
    }
    {
        const int cav_bg = bg[static_cast<std::size_t>(start_y * w + start_x)];
        bool open = false;
        for (int y = 0; y < h && !open; ++y) {
            for (int x = 0; x < w; ++x) {
                if ((x == 0 || y == 0 || x == w - 1 || y == h - 1) &&
                    bg[static_cast<std::size_t>(y * w + x)] == cav_bg) {
                    open = true;
                    break;
                }
            }
        }
        if (!open) {
            throw Error(ErrorCode::ClosedWall, "wall encloses the cavity; no basal opening");
        }
    }

    // Crack following on the pixel-corner lattice with the cavity on the
    // right. Directions 0=E 1=S 2=W 3=N. Every edge records its left pixel.
    std::vector<Point> left_pixels;
    {
        int vx = start_x;
        int vy = start_y;
        int d = 0;
        const int sx = vx;
        const int sy = vy;
        do {
            // Left pixel of the edge leaving (vx,vy) in direction d.
            Point lp{};
            switch (d) {
            case 0: lp = {vx, vy - 1}; break;
            case 1: lp = {vx, vy}; break;
            case 2: lp = {vx - 1, vy}; break;
            default: lp = {vx - 1, vy - 1}; break;
            }
            left_pixels.push_back(lp);
            vx += kDx4[static_cast<std::size_t>(d)];
            vy += kDy4[static_cast<std::size_t>(d)];
            // Pixels ahead of the new vertex: ahead-left, ahead-right.
            Point al{};
            Point ar{};
            switch (d) {
            case 0: al = {vx, vy - 1}; ar = {vx, vy}; break;
            case 1: al = {vx, vy}; ar = {vx - 1, vy}; break;
            case 2: al = {vx - 1, vy}; ar = {vx - 1, vy - 1}; break;
            default: al = {vx - 1, vy - 1}; ar = {vx, vy - 1}; break;
            }
            if (!in_cavity(ar.x, ar.y)) {
                d = (d + 1) % 4;
            } else if (in_cavity(al.x, al.y)) {
                d = (d + 3) % 4;
            }
        } while (!(vx == sx && vy == sy && d == 0));
    }

    // Longest cyclic run of edges whose left pixel is wall.
    const std::size_t m = left_pixels.size();
    auto is_wall = [&](std::size_t i) {
        const Point p = left_pixels[i % m];
        return wall.value_or_zero(p.x, p.y) != 0;
    };
    std::size_t best_len = 0;
    std::size_t best_start = 0;
    {
        std::size_t first_gap = m;
        for (std::size_t i = 0; i < m; ++i) {
            if (!is_wall(i)) {
                first_gap = i;
                break;
            }
        }
        if (first_gap == m) {
            throw Error(ErrorCode::ClosedWall, "cavity border never leaves the wall");
        }
        std::size_t run = 0;
        for (std::size_t k = 1; k <= m; ++k) {
            const std::size_t i = first_gap + k;
            if (is_wall(i)) {
                ++run;
                if (run > best_len) {
                    best_len = run;
                    best_start = i + 1 - run;
                }
            } else {
                run = 0;
            }
        }
    }
    if (best_len == 0) {
        throw Error(ErrorCode::DegenerateBoundary, "cavity is not bordered by wall");
    }

    // Collapse repeats and one-pixel spurs (a,b,a -> a).
    std::vector<Point> chain;
    chain.reserve(best_len);
    for (std::size_t k = 0; k < best_len; ++k) {
        const Point p = left_pixels[(best_start + k) % m];
        if (!chain.empty() && chain.back() == p) {
            continue;
        }
        if (chain.size() >= 2 && chain[chain.size() - 2] == p) {
            chain.pop_back();
            continue;
        }
        chain.push_back(p);
    }
    if (chain.size() < kMinBoundaryPoints) {
        throw Error(ErrorCode::DegenerateBoundary,
                    "inner border has " + std::to_string(chain.size()) + " pixels");
    }

    // Basal endpoints: lowest point on each half; ties to the outer side.
    const std::size_t n = chain.size();
    const std::size_t left_end = (n - 1) / 2;
    const std::size_t right_begin = n / 2;
    std::size_t il = 0;
    for (std::size_t i = 1; i <= left_end; ++i) {
        if (chain[i].y > chain[il].y || (chain[i].y == chain[il].y && chain[i].x < chain[il].x)) {
            il = i;
        }
    }
    std::size_t ir = n - 1;
    for (std::size_t i = n - 1; i-- > right_begin;) {
        if (chain[i].y > chain[ir].y || (chain[i].y == chain[ir].y && chain[i].x > chain[ir].x)) {
            ir = i;
        }
    }
    std::vector<Point> pts(chain.begin() + static_cast<std::ptrdiff_t>(il),
                           chain.begin() + static_cast<std::ptrdiff_t>(ir) + 1);
    if (pts.size() >= 2 && pts.front().x > pts.back().x) {
        std::reverse(pts.begin(), pts.end());
    }
    if (pts.size() < kMinBoundaryPoints) {
        throw Error(ErrorCode::DegenerateBoundary,
                    "inner border between basal endpoints has " + std::to_string(pts.size()) + " pixels");
    }
    if (!(pts.front().x < pts.back().x)) {
        throw Error(ErrorCode::DegenerateBoundary, "basal endpoints are not left and right of each other");
    }
    return EndocardialBoundary::from_points(std::move(pts));
}

}  // namespace lvmotion
