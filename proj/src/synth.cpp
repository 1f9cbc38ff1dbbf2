#include "lvmotion/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "lvmotion/error.hpp"
#include "lvmotion/random.hpp"

namespace lvmotion {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTaper = 10.0 * kPi / 180.0;

double deg2rad(double d) { return d * kPi / 180.0; }

void spec_error(const std::string& msg) { throw Error(ErrorCode::SpecError, msg); }

}  // namespace

void SyntheticHeartSpec::validate() const
{
    if (width <= 0 || height <= 0) spec_error("image size must be positive");
    if (!(inner_radius >= 20.0)) spec_error("inner_radius must be >= 20");
    if (!(wall_thickness >= 4.0)) spec_error("wall_thickness must be >= 4");
    if (!(opening_half_angle >= 10.0 && opening_half_angle <= 60.0)) {
        spec_error("opening_half_angle must lie in [10, 60] degrees");
    }
    if (frames < 3) spec_error("frames must be >= 3");
    if (!(fps > 0.0)) spec_error("fps must be positive");
    for (double a : amplitudes) {
        if (!(a >= 0.0 && a < inner_radius / 2.0)) {
            spec_error("amplitudes must lie in [0, inner_radius / 2)");
        }
    }
    if (!std::isfinite(center_x) || !std::isfinite(center_y)) spec_error("center must be finite");
    // Outer circle plus the raster offset and rigid shift must stay inside the image.
    const double reach = inner_radius + wall_thickness + 1.0;
    const double ox = std::abs(rigid_offset_x) + 0.5;
    const double oy = std::abs(rigid_offset_y) + 0.5;
    if (center_x - reach - ox < 0.0 || center_x + reach + ox > width - 1 || center_y - reach - oy < 0.0 ||
        center_y + reach + oy > height - 1) {
        spec_error("wall does not fit inside the image");
    }
    if (label && *label != 0 && *label != 1) spec_error("label must be 0 or 1");
    if (video_id.empty()) spec_error("video_id must not be empty");
}

SyntheticHeartSpec spec_from_json(const nlohmann::json& j)
{
    SyntheticHeartSpec s;
    try {
        if (!j.is_object()) spec_error("spec must be a JSON object");
        s.video_id = j.value("video_id", s.video_id);
        s.width = j.value("width", s.width);
        s.height = j.value("height", s.height);
        s.center_x = j.value("center_x", s.center_x);
        s.center_y = j.value("center_y", s.center_y);
        s.inner_radius = j.value("inner_radius", s.inner_radius);
        s.wall_thickness = j.value("wall_thickness", s.wall_thickness);
        s.opening_half_angle = j.value("opening_half_angle", s.opening_half_angle);
        s.frames = j.value("frames", s.frames);
        s.fps = j.value("fps", s.fps);
        s.rigid_offset_x = j.value("rigid_offset_x", s.rigid_offset_x);
        s.rigid_offset_y = j.value("rigid_offset_y", s.rigid_offset_y);
        if (j.contains("amplitudes")) {
            const auto a = j.at("amplitudes").get<std::vector<double>>();
            if (a.size() != kSegmentCount) spec_error("amplitudes must hold 6 values");
            std::copy(a.begin(), a.end(), s.amplitudes.begin());
        }
        if (j.contains("label")) s.label = j.at("label").get<int>();
        if (j.contains("segment_labels")) {
            const auto a = j.at("segment_labels").get<std::vector<int>>();
            if (a.size() != kSegmentCount) spec_error("segment_labels must hold 6 values");
            std::array<int, kSegmentCount> v{};
            std::copy(a.begin(), a.end(), v.begin());
            s.segment_labels = v;
        }
    } catch (const nlohmann::json::exception& e) {
        spec_error(std::string("bad spec field: ") + e.what());
    }
    s.validate();
    return s;
}

nlohmann::ordered_json spec_to_json(const SyntheticHeartSpec& s)
{
    nlohmann::ordered_json j;
    j["video_id"] = s.video_id;
    j["width"] = s.width;
    j["height"] = s.height;
    j["center_x"] = s.center_x;
    j["center_y"] = s.center_y;
    j["inner_radius"] = s.inner_radius;
    j["wall_thickness"] = s.wall_thickness;
    j["opening_half_angle"] = s.opening_half_angle;
    j["frames"] = s.frames;
    j["fps"] = s.fps;
    j["amplitudes"] = s.amplitudes;
    j["rigid_offset_x"] = s.rigid_offset_x;
    j["rigid_offset_y"] = s.rigid_offset_y;
    if (s.label) j["label"] = *s.label;
    if (s.segment_labels) j["segment_labels"] = *s.segment_labels;
    return j;
}

double phase(int t, int frames) noexcept
{
    return std::sin(kPi * static_cast<double>(t) / static_cast<double>(frames - 1));
}

std::array<double, 5> segment_borders(const SyntheticHeartSpec& spec)
{
    // Equal thirds of the reference inner contour on each side, counting
    // the basal end face (length w) as part of segment 1 / 7.
    const double alpha = deg2rad(spec.opening_half_angle);
    const double r = spec.inner_radius;
    const double w = spec.wall_thickness;
    const double side = w + r * (kPi - alpha);
    std::array<double, 2> left{};
    for (int k = 1; k <= 2; ++k) {
        const double along = k * side / 3.0 - w;
        left[static_cast<std::size_t>(k - 1)] = alpha + std::max(0.0, along) / r;
    }
    return {left[0], left[1], kPi, 2.0 * kPi - left[1], 2.0 * kPi - left[0]};
}

double amplitude_at(const SyntheticHeartSpec& spec, double theta)
{
    const auto b = segment_borders(spec);
    const double alpha = deg2rad(spec.opening_half_angle);
    // Segment spans in angle, for clamping the taper.
    const std::array<double, 6> lo{alpha, b[0], b[1], b[2], b[3], b[4]};
    const std::array<double, 6> hi{b[0], b[1], b[2], b[3], b[4], 2.0 * kPi - alpha};
    for (std::size_t j = 0; j < b.size(); ++j) {
        const double tau = std::min({kTaper, (hi[j] - lo[j]) / 2.0, (hi[j + 1] - lo[j + 1]) / 2.0});
        if (tau > 0.0 && theta > b[j] - tau && theta < b[j] + tau) {
            const double a0 = spec.amplitudes[j];
            const double a1 = spec.amplitudes[j + 1];
            return a0 + (a1 - a0) * (1.0 - std::cos(kPi * (theta - b[j] + tau) / (2.0 * tau))) / 2.0;
        }
    }
    std::size_t seg = 0;
    while (seg < b.size() && theta >= b[seg]) ++seg;
    return spec.amplitudes[seg];
}

PointF raster_offset(std::uint64_t seed)
{
    Rng rng(mix_seed(seed, 0x5EED));
    const double ox = rng.uniform() - 0.5;
    const double oy = rng.uniform() - 0.5;
    return {ox, oy};
}

SyntheticSequence generate(const SyntheticHeartSpec& spec, std::uint64_t seed)
{
    spec.validate();
    const PointF off = raster_offset(seed);
    const double cx = spec.center_x + off.x;
    const double cy = spec.center_y + off.y;
    const double alpha = deg2rad(spec.opening_half_angle);
    const int w = spec.width;
    const int h = spec.height;

    SyntheticSequence out;
    out.sequence.video_id = spec.video_id;
    out.sequence.fps = spec.fps;
    out.sequence.reference_index = 0;
    out.sequence.label = spec.label;
    out.sequence.segment_labels = spec.segment_labels;
    for (auto& c : out.truth) c.assign(static_cast<std::size_t>(spec.frames), 0.0);

    for (int t = 0; t < spec.frames; ++t) {
        const double ph = phase(t, spec.frames);
        // Integer shift applied to the integer grid first, so a shifted frame
        // is an exact translate of the unshifted raster.
        const auto sx = static_cast<int>(std::lround(spec.rigid_offset_x * ph));
        const auto sy = static_cast<int>(std::lround(spec.rigid_offset_y * ph));
        MaskFrame f(w, h);
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const double dx = static_cast<double>(x - sx) - cx;
                const double dy = static_cast<double>(y - sy) - cy;
                const double rho = std::hypot(dx, dy);
                double theta = std::atan2(-dx, dy);
                if (theta < 0.0) theta += 2.0 * kPi;
                if (theta < alpha || theta > 2.0 * kPi - alpha) continue;
                const double r = spec.inner_radius - amplitude_at(spec, theta) * ph;
                if (rho >= r - 0.5 && rho < r + spec.wall_thickness - 0.5) f.set(x, y, 1);
            }
        }
        out.sequence.frames.push_back(std::move(f));
        for (std::size_t k = 0; k < kSegmentCount; ++k) {
            out.truth[k][static_cast<std::size_t>(t)] = spec.amplitudes[k] * ph;
        }
    }
    return out;
}

std::vector<CorpusEntry> make_corpus(const CorpusOptions& opt)
{
    if (opt.mi < 0 || opt.normal < 0 || opt.mi + opt.normal == 0) {
        spec_error("corpus needs at least one recording");
    }
    if (opt.mi + opt.normal > 1000) spec_error("corpus is limited to 1000 recordings");
    Rng rng(mix_seed(opt.seed, 0xC0));
    std::vector<CorpusEntry> entries;
    const int total = opt.mi + opt.normal;
    for (int i = 0; i < total; ++i) {
        const bool mi = i < opt.mi;
        CorpusEntry e;
        SyntheticHeartSpec& s = e.spec;
        s.frames = opt.frames;
        s.inner_radius = rng.uniform(34.0, 42.0);
        s.wall_thickness = rng.uniform(6.0, 9.0);
        s.opening_half_angle = rng.uniform(35.0, 55.0);
        s.center_x = 64.0 + rng.uniform(-3.0, 3.0);
        s.center_y = 60.0 + rng.uniform(-3.0, 3.0);
        for (double& a : s.amplitudes) a = rng.uniform(6.0, 9.0);
        std::array<int, kSegmentCount> seg{};
        if (mi) {
            const int count = 1 + static_cast<int>(rng.below(2));
            std::vector<std::size_t> idx{0, 1, 2, 3, 4, 5};
            rng.shuffle(idx);
            for (int k = 0; k < count; ++k) {
                const std::size_t j = idx[static_cast<std::size_t>(k)];
                s.amplitudes[j] = rng.uniform(0.5, 2.5);
                seg[j] = 1;
            }
        }
        s.label = mi ? 1 : 0;
        s.segment_labels = seg;
        e.seed = mix_seed(opt.seed, static_cast<std::uint64_t>(i) + 1);
        entries.push_back(std::move(e));
    }
    rng.shuffle(entries);
    for (std::size_t i = 0; i < entries.size(); ++i) {
        char id[16];
        std::snprintf(id, sizeof id, "vid_%03zu", i);
        entries[i].spec.video_id = id;
        entries[i].spec.validate();
    }
    return entries;
}

}  // namespace lvmotion
