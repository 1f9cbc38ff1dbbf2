#include "lvmotion/motion.hpp"

#include <algorithm>
#include <cstdlib>

#include "lvmotion/boundary.hpp"
#include "lvmotion/error.hpp"
#include "lvmotion/kernels.hpp"

namespace lvmotion {

int point_displacement(Point p_t, Point p_ref) noexcept
{
    return std::abs(p_t.x - p_ref.x) + std::abs(p_t.y - p_ref.y);
}

double segment_displacement(const SampledSegment& seg_t, const SampledSegment& seg_ref)
{
    if (seg_t.segment_id != seg_ref.segment_id) {
        throw Error(ErrorCode::SegmentMismatch, "segment " + std::to_string(seg_t.segment_id) +
                                                    " compared with segment " +
                                                    std::to_string(seg_ref.segment_id));
    }
    if (seg_t.points.size() != seg_ref.points.size() || seg_t.points.empty()) {
        throw Error(ErrorCode::SegmentMismatch, "sample counts differ (" +
                                                    std::to_string(seg_t.points.size()) + " vs " +
                                                    std::to_string(seg_ref.points.size()) + ")");
    }
    const std::int64_t sum = kernels::l1_distance_sum(seg_t.points, seg_ref.points);
    return static_cast<double>(sum) / static_cast<double>(seg_t.points.size());
}

std::vector<SampledWall> sample_sequence(const MaskSequence& seq, const MotionOptions& opt,
                                         SegmentPartition* ref_partition)
{
    seq.validate();
    if (opt.points < 2) {
        throw Error(ErrorCode::BadSampleCount, "need at least 2 samples per segment");
    }
    const auto tr = static_cast<std::size_t>(seq.reference_index);
    std::vector<SampledWall> out(seq.frames.size());

    EndocardialBoundary ref_b;
    SegmentPartition ref_p;
    PolarReference polar;
    try {
        ref_b = extract_endocardial_boundary(seq.frames[tr]);
        ref_p = partition_boundary(ref_b, opt.split);
        if (opt.partition == PartitionMode::Tracked) {
            polar = polar_reference(ref_b, opt.split);
            ref_p = tracked_partition(ref_b, polar);
        }
        out[tr] = sample_segments(ref_p, ref_b, opt.points);
    } catch (const Error& e) {
        throw e.at_frame(seq.reference_index);
    }
    if (ref_partition) *ref_partition = ref_p;

    for (std::size_t t = 0; t < seq.frames.size(); ++t) {
        if (t == tr) continue;
        try {
            if (seq.frames[t] == seq.frames[tr]) {
                out[t] = out[tr];
                continue;
            }
            const auto b = extract_endocardial_boundary(seq.frames[t]);
            const auto p = opt.partition == PartitionMode::Tracked ? tracked_partition(b, polar)
                                                                   : partition_boundary(b, opt.split);
            out[t] = sample_segments(p, b, opt.points);
        } catch (const Error& e) {
            throw e.at_frame(static_cast<int>(t));
        }
    }
    return out;
}

MotionFeature normalize_max(const std::string& video_id, const SegmentVector& raw)
{
    MotionFeature f;
    f.video_id = video_id;
    const double top = *std::max_element(raw.begin(), raw.end());
    if (!(top > 0.0)) {
        f.degenerate = true;
        return f;
    }
    for (std::size_t k = 0; k < kSegmentCount; ++k) {
        f.values[k] = raw[k] == top ? 1.0 : raw[k] / top;
    }
    return f;
}

MotionResult motion_feature(const MaskSequence& seq, const MotionOptions& opt)
{
    SegmentPartition ref_p;
    const auto samples = sample_sequence(seq, opt, &ref_p);
    const auto tr = static_cast<std::size_t>(seq.reference_index);

    MotionResult res;
    for (std::size_t k = 0; k < kSegmentCount; ++k) {
        res.curves[k].segment_id = kSegmentIds[k];
        res.curves[k].values.assign(samples.size(), 0.0);
    }
    for (std::size_t t = 0; t < samples.size(); ++t) {
        if (t == tr) continue;
        for (std::size_t k = 0; k < kSegmentCount; ++k) {
            const double d = segment_displacement(samples[t][k], samples[tr][k]);
            res.curves[k].values[t] = d;
            res.raw_max[k] = std::max(res.raw_max[k], d);
        }
    }

    if (opt.norm == NormMode::Max) {
        res.feature = normalize_max(seq.video_id, res.raw_max);
    } else {
        res.feature.video_id = seq.video_id;
        const double len = ref_p.L + ref_p.R;
        const bool any = std::any_of(res.raw_max.begin(), res.raw_max.end(), [](double v) { return v > 0.0; });
        res.feature.degenerate = !any;
        for (std::size_t k = 0; k < kSegmentCount; ++k) {
            res.feature.values[k] = std::min(1.0, res.raw_max[k] / len);
        }
    }
    if (opt.mirror_segments) {
        std::reverse(res.feature.values.begin(), res.feature.values.end());
        std::reverse(res.raw_max.begin(), res.raw_max.end());
        std::reverse(res.curves.begin(), res.curves.end());
        for (std::size_t k = 0; k < kSegmentCount; ++k) res.curves[k].segment_id = kSegmentIds[k];
    }
    return res;
}

}  // namespace lvmotion
