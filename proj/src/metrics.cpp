#include "lvmotion/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "lvmotion/boundary.hpp"
#include "lvmotion/error.hpp"
#include "lvmotion/random.hpp"
#include "lvmotion/wallmap.hpp"

namespace lvmotion {

namespace {

void check_same_size(const MaskFrame& a, const MaskFrame& b)
{
    if (a.width() != b.width() || a.height() != b.height()) {
        throw Error(ErrorCode::DimensionMismatch,
                    std::to_string(a.width()) + "x" + std::to_string(a.height()) + " vs " +
                        std::to_string(b.width()) + "x" + std::to_string(b.height()));
    }
}

void check_pair(std::size_t a, std::size_t b)
{
    if (a != b) {
        throw Error(ErrorCode::LengthMismatch,
                    "label lists differ in length (" + std::to_string(a) + " vs " + std::to_string(b) + ")");
    }
    if (a == 0) {
        throw Error(ErrorCode::Empty, "label lists are empty");
    }
}

std::optional<double> ratio(std::uint64_t num, std::uint64_t den)
{
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
}

nlohmann::ordered_json opt(const std::optional<double>& v)
{
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

}  // namespace

IouResult iou(const MaskFrame& a, const MaskFrame& b)
{
    check_same_size(a, b);
    const auto c = kernels::overlap(a.pixels(), b.pixels());
    if (c.union_count == 0) return {1.0, true};
    return {static_cast<double>(c.intersection) / static_cast<double>(c.union_count), false};
}

std::vector<std::uint8_t> segment_label_map(const MaskFrame& gt, const MaskFrame& region, int n)
{
    check_same_size(gt, region);
    const auto b = extract_endocardial_boundary(gt);
    const auto wall = sample_segments(partition_boundary(b), b, n);
    std::vector<std::uint8_t> labels(region.pixels().size(), kernels::kNoLabel);
    const int w = region.width();
    for (int y = 0; y < region.height(); ++y) {
        for (int x = 0; x < w; ++x) {
            if (!region.at(x, y)) continue;
            long best = std::numeric_limits<long>::max();
            std::uint8_t lab = kernels::kNoLabel;
            for (std::size_t k = 0; k < kSegmentCount; ++k) {
                for (const Point& q : wall[k].points) {
                    const long dx = x - q.x;
                    const long dy = y - q.y;
                    const long d = dx * dx + dy * dy;
                    if (d < best) {
                        best = d;
                        lab = static_cast<std::uint8_t>(k);
                    }
                }
            }
            labels[static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x)] = lab;
        }
    }
    return labels;
}

void SegmentIouAccumulator::add(const MaskSequence& pred, const MaskSequence& gt)
{
    if (pred.frames.size() != gt.frames.size()) {
        throw Error(ErrorCode::CountMismatch, "prediction has " + std::to_string(pred.frames.size()) +
                                                  " frames, ground truth " + std::to_string(gt.frames.size()));
    }
    for (std::size_t t = 0; t < gt.frames.size(); ++t) {
        try {
            const MaskFrame& g = gt.frames[t];
            const MaskFrame& p = pred.frames[t];
            check_same_size(g, p);
            MaskFrame region = g;
            for (std::size_t i = 0; i < region.pixels().size(); ++i) {
                region.pixels()[i] = static_cast<std::uint8_t>(g.pixels()[i] | p.pixels()[i]);
            }
            const auto labels = segment_label_map(g, region, samples_);
            const auto c = kernels::labeled_overlap(p.pixels(), g.pixels(), labels);
            for (std::size_t k = 0; k < kSegmentCount; ++k) {
                counts_[k].intersection += c[k].intersection;
                counts_[k].union_count += c[k].union_count;
            }
        } catch (const Error& e) {
            throw e.at_frame(static_cast<int>(t));
        }
    }
}

SegmentIouAccumulator& SegmentIouAccumulator::operator+=(const SegmentIouAccumulator& other) noexcept
{
    for (std::size_t k = 0; k < kSegmentCount; ++k) {
        counts_[k].intersection += other.counts_[k].intersection;
        counts_[k].union_count += other.counts_[k].union_count;
    }
    return *this;
}

ModelMetrics SegmentIouAccumulator::result(const std::string& model) const
{
    ModelMetrics m;
    m.model = model;
    for (std::size_t k = 0; k < kSegmentCount; ++k) {
        const auto& c = counts_[k];
        m.values[k] = c.union_count == 0
                          ? 1.0
                          : static_cast<double>(c.intersection) / static_cast<double>(c.union_count);
    }
    return m;
}

ModelMetrics per_segment_iou(const MaskSequence& pred, const MaskSequence& gt, int samples)
{
    SegmentIouAccumulator acc(samples);
    acc.add(pred, gt);
    return acc.result(pred.video_id);
}

ConfusionMatrix confusion(const std::vector<int>& truth, const std::vector<int>& pred)
{
    check_pair(truth.size(), pred.size());
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const bool t = truth[i] != 0;
        const bool p = pred[i] != 0;
        if (t && p) ++cm.tp;
        else if (!t && p) ++cm.fp;
        else if (!t && !p) ++cm.tn;
        else ++cm.fn;
    }
    return cm;
}

std::optional<double> f_beta_score(double precision, double sensitivity, double beta)
{
    const double b2 = beta * beta;
    const double den = b2 * precision + sensitivity;
    if (!(den > 0.0)) return std::nullopt;
    return (1.0 + b2) * precision * sensitivity / den;
}

MetricBundle summarize(const ConfusionMatrix& cm, double beta)
{
    MetricBundle b;
    b.beta = beta;
    b.sensitivity = ratio(cm.tp, cm.tp + cm.fn);
    b.specificity = ratio(cm.tn, cm.tn + cm.fp);
    b.accuracy = ratio(cm.tp + cm.tn, cm.total());
    b.precision = ratio(cm.tp, cm.tp + cm.fp);
    if (b.precision && b.sensitivity) {
        b.f_beta = f_beta_score(*b.precision, *b.sensitivity, beta);
    }
    return b;
}

MetricBundle macro_average(const std::vector<MetricBundle>& bundles)
{
    MetricBundle out;
    if (!bundles.empty()) out.beta = bundles.front().beta;
    auto mean = [&](std::optional<double> MetricBundle::*field) -> std::optional<double> {
        double sum = 0.0;
        int n = 0;
        for (const auto& b : bundles) {
            if (b.*field) {
                sum += *(b.*field);
                ++n;
            }
        }
        if (n == 0) return std::nullopt;
        return sum / n;
    };
    out.sensitivity = mean(&MetricBundle::sensitivity);
    out.specificity = mean(&MetricBundle::specificity);
    out.accuracy = mean(&MetricBundle::accuracy);
    out.precision = mean(&MetricBundle::precision);
    out.f_beta = mean(&MetricBundle::f_beta);
    return out;
}

KappaResult cohens_kappa(const std::vector<int>& a, const std::vector<int>& b)
{
    check_pair(a.size(), b.size());
    const auto n = static_cast<double>(a.size());
    double agree = 0.0;
    double a1 = 0.0;
    double b1 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const bool x = a[i] != 0;
        const bool y = b[i] != 0;
        if (x == y) agree += 1.0;
        if (x) a1 += 1.0;
        if (y) b1 += 1.0;
    }
    KappaResult r;
    r.observed_agreement = agree / n;
    const double pa1 = a1 / n;
    const double pb1 = b1 / n;
    r.expected_agreement = pa1 * pb1 + (1.0 - pa1) * (1.0 - pb1);
    if (r.expected_agreement < 1.0) {
        r.kappa = (r.observed_agreement - r.expected_agreement) / (1.0 - r.expected_agreement);
    } else if (r.observed_agreement == 1.0) {
        r.kappa = 1.0;
    }
    return r;
}

KappaProtocolResult kappa_protocol(const std::vector<std::vector<int>>& sets, std::size_t sample_count,
                                   std::uint64_t seed)
{
    if (sets.size() < 2) {
        throw Error(ErrorCode::TooFewSets, "kappa needs at least 2 prediction sets");
    }
    const std::size_t n = sets.front().size();
    for (const auto& s : sets) {
        if (s.size() != n) {
            throw Error(ErrorCode::LengthMismatch, "prediction sets differ in length");
        }
    }
    if (sample_count == 0) {
        throw Error(ErrorCode::Empty, "sample count must be positive");
    }
    if (sample_count > n) {
        throw Error(ErrorCode::SampleTooLarge, "sample count " + std::to_string(sample_count) +
                                                   " exceeds set length " + std::to_string(n));
    }
    KappaProtocolResult res;
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    Rng rng(seed);
    rng.shuffle(idx);
    idx.resize(sample_count);
    std::sort(idx.begin(), idx.end());
    res.indices = idx;

    double sum = 0.0;
    int defined = 0;
    for (std::size_t i = 0; i < sets.size(); ++i) {
        for (std::size_t j = i + 1; j < sets.size(); ++j) {
            std::vector<int> a;
            std::vector<int> b;
            for (std::size_t k : idx) {
                a.push_back(sets[i][k]);
                b.push_back(sets[j][k]);
            }
            KappaPair p{i, j, cohens_kappa(a, b)};
            if (p.result.kappa) {
                sum += *p.result.kappa;
                ++defined;
            }
            res.pairs.push_back(p);
        }
    }
    if (defined > 0) res.mean = sum / defined;
    return res;
}

double bce(double prob, int label) noexcept
{
    const double p = std::clamp(prob, kBceEpsilon, 1.0 - kBceEpsilon);
    return label ? -std::log(p) : -std::log(1.0 - p);
}

nlohmann::ordered_json to_json(const ConfusionMatrix& cm)
{
    nlohmann::ordered_json j;
    j["tp"] = cm.tp;
    j["fp"] = cm.fp;
    j["tn"] = cm.tn;
    j["fn"] = cm.fn;
    return j;
}

nlohmann::ordered_json to_json(const MetricBundle& b)
{
    nlohmann::ordered_json j;
    j["sensitivity"] = opt(b.sensitivity);
    j["specificity"] = opt(b.specificity);
    j["accuracy"] = opt(b.accuracy);
    j["precision"] = opt(b.precision);
    j["f_beta"] = opt(b.f_beta);
    j["beta"] = b.beta;
    return j;
}

nlohmann::ordered_json to_json(const KappaResult& k)
{
    nlohmann::ordered_json j;
    j["kappa"] = opt(k.kappa);
    j["observed_agreement"] = k.observed_agreement;
    j["expected_agreement"] = k.expected_agreement;
    return j;
}

}  // namespace lvmotion
