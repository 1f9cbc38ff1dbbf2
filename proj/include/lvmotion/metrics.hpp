#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <json.hpp>

#include "lvmotion/ensemble.hpp"
#include "lvmotion/kernels.hpp"
#include "lvmotion/types.hpp"

namespace lvmotion {

struct IouResult {
    double value = 0.0;
    /// Both masks were empty; value is defined as 1.
    bool both_empty = false;
};

/// Throws Error(DimensionMismatch).
IouResult iou(const MaskFrame& a, const MaskFrame& b);

/// Per-pixel segment index (0..5) of the nearest of the 6 x n samples of
/// the ground-truth boundary; ties go to the lower segment. Pixels outside
/// `region` get kernels::kNoLabel.
std::vector<std::uint8_t> segment_label_map(const MaskFrame& gt, const MaskFrame& region, int n = 20);

/// Pools per-segment intersection and union counts over frames (and, if
/// fed several recordings, over recordings).
class SegmentIouAccumulator {
public:
    explicit SegmentIouAccumulator(int samples = 20) : samples_(samples) {}

    /// Throws Error(CountMismatch | DimensionMismatch) and boundary errors of the gt frames.
    void add(const MaskSequence& pred, const MaskSequence& gt);
    /// Adds another accumulator's counts; counts are integers, so merge order is irrelevant.
    SegmentIouAccumulator& operator+=(const SegmentIouAccumulator& other) noexcept;
    [[nodiscard]] ModelMetrics result(const std::string& model) const;
    [[nodiscard]] const std::array<kernels::OverlapCounts, kSegmentCount>& counts() const noexcept
    {
        return counts_;
    }

private:
    int samples_;
    std::array<kernels::OverlapCounts, kSegmentCount> counts_{};
};

/// A segment whose pooled union is empty scores 1.
ModelMetrics per_segment_iou(const MaskSequence& pred, const MaskSequence& gt, int samples = 20);

struct ConfusionMatrix {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t tn = 0;
    std::uint64_t fn = 0;

    [[nodiscard]] std::uint64_t total() const noexcept { return tp + fp + tn + fn; }
    ConfusionMatrix& operator+=(const ConfusionMatrix& o) noexcept
    {
        tp += o.tp;
        fp += o.fp;
        tn += o.tn;
        fn += o.fn;
        return *this;
    }
    friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

/// Positive class is 1. Throws Error(LengthMismatch | Empty).
ConfusionMatrix confusion(const std::vector<int>& truth, const std::vector<int>& pred);

/// nullopt marks a metric whose denominator is zero.
struct MetricBundle {
    std::optional<double> sensitivity;
    std::optional<double> specificity;
    std::optional<double> accuracy;
    std::optional<double> precision;
    std::optional<double> f_beta;
    double beta = 1.0;
};

[[nodiscard]] std::optional<double> f_beta_score(double precision, double sensitivity, double beta);
MetricBundle summarize(const ConfusionMatrix& cm, double beta = 1.0);
/// Mean of each metric over the bundles where it is defined.
MetricBundle macro_average(const std::vector<MetricBundle>& bundles);

struct KappaResult {
    std::optional<double> kappa;
    double observed_agreement = 0.0;
    double expected_agreement = 0.0;
};

/// Throws Error(LengthMismatch | Empty).
KappaResult cohens_kappa(const std::vector<int>& a, const std::vector<int>& b);

struct KappaPair {
    std::size_t first = 0;
    std::size_t second = 0;
    KappaResult result;
};

struct KappaProtocolResult {
    /// Mean over the pairs whose kappa is defined.
    std::optional<double> mean;
    std::vector<KappaPair> pairs;
    std::vector<std::size_t> indices;
};

/// Draws `sample_count` distinct indices with the seeded generator and
/// averages kappa over every unordered pair of sets.
/// Throws Error(TooFewSets | SampleTooLarge | LengthMismatch).
KappaProtocolResult kappa_protocol(const std::vector<std::vector<int>>& sets, std::size_t sample_count,
                                   std::uint64_t seed);

inline constexpr double kBceEpsilon = 1e-12;
[[nodiscard]] double bce(double prob, int label) noexcept;

nlohmann::ordered_json to_json(const ConfusionMatrix& cm);
nlohmann::ordered_json to_json(const MetricBundle& b);
nlohmann::ordered_json to_json(const KappaResult& k);

}  // namespace lvmotion
