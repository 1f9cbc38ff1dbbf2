#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lvmotion/mask_io.hpp"
#include "lvmotion/motion.hpp"
#include "lvmotion/types.hpp"

namespace lvmotion {

/// Per-segment validation score of one segmentation source, in (0, 1].
struct ModelMetrics {
    std::string model;
    SegmentVector values{};

    /// Throws Error(NonPositiveMetric | ValidationError).
    void validate() const;
};

/// One row per model, one column per segment; columns sum to 1.
using WeightMatrix = std::vector<SegmentVector>;

/// W[i][j] = M_i[j] / sum_k M_k[j]. Throws Error(EmptyModelList | NonPositiveMetric).
WeightMatrix compute_weights(const std::vector<ModelMetrics>& metrics);

/// Per-segment weighted sum. Throws Error(EmptyModelList | CountMismatch | VideoIdMismatch).
MotionFeature accumulate(const std::vector<MotionFeature>& features, const WeightMatrix& w);

/// Elementwise mean, computed as accumulate() with uniform weights.
MotionFeature average_accumulate(const std::vector<MotionFeature>& features);

/// Rescales to unit maximum (no-op for all-zero vectors).
MotionFeature renormalize(MotionFeature f);

enum class EnsembleMode { Weighted, Average };

/// Fuses feature tables row by row over the video ids present in every
/// table, ordered by id. Labels are carried over from the first table that
/// has one for the id.
io::FeatureTable fuse_tables(const std::vector<io::FeatureTable>& tables, const WeightMatrix& w,
                             bool renorm);

ModelMetrics read_metrics_json(const std::filesystem::path& path);
nlohmann::ordered_json metrics_to_json(const ModelMetrics& m);
nlohmann::ordered_json weights_to_json(const std::vector<ModelMetrics>& metrics, const WeightMatrix& w);

}  // namespace lvmotion
