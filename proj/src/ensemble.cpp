#include "lvmotion/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "lvmotion/error.hpp"

namespace lvmotion {

void ModelMetrics::validate() const
{
    for (double v : values) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw Error(ErrorCode::NonPositiveMetric,
                        "model '" + model + "' has a non-positive segment metric");
        }
        if (v > 1.0) {
            throw Error(ErrorCode::ValidationError, "model '" + model + "' has a segment metric above 1");
        }
    }
}

WeightMatrix compute_weights(const std::vector<ModelMetrics>& metrics)
{
    if (metrics.empty()) {
        throw Error(ErrorCode::EmptyModelList, "no models to weight");
    }
    for (const auto& m : metrics) m.validate();
    WeightMatrix w(metrics.size());
    for (std::size_t j = 0; j < kSegmentCount; ++j) {
        // Scaling by the column maximum first makes equal metrics give
        // exactly 1/n; the ratio M_i / sum M is unchanged.
        double top = 0.0;
        for (const auto& m : metrics) top = std::max(top, m.values[j]);
        double sum = 0.0;
        for (const auto& m : metrics) sum += m.values[j] / top;
        for (std::size_t i = 0; i < metrics.size(); ++i) {
            w[i][j] = (metrics[i].values[j] / top) / sum;
        }
    }
    return w;
}

MotionFeature accumulate(const std::vector<MotionFeature>& features, const WeightMatrix& w)
{
    if (features.empty()) {
        throw Error(ErrorCode::EmptyModelList, "no features to accumulate");
    }
    if (features.size() != w.size()) {
        throw Error(ErrorCode::CountMismatch, std::to_string(features.size()) + " features but " +
                                                  std::to_string(w.size()) + " weight rows");
    }
    MotionFeature out;
    out.video_id = features.front().video_id;
    out.degenerate = true;
    for (std::size_t i = 0; i < features.size(); ++i) {
        if (features[i].video_id != out.video_id) {
            throw Error(ErrorCode::VideoIdMismatch,
                        "video '" + features[i].video_id + "' fused with '" + out.video_id + "'");
        }
        out.degenerate = out.degenerate && features[i].degenerate;
        for (std::size_t j = 0; j < kSegmentCount; ++j) {
            out.values[j] += features[i].values[j] * w[i][j];
        }
    }
    return out;
}

MotionFeature average_accumulate(const std::vector<MotionFeature>& features)
{
    if (features.empty()) {
        throw Error(ErrorCode::EmptyModelList, "no features to average");
    }
    SegmentVector uniform{};
    uniform.fill(1.0 / static_cast<double>(features.size()));
    return accumulate(features, WeightMatrix(features.size(), uniform));
}

MotionFeature renormalize(MotionFeature f)
{
    const double top = *std::max_element(f.values.begin(), f.values.end());
    if (top > 0.0) {
        for (double& v : f.values) v = v == top ? 1.0 : v / top;
    }
    return f;
}

io::FeatureTable fuse_tables(const std::vector<io::FeatureTable>& tables, const WeightMatrix& w,
                             bool renorm)
{
    if (tables.empty()) {
        throw Error(ErrorCode::EmptyModelList, "no feature tables");
    }
    if (tables.size() != w.size()) {
        throw Error(ErrorCode::CountMismatch, std::to_string(tables.size()) + " feature tables but " +
                                                  std::to_string(w.size()) + " metric files");
    }
    std::vector<std::string> ids;
    for (const auto& row : tables.front().rows) ids.push_back(row.video_id);
    std::sort(ids.begin(), ids.end());

    io::FeatureTable out;
    for (const auto& id : ids) {
        std::vector<MotionFeature> fs;
        std::optional<int> label;
        bool shared = true;
        for (const auto& t : tables) {
            const auto* row = t.find(id);
            if (!row) {
                shared = false;
                break;
            }
            MotionFeature f;
            f.video_id = id;
            f.values = row->values;
            f.degenerate = std::all_of(row->values.begin(), row->values.end(), [](double v) { return v == 0.0; });
            fs.push_back(f);
            if (!label) label = row->label;
        }
        if (!shared) continue;
        MotionFeature acc = accumulate(fs, w);
        if (renorm) acc = renormalize(acc);
        out.rows.push_back({id, acc.values, label});
    }
    return out;
}

ModelMetrics read_metrics_json(const std::filesystem::path& path)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(io::read_text(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::SchemaError, path.string() + ": " + e.what());
    }
    ModelMetrics m;
    try {
        m.model = j.at("model").get<std::string>();
        const auto v = j.at("segment_iou").get<std::vector<double>>();
        if (v.size() != kSegmentCount) {
            throw Error(ErrorCode::SchemaError, path.string() + ": 'segment_iou' must hold 6 values");
        }
        std::copy(v.begin(), v.end(), m.values.begin());
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::SchemaError, path.string() + ": " + e.what());
    }
    m.validate();
    return m;
}

nlohmann::ordered_json metrics_to_json(const ModelMetrics& m)
{
    nlohmann::ordered_json j;
    j["model"] = m.model;
    j["segment_iou"] = m.values;
    return j;
}

nlohmann::ordered_json weights_to_json(const std::vector<ModelMetrics>& metrics, const WeightMatrix& w)
{
    nlohmann::ordered_json j;
    j["segments"] = kSegmentIds;
    j["models"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < metrics.size(); ++i) {
        nlohmann::ordered_json row;
        row["model"] = metrics[i].model;
        row["metrics"] = metrics[i].values;
        row["weights"] = w[i];
        j["models"].push_back(row);
    }
    return j;
}

}  // namespace lvmotion
