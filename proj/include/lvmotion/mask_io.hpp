#pragma once

// On-disk formats: one binary PGM (P5, 8-bit) per frame plus a JSON manifest
// per recording; feature, label and prediction tables as LF-terminated CSV.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lvmotion/types.hpp"

namespace lvmotion::io {

namespace fs = std::filesystem;

inline constexpr std::uint8_t kWallThreshold = 128;

struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;
};

GrayImage read_pgm(const fs::path& path);
void write_pgm(const GrayImage& image, const fs::path& path);

/// Reads a frame file and binarizes it (>= 128 is wall).
MaskFrame read_mask(const fs::path& path);
/// Writes 0 / 255.
void write_mask(const MaskFrame& mask, const fs::path& path);

MaskSequence load_sequence(const fs::path& manifest_path);

/// Writes `<dir>/frame_NNN.pgm` files and `<dir>/manifest.json`; returns the
/// manifest path.
fs::path save_sequence(const MaskSequence& seq, const fs::path& dir);

/// All files named manifest.json below `dir`, sorted by path.
std::vector<fs::path> find_manifests(const fs::path& dir);

struct FeatureRow {
    std::string video_id;
    SegmentVector values{};
    std::optional<int> label;
};

struct FeatureTable {
    std::vector<FeatureRow> rows;

    /// Finite values, unique ids, ids free of ',' and line breaks.
    void validate() const;
    [[nodiscard]] const FeatureRow* find(const std::string& video_id) const;
};

void write_feature_table(const FeatureTable& table, const fs::path& path);
FeatureTable read_feature_table(const fs::path& path);

struct LabelRow {
    std::string video_id;
    int label = 0;
};
std::vector<LabelRow> read_labels(const fs::path& path);
void write_labels(const std::vector<LabelRow>& rows, const fs::path& path);

struct PredictionRow {
    std::string video_id;
    int truth = 0;
    int predicted = 0;
};
std::vector<PredictionRow> read_predictions(const fs::path& path);
void write_predictions(const std::vector<PredictionRow>& rows, const fs::path& path);

/// Formats a value with 9 significant digits, the precision used by every CSV.
std::string format_number(double value);

/// Writes text atomically enough for our purposes: truncates and writes, IoError on failure.
void write_text(const fs::path& path, const std::string& text);
std::string read_text(const fs::path& path);

}  // namespace lvmotion::io
