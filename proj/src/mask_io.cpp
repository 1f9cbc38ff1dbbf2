#include "lvmotion/mask_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include <json.hpp>

#include "lvmotion/error.hpp"

namespace lvmotion::io {

namespace {

using nlohmann::json;

const char* const kSegmentHeader = "seg1,seg2,seg3,seg5,seg6,seg7";

// Reads the next whitespace-delimited token of a PGM header, skipping
// '#' comments.
std::string next_header_token(const std::string& buf, std::size_t& pos)
{
    for (;;) {
        while (pos < buf.size() && std::isspace(static_cast<unsigned char>(buf[pos]))) {
            ++pos;
        }
        if (pos < buf.size() && buf[pos] == '#') {
            while (pos < buf.size() && buf[pos] != '\n' && buf[pos] != '\r') {
                ++pos;
            }
            continue;
        }
        break;
    }
    std::size_t start = pos;
    while (pos < buf.size() && !std::isspace(static_cast<unsigned char>(buf[pos]))) {
        ++pos;
    }
    return buf.substr(start, pos - start);
}

int parse_header_int(const std::string& tok, const fs::path& path, const char* what)
{
    if (tok.empty() || !std::all_of(tok.begin(), tok.end(),
                                    [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
        throw Error(ErrorCode::SchemaError, path.string() + ": bad PGM " + what);
    }
    if (tok.size() > 9) {
        throw Error(ErrorCode::SchemaError, path.string() + ": PGM " + what + " too large");
    }
    return std::stoi(tok);
}

std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

std::vector<std::string> read_lines(const fs::path& path)
{
    std::istringstream in(read_text(path));
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (!line.empty()) {
            lines.push_back(line);
        }
    }
    return lines;
}

double parse_double(const std::string& s, const fs::path& path, std::size_t line_no)
{
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size()) {
        throw Error(ErrorCode::SchemaError, path.string() + ":" + std::to_string(line_no) +
                                                ": not a number: '" + s + "'");
    }
    return v;
}

int parse_binary(const std::string& s, const fs::path& path, std::size_t line_no)
{
    if (s == "0") return 0;
    if (s == "1") return 1;
    throw Error(ErrorCode::SchemaError, path.string() + ":" + std::to_string(line_no) +
                                            ": expected 0 or 1, got '" + s + "'");
}

void check_id(const std::string& id)
{
    if (id.empty() || id.find_first_of(",\r\n") != std::string::npos) {
        throw Error(ErrorCode::ValidationError, "video_id '" + id + "' cannot be written to CSV");
    }
}

template <class T>
T require(const json& j, const char* key, const fs::path& path)
{
    auto it = j.find(key);
    if (it == j.end()) {
        throw Error(ErrorCode::SchemaError, path.string() + ": missing key '" + key + "'");
    }
    try {
        return it->get<T>();
    } catch (const json::exception&) {
        throw Error(ErrorCode::SchemaError, path.string() + ": key '" + key + "' has wrong type");
    }
}

int binary_field(const json& v, const fs::path& path, const char* key)
{
    if (!v.is_number_integer() || (v.get<long long>() != 0 && v.get<long long>() != 1)) {
        throw Error(ErrorCode::SchemaError, path.string() + ": '" + key + "' must be 0 or 1");
    }
    return v.get<int>();
}

}  // namespace

std::string read_text(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::MissingFile, "cannot open " + path.string());
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorCode::IoError, "cannot write " + path.string());
    }
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.flush();
    if (!out) {
        throw Error(ErrorCode::IoError, "write failed: " + path.string());
    }
}

GrayImage read_pgm(const fs::path& path)
{
    if (!fs::exists(path)) {
        throw Error(ErrorCode::MissingFile, "frame file not found: " + path.string());
    }
    const std::string buf = read_text(path);
    std::size_t pos = 0;
    if (next_header_token(buf, pos) != "P5") {
        throw Error(ErrorCode::SchemaError, path.string() + ": not a binary PGM (P5)");
    }
    GrayImage img;
    img.width = parse_header_int(next_header_token(buf, pos), path, "width");
    img.height = parse_header_int(next_header_token(buf, pos), path, "height");
    const int maxval = parse_header_int(next_header_token(buf, pos), path, "maxval");
    if (img.width <= 0 || img.height <= 0) {
        throw Error(ErrorCode::SchemaError, path.string() + ": empty image");
    }
    if (maxval < 1 || maxval > 255) {
        throw Error(ErrorCode::SchemaError, path.string() + ": only 8-bit PGM is supported");
    }
    ++pos;  // single whitespace byte after maxval
    const std::size_t n = static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height);
    if (pos > buf.size() || buf.size() - pos < n) {
        throw Error(ErrorCode::SchemaError, path.string() + ": truncated pixel data");
    }
    img.data.assign(buf.begin() + static_cast<std::ptrdiff_t>(pos),
                    buf.begin() + static_cast<std::ptrdiff_t>(pos + n));
    return img;
}

void write_pgm(const GrayImage& image, const fs::path& path)
{
    std::string text = "P5\n" + std::to_string(image.width) + " " + std::to_string(image.height) +
                       "\n255\n";
    text.append(image.data.begin(), image.data.end());
    write_text(path, text);
}

MaskFrame read_mask(const fs::path& path)
{
    GrayImage img = read_pgm(path);
    return MaskFrame::from_gray(img.width, img.height, img.data, kWallThreshold);
}

void write_mask(const MaskFrame& mask, const fs::path& path)
{
    GrayImage img{mask.width(), mask.height(), {}};
    img.data.reserve(mask.pixels().size());
    for (std::uint8_t v : mask.pixels()) {
        img.data.push_back(v ? 255 : 0);
    }
    write_pgm(img, path);
}

MaskSequence load_sequence(const fs::path& manifest_path)
{
    if (!fs::exists(manifest_path)) {
        throw Error(ErrorCode::MissingFile, "manifest not found: " + manifest_path.string());
    }
    json j;
    try {
        j = json::parse(read_text(manifest_path));
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::SchemaError, manifest_path.string() + ": " + e.what());
    }
    if (!j.is_object()) {
        throw Error(ErrorCode::SchemaError, manifest_path.string() + ": manifest is not an object");
    }

    MaskSequence seq;
    seq.video_id = require<std::string>(j, "video_id", manifest_path);
    seq.fps = require<double>(j, "fps", manifest_path);
    if (j.contains("reference_frame")) {
        if (!j["reference_frame"].is_number_integer()) {
            throw Error(ErrorCode::SchemaError,
                        manifest_path.string() + ": 'reference_frame' must be an integer");
        }
        seq.reference_index = j["reference_frame"].get<int>();
    }
    const auto frames = require<std::vector<std::string>>(j, "frames", manifest_path);
    if (j.contains("label")) {
        seq.label = binary_field(j["label"], manifest_path, "label");
    }
    if (j.contains("segment_labels")) {
        const json& s = j["segment_labels"];
        if (!s.is_array() || s.size() != kSegmentCount) {
            throw Error(ErrorCode::SchemaError,
                        manifest_path.string() + ": 'segment_labels' must hold 6 entries");
        }
        std::array<int, kSegmentCount> labels{};
        for (std::size_t i = 0; i < kSegmentCount; ++i) {
            labels[i] = binary_field(s[i], manifest_path, "segment_labels");
        }
        seq.segment_labels = labels;
    }

    if (frames.empty()) {
        throw Error(ErrorCode::EmptySequence, manifest_path.string() + ": no frames listed");
    }
    const fs::path base = manifest_path.parent_path();
    seq.frames.reserve(frames.size());
    for (std::size_t i = 0; i < frames.size(); ++i) {
        seq.frames.push_back(read_mask(base / frames[i]));
        const MaskFrame& f = seq.frames.back();
        const MaskFrame& f0 = seq.frames.front();
        if (f.width() != f0.width() || f.height() != f0.height()) {
            throw Error(ErrorCode::DimensionMismatch,
                        manifest_path.string() + ": frame " + std::to_string(i) + " (" + frames[i] +
                            ") is " + std::to_string(f.width()) + "x" + std::to_string(f.height()) +
                            ", frame 0 is " + std::to_string(f0.width()) + "x" +
                            std::to_string(f0.height()),
                        static_cast<int>(i));
        }
    }
    seq.validate();
    return seq;
}

fs::path save_sequence(const MaskSequence& seq, const fs::path& dir)
{
    seq.validate();
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
    }
    nlohmann::ordered_json j;
    j["video_id"] = seq.video_id;
    j["fps"] = seq.fps;
    j["reference_frame"] = seq.reference_index;
    std::vector<std::string> names;
    for (std::size_t i = 0; i < seq.frames.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "frame_%03zu.pgm", i);
        write_mask(seq.frames[i], dir / name);
        names.emplace_back(name);
    }
    j["frames"] = names;
    if (seq.label) {
        j["label"] = *seq.label;
    }
    if (seq.segment_labels) {
        j["segment_labels"] = *seq.segment_labels;
    }
    const fs::path manifest = dir / "manifest.json";
    write_text(manifest, j.dump(2) + "\n");
    return manifest;
}

std::vector<fs::path> find_manifests(const fs::path& dir)
{
    if (!fs::is_directory(dir)) {
        throw Error(ErrorCode::MissingFile, "not a directory: " + dir.string());
    }
    std::vector<fs::path> out;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().filename() == "manifest.json") {
            out.push_back(entry.path());
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::string format_number(double value)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", value);
    return buf;
}

void FeatureTable::validate() const
{
    std::set<std::string> seen;
    for (const auto& row : rows) {
        check_id(row.video_id);
        if (!seen.insert(row.video_id).second) {
            throw Error(ErrorCode::ValidationError, "duplicate video_id '" + row.video_id + "'");
        }
        for (double v : row.values) {
            if (!std::isfinite(v)) {
                throw Error(ErrorCode::ValidationError,
                            "non-finite feature value for '" + row.video_id + "'");
            }
        }
        if (row.label && *row.label != 0 && *row.label != 1) {
            throw Error(ErrorCode::ValidationError, "label must be 0 or 1 for '" + row.video_id + "'");
        }
    }
}

const FeatureRow* FeatureTable::find(const std::string& video_id) const
{
    for (const auto& row : rows) {
        if (row.video_id == video_id) {
            return &row;
        }
    }
    return nullptr;
}

void write_feature_table(const FeatureTable& table, const fs::path& path)
{
    table.validate();
    const bool with_label =
        std::any_of(table.rows.begin(), table.rows.end(), [](const FeatureRow& r) { return r.label.has_value(); });
    std::string text = std::string("video_id,") + kSegmentHeader + (with_label ? ",label\n" : "\n");
    for (const auto& row : table.rows) {
        text += row.video_id;
        for (double v : row.values) {
            text += ',';
            text += format_number(v);
        }
        if (with_label) {
            text += ',';
            if (row.label) {
                text += std::to_string(*row.label);
            }
        }
        text += '\n';
    }
    write_text(path, text);
}

FeatureTable read_feature_table(const fs::path& path)
{
    const auto lines = read_lines(path);
    if (lines.empty()) {
        throw Error(ErrorCode::SchemaError, path.string() + ": missing header");
    }
    const std::string expected = std::string("video_id,") + kSegmentHeader;
    bool with_label = false;
    if (lines[0] == expected + ",label") {
        with_label = true;
    } else if (lines[0] != expected) {
        throw Error(ErrorCode::SchemaError, path.string() + ": unexpected header '" + lines[0] + "'");
    }
    const std::size_t cols = with_label ? 8 : 7;
    FeatureTable table;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto f = split_csv_line(lines[i]);
        if (f.size() != cols) {
            throw Error(ErrorCode::SchemaError, path.string() + ":" + std::to_string(i + 1) +
                                                    ": expected " + std::to_string(cols) + " columns");
        }
        FeatureRow row;
        row.video_id = f[0];
        for (std::size_t k = 0; k < kSegmentCount; ++k) {
            row.values[k] = parse_double(f[k + 1], path, i + 1);
        }
        if (with_label && !f[7].empty()) {
            row.label = parse_binary(f[7], path, i + 1);
        }
        table.rows.push_back(std::move(row));
    }
    table.validate();
    return table;
}

std::vector<LabelRow> read_labels(const fs::path& path)
{
    const auto lines = read_lines(path);
    if (lines.empty() || lines[0] != "video_id,label") {
        throw Error(ErrorCode::SchemaError, path.string() + ": expected header 'video_id,label'");
    }
    std::vector<LabelRow> rows;
    std::set<std::string> seen;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto f = split_csv_line(lines[i]);
        if (f.size() != 2) {
            throw Error(ErrorCode::SchemaError, path.string() + ":" + std::to_string(i + 1) +
                                                    ": expected 2 columns");
        }
        if (!seen.insert(f[0]).second) {
            throw Error(ErrorCode::ValidationError, path.string() + ": duplicate video_id '" + f[0] + "'");
        }
        rows.push_back({f[0], parse_binary(f[1], path, i + 1)});
    }
    return rows;
}

void write_labels(const std::vector<LabelRow>& rows, const fs::path& path)
{
    std::string text = "video_id,label\n";
    for (const auto& r : rows) {
        check_id(r.video_id);
        text += r.video_id + "," + std::to_string(r.label) + "\n";
    }
    write_text(path, text);
}

std::vector<PredictionRow> read_predictions(const fs::path& path)
{
    const auto lines = read_lines(path);
    if (lines.empty() || lines[0] != "video_id,true,pred") {
        throw Error(ErrorCode::SchemaError, path.string() + ": expected header 'video_id,true,pred'");
    }
    std::vector<PredictionRow> rows;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto f = split_csv_line(lines[i]);
        if (f.size() != 3) {
            throw Error(ErrorCode::SchemaError, path.string() + ":" + std::to_string(i + 1) +
                                                    ": expected 3 columns");
        }
        rows.push_back({f[0], parse_binary(f[1], path, i + 1), parse_binary(f[2], path, i + 1)});
    }
    return rows;
}

void write_predictions(const std::vector<PredictionRow>& rows, const fs::path& path)
{
    std::string text = "video_id,true,pred\n";
    for (const auto& r : rows) {
        check_id(r.video_id);
        text += r.video_id + "," + std::to_string(r.truth) + "," + std::to_string(r.predicted) + "\n";
    }
    write_text(path, text);
}

}  // namespace lvmotion::io
