#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <iostream>
#include <map>
#include <stdexcept>
#include <thread>

#include <CLI11.hpp>

#include "lvmotion/classify.hpp"
#include "lvmotion/ensemble.hpp"
#include "lvmotion/error.hpp"
#include "lvmotion/mask_io.hpp"
#include "lvmotion/metrics.hpp"
#include "lvmotion/motion.hpp"
#include "lvmotion/random.hpp"
#include "lvmotion/synth.hpp"

namespace lvmotion::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

constexpr const char* kCurveHeader = "frame,seg1,seg2,seg3,seg5,seg6,seg7\n";

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Options {
    RunConfig cfg;
    int jobs = 1;
    bool verbose = false;

    // shared paths
    std::string manifest;
    std::string manifest_dir;
    std::string out;
    std::string out_dir;
    std::string report;

    // ensemble
    std::vector<std::string> features;
    std::vector<std::string> metrics;
    std::string weights_out;

    // evaluate
    std::string feature_file;
    std::string labels;
    std::string predictions_out;

    // kappa
    std::vector<std::string> prediction_files;
    int samples = 20;

    // segmetrics
    std::string pred_dir;
    std::string gt_dir;
    std::string model;

    // synth
    std::string spec;
    bool corpus = false;
    int mi = 30;
    int normal = 30;
    int frames = 25;

    // corrupt
    double sigma = 0.0;
    double hole_rate = 0.0;
    double protrusion_rate = 0.0;
    std::vector<int> segments;
};

std::uint64_t fnv1a(const std::string& s)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Runs fn(0..n-1) on up to `jobs` threads. The first failure by index is
// rethrown, so the reported error does not depend on scheduling.
template <class F>
void parallel_for(std::size_t n, int jobs, F&& fn)
{
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::size_t threads = jobs > 0 ? static_cast<std::size_t>(jobs) : std::thread::hardware_concurrency();
    threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(n, 1));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

fs::path existing_file(const std::string& p)
{
    const fs::path path(p);
    if (!fs::is_regular_file(path)) throw Error(ErrorCode::MissingFile, p + ": no such file");
    return path;
}

fs::path existing_dir(const std::string& p)
{
    const fs::path path(p);
    if (!fs::is_directory(path)) throw Error(ErrorCode::MissingFile, p + ": no such directory");
    return path;
}

void emit(const std::string& path, const std::string& text, std::ostream& out)
{
    if (path.empty() || path == "-") {
        out << text;
    } else {
        io::write_text(path, text);
    }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

MotionOptions motion_options(const RunConfig& c)
{
    MotionOptions o;
    o.points = c.points;
    o.norm = c.norm == "anatomical" ? NormMode::Anatomical : NormMode::Max;
    o.partition = c.partition == "independent" ? PartitionMode::Independent : PartitionMode::Tracked;
    o.mirror_segments = c.mirror_segments;
    return o;
}

// Manifests named on the command line, or all below a directory.
std::vector<fs::path> manifest_inputs(Options& o)
{
    if (o.manifest.empty() == o.manifest_dir.empty()) {
        throw UsageError("give exactly one of --manifest or --manifest-dir");
    }
    if (!o.manifest.empty()) {
        o.cfg.inputs = {o.manifest};
        return {existing_file(o.manifest)};
    }
    o.cfg.inputs = {o.manifest_dir};
    auto found = io::find_manifests(existing_dir(o.manifest_dir));
    if (found.empty()) throw Error(ErrorCode::MissingFile, o.manifest_dir + ": no manifest.json found");
    return found;
}

std::string curve_csv(const std::array<std::vector<double>, kSegmentCount>& curves)
{
    std::string text = kCurveHeader;
    const std::size_t frames = curves[0].size();
    for (std::size_t t = 0; t < frames; ++t) {
        text += std::to_string(t);
        for (const auto& c : curves) text += "," + io::format_number(c[t]);
        text += "\n";
    }
    return text;
}

// ---------------------------------------------------------------- extract

int cmd_extract(Options& o, std::ostream& out, std::ostream& err)
{
    const auto manifests = manifest_inputs(o);
    if (o.out.empty()) throw UsageError("--out is required");
    o.cfg.outputs = {o.out};
    const MotionOptions mo = motion_options(o.cfg);

    std::vector<MotionResult> results(manifests.size());
    std::vector<std::optional<int>> labels(manifests.size());
    parallel_for(manifests.size(), o.jobs, [&](std::size_t i) {
        try {
            const MaskSequence seq = io::load_sequence(manifests[i]);
            results[i] = motion_feature(seq, mo);
            labels[i] = seq.label;
        } catch (const Error& e) {
            throw Error(e.code(), manifests[i].string() + ": " + e.detail());
        }
    });

    io::FeatureTable table;
    json recordings = json::array();
    std::vector<std::size_t> order(results.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return results[a].feature.video_id < results[b].feature.video_id;
    });
    for (std::size_t i : order) {
        const auto& r = results[i];
        table.rows.push_back({r.feature.video_id, r.feature.values, labels[i]});
        recordings.push_back({{"video_id", r.feature.video_id},
                              {"raw_max", r.raw_max},
                              {"degenerate", r.feature.degenerate}});
        if (o.verbose) err << "extract " << r.feature.video_id << "\n";
    }
    table.validate();
    io::write_feature_table(table, o.out);
    if (!o.report.empty()) {
        o.cfg.outputs.push_back(o.report);
        json j;
        j["run_config"] = to_json(o.cfg);
        j["recordings"] = recordings;
        emit(o.report, dump(j), out);
    }
    return kExitOk;
}

// ---------------------------------------------------------------- curves

int cmd_curves(Options& o, std::ostream& out, std::ostream&)
{
    o.cfg.inputs = {o.manifest};
    o.cfg.outputs = {o.out.empty() ? "-" : o.out};
    const MaskSequence seq = io::load_sequence(existing_file(o.manifest));
    const MotionResult r = motion_feature(seq, motion_options(o.cfg));
    std::array<std::vector<double>, kSegmentCount> curves;
    for (std::size_t k = 0; k < kSegmentCount; ++k) curves[k] = r.curves[k].values;
    emit(o.out, curve_csv(curves), out);
    return kExitOk;
}

// ---------------------------------------------------------------- segmetrics

int cmd_segmetrics(Options& o, std::ostream& out, std::ostream& err)
{
    o.cfg.inputs = {o.pred_dir, o.gt_dir};
    o.cfg.outputs = {o.out.empty() ? "-" : o.out};
    const auto pred_paths = io::find_manifests(existing_dir(o.pred_dir));
    const auto gt_paths = io::find_manifests(existing_dir(o.gt_dir));
    if (pred_paths.empty()) throw Error(ErrorCode::MissingFile, o.pred_dir + ": no manifest.json found");

    // Pair recordings by video_id, not by path.
    std::map<std::string, fs::path> gt_by_id;
    for (const auto& p : gt_paths) {
        const MaskSequence s = io::load_sequence(p);
        if (!gt_by_id.emplace(s.video_id, p).second) {
            throw Error(ErrorCode::ValidationError, "duplicate ground-truth video_id '" + s.video_id + "'");
        }
    }

    std::vector<SegmentIouAccumulator> acc(pred_paths.size(), SegmentIouAccumulator(o.cfg.points));
    std::vector<std::string> ids(pred_paths.size());
    parallel_for(pred_paths.size(), o.jobs, [&](std::size_t i) {
        const MaskSequence pred = io::load_sequence(pred_paths[i]);
        ids[i] = pred.video_id;
        const auto it = gt_by_id.find(pred.video_id);
        if (it == gt_by_id.end()) {
            throw Error(ErrorCode::MissingFile, "no ground truth for video_id '" + pred.video_id + "'");
        }
        try {
            acc[i].add(pred, io::load_sequence(it->second));
        } catch (const Error& e) {
            throw Error(e.code(), pred.video_id + ": " + e.detail());
        }
    });

    SegmentIouAccumulator total(o.cfg.points);
    std::vector<std::size_t> order(ids.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ids[a] < ids[b]; });
    json per_video = json::array();
    for (std::size_t i : order) {
        total += acc[i];
        per_video.push_back({{"video_id", ids[i]}, {"segment_iou", acc[i].result(ids[i]).values}});
        if (o.verbose) err << "segmetrics " << ids[i] << "\n";
    }
    const std::string model = o.model.empty() ? fs::path(o.pred_dir).filename().string() : o.model;
    json j = metrics_to_json(total.result(model));
    j["run_config"] = to_json(o.cfg);
    j["recordings"] = per_video;
    emit(o.out, dump(j), out);
    return kExitOk;
}

// ---------------------------------------------------------------- ensemble

int cmd_ensemble(Options& o, std::ostream& out, std::ostream&)
{
    if (o.features.empty()) throw UsageError("--features needs at least one table");
    const bool weighted = o.cfg.ensemble_mode == "weighted";
    if (weighted && o.metrics.size() != o.features.size()) {
        throw UsageError("--mode weighted needs one --metrics file per --features table");
    }
    if (!weighted && !o.metrics.empty() && o.metrics.size() != o.features.size()) {
        throw UsageError("--metrics must match --features one to one");
    }
    if (o.out.empty()) throw UsageError("--out is required");
    o.cfg.inputs = o.features;
    o.cfg.inputs.insert(o.cfg.inputs.end(), o.metrics.begin(), o.metrics.end());
    o.cfg.outputs = {o.out};

    std::vector<io::FeatureTable> tables;
    for (const auto& f : o.features) tables.push_back(io::read_feature_table(existing_file(f)));
    std::vector<ModelMetrics> metrics;
    for (const auto& m : o.metrics) metrics.push_back(read_metrics_json(existing_file(m)));

    WeightMatrix w;
    if (weighted) {
        w = compute_weights(metrics);
    } else {
        SegmentVector uniform{};
        uniform.fill(1.0 / static_cast<double>(tables.size()));
        w.assign(tables.size(), uniform);
    }
    const io::FeatureTable fused = fuse_tables(tables, w, o.cfg.renorm);
    if (fused.rows.empty()) throw Error(ErrorCode::VideoIdMismatch, "the feature tables share no video_id");
    io::write_feature_table(fused, o.out);

    if (!o.weights_out.empty()) {
        o.cfg.outputs.push_back(o.weights_out);
        std::vector<ModelMetrics> named = metrics;
        if (named.empty()) {
            for (const auto& f : o.features) named.push_back({fs::path(f).stem().string(), {}});
        }
        json j;
        j["run_config"] = to_json(o.cfg);
        j["weights"] = weights_to_json(named, w);
        emit(o.weights_out, dump(j), out);
    }
    return kExitOk;
}

// ---------------------------------------------------------------- evaluate

int cmd_evaluate(Options& o, std::ostream& out, std::ostream&)
{
    o.cfg.inputs = {o.feature_file};
    if (!o.labels.empty()) o.cfg.inputs.push_back(o.labels);
    o.cfg.outputs = {o.report.empty() ? "-" : o.report};
    if (!o.predictions_out.empty()) o.cfg.outputs.push_back(o.predictions_out);

    const io::FeatureTable table = io::read_feature_table(existing_file(o.feature_file));
    std::map<std::string, int> label_of;
    if (!o.labels.empty()) {
        for (const auto& r : io::read_labels(existing_file(o.labels))) {
            if (!table.find(r.video_id)) {
                throw Error(ErrorCode::VideoIdMismatch,
                            o.labels + ": video_id '" + r.video_id + "' has no feature row");
            }
            if (!label_of.emplace(r.video_id, r.label).second) {
                throw Error(ErrorCode::ValidationError, o.labels + ": duplicate video_id '" + r.video_id + "'");
            }
        }
    }

    std::vector<LabeledSample> data;
    for (const auto& row : table.rows) {
        LabeledSample s{row.video_id, row.values, 0};
        if (const auto it = label_of.find(row.video_id); it != label_of.end()) {
            s.label = it->second;
        } else if (row.label) {
            s.label = *row.label;
        } else {
            throw Error(ErrorCode::ValidationError, "no label for video_id '" + row.video_id + "'");
        }
        data.push_back(std::move(s));
    }
    std::sort(data.begin(), data.end(),
              [](const LabeledSample& a, const LabeledSample& b) { return a.video_id < b.video_id; });

    const CvReport cv =
        cross_validate(data, parse_classifier(o.cfg.classifier), o.cfg.folds, o.cfg.seed, o.cfg.beta);

    json j;
    j["run_config"] = to_json(o.cfg);
    j["samples"] = data.size();
    json ids = json::array();
    for (const auto& s : data) ids.push_back(s.video_id);
    j["video_ids"] = ids;
    const json cv_json = to_json(cv);
    for (const auto& [k, v] : cv_json.items()) j[k] = v;
    emit(o.report, dump(j), out);

    if (!o.predictions_out.empty()) {
        std::vector<io::PredictionRow> rows;
        for (std::size_t i = 0; i < data.size(); ++i) {
            rows.push_back({data[i].video_id, data[i].label, cv.predictions[i]});
        }
        io::write_predictions(rows, o.predictions_out);
    }
    return kExitOk;
}

// ---------------------------------------------------------------- kappa

int cmd_kappa(Options& o, std::ostream& out, std::ostream&)
{
    if (o.prediction_files.size() < 2) throw UsageError("--predictions needs at least two files");
    if (o.samples < 0) throw UsageError("--samples must be >= 0");
    o.cfg.inputs = o.prediction_files;
    o.cfg.outputs = {o.out.empty() ? "-" : o.out};

    // Every set must cover the same recordings; they are aligned by video_id.
    std::vector<std::map<std::string, int>> sets;
    for (const auto& p : o.prediction_files) {
        std::map<std::string, int> m;
        for (const auto& r : io::read_predictions(existing_file(p))) {
            if (!m.emplace(r.video_id, r.predicted).second) {
                throw Error(ErrorCode::ValidationError, p + ": duplicate video_id '" + r.video_id + "'");
            }
        }
        sets.push_back(std::move(m));
    }
    for (std::size_t s = 1; s < sets.size(); ++s) {
        for (const auto& [id, v] : sets[0]) {
            if (!sets[s].count(id)) {
                throw Error(ErrorCode::VideoIdMismatch, o.prediction_files[s] + ": missing video_id '" + id + "'");
            }
        }
        if (sets[s].size() != sets[0].size()) {
            for (const auto& [id, v] : sets[s]) {
                if (!sets[0].count(id)) {
                    throw Error(ErrorCode::VideoIdMismatch,
                                o.prediction_files[0] + ": missing video_id '" + id + "'");
                }
            }
        }
    }
    std::vector<std::string> ids;
    for (const auto& [id, v] : sets[0]) ids.push_back(id);
    std::vector<std::vector<int>> lists;
    for (const auto& m : sets) {
        std::vector<int> v;
        for (const auto& id : ids) v.push_back(m.at(id));
        lists.push_back(std::move(v));
    }

    const std::size_t count = o.samples == 0 ? ids.size() : static_cast<std::size_t>(o.samples);
    const KappaProtocolResult r = kappa_protocol(lists, count, o.cfg.seed);

    json j;
    j["run_config"] = to_json(o.cfg);
    json sampled = json::array();
    for (std::size_t i : r.indices) sampled.push_back(ids[i]);
    j["sampled_video_ids"] = sampled;
    json pairs = json::array();
    for (const auto& p : r.pairs) {
        json e = to_json(p.result);
        e["a"] = o.prediction_files[p.first];
        e["b"] = o.prediction_files[p.second];
        pairs.push_back(e);
    }
    j["pairs"] = pairs;
    j["mean_kappa"] = r.mean ? json(*r.mean) : json(nullptr);
    emit(o.out, dump(j), out);
    return kExitOk;
}

// ---------------------------------------------------------------- synth

void write_recording(const SyntheticSequence& s, const fs::path& dir)
{
    io::save_sequence(s.sequence, dir);
    io::write_text(dir / "truth.csv", curve_csv(s.truth));
}

int cmd_synth(Options& o, std::ostream& out, std::ostream& err)
{
    if (o.out_dir.empty()) throw UsageError("--out-dir is required");
    if (o.corpus == !o.spec.empty()) throw UsageError("give exactly one of --spec or --corpus");
    o.cfg.outputs = {o.out_dir};
    const fs::path root(o.out_dir);

    if (!o.corpus) {
        o.cfg.inputs = {o.spec};
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(io::read_text(existing_file(o.spec)));
        } catch (const nlohmann::json::parse_error& e) {
            throw Error(ErrorCode::SchemaError, o.spec + ": " + e.what());
        }
        const SyntheticHeartSpec spec = spec_from_json(j);
        write_recording(generate(spec, o.cfg.seed), root);
        return kExitOk;
    }

    CorpusOptions co;
    co.mi = o.mi;
    co.normal = o.normal;
    co.seed = o.cfg.seed;
    co.frames = o.frames;
    auto entries = make_corpus(co);
    std::sort(entries.begin(), entries.end(),
              [](const CorpusEntry& a, const CorpusEntry& b) { return a.spec.video_id < b.spec.video_id; });
    parallel_for(entries.size(), o.jobs, [&](std::size_t i) {
        write_recording(generate(entries[i].spec, entries[i].seed), root / entries[i].spec.video_id);
    });

    std::vector<io::LabelRow> labels;
    json list = json::array();
    for (const auto& e : entries) {
        labels.push_back({e.spec.video_id, e.spec.label.value_or(0)});
        list.push_back({{"seed", e.seed}, {"spec", spec_to_json(e.spec)}});
        if (o.verbose) err << "synth " << e.spec.video_id << "\n";
    }
    io::write_labels(labels, root / "labels.csv");
    json j;
    j["run_config"] = to_json(o.cfg);
    j["mi"] = o.mi;
    j["normal"] = o.normal;
    j["frames"] = o.frames;
    j["recordings"] = list;
    io::write_text(root / "corpus.json", dump(j));
    (void)out;
    return kExitOk;
}

// ---------------------------------------------------------------- corrupt

int cmd_corrupt(Options& o, std::ostream&, std::ostream& err)
{
    const auto manifests = manifest_inputs(o);
    if (o.out_dir.empty()) throw UsageError("--out-dir is required");
    o.cfg.outputs = {o.out_dir};
    CorruptionSpec base;
    base.jitter_sigma = o.sigma;
    base.hole_rate = o.hole_rate;
    base.protrusion_rate = o.protrusion_rate;
    base.segments = o.segments;
    base.validate();

    const fs::path root(o.out_dir);
    const bool single = !o.manifest.empty();
    std::vector<std::string> ids(manifests.size());
    std::vector<std::vector<int>> fallbacks(manifests.size());
    parallel_for(manifests.size(), o.jobs, [&](std::size_t i) {
        const MaskSequence seq = io::load_sequence(manifests[i]);
        CorruptionSpec c = base;
        // Per-recording stream keyed by id, so subsets corrupt identically.
        c.seed = mix_seed(o.cfg.seed, fnv1a(seq.video_id));
        CorruptionResult r = corrupt(seq, c);
        ids[i] = seq.video_id;
        fallbacks[i] = r.fallback_frames;
        io::save_sequence(r.sequence, single ? root : root / seq.video_id);
    });

    std::vector<std::size_t> order(ids.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ids[a] < ids[b]; });
    json list = json::array();
    for (std::size_t i : order) {
        list.push_back({{"video_id", ids[i]}, {"fallback_frames", fallbacks[i]}});
        if (o.verbose) err << "corrupt " << ids[i] << "\n";
    }
    json j;
    j["run_config"] = to_json(o.cfg);
    j["jitter_sigma"] = o.sigma;
    j["hole_rate"] = o.hole_rate;
    j["protrusion_rate"] = o.protrusion_rate;
    j["segments"] = o.segments;
    j["recordings"] = list;
    io::write_text(root / "corrupt.json", dump(j));
    return kExitOk;
}

// ---------------------------------------------------------------- wiring

void add_common(CLI::App* s, Options& o)
{
    s->add_option("--jobs", o.jobs, "Worker threads (0 = all hardware threads)")->check(CLI::NonNegativeNumber);
    s->add_flag("--verbose", o.verbose, "One log line per recording on stderr");
}

void add_motion_flags(CLI::App* s, Options& o)
{
    s->add_option("--points", o.cfg.points, "Samples per segment")->check(CLI::Range(2, 10000));
    s->add_option("--norm", o.cfg.norm, "Feature normalization")->check(CLI::IsMember({"max", "anatomical"}));
    s->add_option("--partition", o.cfg.partition, "Segment partition of non-reference frames")
        ->check(CLI::IsMember({"tracked", "independent"}));
    s->add_flag("--mirror-segments", o.cfg.mirror_segments, "Number segments from the basal-right end instead");
}

}  // namespace

nlohmann::ordered_json to_json(const RunConfig& c)
{
    json j;
    j["subcommand"] = c.subcommand;
    j["inputs"] = c.inputs;
    j["outputs"] = c.outputs;
    j["points"] = c.points;
    j["folds"] = c.folds;
    j["seed"] = c.seed;
    j["classifier"] = c.classifier;
    j["ensemble_mode"] = c.ensemble_mode;
    j["norm"] = c.norm;
    j["partition"] = c.partition;
    j["beta"] = c.beta;
    j["mirror_segments"] = c.mirror_segments;
    j["renorm"] = c.renorm;
    return j;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    Options o;
    CLI::App app{"Regional wall-motion features and MI classification from LV wall masks", "lvmotion"};
    app.require_subcommand(1);

    auto* extract = app.add_subcommand("extract", "Motion feature CSV from mask sequences");
    extract->add_option("--manifest", o.manifest, "One recording's manifest.json");
    extract->add_option("--manifest-dir", o.manifest_dir, "Directory searched recursively for manifest.json");
    extract->add_option("--out", o.out, "Feature CSV to write")->required();
    extract->add_option("--report", o.report, "Optional JSON with raw maxima per recording");
    add_motion_flags(extract, o);
    add_common(extract, o);

    auto* curves = app.add_subcommand("curves", "Per-frame displacement curves of one recording as CSV");
    curves->add_option("--manifest", o.manifest, "Recording manifest.json")->required();
    curves->add_option("--out", o.out, "CSV to write (default stdout)");
    add_motion_flags(curves, o);

    auto* segm = app.add_subcommand("segmetrics", "Per-segment IoU of predicted masks against ground truth");
    segm->add_option("--pred-dir", o.pred_dir, "Predicted recordings")->required();
    segm->add_option("--gt-dir", o.gt_dir, "Ground-truth recordings")->required();
    segm->add_option("--model", o.model, "Model name (default: name of --pred-dir)");
    segm->add_option("--out", o.out, "Metrics JSON to write (default stdout)");
    segm->add_option("--points", o.cfg.points, "Boundary samples per segment for the label map")
        ->check(CLI::Range(2, 10000));
    add_common(segm, o);

    auto* ens = app.add_subcommand("ensemble", "Fuse feature tables of several segmentation models");
    ens->add_option("--features", o.features, "Feature CSVs, one per model")->required();
    ens->add_option("--metrics", o.metrics, "Metrics JSONs in the same order as --features");
    ens->add_option("--mode", o.cfg.ensemble_mode, "Fusion rule")->check(CLI::IsMember({"weighted", "average"}));
    ens->add_option("--out", o.out, "Fused feature CSV")->required();
    ens->add_option("--weights-out", o.weights_out, "Optional JSON with the weight matrix");
    ens->add_flag("--renorm", o.cfg.renorm, "Rescale each fused vector to unit maximum");

    auto* eval = app.add_subcommand("evaluate", "Stratified k-fold cross-validation of one classifier");
    eval->add_option("--features", o.feature_file, "Feature CSV")->required();
    eval->add_option("--labels", o.labels, "Labels CSV (default: the label column of --features)");
    eval->add_option("--classifier", o.cfg.classifier, "Classifier")
        ->check(CLI::IsMember({"svm", "lr", "dt", "knn"}));
    eval->add_option("--folds", o.cfg.folds, "Number of folds")->check(CLI::Range(2, 1000));
    eval->add_option("--seed", o.cfg.seed, "Fold assignment seed");
    eval->add_option("--beta", o.cfg.beta, "F-beta weight")->check(CLI::PositiveNumber);
    eval->add_option("--report", o.report, "Report JSON (default stdout)");
    eval->add_option("--predictions", o.predictions_out, "Optional held-out predictions CSV");

    auto* kap = app.add_subcommand("kappa", "Mean pairwise Cohen's kappa over prediction sets");
    kap->add_option("--predictions", o.prediction_files, "Predictions CSVs (at least two)")->required();
    kap->add_option("--samples", o.samples, "Recordings drawn at random (0 = all)");
    kap->add_option("--seed", o.cfg.seed, "Sampling seed");
    kap->add_option("--out", o.out, "Report JSON (default stdout)");

    auto* syn = app.add_subcommand("synth", "Synthetic phantom recordings");
    syn->add_option("--spec", o.spec, "Phantom spec JSON for a single recording");
    syn->add_flag("--corpus", o.corpus, "Generate a labelled MI / normal corpus instead");
    syn->add_option("--mi", o.mi, "MI recordings in the corpus")->check(CLI::NonNegativeNumber);
    syn->add_option("--normal", o.normal, "Normal recordings in the corpus")->check(CLI::NonNegativeNumber);
    syn->add_option("--frames", o.frames, "Frames per corpus recording")->check(CLI::Range(3, 1000));
    syn->add_option("--seed", o.cfg.seed, "Seed");
    syn->add_option("--out-dir", o.out_dir, "Output directory")->required();
    add_common(syn, o);

    auto* cor = app.add_subcommand("corrupt", "Degrade masks the way an imperfect segmentation model would");
    cor->add_option("--manifest", o.manifest, "One recording's manifest.json");
    cor->add_option("--manifest-dir", o.manifest_dir, "Directory searched recursively for manifest.json");
    cor->add_option("--out-dir", o.out_dir, "Output directory")->required();
    cor->add_option("--sigma", o.sigma, "Boundary jitter scale, pixels");
    cor->add_option("--hole-rate", o.hole_rate, "Hole rate in [0, 0.2]");
    cor->add_option("--protrusion-rate", o.protrusion_rate, "Protrusion rate in [0, 0.2]");
    cor->add_option("--segments", o.segments, "Restrict changes to these segment ids");
    cor->add_option("--seed", o.cfg.seed, "Seed");
    add_common(cor, o);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        CLI::App* sub = app.get_subcommands().front();
        o.cfg.subcommand = sub->get_name();
        if (sub == extract) return cmd_extract(o, out, err);
        if (sub == curves) return cmd_curves(o, out, err);
        if (sub == segm) return cmd_segmetrics(o, out, err);
        if (sub == ens) return cmd_ensemble(o, out, err);
        if (sub == eval) return cmd_evaluate(o, out, err);
        if (sub == kap) return cmd_kappa(o, out, err);
        if (sub == syn) return cmd_synth(o, out, err);
        if (sub == cor) return cmd_corrupt(o, out, err);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitDataError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitDataError;
    }
    return kExitUsage;
}

int run(int argc, const char* const* argv)
{
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, std::cout, std::cerr);
}

}  // namespace lvmotion::cli
