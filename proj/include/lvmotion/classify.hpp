#pragma once

// Four small classifiers over 6-dim motion features and stratified k-fold
// cross-validation. Label 1 is the positive (MI) class; every decision tie
// resolves to 0.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "lvmotion/metrics.hpp"
#include "lvmotion/types.hpp"

namespace lvmotion {

using Feature = SegmentVector;

struct LabeledSample {
    std::string video_id;
    Feature feature{};
    int label = 0;
};

struct FoldSplit {
    std::vector<std::vector<std::size_t>> folds;
};

/// Within each class (0 first, then 1) indices are shuffled by the seeded
/// generator and dealt round-robin; the dealing cursor carries over from one
/// class to the next. Throws Error(BadK).
FoldSplit stratified_kfold(const std::vector<int>& labels, int k, std::uint64_t seed);

/// Per-dimension z-scoring fit on training data only. Constant dimensions
/// get unit scale.
struct Standardizer {
    Feature mean{};
    Feature scale{};

    static Standardizer fit(const std::vector<Feature>& x);
    [[nodiscard]] Feature apply(const Feature& f) const noexcept;
    [[nodiscard]] std::vector<Feature> apply(const std::vector<Feature>& x) const;
};

enum class ClassifierKind { Svm, Lr, Dt, Knn };

[[nodiscard]] std::string_view to_string(ClassifierKind kind) noexcept;
/// Accepts "svm", "lr", "dt", "knn"; throws std::invalid_argument.
ClassifierKind parse_classifier(std::string_view name);

struct Hyperparams {
    // SVM
    double svm_c = 1.0;
    double svm_tolerance = 1e-3;
    int svm_max_iter = 10000;
    // LR
    double lr_lambda = 1.0;
    double lr_gradient_tolerance = 1e-4;
    int lr_max_iter = 100;
    // KNN
    int knn_k = 5;
};

struct SvmModel {
    Standardizer standardizer;
    double gamma = 0.0;
    double rho = 0.0;  // decision = sum coef_i K(sv_i, x) - rho
    std::vector<Feature> support_vectors;  // standardized
    std::vector<double> coef;              // alpha_i * y_i
    // Full dual solution, kept for diagnostics.
    std::vector<double> alpha;
    std::vector<Feature> train_x;  // standardized
    std::vector<int> train_y;      // +1 / -1
    int iterations = 0;
    bool converged = true;

    [[nodiscard]] double decision(const Feature& raw) const;
    [[nodiscard]] double kernel(const Feature& a, const Feature& b) const noexcept;
};

struct LogisticModel {
    Standardizer standardizer;
    Feature w{};
    double b = 0.0;
    int iterations = 0;
    bool converged = true;

    [[nodiscard]] double decision(const Feature& raw) const noexcept;
};

/// 0.5 * lambda * |w|^2 + sum_i log(1 + exp(z_i)) - y_i z_i, z_i = w.x_i + b.
double logistic_objective(const std::vector<Feature>& x, const std::vector<int>& y, const Feature& w, double b,
                          double lambda);
/// Gradient of logistic_objective; entries 0..5 for w, 6 for b.
std::array<double, 7> logistic_gradient(const std::vector<Feature>& x, const std::vector<int>& y,
                                        const Feature& w, double b, double lambda);

struct TreeNode {
    int feature = -1;  // -1 for leaves
    double threshold = 0.0;
    int left = -1;  // x[feature] <= threshold
    int right = -1;
    std::array<int, 2> counts{};
    int label = 0;
};

struct TreeModel {
    std::vector<TreeNode> nodes;  // nodes[0] is the root

    [[nodiscard]] int predict(const Feature& raw) const noexcept;
};

struct KnnModel {
    Standardizer standardizer;
    int k = 5;
    std::size_t rows = 0;
    std::vector<double> columns;  // 6 x rows, column-major, standardized
    std::vector<int> labels;

    [[nodiscard]] int predict(const Feature& raw) const;
};

SvmModel train_svm(const std::vector<Feature>& x, const std::vector<int>& y, const Hyperparams& hp = {});
LogisticModel train_logistic(const std::vector<Feature>& x, const std::vector<int>& y, const Hyperparams& hp = {});
TreeModel train_tree(const std::vector<Feature>& x, const std::vector<int>& y);
KnnModel train_knn(const std::vector<Feature>& x, const std::vector<int>& y, const Hyperparams& hp = {});

struct ClassifierModel {
    ClassifierKind kind = ClassifierKind::Lr;
    std::variant<SvmModel, LogisticModel, TreeModel, KnnModel> model;

    /// Solver stopped at its iteration cap.
    [[nodiscard]] bool hit_iteration_cap() const noexcept;
};

/// Throws Error(DegenerateData) for fewer than 2 samples or a single class
/// (except KNN).
ClassifierModel train(const std::vector<LabeledSample>& samples, ClassifierKind kind, const Hyperparams& hp = {});
int predict(const ClassifierModel& model, const Feature& feature);

struct FoldReport {
    ConfusionMatrix confusion;
    MetricBundle metrics;
    bool hit_iteration_cap = false;
};

struct CvReport {
    ConfusionMatrix pooled_confusion;
    MetricBundle pooled;
    MetricBundle macro;
    std::vector<FoldReport> folds;
    /// Held-out prediction per sample, in input order.
    std::vector<int> predictions;
    FoldSplit split;
};

/// Errors from training carry the fold index in their message.
CvReport cross_validate(const std::vector<LabeledSample>& data, ClassifierKind kind, int k, std::uint64_t seed,
                        double beta = 1.0, const Hyperparams& hp = {});

nlohmann::ordered_json to_json(const CvReport& r);

}  // namespace lvmotion
