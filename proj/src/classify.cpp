#include "lvmotion/classify.hpp"

#include <stdexcept>

#include "lvmotion/error.hpp"

namespace lvmotion {

std::string_view to_string(ClassifierKind kind) noexcept
{
    switch (kind) {
    case ClassifierKind::Svm: return "svm";
    case ClassifierKind::Lr: return "lr";
    case ClassifierKind::Dt: return "dt";
    case ClassifierKind::Knn: return "knn";
    }
    return "?";
}

ClassifierKind parse_classifier(std::string_view name)
{
    if (name == "svm") return ClassifierKind::Svm;
    if (name == "lr") return ClassifierKind::Lr;
    if (name == "dt") return ClassifierKind::Dt;
    if (name == "knn") return ClassifierKind::Knn;
    throw std::invalid_argument("unknown classifier '" + std::string(name) + "'");
}

bool ClassifierModel::hit_iteration_cap() const noexcept
{
    if (const auto* s = std::get_if<SvmModel>(&model)) return !s->converged;
    if (const auto* l = std::get_if<LogisticModel>(&model)) return !l->converged;
    return false;
}

ClassifierModel train(const std::vector<LabeledSample>& samples, ClassifierKind kind, const Hyperparams& hp)
{
    std::vector<Feature> x;
    std::vector<int> y;
    int positives = 0;
    for (const auto& s : samples) {
        x.push_back(s.feature);
        y.push_back(s.label ? 1 : 0);
        positives += s.label ? 1 : 0;
    }
    if (kind != ClassifierKind::Knn) {
        if (samples.size() < 2) {
            throw Error(ErrorCode::DegenerateData, "need at least 2 training samples");
        }
        if (positives == 0 || positives == static_cast<int>(samples.size())) {
            throw Error(ErrorCode::DegenerateData, "training data holds a single class");
        }
    } else if (samples.empty()) {
        throw Error(ErrorCode::DegenerateData, "no training samples");
    }

    ClassifierModel m;
    m.kind = kind;
    switch (kind) {
    case ClassifierKind::Svm: m.model = train_svm(x, y, hp); break;
    case ClassifierKind::Lr: m.model = train_logistic(x, y, hp); break;
    case ClassifierKind::Dt: m.model = train_tree(x, y); break;
    case ClassifierKind::Knn: m.model = train_knn(x, y, hp); break;
    }
    return m;
}

int predict(const ClassifierModel& model, const Feature& feature)
{
    return std::visit(
        [&](const auto& m) -> int {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, SvmModel> || std::is_same_v<T, LogisticModel>) {
                return m.decision(feature) > 0.0 ? 1 : 0;
            } else {
                return m.predict(feature);
            }
        },
        model.model);
}

CvReport cross_validate(const std::vector<LabeledSample>& data, ClassifierKind kind, int k, std::uint64_t seed,
                        double beta, const Hyperparams& hp)
{
    std::vector<int> labels;
    for (const auto& s : data) labels.push_back(s.label ? 1 : 0);
    CvReport r;
    r.split = stratified_kfold(labels, k, seed);
    r.predictions.assign(data.size(), 0);
    std::vector<MetricBundle> fold_bundles;
    for (std::size_t f = 0; f < r.split.folds.size(); ++f) {
        std::vector<char> held(data.size(), 0);
        for (std::size_t i : r.split.folds[f]) held[i] = 1;
        std::vector<LabeledSample> train_set;
        for (std::size_t i = 0; i < data.size(); ++i) {
            if (!held[i]) train_set.push_back(data[i]);
        }
        ClassifierModel model;
        try {
            model = train(train_set, kind, hp);
        } catch (const Error& e) {
            throw Error(e.code(), "fold " + std::to_string(f) + ": " + e.what());
        }
        FoldReport fr;
        fr.hit_iteration_cap = model.hit_iteration_cap();
        std::vector<int> truth;
        std::vector<int> pred;
        for (std::size_t i : r.split.folds[f]) {
            const int p = predict(model, data[i].feature);
            r.predictions[i] = p;
            truth.push_back(labels[i]);
            pred.push_back(p);
        }
        fr.confusion = confusion(truth, pred);
        fr.metrics = summarize(fr.confusion, beta);
        fold_bundles.push_back(fr.metrics);
        r.pooled_confusion += fr.confusion;
        r.folds.push_back(fr);
    }
    r.pooled = summarize(r.pooled_confusion, beta);
    r.macro = macro_average(fold_bundles);
    return r;
}

nlohmann::ordered_json to_json(const CvReport& r)
{
    nlohmann::ordered_json j;
    j["pooled"] = {{"confusion", to_json(r.pooled_confusion)}, {"metrics", to_json(r.pooled)}};
    j["macro"] = to_json(r.macro);
    j["folds"] = nlohmann::ordered_json::array();
    for (std::size_t f = 0; f < r.folds.size(); ++f) {
        nlohmann::ordered_json fj;
        fj["fold"] = f;
        fj["size"] = r.split.folds[f].size();
        fj["confusion"] = to_json(r.folds[f].confusion);
        fj["metrics"] = to_json(r.folds[f].metrics);
        fj["hit_iteration_cap"] = r.folds[f].hit_iteration_cap;
        j["folds"].push_back(fj);
    }
    return j;
}

}  // namespace lvmotion
