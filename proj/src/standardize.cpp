#include <cmath>

#include "lvmotion/classify.hpp"

namespace lvmotion {

Standardizer Standardizer::fit(const std::vector<Feature>& x)
{
    Standardizer s;
    s.scale.fill(1.0);
    if (x.empty()) return s;
    const auto n = static_cast<double>(x.size());
    for (const auto& f : x) {
        for (std::size_t j = 0; j < f.size(); ++j) s.mean[j] += f[j];
    }
    for (double& m : s.mean) m /= n;
    Feature var{};
    for (const auto& f : x) {
        for (std::size_t j = 0; j < f.size(); ++j) {
            const double d = f[j] - s.mean[j];
            var[j] += d * d;
        }
    }
    for (std::size_t j = 0; j < var.size(); ++j) {
        const double sd = std::sqrt(var[j] / n);
        s.scale[j] = sd > 1e-12 ? sd : 1.0;
    }
    return s;
}

Feature Standardizer::apply(const Feature& f) const noexcept
{
    Feature out{};
    for (std::size_t j = 0; j < f.size(); ++j) out[j] = (f[j] - mean[j]) / scale[j];
    return out;
}

std::vector<Feature> Standardizer::apply(const std::vector<Feature>& x) const
{
    std::vector<Feature> out;
    out.reserve(x.size());
    for (const auto& f : x) out.push_back(apply(f));
    return out;
}

}  // namespace lvmotion
