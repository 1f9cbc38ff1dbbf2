#include "lvmotion/classify.hpp"
#include "lvmotion/error.hpp"
#include "lvmotion/random.hpp"

namespace lvmotion {

FoldSplit stratified_kfold(const std::vector<int>& labels, int k, std::uint64_t seed)
{
    if (k < 2 || static_cast<std::size_t>(k) > labels.size()) {
        throw Error(ErrorCode::BadK, "k = " + std::to_string(k) + " for " + std::to_string(labels.size()) +
                                         " samples (need 2 <= k <= n)");
    }
    FoldSplit split;
    split.folds.resize(static_cast<std::size_t>(k));
    Rng rng(seed);
    std::size_t cursor = 0;
    for (int cls = 0; cls <= 1; ++cls) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if ((labels[i] != 0 ? 1 : 0) == cls) members.push_back(i);
        }
        rng.shuffle(members);
        for (std::size_t i : members) {
            split.folds[cursor].push_back(i);
            cursor = (cursor + 1) % split.folds.size();
        }
    }
    return split;
}

}  // namespace lvmotion
