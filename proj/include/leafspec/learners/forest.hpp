#pragma once

// Random forest: n_trees CART trees on bootstrap resamples with a fresh
// random feature subset at every split. Per-tree seeds derive from the
// spec seed, so tree t is identical no matter which thread grows it.

#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

#include "leafspec/core.hpp"
#include "leafspec/learners/tree.hpp"

namespace leafspec {

struct RandomForestModel {
    std::vector<std::unique_ptr<TreeNode>> trees;
    std::size_t n_features = 0;

    double predict_one(const double* x) const {
        double acc = 0.0;
        for (const auto& t : trees) {
            const TreeNode* n = t.get();
            while (!n->is_leaf()) n = (x[n->feature] < n->threshold) ? n->left.get() : n->right.get();
            acc += n->leaf_prob;
        }
        return acc / static_cast<double>(trees.size());
    }
};

inline RandomForestModel fit_random_forest_model(const LearnerSpec& spec, const LabeledDataset& data,
                                                 unsigned threads = 1) {
    spec.validate();
    data.validate(/*require_both_classes=*/false);
    const std::size_t d = data.d();
    const std::size_t mtry =
        spec.forest_max_features > 0
            ? std::min<std::size_t>(static_cast<std::size_t>(spec.forest_max_features), d)
            : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(d))));

    RandomForestModel model;
    model.n_features = d;
    model.trees.resize(static_cast<std::size_t>(spec.forest_n_trees));

    parallel_for(model.trees.size(), threads, [&](std::size_t t) {
        Rng rng(derive_seed(spec.seed, t));

        std::vector<std::size_t> rows(data.n());
        if (spec.forest_bootstrap) {
            for (auto& r : rows) r = static_cast<std::size_t>(rng.below(data.n()));
        } else {
            for (std::size_t i = 0; i < data.n(); ++i) rows[i] = i;
        }

        std::vector<int> subset;
        auto pick = [&]() -> const std::vector<int>& {
            const auto chosen = rng.choose(d, mtry);
            subset.assign(chosen.begin(), chosen.end());
            std::sort(subset.begin(), subset.end());
            return subset;
        };
        model.trees[t] =
            detail::grow(data.x, data.y, rows, 0, spec.tree_max_depth, spec.tree_min_leaf, pick);
    });
    return model;
}

}  // namespace leafspec
