#pragma once

// CART-style binary classification tree: Gini impurity, exhaustive search
// over midpoints of sorted unique feature values. Rows with x[feature] <
// threshold go left. A node splits whenever any candidate satisfies the
// min_leaf constraint (zero-gain splits are legal, so XOR-style data is
// separable); recursion stops on purity, the depth cap, insufficient rows,
// or no candidate. Candidates are scanned feature-ascending then
// threshold-ascending and only strict improvements replace the incumbent,
// so equal-gain ties resolve to the lowest feature index, then the lowest
// threshold. Impurity terms are computed from class counts via products,
// making scores exactly invariant under label swap.

#include <algorithm>
#include <memory>
#include <vector>

#include "leafspec/core.hpp"
#include "leafspec/learners/spec.hpp"

namespace leafspec {

struct TreeNode {
    int feature = -1;          // -1 marks a leaf
    double threshold = 0.0;
    double leaf_prob = 0.0;    // P(label = 1) at a leaf
    std::unique_ptr<TreeNode> left, right;

    bool is_leaf() const { return feature < 0; }
};

struct DecisionTreeModel {
    std::unique_ptr<TreeNode> root;
    std::size_t n_features = 0;

    double predict_one(const double* x) const {
        const TreeNode* n = root.get();
        while (!n->is_leaf()) n = (x[n->feature] < n->threshold) ? n->left.get() : n->right.get();
        return n->leaf_prob;
    }
};

namespace detail {

struct SplitChoice {
    bool found = false;
    int feature = -1;
    double threshold = 0.0;
    // Gini improvement times n/2; comparisons only, scale is irrelevant.
    double score = 0.0;
};

// Best split over the given features for the rows in `idx`.
inline SplitChoice best_split(const Matrix& x, const std::vector<int>& y,
                              const std::vector<std::size_t>& idx,
                              const std::vector<int>& features, int min_leaf) {
    SplitChoice best;
    const auto n = static_cast<double>(idx.size());
    double pos_total = 0.0;
    for (std::size_t r : idx) pos_total += y[r];
    const double parent = pos_total * (n - pos_total) / n;

    std::vector<std::size_t> order;
    for (int f : features) {
        const auto fc = static_cast<std::size_t>(f);
        order = idx;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (x(a, fc) != x(b, fc)) return x(a, fc) < x(b, fc);
            return a < b;
        });

        double pos_left = 0.0;
        for (std::size_t i = 0; i + 1 < order.size(); ++i) {
            pos_left += y[order[i]];
            const double v0 = x(order[i], fc);
            const double v1 = x(order[i + 1], fc);
            if (v0 == v1) continue;
            const auto nl = static_cast<double>(i + 1);
            const double nr = n - nl;
            if (nl < min_leaf || nr < min_leaf) continue;
            const double t = (v0 + v1) / 2.0;
            if (!(t > v0) || !(t <= v1)) continue;  // adjacent doubles: midpoint degenerate
            const double pos_right = pos_total - pos_left;
            const double score = parent - pos_left * (nl - pos_left) / nl -
                                 pos_right * (nr - pos_right) / nr;
            if (!best.found || score > best.score) {
                best.found = true;
                best.feature = f;
                best.threshold = t;
                best.score = score;
            }
        }
    }
    return best;
}

// FeaturePicker: full feature set for plain trees; a fresh random subset per
// split for forests.
template <typename FeaturePicker>
std::unique_ptr<TreeNode> grow(const Matrix& x, const std::vector<int>& y,
                               const std::vector<std::size_t>& idx, int depth, int max_depth,
                               int min_leaf, FeaturePicker&& pick) {
    auto node = std::make_unique<TreeNode>();
    double pos = 0.0;
    for (std::size_t r : idx) pos += y[r];
    node->leaf_prob = idx.empty() ? 0.0 : pos / static_cast<double>(idx.size());

    if (depth >= max_depth || idx.size() < 2 * static_cast<std::size_t>(min_leaf) ||
        pos == 0.0 || pos == static_cast<double>(idx.size()))
        return node;

    const SplitChoice split = best_split(x, y, idx, pick(), min_leaf);
    if (!split.found) return node;

    std::vector<std::size_t> left, right;
    for (std::size_t r : idx) {
        if (x(r, static_cast<std::size_t>(split.feature)) < split.threshold)
            left.push_back(r);
        else
            right.push_back(r);
    }
    node->feature = split.feature;
    node->threshold = split.threshold;
    node->left = grow(x, y, left, depth + 1, max_depth, min_leaf, pick);
    node->right = grow(x, y, right, depth + 1, max_depth, min_leaf, pick);
    return node;
}

}  // namespace detail

// Single-class data is legal here and yields a depth-0 leaf at probability
// 0 or 1.
inline DecisionTreeModel fit_decision_tree_model(const LearnerSpec& spec, const LabeledDataset& data) {
    spec.validate();
    data.validate(/*require_both_classes=*/false);
    std::vector<int> all_features(data.d());
    for (std::size_t f = 0; f < data.d(); ++f) all_features[f] = static_cast<int>(f);
    std::vector<std::size_t> idx(data.n());
    for (std::size_t i = 0; i < data.n(); ++i) idx[i] = i;

    DecisionTreeModel model;
    model.n_features = data.d();
    model.root = detail::grow(data.x, data.y, idx, 0, spec.tree_max_depth, spec.tree_min_leaf,
                              [&]() -> const std::vector<int>& { return all_features; });
    return model;
}

}  // namespace leafspec
