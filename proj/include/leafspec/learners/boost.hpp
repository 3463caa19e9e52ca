#pragma once

// Newton boosting on log-odds with depth-capped regression trees. Each
// round fits a tree to the logistic-loss gradients g_i = p_i - y_i and
// hessians h_i = p_i (1 - p_i); a leaf's value is -sum(g) / (sum(h) +
// l2_lambda). Splits maximize the usual second-order gain with the same L2
// term in every denominator; ties resolve to lowest feature then lowest
// threshold via ascending scan with strict improvement.

#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

#include "leafspec/core.hpp"
#include "leafspec/learners/spec.hpp"

namespace leafspec {

struct RegNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    double value = 0.0;
    std::unique_ptr<RegNode> left, right;

    bool is_leaf() const { return feature < 0; }

    double eval(const double* x) const {
        const RegNode* n = this;
        while (!n->is_leaf()) n = (x[n->feature] < n->threshold) ? n->left.get() : n->right.get();
        return n->value;
    }
};

struct BoostedTreesModel {
    double f0 = 0.0;
    double learning_rate = 0.1;
    std::vector<std::unique_ptr<RegNode>> trees;
    std::size_t n_features = 0;

    double decision_one(const double* x) const {
        double f = f0;
        for (const auto& t : trees) f += learning_rate * t->eval(x);
        return f;
    }
    double predict_one(const double* x) const { return sigmoid(decision_one(x)); }
};

namespace detail {

constexpr double kBoostMinGain = 1e-12;

struct GradSplit {
    bool found = false;
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

inline GradSplit best_newton_split(const Matrix& x, const std::vector<double>& g,
                                   const std::vector<double>& h,
                                   const std::vector<std::size_t>& idx, double lambda) {
    GradSplit best;
    double gt = 0.0, ht = 0.0;
    for (std::size_t r : idx) {
        gt += g[r];
        ht += h[r];
    }
    const double parent = gt * gt / (ht + lambda);

    std::vector<std::size_t> order;
    for (std::size_t f = 0; f < x.cols; ++f) {
        order = idx;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (x(a, f) != x(b, f)) return x(a, f) < x(b, f);
            return a < b;
        });
        double gl = 0.0, hl = 0.0;
        for (std::size_t i = 0; i + 1 < order.size(); ++i) {
            gl += g[order[i]];
            hl += h[order[i]];
            const double v0 = x(order[i], f);
            const double v1 = x(order[i + 1], f);
            if (v0 == v1) continue;
            const double t = (v0 + v1) / 2.0;
            if (!(t > v0) || !(t <= v1)) continue;
            const double gr = gt - gl, hr = ht - hl;
            const double gain = gl * gl / (hl + lambda) + gr * gr / (hr + lambda) - parent;
            if (gain > kBoostMinGain && (!best.found || gain > best.gain)) {
                best.found = true;
                best.feature = static_cast<int>(f);
                best.threshold = t;
                best.gain = gain;
            }
        }
    }
    return best;
}

inline std::unique_ptr<RegNode> grow_newton(const Matrix& x, const std::vector<double>& g,
                                            const std::vector<double>& h,
                                            const std::vector<std::size_t>& idx, int depth,
                                            int max_depth, double lambda) {
    auto node = std::make_unique<RegNode>();
    double gt = 0.0, ht = 0.0;
    for (std::size_t r : idx) {
        gt += g[r];
        ht += h[r];
    }
    node->value = -gt / (ht + lambda);

    if (depth >= max_depth || idx.size() < 2) return node;
    const GradSplit split = best_newton_split(x, g, h, idx, lambda);
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
    node->left = grow_newton(x, g, h, left, depth + 1, max_depth, lambda);
    node->right = grow_newton(x, g, h, right, depth + 1, max_depth, lambda);
    return node;
}

}  // namespace detail

inline BoostedTreesModel fit_boosted_trees_model(const LearnerSpec& spec, const LabeledDataset& data) {
    spec.validate();
    data.validate(/*require_both_classes=*/false);
    double pos = 0.0;
    for (int v : data.y) pos += v;
    const double prior = pos / static_cast<double>(data.n());
    require(prior > 0.0 && prior < 1.0, "learner", "degenerate prior: single-class boosting data");

    BoostedTreesModel model;
    model.f0 = std::log(prior / (1.0 - prior));
    model.learning_rate = spec.boost_learning_rate;
    model.n_features = data.d();

    std::vector<double> f(data.n(), model.f0);
    std::vector<double> g(data.n()), h(data.n());
    std::vector<std::size_t> idx(data.n());
    for (std::size_t i = 0; i < data.n(); ++i) idx[i] = i;

    for (int round = 0; round < spec.boost_n_rounds; ++round) {
        for (std::size_t i = 0; i < data.n(); ++i) {
            const double p = sigmoid(f[i]);
            g[i] = p - static_cast<double>(data.y[i]);
            h[i] = p * (1.0 - p);
        }
        auto tree = detail::grow_newton(data.x, g, h, idx, 0, spec.boost_max_depth,
                                        spec.boost_l2_lambda);
        for (std::size_t i = 0; i < data.n(); ++i)
            f[i] += spec.boost_learning_rate * tree->eval(data.x.row(i));
        model.trees.push_back(std::move(tree));
    }
    return model;
}

}  // namespace leafspec
