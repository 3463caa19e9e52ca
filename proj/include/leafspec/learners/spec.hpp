#pragma once

// Uniform learner contract: a LearnerSpec names one of the seven base
// families plus its hyperparameters and seed; fitting consumes a
// LabeledDataset and yields a model exposing probability prediction.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "leafspec/core.hpp"

namespace leafspec {

enum class Family {
    boosted_trees,
    decision_tree,
    gaussian_nb,
    knn,
    logreg,
    random_forest,
    svm_rbf,
};

inline const char* family_name(Family f) {
    switch (f) {
        case Family::boosted_trees: return "boosted_trees";
        case Family::decision_tree: return "decision_tree";
        case Family::gaussian_nb: return "gaussian_nb";
        case Family::knn: return "knn";
        case Family::logreg: return "logreg";
        case Family::random_forest: return "random_forest";
        case Family::svm_rbf: return "svm_rbf";
    }
    fail("learner", "unknown family tag");
}

inline Family family_from_name(const std::string& s) {
    if (s == "boosted_trees") return Family::boosted_trees;
    if (s == "decision_tree") return Family::decision_tree;
    if (s == "gaussian_nb") return Family::gaussian_nb;
    if (s == "knn") return Family::knn;
    if (s == "logreg") return Family::logreg;
    if (s == "random_forest") return Family::random_forest;
    if (s == "svm_rbf") return Family::svm_rbf;
    fail("learner", "unknown family name '" + s + "'");
}

struct LearnerSpec {
    Family family = Family::decision_tree;
    std::uint64_t seed = 0;

    // decision_tree (shared by forest members)
    int tree_max_depth = 8;
    int tree_min_leaf = 2;

    // random_forest
    int forest_n_trees = 200;
    int forest_max_features = 0;  // 0 means ceil(sqrt(d))
    bool forest_bootstrap = true;

    // boosted_trees
    int boost_n_rounds = 100;
    double boost_learning_rate = 0.1;
    int boost_max_depth = 3;
    double boost_l2_lambda = 1.0;

    // svm_rbf
    double svm_c = 1.0;
    double svm_gamma = 0.0;  // 0 means 1/d
    double svm_smo_tol = 1e-3;
    int svm_max_passes = 5;  // consecutive no-change full passes to stop

    // gaussian_nb
    double nb_var_smoothing = 1e-9;  // multiplied by the max feature variance

    // knn
    int knn_k = 5;

    // logreg
    double logreg_l2 = 1e-4;
    int logreg_max_iter = 50;
    double logreg_tol = 1e-8;

    std::string name() const { return family_name(family); }

    void validate() const {
        require(tree_max_depth >= 0 && tree_min_leaf >= 1, "learner", "bad tree parameters");
        require(forest_n_trees >= 1 && forest_max_features >= 0, "learner", "bad forest parameters");
        require(boost_n_rounds >= 0 && boost_learning_rate > 0 && boost_max_depth >= 1 &&
                    boost_l2_lambda >= 0,
                "learner", "bad boosting parameters");
        require(svm_c > 0 && svm_gamma >= 0 && svm_smo_tol > 0 && svm_max_passes >= 1,
                "learner", "bad svm parameters");
        require(nb_var_smoothing >= 0, "learner", "bad var_smoothing");
        require(knn_k >= 1, "learner", "bad k");
        require(logreg_l2 >= 0 && logreg_max_iter >= 1 && logreg_tol > 0, "learner",
                "bad logreg parameters");
    }
};

inline std::vector<LearnerSpec> default_pool(std::uint64_t seed) {
    const Family fams[] = {Family::boosted_trees, Family::decision_tree, Family::gaussian_nb,
                           Family::knn,           Family::logreg,        Family::random_forest,
                           Family::svm_rbf};
    std::vector<LearnerSpec> pool;
    for (std::size_t i = 0; i < std::size(fams); ++i) {
        LearnerSpec s;
        s.family = fams[i];
        s.seed = derive_seed(seed, i);
        pool.push_back(s);
    }
    return pool;
}

struct LabeledDataset {
    Matrix x;
    std::vector<int> y;  // 0 / 1

    std::size_t n() const { return x.rows; }
    std::size_t d() const { return x.cols; }

    void validate(bool require_both_classes = true) const {
        require(x.rows == y.size(), "learner", "feature/label row mismatch");
        require(x.rows >= 2, "learner", "need at least 2 samples");
        require(x.all_finite(), "learner", "non-finite feature value");
        bool has0 = false, has1 = false;
        for (int v : y) {
            require(v == 0 || v == 1, "learner", "labels must be 0/1");
            (v == 1 ? has1 : has0) = true;
        }
        if (require_both_classes)
            require(has0 && has1, "learner", "both classes required for fitting");
    }
};

inline double sigmoid(double z) {
    if (z >= 0) {
        const double e = std::exp(-z);
        return 1.0 / (1.0 + e);
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

inline std::string fingerprint_training_data(const LabeledDataset& data) {
    Fnv1a h;
    h.add(static_cast<std::uint64_t>(data.x.rows));
    h.add(static_cast<std::uint64_t>(data.x.cols));
    for (double v : data.x.data) h.add(v);
    for (int v : data.y) h.add(v);
    return h.hex();
}

}  // namespace leafspec
