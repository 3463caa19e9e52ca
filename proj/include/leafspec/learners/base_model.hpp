#pragma once

// Tagged union over the seven learner families plus JSON persistence.
// Serialized form of one base model:
//   {"family": ..., "spec": ..., "params": ..., "train_fingerprint": ...}
// where params holds the fitted state. Round trips are exact: nlohmann
// serializes doubles with shortest round-trip precision.

#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "leafspec/core.hpp"
#include "leafspec/learners/boost.hpp"
#include "leafspec/learners/forest.hpp"
#include "leafspec/learners/knn.hpp"
#include "leafspec/learners/logreg.hpp"
#include "leafspec/learners/nb.hpp"
#include "leafspec/learners/spec.hpp"
#include "leafspec/learners/svm.hpp"
#include "leafspec/learners/tree.hpp"

namespace leafspec {

using ModelVariant = std::variant<DecisionTreeModel, RandomForestModel, BoostedTreesModel,
                                  GaussianNbModel, KnnModel, LogRegModel, SvmRbfModel>;

struct BaseModel {
    LearnerSpec spec;
    std::string train_fingerprint;
    ModelVariant model;

    std::string family() const { return spec.name(); }

    std::size_t n_features() const {
        return std::visit(
            [](const auto& m) -> std::size_t {
                if constexpr (requires { m.n_features(); })
                    return m.n_features();
                else
                    return m.n_features;
            },
            model);
    }

    double predict_one(const double* x) const {
        return std::visit([&](const auto& m) { return m.predict_one(x); }, model);
    }
};

inline BaseModel fit_base_model(const LearnerSpec& spec, const LabeledDataset& data,
                                int threads = 1) {
    BaseModel out;
    out.spec = spec;
    out.train_fingerprint = fingerprint_training_data(data);
    switch (spec.family) {
        case Family::decision_tree:
            out.model = fit_decision_tree_model(spec, data);
            break;
        case Family::random_forest:
            out.model = fit_random_forest_model(spec, data, threads);
            break;
        case Family::boosted_trees:
            out.model = fit_boosted_trees_model(spec, data);
            break;
        case Family::gaussian_nb:
            out.model = fit_gaussian_nb_model(spec, data);
            break;
        case Family::knn:
            out.model = fit_knn_model(spec, data);
            break;
        case Family::logreg:
            out.model = fit_logreg_model(spec, data);
            break;
        case Family::svm_rbf:
            out.model = fit_svm_rbf_model(spec, data);
            break;
    }
    return out;
}

inline std::vector<double> predict_proba(const BaseModel& m, const Matrix& x) {
    require(x.cols == m.n_features(), "dimension mismatch",
            m.family() + " expects " + std::to_string(m.n_features()) + " features, got " +
                std::to_string(x.cols));
    std::vector<double> p(x.rows);
    for (std::size_t r = 0; r < x.rows; ++r) p[r] = m.predict_one(x.row(r));
    return p;
}

namespace detail {

inline nlohmann::json matrix_to_json(const Matrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t r = 0; r < m.rows; ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t c = 0; c < m.cols; ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return nlohmann::json{{"cols", m.cols}, {"rows", rows}};
}

inline Matrix matrix_from_json(const nlohmann::json& j) {
    const std::size_t cols = j.at("cols").get<std::size_t>();
    const auto& rows = j.at("rows");
    Matrix m(rows.size(), cols);
    for (std::size_t r = 0; r < m.rows; ++r) {
        const auto& row = rows[r];
        require(row.size() == cols, "malformed model file", "ragged matrix row");
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = row[c].get<double>();
    }
    return m;
}

inline nlohmann::json tree_to_json(const TreeNode& n) {
    if (n.is_leaf()) return nlohmann::json{{"leaf_prob", n.leaf_prob}};
    return nlohmann::json{{"feature", n.feature},
                          {"threshold", n.threshold},
                          {"left", tree_to_json(*n.left)},
                          {"right", tree_to_json(*n.right)}};
}

inline std::unique_ptr<TreeNode> tree_from_json(const nlohmann::json& j) {
    auto n = std::make_unique<TreeNode>();
    if (j.contains("leaf_prob")) {
        n->leaf_prob = j.at("leaf_prob").get<double>();
        return n;
    }
    n->feature = j.at("feature").get<int>();
    n->threshold = j.at("threshold").get<double>();
    n->left = tree_from_json(j.at("left"));
    n->right = tree_from_json(j.at("right"));
    return n;
}

inline nlohmann::json reg_tree_to_json(const RegNode& n) {
    if (n.is_leaf()) return nlohmann::json{{"leaf_value", n.value}};
    return nlohmann::json{{"feature", n.feature},
                          {"threshold", n.threshold},
                          {"left", reg_tree_to_json(*n.left)},
                          {"right", reg_tree_to_json(*n.right)}};
}

inline std::unique_ptr<RegNode> reg_tree_from_json(const nlohmann::json& j) {
    auto n = std::make_unique<RegNode>();
    if (j.contains("leaf_value")) {
        n->value = j.at("leaf_value").get<double>();
        return n;
    }
    n->feature = j.at("feature").get<int>();
    n->threshold = j.at("threshold").get<double>();
    n->left = reg_tree_from_json(j.at("left"));
    n->right = reg_tree_from_json(j.at("right"));
    return n;
}

}  // namespace detail

inline nlohmann::json learner_spec_to_json(const LearnerSpec& s) {
    return nlohmann::json{{"family", s.name()},
                          {"seed", s.seed},
                          {"tree_max_depth", s.tree_max_depth},
                          {"tree_min_leaf", s.tree_min_leaf},
                          {"forest_n_trees", s.forest_n_trees},
                          {"forest_max_features", s.forest_max_features},
                          {"forest_bootstrap", s.forest_bootstrap},
                          {"boost_n_rounds", s.boost_n_rounds},
                          {"boost_learning_rate", s.boost_learning_rate},
                          {"boost_max_depth", s.boost_max_depth},
                          {"boost_l2_lambda", s.boost_l2_lambda},
                          {"svm_c", s.svm_c},
                          {"svm_gamma", s.svm_gamma},
                          {"svm_smo_tol", s.svm_smo_tol},
                          {"svm_max_passes", s.svm_max_passes},
                          {"nb_var_smoothing", s.nb_var_smoothing},
                          {"knn_k", s.knn_k},
                          {"logreg_l2", s.logreg_l2},
                          {"logreg_max_iter", s.logreg_max_iter},
                          {"logreg_tol", s.logreg_tol}};
}

inline LearnerSpec learner_spec_from_json(const nlohmann::json& j) {
    LearnerSpec s;
    s.family = family_from_name(j.at("family").get<std::string>());
    s.seed = j.at("seed").get<std::uint64_t>();
    s.tree_max_depth = j.at("tree_max_depth").get<int>();
    s.tree_min_leaf = j.at("tree_min_leaf").get<int>();
    s.forest_n_trees = j.at("forest_n_trees").get<int>();
    s.forest_max_features = j.at("forest_max_features").get<int>();
    s.forest_bootstrap = j.at("forest_bootstrap").get<bool>();
    s.boost_n_rounds = j.at("boost_n_rounds").get<int>();
    s.boost_learning_rate = j.at("boost_learning_rate").get<double>();
    s.boost_max_depth = j.at("boost_max_depth").get<int>();
    s.boost_l2_lambda = j.at("boost_l2_lambda").get<double>();
    s.svm_c = j.at("svm_c").get<double>();
    s.svm_gamma = j.at("svm_gamma").get<double>();
    s.svm_smo_tol = j.at("svm_smo_tol").get<double>();
    s.svm_max_passes = j.at("svm_max_passes").get<int>();
    s.nb_var_smoothing = j.at("nb_var_smoothing").get<double>();
    s.knn_k = j.at("knn_k").get<int>();
    s.logreg_l2 = j.at("logreg_l2").get<double>();
    s.logreg_max_iter = j.at("logreg_max_iter").get<int>();
    s.logreg_tol = j.at("logreg_tol").get<double>();
    s.validate();
    return s;
}

inline nlohmann::json base_model_to_json(const BaseModel& m) {
    nlohmann::json params;
    switch (m.spec.family) {
        case Family::decision_tree: {
            const auto& t = std::get<DecisionTreeModel>(m.model);
            params = {{"n_features", t.n_features}, {"tree", detail::tree_to_json(*t.root)}};
            break;
        }
        case Family::random_forest: {
            const auto& f = std::get<RandomForestModel>(m.model);
            nlohmann::json trees = nlohmann::json::array();
            for (const auto& t : f.trees) trees.push_back(detail::tree_to_json(*t));
            params = {{"n_features", f.n_features}, {"trees", std::move(trees)}};
            break;
        }
        case Family::boosted_trees: {
            const auto& bt = std::get<BoostedTreesModel>(m.model);
            nlohmann::json trees = nlohmann::json::array();
            for (const auto& t : bt.trees) trees.push_back(detail::reg_tree_to_json(*t));
            params = {{"f0", bt.f0},
                      {"learning_rate", bt.learning_rate},
                      {"n_features", bt.n_features},
                      {"trees", std::move(trees)}};
            break;
        }
        case Family::gaussian_nb: {
            const auto& nb = std::get<GaussianNbModel>(m.model);
            params = {{"log_prior0", nb.log_prior0}, {"log_prior1", nb.log_prior1},
                      {"mean0", nb.mean0},           {"var0", nb.var0},
                      {"mean1", nb.mean1},           {"var1", nb.var1}};
            break;
        }
        case Family::knn: {
            const auto& k = std::get<KnnModel>(m.model);
            params = {{"k", k.k}, {"x", detail::matrix_to_json(k.x)}, {"y", k.y}};
            break;
        }
        case Family::logreg: {
            const auto& lr = std::get<LogRegModel>(m.model);
            params = {{"converged", lr.converged},
                      {"intercept", lr.intercept},
                      {"weights", lr.weights}};
            break;
        }
        case Family::svm_rbf: {
            const auto& s = std::get<SvmRbfModel>(m.model);
            params = {{"alpha", s.alpha},
                      {"b", s.b},
                      {"convergence_warning", s.convergence_warning},
                      {"gamma", s.gamma},
                      {"platt_a", s.platt_a},
                      {"platt_b", s.platt_b},
                      {"support_vectors", detail::matrix_to_json(s.support_vectors)},
                      {"sv_labels", s.sv_labels_pm}};
            break;
        }
    }
    return nlohmann::json{{"family", m.family()},
                          {"spec", learner_spec_to_json(m.spec)},
                          {"params", std::move(params)},
                          {"train_fingerprint", m.train_fingerprint}};
}

inline BaseModel base_model_from_json(const nlohmann::json& j) {
    BaseModel m;
    m.spec = learner_spec_from_json(j.at("spec"));
    const Family family = family_from_name(j.at("family").get<std::string>());
    require(family == m.spec.family, "malformed model file",
            "family tag disagrees with spec.family");
    m.train_fingerprint = j.at("train_fingerprint").get<std::string>();
    const auto& p = j.at("params");
    switch (family) {
        case Family::decision_tree: {
            DecisionTreeModel t;
            t.n_features = p.at("n_features").get<std::size_t>();
            t.root = detail::tree_from_json(p.at("tree"));
            m.model = std::move(t);
            break;
        }
        case Family::random_forest: {
            RandomForestModel f;
            f.n_features = p.at("n_features").get<std::size_t>();
            for (const auto& t : p.at("trees")) f.trees.push_back(detail::tree_from_json(t));
            m.model = std::move(f);
            break;
        }
        case Family::boosted_trees: {
            BoostedTreesModel bt;
            bt.f0 = p.at("f0").get<double>();
            bt.learning_rate = p.at("learning_rate").get<double>();
            bt.n_features = p.at("n_features").get<std::size_t>();
            for (const auto& t : p.at("trees")) bt.trees.push_back(detail::reg_tree_from_json(t));
            m.model = std::move(bt);
            break;
        }
        case Family::gaussian_nb: {
            GaussianNbModel nb;
            nb.log_prior0 = p.at("log_prior0").get<double>();
            nb.log_prior1 = p.at("log_prior1").get<double>();
            nb.mean0 = p.at("mean0").get<std::vector<double>>();
            nb.var0 = p.at("var0").get<std::vector<double>>();
            nb.mean1 = p.at("mean1").get<std::vector<double>>();
            nb.var1 = p.at("var1").get<std::vector<double>>();
            m.model = std::move(nb);
            break;
        }
        case Family::knn: {
            KnnModel k;
            k.k = p.at("k").get<int>();
            k.x = detail::matrix_from_json(p.at("x"));
            k.y = p.at("y").get<std::vector<int>>();
            m.model = std::move(k);
            break;
        }
        case Family::logreg: {
            LogRegModel lr;
            lr.converged = p.at("converged").get<bool>();
            lr.intercept = p.at("intercept").get<double>();
            lr.weights = p.at("weights").get<std::vector<double>>();
            m.model = std::move(lr);
            break;
        }
        case Family::svm_rbf: {
            SvmRbfModel s;
            s.alpha = p.at("alpha").get<std::vector<double>>();
            s.b = p.at("b").get<double>();
            s.convergence_warning = p.at("convergence_warning").get<bool>();
            s.gamma = p.at("gamma").get<double>();
            s.platt_a = p.at("platt_a").get<double>();
            s.platt_b = p.at("platt_b").get<double>();
            s.support_vectors = detail::matrix_from_json(p.at("support_vectors"));
            s.sv_labels_pm = p.at("sv_labels").get<std::vector<int>>();
            m.model = std::move(s);
            break;
        }
    }
    return m;
}

}  // namespace leafspec
