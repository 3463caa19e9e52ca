#pragma once

// Run configuration: one JSON file merging the preprocessing, GDD, synthetic
// generator, learner-default, and ensemble settings plus seed/threads/paths.
// Every section is optional and falls back to defaults; unknown keys are
// rejected by name so typos cannot silently revert a setting to its default.

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "leafspec/core.hpp"
#include "leafspec/ensemble/select.hpp"
#include "leafspec/ensemble/split.hpp"
#include "leafspec/learners/spec.hpp"
#include "leafspec/phenology.hpp"
#include "leafspec/spectral_types.hpp"
#include "leafspec/synthgen.hpp"

namespace leafspec {

struct EnsembleConfig {
    int k_folds = 5;
    SplitRatios ratios;
    SelectionConfig selection;

    void validate() const {
        require(k_folds >= 2, "config", "k_folds must be at least 2");
        ratios.validate();
        selection.validate();
    }
};

namespace detail {

// Tracks which keys a section consumed and rejects the rest by name.
class StrictObject {
  public:
    StrictObject(const nlohmann::json& j, std::string section)
        : j_(j), section_(std::move(section)) {
        require(j.is_object(), "config",
                "section '" + section_ + "' must be a JSON object");
    }

    template <typename T>
    void get(const char* key, T& out) {
        known_.insert(key);
        if (j_.contains(key)) out = j_.at(key).get<T>();
    }

    bool take(const char* key, nlohmann::json& out) {
        known_.insert(key);
        if (!j_.contains(key)) return false;
        out = j_.at(key);
        return true;
    }

    void finish() const {
        for (const auto& item : j_.items())
            require(known_.count(item.key()) > 0, "config",
                    "unknown key '" + section_ + "." + item.key() + "'");
    }

  private:
    const nlohmann::json& j_;
    std::string section_;
    std::set<std::string> known_;
};

}  // namespace detail

// ---- per-section JSON round trips -------------------------------------------

inline nlohmann::json preprocess_config_to_json(const PreprocessConfig& c) {
    return nlohmann::json{{"analysis_low_nm", c.analysis_low_nm},
                          {"analysis_high_nm", c.analysis_high_nm},
                          {"trim_bands", c.trim_bands},
                          {"target_resolution_nm", c.target_resolution_nm},
                          {"sg_order", c.sg_order},
                          {"sg_window", c.sg_window},
                          {"corr_threshold", c.corr_threshold}};
}

inline PreprocessConfig preprocess_config_from_json(const nlohmann::json& j,
                                                    const std::string& section = "preprocess") {
    PreprocessConfig c;
    detail::StrictObject o(j, section);
    o.get("analysis_low_nm", c.analysis_low_nm);
    o.get("analysis_high_nm", c.analysis_high_nm);
    o.get("trim_bands", c.trim_bands);
    o.get("target_resolution_nm", c.target_resolution_nm);
    o.get("sg_order", c.sg_order);
    o.get("sg_window", c.sg_window);
    o.get("corr_threshold", c.corr_threshold);
    o.finish();
    c.validate();
    return c;
}

inline nlohmann::json layout_to_json(const DetectorLayout& l) {
    nlohmann::json segs = nlohmann::json::array();
    for (const auto& s : l.segments)
        segs.push_back(nlohmann::json{{"start_nm", s.start_nm},
                                      {"end_nm", s.end_nm},
                                      {"bandwidth_nm", s.bandwidth_nm}});
    return nlohmann::json{{"segments", std::move(segs)},
                          {"junction_trim_bands", l.junction_trim_bands}};
}

inline DetectorLayout layout_from_json(const nlohmann::json& j,
                                       const std::string& section = "layout") {
    DetectorLayout l;
    l.segments.clear();
    detail::StrictObject o(j, section);
    nlohmann::json segs;
    if (o.take("segments", segs)) {
        for (std::size_t i = 0; i < segs.size(); ++i) {
            detail::StrictObject so(segs[i], section + ".segments[" + std::to_string(i) + "]");
            DetectorSegment s{0, 0, 0};
            so.get("start_nm", s.start_nm);
            so.get("end_nm", s.end_nm);
            so.get("bandwidth_nm", s.bandwidth_nm);
            so.finish();
            l.segments.push_back(s);
        }
    } else {
        l.segments = DetectorLayout::standard().segments;
    }
    o.get("junction_trim_bands", l.junction_trim_bands);
    o.finish();
    l.validate();
    return l;
}

inline nlohmann::json gdd_config_to_json(const GddConfig& c) {
    return nlohmann::json{{"t_base_c", c.t_base_c}, {"clamp_negative", c.clamp_negative}};
}

inline GddConfig gdd_config_from_json(const nlohmann::json& j) {
    GddConfig c;
    detail::StrictObject o(j, "gdd");
    o.get("t_base_c", c.t_base_c);
    o.get("clamp_negative", c.clamp_negative);
    o.finish();
    c.validate();
    return c;
}

inline nlohmann::json synth_config_to_json(const SynthConfig& c) {
    return nlohmann::json{{"n_plants_per_class", c.n_plants_per_class},
                          {"leaves_per_plant", c.leaves_per_plant},
                          {"preset", c.preset == StagePreset::early ? "early" : "late"},
                          {"dip_center_1_nm", c.dip_center_1_nm},
                          {"dip_center_2_nm", c.dip_center_2_nm},
                          {"dip_sigma_nm", c.dip_sigma_nm},
                          {"base_depth", c.base_depth},
                          {"delta", c.delta},
                          {"noise_sd", c.noise_sd},
                          {"junction_sd", c.junction_sd}};
}

inline SynthConfig synth_config_from_json(const nlohmann::json& j) {
    SynthConfig c;
    detail::StrictObject o(j, "synth");
    o.get("n_plants_per_class", c.n_plants_per_class);
    o.get("leaves_per_plant", c.leaves_per_plant);
    std::string preset = c.preset == StagePreset::early ? "early" : "late";
    o.get("preset", preset);
    if (preset == "early")
        c.preset = StagePreset::early;
    else if (preset == "late")
        c.preset = StagePreset::late;
    else
        fail("config", "synth.preset must be 'early' or 'late', got '" + preset + "'");
    o.get("dip_center_1_nm", c.dip_center_1_nm);
    o.get("dip_center_2_nm", c.dip_center_2_nm);
    o.get("dip_sigma_nm", c.dip_sigma_nm);
    o.get("base_depth", c.base_depth);
    o.get("delta", c.delta);
    o.get("noise_sd", c.noise_sd);
    o.get("junction_sd", c.junction_sd);
    o.finish();
    c.validate();
    return c;
}

inline nlohmann::json ensemble_config_to_json(const EnsembleConfig& c) {
    return nlohmann::json{
        {"k_folds", c.k_folds},
        {"ratios",
         {{"train", c.ratios.train},
          {"validation", c.ratios.validation},
          {"test", c.ratios.test}}},
        {"selection",
         {{"max_models", c.selection.max_models},
          {"corr_ceiling", c.selection.corr_ceiling},
          {"auc_floor", c.selection.auc_floor}}}};
}

inline EnsembleConfig ensemble_config_from_json(const nlohmann::json& j,
                                                const std::string& section = "ensemble") {
    EnsembleConfig c;
    detail::StrictObject o(j, section);
    o.get("k_folds", c.k_folds);
    nlohmann::json sub;
    if (o.take("ratios", sub)) {
        detail::StrictObject ro(sub, section + ".ratios");
        ro.get("train", c.ratios.train);
        ro.get("validation", c.ratios.validation);
        ro.get("test", c.ratios.test);
        ro.finish();
    }
    if (o.take("selection", sub)) {
        detail::StrictObject so(sub, section + ".selection");
        so.get("max_models", c.selection.max_models);
        so.get("corr_ceiling", c.selection.corr_ceiling);
        so.get("auc_floor", c.selection.auc_floor);
        so.finish();
    }
    o.finish();
    c.validate();
    return c;
}

// Learner overrides apply uniformly to every family in the default pool.
inline void apply_learner_overrides(const nlohmann::json& j, LearnerSpec& s) {
    detail::StrictObject o(j, "learners");
    o.get("tree_max_depth", s.tree_max_depth);
    o.get("tree_min_leaf", s.tree_min_leaf);
    o.get("forest_n_trees", s.forest_n_trees);
    o.get("forest_max_features", s.forest_max_features);
    o.get("forest_bootstrap", s.forest_bootstrap);
    o.get("boost_n_rounds", s.boost_n_rounds);
    o.get("boost_learning_rate", s.boost_learning_rate);
    o.get("boost_max_depth", s.boost_max_depth);
    o.get("boost_l2_lambda", s.boost_l2_lambda);
    o.get("svm_c", s.svm_c);
    o.get("svm_gamma", s.svm_gamma);
    o.get("svm_smo_tol", s.svm_smo_tol);
    o.get("svm_max_passes", s.svm_max_passes);
    o.get("nb_var_smoothing", s.nb_var_smoothing);
    o.get("knn_k", s.knn_k);
    o.get("logreg_l2", s.logreg_l2);
    o.get("logreg_max_iter", s.logreg_max_iter);
    o.get("logreg_tol", s.logreg_tol);
    o.finish();
    s.validate();
}

// ---- the merged run configuration --------------------------------------------

struct RunConfig {
    std::uint64_t seed = 42;
    int threads = 0;  // 0 defers to SPECTRA_THREADS, then 1
    double threshold = 0.5;
    std::string in_path;
    std::string out_path;
    PreprocessConfig preprocess;
    DetectorLayout layout = DetectorLayout::standard();
    GddConfig gdd;
    SynthConfig synth;
    EnsembleConfig ensemble;
    LearnerSpec learner_defaults;  // family/seed ignored; numeric overrides only

    void validate() const {
        require(threads >= 0, "config", "threads must be non-negative");
        require(threshold > 0.0 && threshold < 1.0, "config", "threshold must be in (0, 1)");
        preprocess.validate();
        layout.validate();
        gdd.validate();
        synth.validate();
        ensemble.validate();
        learner_defaults.validate();
    }
};

inline RunConfig run_config_from_json(const nlohmann::json& j) {
    RunConfig c;
    detail::StrictObject o(j, "config");
    o.get("seed", c.seed);
    o.get("threads", c.threads);
    o.get("threshold", c.threshold);
    o.get("in", c.in_path);
    o.get("out", c.out_path);
    nlohmann::json sub;
    if (o.take("preprocess", sub)) c.preprocess = preprocess_config_from_json(sub);
    if (o.take("layout", sub)) c.layout = layout_from_json(sub);
    if (o.take("gdd", sub)) c.gdd = gdd_config_from_json(sub);
    if (o.take("synth", sub)) c.synth = synth_config_from_json(sub);
    if (o.take("ensemble", sub)) c.ensemble = ensemble_config_from_json(sub);
    if (o.take("learners", sub)) apply_learner_overrides(sub, c.learner_defaults);
    o.finish();
    c.synth.layout = c.layout;
    c.validate();
    return c;
}

inline RunConfig parse_run_config(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        fail("config", std::string("invalid JSON: ") + e.what());
    }
    return run_config_from_json(j);
}

// The pool the training pipeline fits: one spec per family, defaults from
// the config's learner overrides, seeds derived per family index.
inline std::vector<LearnerSpec> config_pool(const RunConfig& cfg, std::uint64_t pool_seed) {
    std::vector<LearnerSpec> pool = default_pool(pool_seed);
    for (auto& s : pool) {
        const Family fam = s.family;
        const std::uint64_t seed = s.seed;
        s = cfg.learner_defaults;
        s.family = fam;
        s.seed = seed;
    }
    return pool;
}

}  // namespace leafspec
