#pragma once

// End-to-end orchestration: raw spectra to trained stacked ensemble, plus
// the evaluate and importance paths against a persisted model bundle.
//
// Everything downstream of the master seed uses derived streams with fixed
// role indices, so one integer reproduces the whole run:
//   split <- derive_seed(master, 1)     folds <- derive_seed(master, 2)
//   pool  <- derive_seed(master, 3)     importance <- derive_seed(master, 4)
// The band map and scaler are fit on the training split only; validation
// and test rows never touch any fitting step.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "leafspec/core.hpp"
#include "leafspec/ensemble/auc.hpp"
#include "leafspec/ensemble/oof.hpp"
#include "leafspec/ensemble/select.hpp"
#include "leafspec/ensemble/split.hpp"
#include "leafspec/ensemble/stack.hpp"
#include "leafspec/evaluation.hpp"
#include "leafspec/io.hpp"
#include "leafspec/preprocess.hpp"
#include "leafspec/runconfig.hpp"
#include "leafspec/spectral_types.hpp"

namespace leafspec {

inline constexpr std::uint64_t kSeedRoleSplit = 1;
inline constexpr std::uint64_t kSeedRoleFolds = 2;
inline constexpr std::uint64_t kSeedRolePool = 3;
inline constexpr std::uint64_t kSeedRoleImportance = 4;

struct ModelBundle {
    StackedEnsemble ensemble;
    DataSplit split;
    std::string input_fingerprint;
    std::uint64_t master_seed = 0;
    EnsembleConfig ens_cfg;
    double threshold = 0.5;
};

struct TrainResult {
    ModelBundle bundle;
    SelectionReport selection;
    std::vector<std::string> pool_names;  // pool order
    std::vector<double> pool_oof_auc;     // aligned with pool_names
};

namespace detail {

inline LabeledDataset labeled_subset(const Matrix& features, const std::vector<int>& labels,
                                     const std::vector<std::size_t>& rows) {
    LabeledDataset d;
    d.x = Matrix(rows.size(), features.cols);
    d.y.resize(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < features.cols; ++c) d.x(r, c) = features(rows[r], c);
        d.y[r] = labels[rows[r]];
    }
    return d;
}

}  // namespace detail

inline TrainResult train_pipeline(const SpectralDataset& raw, const RunConfig& cfg) {
    cfg.validate();
    raw.validate();
    const int threads = resolve_threads(cfg.threads);
    for (double g : raw.stage_gdd)
        require(g == raw.stage_gdd.front(), "train",
                "dataset mixes stage_gdd values; filter to one stage first");

    const SpectralDataset processed =
        preprocess_rows(raw, cfg.layout, cfg.preprocess, static_cast<unsigned>(threads));

    const DataSplit split =
        stratified_split(processed.n_samples(), processed.labels, cfg.ensemble.ratios,
                         derive_seed(cfg.seed, kSeedRoleSplit));

    // Band grouping and scaling learn from the training rows only.
    const SpectralDataset train_rows = processed.subset(split.train);
    const BandGroupMap band_map = fit_band_groups(train_rows, cfg.preprocess);
    const SpectralDataset merged = apply_band_groups(processed, band_map);
    const StandardScaler scaler =
        fit_scaler(detail::labeled_subset(merged.samples, merged.labels, split.train).x);
    const Matrix scaled = apply_scaler(scaler, merged.samples);

    LabeledDataset train_data = detail::labeled_subset(scaled, merged.labels, split.train);

    const std::uint64_t fold_seed = derive_seed(cfg.seed, kSeedRoleFolds);
    const std::vector<LearnerSpec> pool =
        config_pool(cfg, derive_seed(cfg.seed, kSeedRolePool));
    const std::vector<int> fold_of =
        make_stratified_folds(train_data.y, cfg.ensemble.k_folds, fold_seed);
    const OofMatrix oof = compute_oof_with_folds(pool, train_data, fold_of, threads);

    std::vector<double> aucs(pool.size());
    for (std::size_t m = 0; m < pool.size(); ++m)
        aucs[m] = auc_score(oof.column(m), train_data.y);
    const PredictionCorrelation corr = prediction_correlation(oof);
    const SelectionReport report =
        select_models(oof.model_names, aucs, corr.r, cfg.ensemble.selection);

    std::vector<LearnerSpec> chosen;
    for (const std::string& name : report.selected)
        for (const auto& s : pool)
            if (s.name() == name) chosen.push_back(s);

    TrainResult out;
    out.bundle.ensemble =
        fit_stacked(chosen, train_data, cfg.ensemble.k_folds, fold_seed, threads);
    out.bundle.ensemble.scaler = scaler;
    out.bundle.ensemble.band_map = band_map;
    out.bundle.ensemble.layout = cfg.layout;
    out.bundle.ensemble.pre_cfg = cfg.preprocess;
    out.bundle.ensemble.stage_gdd = raw.stage_gdd.empty() ? 0.0 : raw.stage_gdd.front();
    out.bundle.split = split;
    out.bundle.input_fingerprint = raw.fingerprint();
    out.bundle.master_seed = cfg.seed;
    out.bundle.ens_cfg = cfg.ensemble;
    out.bundle.threshold = cfg.threshold;
    out.selection = report;
    out.pool_names = oof.model_names;
    out.pool_oof_auc = aucs;
    return out;
}

// ---- model bundle persistence -------------------------------------------------

inline nlohmann::json model_bundle_to_json(const ModelBundle& b) {
    nlohmann::json base_models = nlohmann::json::array();
    for (const auto& m : b.ensemble.bases) base_models.push_back(base_model_to_json(m));
    const nlohmann::json config{
        {"preprocess", preprocess_config_to_json(b.ensemble.pre_cfg)},
        {"layout", layout_to_json(b.ensemble.layout)},
        {"ensemble", ensemble_config_to_json(b.ens_cfg)},
        {"threshold", b.threshold},
        {"input_fingerprint", b.input_fingerprint},
        {"split_indices",
         {{"train", b.split.train},
          {"validation", b.split.validation},
          {"test", b.split.test},
          {"seed", b.split.seed},
          {"stratified", b.split.stratified}}}};
    const nlohmann::json seeds{
        {"master", b.master_seed},
        {"split", derive_seed(b.master_seed, kSeedRoleSplit)},
        {"folds", derive_seed(b.master_seed, kSeedRoleFolds)},
        {"pool", derive_seed(b.master_seed, kSeedRolePool)},
        {"importance", derive_seed(b.master_seed, kSeedRoleImportance)}};
    return nlohmann::json{{"stage_gdd", b.ensemble.stage_gdd},
                          {"band_group_map", band_group_map_to_json(b.ensemble.band_map)},
                          {"scaler", scaler_to_json(b.ensemble.scaler)},
                          {"base_models", std::move(base_models)},
                          {"meta",
                           {{"weights", b.ensemble.meta.weights},
                            {"intercept", b.ensemble.meta.intercept}}},
                          {"seeds", seeds},
                          {"config", config}};
}

inline ModelBundle model_bundle_from_json(const nlohmann::json& j) {
    ModelBundle b;
    b.ensemble.stage_gdd = j.at("stage_gdd").get<double>();
    b.ensemble.band_map = band_group_map_from_json(j.at("band_group_map"));
    b.ensemble.scaler = scaler_from_json(j.at("scaler"));
    for (const auto& m : j.at("base_models"))
        b.ensemble.bases.push_back(base_model_from_json(m));
    b.ensemble.meta.weights = j.at("meta").at("weights").get<std::vector<double>>();
    b.ensemble.meta.intercept = j.at("meta").at("intercept").get<double>();
    b.ensemble.meta.converged = true;
    b.master_seed = j.at("seeds").at("master").get<std::uint64_t>();
    const auto& config = j.at("config");
    b.ensemble.pre_cfg = preprocess_config_from_json(config.at("preprocess"));
    b.ensemble.layout = layout_from_json(config.at("layout"));
    b.ens_cfg = ensemble_config_from_json(config.at("ensemble"));
    b.threshold = config.at("threshold").get<double>();
    b.input_fingerprint = config.at("input_fingerprint").get<std::string>();
    const auto& si = config.at("split_indices");
    b.split.train = si.at("train").get<std::vector<std::size_t>>();
    b.split.validation = si.at("validation").get<std::vector<std::size_t>>();
    b.split.test = si.at("test").get<std::vector<std::size_t>>();
    b.split.seed = si.at("seed").get<std::uint64_t>();
    b.split.stratified = si.at("stratified").get<bool>();
    require(b.ensemble.meta.weights.size() == b.ensemble.bases.size(), "malformed model file",
            "meta weight count != base model count");
    return b;
}

inline void save_model_bundle(const std::string& path, const ModelBundle& b) {
    write_file_atomic(path, model_bundle_to_json(b).dump(2) + "\n");
}

inline ModelBundle load_model_bundle(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        fail("malformed model file", std::string(e.what()));
    }
    try {
        return model_bundle_from_json(j);
    } catch (const nlohmann::json::exception& e) {
        fail("malformed model file", std::string(e.what()));
    }
}

// ---- evaluate / importance against a bundle ------------------------------------

// Split names resolve through the stored indices, which are only meaningful
// for the exact dataset the model was trained on; foreign data may only be
// evaluated whole.
inline std::vector<std::size_t> resolve_split_rows(const ModelBundle& b,
                                                   const SpectralDataset& raw,
                                                   const std::string& split_name) {
    if (split_name == "all") {
        std::vector<std::size_t> rows(raw.n_samples());
        for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
        return rows;
    }
    require(raw.fingerprint() == b.input_fingerprint, "evaluate",
            "split '" + split_name +
                "' requires the training dataset (fingerprint mismatch); use --split all");
    if (split_name == "train") return b.split.train;
    if (split_name == "validation") return b.split.validation;
    if (split_name == "test") return b.split.test;
    fail("evaluate", "unknown split '" + split_name + "'");
}

inline MetricsReport evaluate_bundle(const ModelBundle& b, const SpectralDataset& raw,
                                     const std::string& split_name, int threads = 1) {
    const std::vector<std::size_t> rows = resolve_split_rows(b, raw, split_name);
    require(!rows.empty(), "evaluate", "split '" + split_name + "' is empty");
    const SpectralDataset subset = raw.subset(rows);
    const std::vector<double> probs = b.ensemble.predict(subset, threads);
    return evaluate_predictions(probs, subset.labels, b.threshold);
}

inline ImportanceProfile importance_bundle(const ModelBundle& b, const SpectralDataset& raw,
                                           int n_repeats, int threads = 1) {
    require(raw.fingerprint() == b.input_fingerprint, "importance",
            "importance requires the training dataset (fingerprint mismatch)");
    const SpectralDataset subset = raw.subset(b.split.validation);
    const Matrix features = b.ensemble.features_from_raw(subset, threads);
    return permutation_importance(b.ensemble, features, subset.labels, n_repeats,
                                  derive_seed(b.master_seed, kSeedRoleImportance), threads);
}

}  // namespace leafspec
