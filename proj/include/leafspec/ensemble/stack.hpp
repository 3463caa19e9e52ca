#pragma once

// Stacked ensemble: selected base learners refit on the full training set,
// combined by a logistic-regression meta-model fit on their out-of-fold
// probabilities. The bundle carries the preprocessing state (detector
// layout, preprocessing config, band map, scaler) so prediction runs from
// raw native-grid spectra to a probability with no external state.

#include <cstdint>
#include <string>
#include <vector>

#include "leafspec/core.hpp"
#include "leafspec/ensemble/oof.hpp"
#include "leafspec/learners/base_model.hpp"
#include "leafspec/learners/logreg.hpp"
#include "leafspec/preprocess.hpp"
#include "leafspec/spectral_types.hpp"

namespace leafspec {

struct StackedEnsemble {
    std::vector<BaseModel> bases;  // acceptance order, refit on full train
    LogRegModel meta;
    StandardScaler scaler;
    BandGroupMap band_map;
    DetectorLayout layout = DetectorLayout::standard();
    PreprocessConfig pre_cfg;
    double stage_gdd = 0.0;

    // Probabilities from already merged and scaled features.
    std::vector<double> predict_features(const Matrix& scaled) const {
        require(!bases.empty(), "ensemble", "no base models");
        require(meta.n_features() == bases.size(), "ensemble",
                "meta input dimension != base model count");
        Matrix base_p(scaled.rows, bases.size());
        for (std::size_t m = 0; m < bases.size(); ++m) {
            const std::vector<double> col = predict_proba(bases[m], scaled);
            for (std::size_t r = 0; r < scaled.rows; ++r) base_p(r, m) = col[r];
        }
        std::vector<double> out(scaled.rows);
        for (std::size_t r = 0; r < scaled.rows; ++r) out[r] = meta.predict_one(base_p.row(r));
        return out;
    }

    // Merged (unscaled) features from raw native-grid spectra.
    Matrix features_from_raw(const SpectralDataset& raw, int threads = 1) const {
        const SpectralDataset processed =
            preprocess_rows(raw, layout, pre_cfg, static_cast<unsigned>(threads));
        const SpectralDataset merged = apply_band_groups(processed, band_map);
        return merged.samples;
    }

    std::vector<double> predict(const SpectralDataset& raw, int threads = 1) const {
        const Matrix features = features_from_raw(raw, threads);
        return predict_features(apply_scaler(scaler, features));
    }
};

inline StackedEnsemble fit_stacked(const std::vector<LearnerSpec>& selected,
                                   const LabeledDataset& train, int k_folds, std::uint64_t seed,
                                   int threads = 1) {
    require(!selected.empty(), "ensemble", "no selected models");
    train.validate();

    const OofMatrix oof = compute_oof(selected, train, k_folds, seed, threads);

    StackedEnsemble ens;
    LearnerSpec meta_spec;
    meta_spec.family = Family::logreg;
    LabeledDataset meta_data;
    meta_data.x = oof.p;
    meta_data.y = train.y;
    ens.meta = fit_logreg_model(meta_spec, meta_data);

    for (const auto& spec : selected) ens.bases.push_back(fit_base_model(spec, train, threads));
    return ens;
}

}  // namespace leafspec
