#pragma once

// Confusion matrix, derived classification metrics, and permutation feature
// importance. Probability >= threshold counts as predicted infected. Ratios
// with zero denominators are reported as absent values, never NaN.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "leafspec/core.hpp"
#include "leafspec/ensemble/auc.hpp"
#include "leafspec/ensemble/stack.hpp"

namespace leafspec {

struct ConfusionMatrix {
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    std::int64_t tn = 0;
    std::int64_t fn = 0;

    std::int64_t total() const { return tp + fp + tn + fn; }
};

inline ConfusionMatrix confusion(const std::vector<double>& probs, const std::vector<int>& labels,
                                 double threshold = 0.5) {
    require(probs.size() == labels.size(), "evaluation", "prediction/label length mismatch");
    require(!probs.empty(), "evaluation", "empty input");
    require(threshold > 0.0 && threshold < 1.0, "evaluation", "threshold must be in (0, 1)");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        require(labels[i] == 0 || labels[i] == 1, "evaluation", "labels must be 0/1");
        const bool pred_pos = probs[i] >= threshold;
        if (labels[i] == 1)
            (pred_pos ? cm.tp : cm.fn) += 1;
        else
            (pred_pos ? cm.fp : cm.tn) += 1;
    }
    return cm;
}

struct MetricsReport {
    ConfusionMatrix cm;
    double threshold = 0.5;
    double accuracy = 0.0;
    std::optional<double> recall_infected;  // tp / (tp + fn)
    std::optional<double> specificity;      // tn / (tn + fp)
    std::optional<double> precision;        // tp / (tp + fp)
    std::optional<double> f1;
    std::optional<double> auc;
};

inline MetricsReport metrics(const ConfusionMatrix& cm, const std::vector<double>& scores,
                             const std::vector<int>& labels, double threshold = 0.5) {
    require(cm.total() > 0, "evaluation", "empty confusion matrix");
    require(cm.tp >= 0 && cm.fp >= 0 && cm.tn >= 0 && cm.fn >= 0, "evaluation",
            "negative confusion count");
    MetricsReport r;
    r.cm = cm;
    r.threshold = threshold;
    r.accuracy = static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total());
    if (cm.tp + cm.fn > 0)
        r.recall_infected = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn);
    if (cm.tn + cm.fp > 0)
        r.specificity = static_cast<double>(cm.tn) / static_cast<double>(cm.tn + cm.fp);
    if (cm.tp + cm.fp > 0)
        r.precision = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fp);
    if (r.precision && r.recall_infected && (*r.precision + *r.recall_infected) > 0)
        r.f1 = 2.0 * *r.precision * *r.recall_infected / (*r.precision + *r.recall_infected);
    bool has0 = false, has1 = false;
    for (int v : labels) (v == 1 ? has1 : has0) = true;
    if (has0 && has1) r.auc = auc_score(scores, labels);
    return r;
}

inline MetricsReport evaluate_predictions(const std::vector<double>& probs,
                                          const std::vector<int>& labels,
                                          double threshold = 0.5) {
    return metrics(confusion(probs, labels, threshold), probs, labels, threshold);
}

struct ImportanceEntry {
    double representative_nm = 0.0;
    double importance_mean = 0.0;  // mean AUC drop over repeats
    double importance_sd = 0.0;    // population SD over repeats
};

struct ImportanceProfile {
    std::vector<ImportanceEntry> entries;  // one per merged band, band order
    double baseline_auc = 0.0;
    int n_repeats = 0;
    std::string aggregation = "stacked ensemble";
};

// Shuffles one merged-band column at a time (before scaling; the per-column
// affine scaler commutes with any row permutation) and records the AUC drop
// of the full stacked predictor. Seeds derive per (band, repeat), so any
// subset of bands reproduces the same draws.
inline ImportanceProfile permutation_importance(const StackedEnsemble& ens,
                                                const Matrix& merged_features,
                                                const std::vector<int>& labels, int n_repeats,
                                                std::uint64_t seed, int threads = 1) {
    require(n_repeats >= 1, "importance", "n_repeats must be at least 1");
    require(merged_features.rows == labels.size(), "importance",
            "feature/label row mismatch");
    require(merged_features.cols == ens.band_map.reduced_band_count, "importance",
            "feature count does not match the band map");
    bool has0 = false, has1 = false;
    for (int v : labels) (v == 1 ? has1 : has0) = true;
    require(has0 && has1, "importance", "degenerate eval set: single class");

    const std::vector<double> base_probs =
        ens.predict_features(apply_scaler(ens.scaler, merged_features));
    const double baseline = auc_score(base_probs, labels);

    const std::size_t nb = merged_features.cols;
    const std::size_t n = merged_features.rows;
    ImportanceProfile out;
    out.baseline_auc = baseline;
    out.n_repeats = n_repeats;
    out.entries.resize(nb);

    parallel_for(nb, threads, [&](std::size_t b) {
        Matrix x = merged_features;
        std::vector<double> col(n);
        double sum = 0.0, sum_sq = 0.0;
        for (int rep = 0; rep < n_repeats; ++rep) {
            for (std::size_t r = 0; r < n; ++r) col[r] = merged_features(r, b);
            Rng rng(derive_seed(seed, static_cast<std::uint64_t>(b) *
                                          static_cast<std::uint64_t>(n_repeats) +
                                      static_cast<std::uint64_t>(rep)));
            rng.shuffle(col);
            for (std::size_t r = 0; r < n; ++r) x(r, b) = col[r];
            const std::vector<double> probs =
                ens.predict_features(apply_scaler(ens.scaler, x));
            const double drop = baseline - auc_score(probs, labels);
            sum += drop;
            sum_sq += drop * drop;
        }
        const double mean = sum / n_repeats;
        const double var = std::max(0.0, sum_sq / n_repeats - mean * mean);
        out.entries[b].representative_nm = ens.band_map.groups[b].representative_nm;
        out.entries[b].importance_mean = mean;
        out.entries[b].importance_sd = std::sqrt(var);
    });
    return out;
}

}  // namespace leafspec
