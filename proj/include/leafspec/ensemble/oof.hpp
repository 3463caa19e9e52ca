#pragma once

// Stratified k-fold assignment and out-of-fold prediction matrices. Entry
// (i, m) is model m's probability for row i, fit on every fold except i's,
// so OOF columns are leakage-free meta-features. Column values depend only
// on (spec, folds, data): each fit derives its seed from the model spec's
// own seed and the fold index, never from the pool position.

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "leafspec/core.hpp"
#include "leafspec/learners/base_model.hpp"
#include "leafspec/learners/spec.hpp"

namespace leafspec {

struct OofMatrix {
    Matrix p;                             // n_train x n_models
    std::vector<int> fold_of;             // per training row
    std::vector<std::string> model_names;

    std::vector<double> column(std::size_t m) const { return p.column(m); }
};

// Deals each class's shuffled members onto folds with one cursor shared
// across classes, so fold sizes stay balanced even when class counts are
// not multiples of k.
inline std::vector<int> make_stratified_folds(const std::vector<int>& labels, int k,
                                              std::uint64_t seed) {
    require(k >= 2, "folds", "k_folds must be at least 2");
    require(static_cast<std::size_t>(k) <= labels.size(), "folds",
            "k_folds exceeds the sample count");
    std::vector<std::vector<std::size_t>> by_class(2);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        require(labels[i] == 0 || labels[i] == 1, "folds", "labels must be 0/1");
        by_class[static_cast<std::size_t>(labels[i])].push_back(i);
    }
    std::vector<int> fold_of(labels.size(), -1);
    std::size_t cursor = 0;
    for (std::size_t c = 0; c < 2; ++c) {
        auto& idx = by_class[c];
        Rng rng(derive_seed(seed, c));
        rng.shuffle(idx);
        for (std::size_t i : idx) {
            fold_of[i] = static_cast<int>(cursor % static_cast<std::size_t>(k));
            ++cursor;
        }
    }
    return fold_of;
}

inline OofMatrix compute_oof_with_folds(const std::vector<LearnerSpec>& pool,
                                        const LabeledDataset& train,
                                        const std::vector<int>& fold_of, int threads = 1) {
    require(!pool.empty(), "oof", "empty model pool");
    train.validate();
    require(fold_of.size() == train.n(), "oof", "fold assignment length mismatch");
    int k = 0;
    for (int f : fold_of) {
        require(f >= 0, "oof", "unassigned fold");
        k = std::max(k, f + 1);
    }

    // Row lists per fold and the training complement of each fold.
    std::vector<std::vector<std::size_t>> held(k);
    for (std::size_t i = 0; i < fold_of.size(); ++i)
        held[static_cast<std::size_t>(fold_of[i])].push_back(i);
    std::vector<LabeledDataset> complement(k);
    for (int f = 0; f < k; ++f) {
        std::vector<std::size_t> rows;
        for (std::size_t i = 0; i < train.n(); ++i)
            if (fold_of[i] != f) rows.push_back(i);
        LabeledDataset& d = complement[f];
        d.x = Matrix(rows.size(), train.d());
        d.y.resize(rows.size());
        bool has0 = false, has1 = false;
        for (std::size_t r = 0; r < rows.size(); ++r) {
            for (std::size_t c = 0; c < train.d(); ++c) d.x(r, c) = train.x(rows[r], c);
            d.y[r] = train.y[rows[r]];
            (d.y[r] == 1 ? has1 : has0) = true;
        }
        require(has0 && has1, "fold degenerate; reduce k",
                "training complement of fold " + std::to_string(f) + " lacks a class");
    }

    OofMatrix out;
    out.p = Matrix(train.n(), pool.size());
    out.fold_of = fold_of;
    for (const auto& s : pool) out.model_names.push_back(s.name());

    const std::size_t jobs = pool.size() * static_cast<std::size_t>(k);
    parallel_for(jobs, threads, [&](std::size_t job) {
        const std::size_t m = job / static_cast<std::size_t>(k);
        const int f = static_cast<int>(job % static_cast<std::size_t>(k));
        LearnerSpec spec = pool[m];
        spec.seed = derive_seed(spec.seed, static_cast<std::uint64_t>(f));
        const BaseModel model = fit_base_model(spec, complement[f]);
        for (std::size_t i : held[static_cast<std::size_t>(f)])
            out.p(i, m) = model.predict_one(train.x.row(i));
    });
    return out;
}

inline OofMatrix compute_oof(const std::vector<LearnerSpec>& pool, const LabeledDataset& train,
                             int k_folds, std::uint64_t seed, int threads = 1) {
    train.validate();
    const std::vector<int> fold_of = make_stratified_folds(train.y, k_folds, seed);
    return compute_oof_with_folds(pool, train, fold_of, threads);
}

}  // namespace leafspec
