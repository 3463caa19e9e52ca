#pragma once

// Diversity-aware model selection. Candidates are ranked by OOF AUC
// (descending, names breaking ties), then greedily accepted while their
// absolute prediction correlation with every accepted model stays at or
// below the ceiling. The report is canonical: models appear in name order
// regardless of pool input order, and the trace records one decision per
// candidate in examination order.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "leafspec/core.hpp"
#include "leafspec/ensemble/auc.hpp"
#include "leafspec/ensemble/oof.hpp"
#include "leafspec/preprocess.hpp"

namespace leafspec {

struct SelectionConfig {
    int max_models = 4;
    double corr_ceiling = 0.95;
    double auc_floor = 0.5;

    void validate() const {
        require(max_models >= 1, "selection config", "max_models must be at least 1");
        require(corr_ceiling >= 0, "selection config", "corr_ceiling must be non-negative");
        require(auc_floor >= 0 && auc_floor < 1, "selection config", "auc_floor out of range");
    }
};

struct PredictionCorrelation {
    Matrix r;                             // symmetric, unit diagonal
    std::vector<char> degenerate_column;  // constant OOF column
};

inline PredictionCorrelation prediction_correlation(const OofMatrix& oof) {
    const std::size_t m = oof.p.cols;
    require(m >= 2, "correlation", "need at least 2 models");
    PredictionCorrelation out;
    out.r = Matrix(m, m);
    out.degenerate_column.assign(m, 0);
    std::vector<std::vector<double>> cols(m);
    for (std::size_t i = 0; i < m; ++i) cols[i] = oof.p.column(i);
    for (std::size_t i = 0; i < m; ++i) {
        out.r(i, i) = 1.0;
        for (std::size_t j = i + 1; j < m; ++j) {
            const PearsonResult pr = pearson_r(cols[i], cols[j]);
            out.r(i, j) = pr.r;
            out.r(j, i) = pr.r;
            if (pr.degenerate) {
                // A degenerate pair means at least one constant column.
                for (std::size_t c : {i, j}) {
                    const auto& v = cols[c];
                    bool constant = true;
                    for (double x : v) constant = constant && (x == v[0]);
                    if (constant) out.degenerate_column[c] = 1;
                }
            }
        }
    }
    return out;
}

struct SelectionDecision {
    std::string model;
    double auc = 0.0;
    bool accepted = false;
    std::string reason;
};

struct SelectionReport {
    std::vector<std::string> model_names;  // name order
    std::vector<double> auc;               // aligned with model_names
    Matrix correlation;                    // aligned with model_names
    std::vector<std::string> selected;     // acceptance order
    std::vector<SelectionDecision> trace;  // examination order
};

inline SelectionReport select_models(const std::vector<std::string>& names,
                                     const std::vector<double>& aucs, const Matrix& corr,
                                     const SelectionConfig& cfg = {}) {
    cfg.validate();
    const std::size_t m = names.size();
    require(m >= 1, "selection", "empty model pool");
    require(aucs.size() == m, "selection", "auc list length mismatch");
    require(corr.rows == m && corr.cols == m, "selection", "correlation matrix shape mismatch");
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            require(corr(i, j) == corr(j, i), "selection", "correlation matrix not symmetric");
    {
        auto sorted = names;
        std::sort(sorted.begin(), sorted.end());
        require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(), "selection",
                "duplicate model names");
    }

    // Canonical order: by name. Examination order: AUC descending, name up.
    std::vector<std::size_t> canon(m), exam(m);
    std::iota(canon.begin(), canon.end(), 0);
    std::sort(canon.begin(), canon.end(),
              [&](std::size_t a, std::size_t b) { return names[a] < names[b]; });
    exam = canon;
    std::stable_sort(exam.begin(), exam.end(),
                     [&](std::size_t a, std::size_t b) { return aucs[a] > aucs[b]; });

    SelectionReport rep;
    for (std::size_t i : canon) {
        rep.model_names.push_back(names[i]);
        rep.auc.push_back(aucs[i]);
    }
    rep.correlation = Matrix(m, m);
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b) rep.correlation(a, b) = corr(canon[a], canon[b]);

    std::vector<std::size_t> accepted;
    for (std::size_t i : exam) {
        SelectionDecision d;
        d.model = names[i];
        d.auc = aucs[i];
        if (accepted.size() >= static_cast<std::size_t>(cfg.max_models)) {
            d.reason = "max models reached";
        } else if (!(aucs[i] > cfg.auc_floor)) {
            d.reason = "auc floor";
        } else {
            std::string clash;
            for (std::size_t j : accepted) {
                if (std::abs(corr(i, j)) > cfg.corr_ceiling) {
                    clash = names[j];
                    break;
                }
            }
            if (!clash.empty()) {
                d.reason = "correlation ceiling (vs " + clash + ")";
            } else {
                d.accepted = true;
                d.reason = "accepted";
                accepted.push_back(i);
                rep.selected.push_back(names[i]);
            }
        }
        rep.trace.push_back(std::move(d));
    }
    require(!rep.selected.empty(), "no model above floor", "every candidate was rejected");
    return rep;
}

}  // namespace leafspec
