#pragma once

// Gaussian naive Bayes with variance smoothing: every per-class variance is
// inflated by var_smoothing times the largest pooled feature variance,
// keeping densities finite on constant features.

#include <cmath>
#include <vector>

#include "leafspec/core.hpp"
#include "leafspec/learners/spec.hpp"

namespace leafspec {

struct GaussianNbModel {
    double log_prior0 = 0.0;
    double log_prior1 = 0.0;
    std::vector<double> mean0, var0;
    std::vector<double> mean1, var1;

    std::size_t n_features() const { return mean0.size(); }

    double predict_one(const double* x) const {
        double lp0 = log_prior0, lp1 = log_prior1;
        for (std::size_t f = 0; f < mean0.size(); ++f) {
            const double d0 = x[f] - mean0[f];
            const double d1 = x[f] - mean1[f];
            lp0 -= 0.5 * (std::log(2.0 * M_PI * var0[f]) + d0 * d0 / var0[f]);
            lp1 -= 0.5 * (std::log(2.0 * M_PI * var1[f]) + d1 * d1 / var1[f]);
        }
        // Normalized exponentials with max subtraction.
        const double m = lp0 > lp1 ? lp0 : lp1;
        const double e0 = std::exp(lp0 - m), e1 = std::exp(lp1 - m);
        return e1 / (e0 + e1);
    }
};

inline GaussianNbModel fit_gaussian_nb_model(const LearnerSpec& spec, const LabeledDataset& data) {
    spec.validate();
    data.validate();
    const std::size_t d = data.d();
    GaussianNbModel m;
    m.mean0.assign(d, 0.0);
    m.mean1.assign(d, 0.0);
    m.var0.assign(d, 0.0);
    m.var1.assign(d, 0.0);

    double n0 = 0.0, n1 = 0.0;
    for (std::size_t r = 0; r < data.n(); ++r) {
        auto& mean = data.y[r] == 1 ? m.mean1 : m.mean0;
        (data.y[r] == 1 ? n1 : n0) += 1.0;
        for (std::size_t f = 0; f < d; ++f) mean[f] += data.x(r, f);
    }
    for (std::size_t f = 0; f < d; ++f) {
        m.mean0[f] /= n0;
        m.mean1[f] /= n1;
    }
    for (std::size_t r = 0; r < data.n(); ++r) {
        auto& mean = data.y[r] == 1 ? m.mean1 : m.mean0;
        auto& var = data.y[r] == 1 ? m.var1 : m.var0;
        for (std::size_t f = 0; f < d; ++f) {
            const double dv = data.x(r, f) - mean[f];
            var[f] += dv * dv;
        }
    }

    // Smoothing scale: the largest pooled (population) feature variance.
    double max_pooled = 0.0;
    const auto n = static_cast<double>(data.n());
    for (std::size_t f = 0; f < d; ++f) {
        double mean = 0.0;
        for (std::size_t r = 0; r < data.n(); ++r) mean += data.x(r, f);
        mean /= n;
        double ss = 0.0;
        for (std::size_t r = 0; r < data.n(); ++r) {
            const double dv = data.x(r, f) - mean;
            ss += dv * dv;
        }
        max_pooled = std::max(max_pooled, ss / n);
    }
    const double eps = spec.nb_var_smoothing * max_pooled;

    for (std::size_t f = 0; f < d; ++f) {
        m.var0[f] = m.var0[f] / n0 + eps;
        m.var1[f] = m.var1[f] / n1 + eps;
        require(m.var0[f] > 0.0 && m.var1[f] > 0.0, "learner",
                "zero variance with zero smoothing; raise var_smoothing");
    }
    m.log_prior0 = std::log(n0 / n);
    m.log_prior1 = std::log(n1 / n);
    return m;
}

}  // namespace leafspec
