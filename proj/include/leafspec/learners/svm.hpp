#pragma once

// Soft-margin RBF SVM trained by sequential minimal optimization, with
// probabilities from Platt scaling. Differences from Platt's published
// pseudo-code, all in the service of total determinism:
//   - the second-choice heuristic breaks |E1 - E2| ties by lowest index and
//     the fallback scans run in ascending index order instead of from a
//     random start;
//   - the solver terminates after `max_passes` consecutive full passes with
//     no alpha change (a hard pass budget sets a warning flag instead of
//     looping forever);
//   - examination uses tol/2 so the returned iterate satisfies KKT within
//     the advertised tol with margin to spare.
// Platt scaling uses the regularized targets and damped Newton fit from
// Lin, Lin & Weng; a plain logistic fit diverges on separable data.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "leafspec/core.hpp"
#include "leafspec/learners/spec.hpp"

namespace leafspec {

struct SvmRbfModel {
    Matrix support_vectors;            // rows with alpha > 0
    std::vector<double> alpha;         // same order as support_vectors
    std::vector<int> sv_labels_pm;     // +1 / -1
    double b = 0.0;
    double gamma = 1.0;
    double platt_a = 0.0;
    double platt_b = 0.0;
    bool convergence_warning = false;

    std::size_t n_features() const { return support_vectors.cols; }

    double decision_one(const double* x) const {
        double f = b;
        for (std::size_t i = 0; i < alpha.size(); ++i) {
            double ss = 0.0;
            for (std::size_t c = 0; c < support_vectors.cols; ++c) {
                const double d = support_vectors(i, c) - x[c];
                ss += d * d;
            }
            f += alpha[i] * sv_labels_pm[i] * std::exp(-gamma * ss);
        }
        return f;
    }

    double predict_one(const double* x) const {
        return 1.0 / (1.0 + std::exp(platt_a * decision_one(x) + platt_b));
    }
};

namespace detail {

struct SmoState {
    const Matrix* k = nullptr;
    std::vector<int> y;       // +1 / -1
    std::vector<double> alpha;
    std::vector<double> e;    // f(x_i) - y_i
    double b = 0.0;
    double c = 1.0;
    double tol = 1e-3;
};

inline bool smo_take_step(SmoState& s, std::size_t i1, std::size_t i2) {
    if (i1 == i2) return false;
    const double a1 = s.alpha[i1], a2 = s.alpha[i2];
    const int y1 = s.y[i1], y2 = s.y[i2];
    const double e1 = s.e[i1], e2 = s.e[i2];
    const double sgn = y1 * y2;

    double lo, hi;
    if (y1 != y2) {
        lo = std::max(0.0, a2 - a1);
        hi = std::min(s.c, s.c + a2 - a1);
    } else {
        lo = std::max(0.0, a1 + a2 - s.c);
        hi = std::min(s.c, a1 + a2);
    }
    if (hi - lo < 1e-12) return false;

    const Matrix& k = *s.k;
    const double k11 = k(i1, i1), k12 = k(i1, i2), k22 = k(i2, i2);
    const double eta = k11 + k22 - 2.0 * k12;

    double a2new;
    if (eta > 0.0) {
        a2new = a2 + y2 * (e1 - e2) / eta;
        a2new = std::clamp(a2new, lo, hi);
    } else {
        // Objective at the two clip ends; keep the lower one.
        const double f1 = y1 * (e1 + s.b) - a1 * k11 - sgn * a2 * k12;
        const double f2 = y2 * (e2 + s.b) - sgn * a1 * k12 - a2 * k22;
        const double l1 = a1 + sgn * (a2 - lo);
        const double h1 = a1 + sgn * (a2 - hi);
        const double obj_lo = l1 * f1 + lo * f2 + 0.5 * l1 * l1 * k11 + 0.5 * lo * lo * k22 +
                              sgn * lo * l1 * k12;
        const double obj_hi = h1 * f1 + hi * f2 + 0.5 * h1 * h1 * k11 + 0.5 * hi * hi * k22 +
                              sgn * hi * h1 * k12;
        if (obj_lo < obj_hi - 1e-12)
            a2new = lo;
        else if (obj_lo > obj_hi + 1e-12)
            a2new = hi;
        else
            return false;
    }
    if (std::abs(a2new - a2) < 1e-10 * (a2new + a2 + 1e-10)) return false;

    double a1new = a1 + sgn * (a2 - a2new);
    a1new = std::clamp(a1new, 0.0, s.c);

    const double d1 = y1 * (a1new - a1), d2 = y2 * (a2new - a2);
    const double b1 = s.b - e1 - d1 * k11 - d2 * k12;
    const double b2 = s.b - e2 - d1 * k12 - d2 * k22;
    double bnew;
    if (a1new > 0.0 && a1new < s.c)
        bnew = b1;
    else if (a2new > 0.0 && a2new < s.c)
        bnew = b2;
    else
        bnew = (b1 + b2) / 2.0;

    const double db = bnew - s.b;
    for (std::size_t i = 0; i < s.e.size(); ++i)
        s.e[i] += d1 * k(i1, i) + d2 * k(i2, i) + db;
    s.alpha[i1] = a1new;
    s.alpha[i2] = a2new;
    s.b = bnew;
    return true;
}

inline bool smo_examine(SmoState& s, std::size_t i2) {
    const double examine_tol = s.tol / 2.0;
    const double a2 = s.alpha[i2];
    const double r2 = s.e[i2] * s.y[i2];
    const bool violated = (r2 < -examine_tol && a2 < s.c) || (r2 > examine_tol && a2 > 0.0);
    if (!violated) return false;

    const std::size_t n = s.alpha.size();
    // First choice: the non-bound point maximizing |E1 - E2|.
    std::size_t best = n;
    double best_gap = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (i == i2 || s.alpha[i] <= 0.0 || s.alpha[i] >= s.c) continue;
        const double gap = std::abs(s.e[i] - s.e[i2]);
        if (gap > best_gap) {
            best_gap = gap;
            best = i;
        }
    }
    if (best < n && smo_take_step(s, best, i2)) return true;

    for (std::size_t i = 0; i < n; ++i) {
        if (i == i2 || s.alpha[i] <= 0.0 || s.alpha[i] >= s.c) continue;
        if (smo_take_step(s, i, i2)) return true;
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (i == i2) continue;
        if (smo_take_step(s, i, i2)) return true;
    }
    return false;
}

struct PlattResult {
    double a = 0.0;
    double b = 0.0;
};

// Newton fit of p = 1 / (1 + exp(a f + b)) against the regularized targets
// t+ = (n_pos + 1)/(n_pos + 2), t- = 1/(n_neg + 2).
inline PlattResult platt_fit(const std::vector<double>& decision, const std::vector<int>& y01) {
    double n_pos = 0.0, n_neg = 0.0;
    for (int v : y01) (v == 1 ? n_pos : n_neg) += 1.0;
    const double t_pos = (n_pos + 1.0) / (n_pos + 2.0);
    const double t_neg = 1.0 / (n_neg + 2.0);
    const std::size_t n = decision.size();
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = y01[i] == 1 ? t_pos : t_neg;

    double a = 0.0;
    double b = std::log((n_neg + 1.0) / (n_pos + 1.0));

    auto objective = [&](double aa, double bb) {
        double obj = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double z = aa * decision[i] + bb;
            if (z >= 0)
                obj += t[i] * z + std::log1p(std::exp(-z));
            else
                obj += (t[i] - 1.0) * z + std::log1p(std::exp(z));
        }
        return obj;
    };

    double fval = objective(a, b);
    for (int it = 0; it < 100; ++it) {
        double h11 = 1e-12, h22 = 1e-12, h21 = 0.0, g1 = 0.0, g2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double z = a * decision[i] + b;
            double p, q;
            if (z >= 0) {
                const double e = std::exp(-z);
                p = e / (1.0 + e);
                q = 1.0 / (1.0 + e);
            } else {
                const double e = std::exp(z);
                p = 1.0 / (1.0 + e);
                q = e / (1.0 + e);
            }
            const double d2 = p * q;
            h11 += decision[i] * decision[i] * d2;
            h22 += d2;
            h21 += decision[i] * d2;
            const double d1 = t[i] - p;
            g1 += decision[i] * d1;
            g2 += d1;
        }
        if (std::abs(g1) < 1e-5 && std::abs(g2) < 1e-5) break;

        const double det = h11 * h22 - h21 * h21;
        const double da = -(h22 * g1 - h21 * g2) / det;
        const double db = -(-h21 * g1 + h11 * g2) / det;
        const double slope = g1 * da + g2 * db;

        double stepsize = 1.0;
        while (stepsize >= 1e-10) {
            const double a2 = a + stepsize * da;
            const double b2 = b + stepsize * db;
            const double f2 = objective(a2, b2);
            if (f2 < fval + 1e-4 * stepsize * slope) {
                a = a2;
                b = b2;
                fval = f2;
                break;
            }
            stepsize /= 2.0;
        }
        if (stepsize < 1e-10) break;
    }
    return {a, b};
}

}  // namespace detail

inline Matrix rbf_kernel_matrix(const Matrix& x, double gamma) {
    Matrix k(x.rows, x.rows);
    for (std::size_t i = 0; i < x.rows; ++i) {
        k(i, i) = 1.0;
        for (std::size_t j = i + 1; j < x.rows; ++j) {
            double ss = 0.0;
            for (std::size_t c = 0; c < x.cols; ++c) {
                const double d = x(i, c) - x(j, c);
                ss += d * d;
            }
            const double v = std::exp(-gamma * ss);
            k(i, j) = v;
            k(j, i) = v;
        }
    }
    return k;
}

struct SmoSolution {
    std::vector<double> alpha;
    double b = 0.0;
    bool warning = false;
};

inline SmoSolution solve_smo(const Matrix& k, const std::vector<int>& y_pm, double c, double tol,
                             int max_passes) {
    detail::SmoState s;
    s.k = &k;
    s.y = y_pm;
    s.alpha.assign(y_pm.size(), 0.0);
    s.e.resize(y_pm.size());
    for (std::size_t i = 0; i < y_pm.size(); ++i) s.e[i] = -static_cast<double>(y_pm[i]);
    s.b = 0.0;
    s.c = c;
    s.tol = tol;

    const int hard_budget = 20000;
    bool examine_all = true;
    int quiet_full_passes = 0;
    SmoSolution out;
    for (int pass = 0; pass < hard_budget; ++pass) {
        std::size_t changed = 0;
        if (examine_all) {
            for (std::size_t i = 0; i < s.alpha.size(); ++i) changed += detail::smo_examine(s, i);
            if (changed == 0) {
                if (++quiet_full_passes >= max_passes) {
                    out.alpha = s.alpha;
                    out.b = s.b;
                    return out;
                }
            } else {
                quiet_full_passes = 0;
                examine_all = false;
            }
        } else {
            for (std::size_t i = 0; i < s.alpha.size(); ++i) {
                if (s.alpha[i] > 0.0 && s.alpha[i] < s.c) changed += detail::smo_examine(s, i);
            }
            if (changed == 0) examine_all = true;
        }
    }
    out.alpha = s.alpha;
    out.b = s.b;
    out.warning = true;
    return out;
}

inline SvmRbfModel fit_svm_rbf_model(const LearnerSpec& spec, const LabeledDataset& data) {
    spec.validate();
    data.validate();
    const double gamma =
        spec.svm_gamma > 0.0 ? spec.svm_gamma : 1.0 / static_cast<double>(data.d());
    std::vector<int> y_pm(data.n());
    for (std::size_t i = 0; i < data.n(); ++i) y_pm[i] = data.y[i] == 1 ? 1 : -1;

    const Matrix k = rbf_kernel_matrix(data.x, gamma);
    const SmoSolution sol = solve_smo(k, y_pm, spec.svm_c, spec.svm_smo_tol, spec.svm_max_passes);

    SvmRbfModel m;
    m.gamma = gamma;
    m.b = sol.b;
    m.convergence_warning = sol.warning;
    std::vector<std::size_t> sv;
    for (std::size_t i = 0; i < data.n(); ++i)
        if (sol.alpha[i] > 0.0) sv.push_back(i);
    m.support_vectors = Matrix(sv.size(), data.d());
    for (std::size_t i = 0; i < sv.size(); ++i) {
        for (std::size_t c = 0; c < data.d(); ++c) m.support_vectors(i, c) = data.x(sv[i], c);
        m.alpha.push_back(sol.alpha[sv[i]]);
        m.sv_labels_pm.push_back(y_pm[sv[i]]);
    }

    // Calibrate on training decision values computed from the kernel matrix
    // (identical to decision_one up to rounding, cheaper).
    std::vector<double> decision(data.n());
    for (std::size_t i = 0; i < data.n(); ++i) {
        double f = sol.b;
        for (std::size_t j = 0; j < data.n(); ++j)
            if (sol.alpha[j] > 0.0) f += sol.alpha[j] * y_pm[j] * k(j, i);
        decision[i] = f;
    }
    const detail::PlattResult pr = detail::platt_fit(decision, data.y);
    m.platt_a = pr.a;
    m.platt_b = pr.b;
    return m;
}

}  // namespace leafspec
