#pragma once

// L2-regularized logistic regression fit by damped Newton iterations. The
// objective is the sum-form logistic loss plus (l2/2)*||w||^2 with the
// intercept unpenalized; convergence is declared on the gradient norm.

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "leafspec/core.hpp"
#include "leafspec/learners/spec.hpp"

namespace leafspec {

struct LogRegModel {
    std::vector<double> weights;
    double intercept = 0.0;
    bool converged = false;

    std::size_t n_features() const { return weights.size(); }

    double decision_one(const double* x) const {
        double z = intercept;
        for (std::size_t f = 0; f < weights.size(); ++f) z += weights[f] * x[f];
        return z;
    }
    double predict_one(const double* x) const { return sigmoid(decision_one(x)); }
};

namespace detail {

// Penalized loss: sum_i [softplus(z_i) - y_i z_i] + (l2/2)||w||^2.
inline double logreg_loss(const Matrix& x, const std::vector<int>& y,
                          const std::vector<double>& w, double b, double l2) {
    double loss = 0.0;
    for (std::size_t r = 0; r < x.rows; ++r) {
        double z = b;
        for (std::size_t f = 0; f < x.cols; ++f) z += w[f] * x(r, f);
        const double softplus = z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
        loss += softplus - static_cast<double>(y[r]) * z;
    }
    double reg = 0.0;
    for (double v : w) reg += v * v;
    return loss + 0.5 * l2 * reg;
}

// Gradient of the penalized loss in (w, b) layout [w_0..w_{d-1}, b].
inline Eigen::VectorXd logreg_gradient(const Matrix& x, const std::vector<int>& y,
                                       const std::vector<double>& w, double b, double l2) {
    const auto d = static_cast<Eigen::Index>(x.cols);
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(d + 1);
    for (std::size_t r = 0; r < x.rows; ++r) {
        double z = b;
        for (std::size_t f = 0; f < x.cols; ++f) z += w[f] * x(r, f);
        const double err = sigmoid(z) - static_cast<double>(y[r]);
        for (std::size_t f = 0; f < x.cols; ++f)
            grad(static_cast<Eigen::Index>(f)) += err * x(r, f);
        grad(d) += err;
    }
    for (std::size_t f = 0; f < x.cols; ++f)
        grad(static_cast<Eigen::Index>(f)) += l2 * w[f];
    return grad;
}

inline Eigen::MatrixXd logreg_hessian(const Matrix& x, const std::vector<double>& w, double b,
                                      double l2) {
    const auto d = static_cast<Eigen::Index>(x.cols);
    Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(d + 1, d + 1);
    for (std::size_t r = 0; r < x.rows; ++r) {
        double z = b;
        for (std::size_t f = 0; f < x.cols; ++f) z += w[f] * x(r, f);
        const double p = sigmoid(z);
        const double s = p * (1.0 - p);
        for (std::size_t a = 0; a < x.cols; ++a) {
            const double sa = s * x(r, a);
            for (std::size_t c = a; c < x.cols; ++c)
                hess(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(c)) += sa * x(r, c);
            hess(static_cast<Eigen::Index>(a), d) += sa;
        }
        hess(d, d) += s;
    }
    for (Eigen::Index a = 0; a < d; ++a) hess(a, a) += l2;
    for (Eigen::Index a = 0; a <= d; ++a)
        for (Eigen::Index c = 0; c < a; ++c) hess(a, c) = hess(c, a);
    return hess;
}

}  // namespace detail

inline LogRegModel fit_logreg_model(const LearnerSpec& spec, const LabeledDataset& data) {
    spec.validate();
    data.validate(/*require_both_classes=*/false);
    const std::size_t d = data.d();
    LogRegModel m;
    m.weights.assign(d, 0.0);
    m.intercept = 0.0;

    double loss = detail::logreg_loss(data.x, data.y, m.weights, m.intercept, spec.logreg_l2);
    for (int it = 0; it < spec.logreg_max_iter; ++it) {
        const Eigen::VectorXd grad =
            detail::logreg_gradient(data.x, data.y, m.weights, m.intercept, spec.logreg_l2);
        if (grad.norm() < spec.logreg_tol) {
            m.converged = true;
            break;
        }
        Eigen::MatrixXd hess = detail::logreg_hessian(data.x, m.weights, m.intercept, spec.logreg_l2);
        // Tiny ridge keeps the solve well-posed when probabilities saturate.
        for (Eigen::Index a = 0; a < hess.rows(); ++a) hess(a, a) += 1e-12;
        const Eigen::VectorXd step = hess.ldlt().solve(grad);

        // Backtracking damping: halve until the penalized loss strictly
        // decreases. Ties are not progress; they are handled below.
        double scale = 1.0;
        bool moved = false;
        for (int half = 0; half < 40; ++half) {
            std::vector<double> w2 = m.weights;
            for (std::size_t f = 0; f < d; ++f)
                w2[f] -= scale * step(static_cast<Eigen::Index>(f));
            const double b2 = m.intercept - scale * step(static_cast<Eigen::Index>(d));
            const double l2loss = detail::logreg_loss(data.x, data.y, w2, b2, spec.logreg_l2);
            if (l2loss < loss) {
                m.weights = std::move(w2);
                m.intercept = b2;
                loss = l2loss;
                moved = true;
                break;
            }
            scale *= 0.5;
        }
        if (!moved) {
            // Near the optimum the loss goes flat to machine precision while
            // the gradient can still shrink by orders of magnitude. Take the
            // full Newton step when it reduces the gradient norm; otherwise
            // the iteration is genuinely stuck.
            std::vector<double> w2 = m.weights;
            for (std::size_t f = 0; f < d; ++f)
                w2[f] -= step(static_cast<Eigen::Index>(f));
            const double b2 = m.intercept - step(static_cast<Eigen::Index>(d));
            const Eigen::VectorXd g2 =
                detail::logreg_gradient(data.x, data.y, w2, b2, spec.logreg_l2);
            if (g2.norm() >= grad.norm()) break;
            m.weights = std::move(w2);
            m.intercept = b2;
            loss = detail::logreg_loss(data.x, data.y, m.weights, m.intercept, spec.logreg_l2);
        }
    }
    if (!m.converged) {
        const Eigen::VectorXd grad =
            detail::logreg_gradient(data.x, data.y, m.weights, m.intercept, spec.logreg_l2);
        m.converged = grad.norm() < spec.logreg_tol;
    }
    return m;
}

}  // namespace leafspec
