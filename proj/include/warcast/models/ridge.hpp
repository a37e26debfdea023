#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "warcast/numerics.hpp"

namespace warcast {

struct RidgeHyperparams {
    double lambda = 1.0;

    bool operator==(const RidgeHyperparams&) const = default;
};

struct RidgeModel {
    double intercept = 0.0;
    std::vector<double> coefficients;

    double predict_row(std::span<const double> x) const {
        double value = intercept;
        for (std::size_t j = 0; j < coefficients.size(); ++j) value += coefficients[j] * x[j];
        return value;
    }
};

// Closed-form minimizer of J(theta) = 1/(2m) [sum (x_i.theta - y_i)^2
// + lambda * sum_{j>=1} theta_j^2], the intercept unpenalized: the normal
// equations (Z'Z + lambda*I')theta = Z'y with Z = [1 X] and I' zeroed at the
// intercept. The 1/(2m) factor cancels, so lambda acts on the penalty term
// exactly as written.
inline RidgeModel fit_ridge(const std::vector<std::vector<double>>& X,
                            const std::vector<double>& y, const RidgeHyperparams& hyper) {
    if (X.empty() || X.size() != y.size())
        throw std::runtime_error("ridge fit needs matching, non-empty X and y");
    const std::size_t m = X.size();
    const std::size_t p = X[0].size();
    const std::size_t n = p + 1;  // intercept column prepended

    DenseMatrix normal(n, n);
    std::vector<double> rhs(n, 0.0);
    for (std::size_t r = 0; r < m; ++r) {
        const auto& row = X[r];
        if (row.size() != p) throw std::runtime_error("ragged feature matrix");
        // z = [1, row...]; accumulate z z' and z*y.
        normal(0, 0) += 1.0;
        rhs[0] += y[r];
        for (std::size_t j = 0; j < p; ++j) {
            normal(0, j + 1) += row[j];
            rhs[j + 1] += row[j] * y[r];
            for (std::size_t k = j; k < p; ++k) normal(j + 1, k + 1) += row[j] * row[k];
        }
    }
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < j; ++k) normal(j, k) = normal(k, j);
    for (std::size_t j = 1; j < n; ++j) normal(j, j) += hyper.lambda;

    RidgeModel model;
    std::vector<double> theta;
    try {
        theta = solve_spd(normal, rhs);
    } catch (const std::runtime_error&) {
        throw std::runtime_error("ridge system is singular; increase lambda");
    }
    model.intercept = theta[0];
    model.coefficients.assign(theta.begin() + 1, theta.end());
    return model;
}

// Analytic gradient of the ridge cost at theta; exposed for verification.
inline std::vector<double> ridge_cost_gradient(const std::vector<std::vector<double>>& X,
                                               const std::vector<double>& y, double lambda,
                                               const RidgeModel& model) {
    const std::size_t m = X.size();
    const std::size_t p = model.coefficients.size();
    std::vector<double> grad(p + 1, 0.0);
    for (std::size_t r = 0; r < m; ++r) {
        const double residual = model.predict_row(X[r]) - y[r];
        grad[0] += residual;
        for (std::size_t j = 0; j < p; ++j) grad[j + 1] += residual * X[r][j];
    }
    for (std::size_t j = 0; j < p; ++j) grad[j + 1] += lambda * model.coefficients[j];
    for (auto& g : grad) g /= static_cast<double>(m);
    return grad;
}

}  // namespace warcast
