#pragma once

#include <cmath>
#include <cstddef>
#include <deque>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "warcast/numerics.hpp"

namespace warcast {

struct OptimizerConfig {
    std::size_t memory_pairs = 10;
    std::size_t max_iterations = 500;
    double gradient_tolerance = 1e-6;
    // Strong Wolfe line-search constants, 0 < c1 < c2 < 1.
    double wolfe_c1 = 1e-4;
    double wolfe_c2 = 0.9;
};

struct MinimizeResult {
    std::vector<double> x;
    double value = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

// Objective evaluates f(x) and writes the gradient into the second argument.
using Objective = std::function<double(std::span<const double>, std::span<double>)>;

namespace detail {

struct LineSearchResult {
    double alpha = 0.0;
    double value = 0.0;
    bool ok = false;
};

// Strong Wolfe line search (bracket + bisection zoom). phi(a) = f(x + a d).
// Non-finite values during probing shrink the step; if the step underflows
// without ever finding a finite value the search aborts.
template <class Phi>
LineSearchResult wolfe_line_search(Phi&& phi, double phi0, double dphi0, double alpha_init,
                                   double c1, double c2) {
    constexpr int kMaxEvals = 60;

    auto zoom = [&](double lo, double phi_lo, double hi) -> LineSearchResult {
        for (int it = 0; it < kMaxEvals; ++it) {
            const double a = 0.5 * (lo + hi);
            double da = 0.0;
            const double fa = phi(a, da);
            if (!std::isfinite(fa) || fa > phi0 + c1 * a * dphi0 || fa >= phi_lo) {
                hi = a;
            } else {
                if (std::fabs(da) <= -c2 * dphi0) return {a, fa, true};
                if (da * (hi - lo) >= 0.0) hi = lo;
                lo = a;
                phi_lo = fa;
            }
            if (std::fabs(hi - lo) < 1e-16 * std::max(1.0, std::fabs(lo))) break;
        }
        // Interval collapsed; lo still satisfies sufficient decrease.
        if (phi_lo < phi0) return {lo, phi_lo, true};
        return {};
    };

    double alpha_prev = 0.0;
    double phi_prev = phi0;
    double alpha = alpha_init;
    int shrink_guard = 0;
    for (int it = 0; it < kMaxEvals; ++it) {
        double da = 0.0;
        const double fa = phi(alpha, da);
        if (!std::isfinite(fa)) {
            alpha = 0.5 * (alpha_prev + alpha);
            if (++shrink_guard >= kMaxEvals || alpha < 1e-300)
                throw std::runtime_error("lbfgs_minimize: objective stayed non-finite during line search");
            continue;
        }
        if (fa > phi0 + c1 * alpha * dphi0 || (it > 0 && fa >= phi_prev))
            return zoom(alpha_prev, phi_prev, alpha);
        if (std::fabs(da) <= -c2 * dphi0) return {alpha, fa, true};
        if (da >= 0.0) return zoom(alpha, fa, alpha_prev);
        alpha_prev = alpha;
        phi_prev = fa;
        alpha *= 2.0;
        if (alpha > 1e10) break;
    }
    return {};
}

}  // namespace detail

// Limited-memory BFGS with strong Wolfe line search. Returns the first
// iterate whose gradient 2-norm is within tolerance, or the best iterate at
// the iteration cap with converged = false.
inline MinimizeResult lbfgs_minimize(const Objective& f, std::vector<double> x0,
                                     const OptimizerConfig& cfg = {}) {
    const std::size_t n = x0.size();
    std::vector<double> x = std::move(x0);
    std::vector<double> grad(n);
    double fx = f(x, grad);
    if (!std::isfinite(fx))
        throw std::runtime_error("lbfgs_minimize: objective is non-finite at the start point");

    MinimizeResult result;
    std::deque<std::pair<std::vector<double>, std::vector<double>>> pairs;  // (s, y)
    std::vector<double> direction(n), x_trial(n), grad_trial(n);

    for (std::size_t iter = 0;; ++iter) {
        const double gnorm = norm2(grad);
        if (gnorm <= cfg.gradient_tolerance) {
            result.converged = true;
            break;
        }
        if (iter >= cfg.max_iterations) break;

        // Two-loop recursion for d = -H g.
        direction.assign(grad.begin(), grad.end());
        std::vector<double> alpha_mem(pairs.size());
        for (std::size_t k = pairs.size(); k > 0; --k) {
            const auto& [s, y] = pairs[k - 1];
            const double rho = 1.0 / dot(s, y);
            const double a = rho * dot(s, direction);
            alpha_mem[k - 1] = a;
            for (std::size_t i = 0; i < n; ++i) direction[i] -= a * y[i];
        }
        if (!pairs.empty()) {
            const auto& [s, y] = pairs.back();
            const double gamma = dot(s, y) / dot(y, y);
            for (auto& d : direction) d *= gamma;
        }
        for (std::size_t k = 0; k < pairs.size(); ++k) {
            const auto& [s, y] = pairs[k];
            const double rho = 1.0 / dot(s, y);
            const double b = rho * dot(y, direction);
            for (std::size_t i = 0; i < n; ++i) direction[i] += (alpha_mem[k] - b) * s[i];
        }
        for (auto& d : direction) d = -d;

        double dphi0 = dot(direction, grad);
        if (dphi0 >= 0.0) {
            // Lost positive definiteness; fall back to steepest descent.
            pairs.clear();
            for (std::size_t i = 0; i < n; ++i) direction[i] = -grad[i];
            dphi0 = -dot(grad, grad);
        }

        auto phi = [&](double a, double& da) {
            for (std::size_t i = 0; i < n; ++i) x_trial[i] = x[i] + a * direction[i];
            const double v = f(x_trial, grad_trial);
            da = std::isfinite(v) ? dot(direction, grad_trial) : 0.0;
            return v;
        };
        const double alpha_init = pairs.empty() ? std::min(1.0, 1.0 / std::max(1.0, gnorm)) : 1.0;
        const auto ls =
            detail::wolfe_line_search(phi, fx, dphi0, alpha_init, cfg.wolfe_c1, cfg.wolfe_c2);
        if (!ls.ok) break;  // no acceptable step; keep best iterate

        for (std::size_t i = 0; i < n; ++i) x_trial[i] = x[i] + ls.alpha * direction[i];
        const double fx_new = f(x_trial, grad_trial);

        std::vector<double> s(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = x_trial[i] - x[i];
            y[i] = grad_trial[i] - grad[i];
        }
        const double sy = dot(s, y);
        if (sy > 1e-10 * norm2(s) * norm2(y)) {
            pairs.emplace_back(std::move(s), std::move(y));
            if (pairs.size() > cfg.memory_pairs) pairs.pop_front();
        }

        x.swap(x_trial);
        grad.swap(grad_trial);
        fx = fx_new;
        result.iterations = iter + 1;
    }

    result.x = std::move(x);
    result.value = fx;
    return result;
}

}  // namespace warcast
