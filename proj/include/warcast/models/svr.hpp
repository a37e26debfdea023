#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace warcast {

struct SvrHyperparams {
    double epsilon = 0.1;  // insensitive-tube half-width
    double cost = 1.0;     // box constraint C
    double gamma = 0.1;    // RBF width

    bool operator==(const SvrHyperparams&) const = default;
};

inline double rbf_kernel(std::span<const double> u, std::span<const double> v, double gamma) {
    double dist = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        const double d = u[j] - v[j];
        dist += d * d;
    }
    return std::exp(-gamma * dist);
}

struct SvrModel {
    double bias = 0.0;
    double gamma = 0.1;
    std::vector<std::vector<double>> support_vectors;
    std::vector<double> dual_coefs;  // alpha_i - alpha_i^* per support vector
    bool converged = true;

    double predict_row(std::span<const double> x) const {
        double value = bias;
        for (std::size_t s = 0; s < support_vectors.size(); ++s)
            value += dual_coefs[s] * rbf_kernel(support_vectors[s], x, gamma);
        return value;
    }
};

namespace detail {

// Epsilon-insensitive dual over 2m box variables a_t (alpha for t < m,
// alpha* for t >= m, sign z_t = +/-1), solved by maximal-violating-pair SMO
// with a second-order partner choice:
//   minimize  1/2 a'Qa + p'a   with Q_st = z_s z_t K(point(s), point(t)),
//             p_t = epsilon - z_t y_point(t)
//   subject to  sum z_t a_t = 0,  0 <= a_t <= C.
class SvrSolver {
public:
    SvrSolver(const std::vector<std::vector<double>>& X, const std::vector<double>& y,
              const SvrHyperparams& hyper)
        : X_(X), y_(y), hyper_(hyper), m_(X.size()) {
        kernel_.assign(m_ * m_, 0.0);
        for (std::size_t i = 0; i < m_; ++i)
            for (std::size_t j = i; j < m_; ++j) {
                const double k = rbf_kernel(X_[i], X_[j], hyper_.gamma);
                kernel_[i * m_ + j] = k;
                kernel_[j * m_ + i] = k;
            }
        a_.assign(2 * m_, 0.0);
        gradient_.resize(2 * m_);
        for (std::size_t t = 0; t < 2 * m_; ++t)
            gradient_[t] = hyper_.epsilon - sign(t) * y_[point(t)];
    }

    // Maximal KKT violation within tolerance?
    bool optimal() const {
        const double up = select_up().second;
        const double low = select_low_bound().second;
        if (!std::isfinite(up) || !std::isfinite(low)) return true;
        return up - low <= kTolerance;
    }

    // One working-pair update. Call only when !optimal().
    void update_once() {
        const auto [i, max_up] = select_up();
        const std::size_t j = select_second(i, max_up);
        if (i == npos || j == npos) return;
        update_pair(i, j);
    }

    double objective() const {
        double quad = 0.0, linear = 0.0;
        for (std::size_t s = 0; s < 2 * m_; ++s) {
            if (a_[s] == 0.0) continue;
            linear += (hyper_.epsilon - sign(s) * y_[point(s)]) * a_[s];
            for (std::size_t t = 0; t < 2 * m_; ++t) {
                if (a_[t] == 0.0) continue;
                quad += a_[s] * a_[t] * q(s, t);
            }
        }
        return 0.5 * quad + linear;
    }

    // bias: mean of (-z G) over free variables; KKT-bound midpoint otherwise.
    double bias() const {
        double sum = 0.0;
        std::size_t free_count = 0;
        for (std::size_t t = 0; t < 2 * m_; ++t) {
            if (a_[t] > 0.0 && a_[t] < hyper_.cost) {
                sum += -sign(t) * gradient_[t];
                ++free_count;
            }
        }
        if (free_count > 0) return sum / static_cast<double>(free_count);
        const double up = select_up().second;
        const double low = select_low_bound().second;
        if (!std::isfinite(up) || !std::isfinite(low)) return 0.0;
        return (up + low) / 2.0;
    }

    std::vector<double> beta() const {
        std::vector<double> coefs(m_);
        for (std::size_t p = 0; p < m_; ++p) coefs[p] = a_[p] - a_[p + m_];
        return coefs;
    }

private:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
    static constexpr double kTolerance = 1e-3;
    static constexpr double kTau = 1e-12;

    std::size_t point(std::size_t t) const { return t < m_ ? t : t - m_; }
    double sign(std::size_t t) const { return t < m_ ? 1.0 : -1.0; }
    double kernel_at(std::size_t s, std::size_t t) const {
        return kernel_[point(s) * m_ + point(t)];
    }
    double q(std::size_t s, std::size_t t) const { return sign(s) * sign(t) * kernel_at(s, t); }

    bool in_up(std::size_t t) const { return sign(t) > 0 ? a_[t] < hyper_.cost : a_[t] > 0.0; }
    bool in_low(std::size_t t) const { return sign(t) > 0 ? a_[t] > 0.0 : a_[t] < hyper_.cost; }

    std::pair<std::size_t, double> select_up() const {
        std::size_t best = npos;
        double value = -std::numeric_limits<double>::infinity();
        for (std::size_t t = 0; t < 2 * m_; ++t) {
            if (!in_up(t)) continue;
            const double v = -sign(t) * gradient_[t];
            if (v > value) {
                value = v;
                best = t;
            }
        }
        return {best, value};
    }

    std::pair<std::size_t, double> select_low_bound() const {
        std::size_t best = npos;
        double value = std::numeric_limits<double>::infinity();
        for (std::size_t t = 0; t < 2 * m_; ++t) {
            if (!in_low(t)) continue;
            const double v = -sign(t) * gradient_[t];
            if (v < value) {
                value = v;
                best = t;
            }
        }
        return {best, value};
    }

    // Second-order choice: among partners still violating against i, pick
    // the largest guaranteed decrease b^2/quad; quad = K_ii + K_jj - 2K_ij.
    std::size_t select_second(std::size_t i, double max_up) const {
        std::size_t best = npos;
        double best_gain = -std::numeric_limits<double>::infinity();
        for (std::size_t t = 0; t < 2 * m_; ++t) {
            if (!in_low(t)) continue;
            const double diff = max_up + sign(t) * gradient_[t];
            if (diff <= 0.0) continue;
            double quad = kernel_at(i, i) + kernel_at(t, t) - 2.0 * kernel_at(i, t);
            if (quad <= 0.0) quad = kTau;
            const double gain = diff * diff / quad;
            if (gain > best_gain) {
                best_gain = gain;
                best = t;
            }
        }
        return best;
    }

    void update_pair(std::size_t i, std::size_t j) {
        const double C = hyper_.cost;
        const double old_i = a_[i], old_j = a_[j];
        if (sign(i) != sign(j)) {
            double quad = q(i, i) + q(j, j) + 2.0 * q(i, j);
            if (quad <= 0.0) quad = kTau;
            const double delta = (-gradient_[i] - gradient_[j]) / quad;
            const double diff = a_[i] - a_[j];
            a_[i] += delta;
            a_[j] += delta;
            if (diff > 0.0) {
                if (a_[j] < 0.0) { a_[j] = 0.0; a_[i] = diff; }
            } else {
                if (a_[i] < 0.0) { a_[i] = 0.0; a_[j] = -diff; }
            }
            if (diff > 0.0) {
                if (a_[i] > C) { a_[i] = C; a_[j] = C - diff; }
            } else {
                if (a_[j] > C) { a_[j] = C; a_[i] = C + diff; }
            }
        } else {
            double quad = q(i, i) + q(j, j) - 2.0 * q(i, j);
            if (quad <= 0.0) quad = kTau;
            const double delta = (gradient_[i] - gradient_[j]) / quad;
            const double sum = a_[i] + a_[j];
            a_[i] -= delta;
            a_[j] += delta;
            if (sum > C) {
                if (a_[i] > C) { a_[i] = C; a_[j] = sum - C; }
            } else {
                if (a_[j] < 0.0) { a_[j] = 0.0; a_[i] = sum; }
            }
            if (sum > C) {
                if (a_[j] > C) { a_[j] = C; a_[i] = sum - C; }
            } else {
                if (a_[i] < 0.0) { a_[i] = 0.0; a_[j] = sum; }
            }
        }
        const double di = a_[i] - old_i, dj = a_[j] - old_j;
        if (di == 0.0 && dj == 0.0) return;
        for (std::size_t t = 0; t < 2 * m_; ++t)
            gradient_[t] += q(t, i) * di + q(t, j) * dj;
    }

    const std::vector<std::vector<double>>& X_;
    const std::vector<double>& y_;
    SvrHyperparams hyper_;
    std::size_t m_;
    std::vector<double> kernel_;  // m x m point kernel
    std::vector<double> a_;       // 2m box variables
    std::vector<double> gradient_;
};

}  // namespace detail

inline SvrModel fit_svr(const std::vector<std::vector<double>>& X, const std::vector<double>& y,
                        const SvrHyperparams& hyper, std::size_t max_pair_updates = 10000) {
    if (X.empty() || X.size() != y.size())
        throw std::runtime_error("svr fit needs matching, non-empty X and y");
    if (hyper.epsilon <= 0 || hyper.cost <= 0 || hyper.gamma <= 0)
        throw std::runtime_error("svr hyperparameters must be positive");

    detail::SvrSolver solver(X, y, hyper);
    for (std::size_t updates = 0; updates < max_pair_updates && !solver.optimal(); ++updates)
        solver.update_once();

    SvrModel model;
    model.gamma = hyper.gamma;
    model.bias = solver.bias();
    model.converged = solver.optimal();
    const auto coefs = solver.beta();
    for (std::size_t p = 0; p < coefs.size(); ++p) {
        if (coefs[p] == 0.0) continue;
        model.support_vectors.push_back(X[p]);
        model.dual_coefs.push_back(coefs[p]);
    }
    return model;
}

}  // namespace warcast
