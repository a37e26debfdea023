#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "warcast/lbfgs.hpp"
#include "warcast/random.hpp"

namespace warcast {

struct MlpHyperparams {
    double alpha = 1.0;  // L2 penalty on weights (biases excluded)
    int layer1 = 8;
    int layer2 = 0;  // 0 = single hidden layer

    bool operator==(const MlpHyperparams&) const = default;
};

// Fully-connected net: ReLU hidden layers, linear output. Parameters are
// stored flattened (per layer: row-major weights, then biases) so the
// quasi-Newton minimizer can drive training directly.
struct MlpModel {
    std::vector<int> layer_sizes;  // [inputs, hidden..., 1]
    std::vector<double> parameters;
    bool converged = true;

    static std::size_t parameter_count(const std::vector<int>& sizes) {
        std::size_t count = 0;
        for (std::size_t l = 1; l < sizes.size(); ++l)
            count += static_cast<std::size_t>(sizes[l]) * sizes[l - 1] + sizes[l];
        return count;
    }

    double predict_row(std::span<const double> x) const {
        std::vector<double> activation(x.begin(), x.end());
        std::size_t offset = 0;
        for (std::size_t l = 1; l < layer_sizes.size(); ++l) {
            const int fan_in = layer_sizes[l - 1];
            const int fan_out = layer_sizes[l];
            std::vector<double> next(fan_out);
            for (int o = 0; o < fan_out; ++o) {
                double z = parameters[offset + static_cast<std::size_t>(fan_out) * fan_in + o];
                const double* w = &parameters[offset + static_cast<std::size_t>(o) * fan_in];
                for (int i = 0; i < fan_in; ++i) z += w[i] * activation[i];
                next[o] = (l + 1 < layer_sizes.size() && z < 0.0) ? 0.0 : z;  // ReLU hidden
            }
            activation = std::move(next);
            offset += static_cast<std::size_t>(fan_out) * fan_in + fan_out;
        }
        return activation[0];
    }
};

namespace detail {

// J(w) = 1/(2m) [ sum_i (f(x_i) - y_i)^2 + alpha * sum w^2 ] with biases
// excluded from the penalty; same minimizer as the unscaled form, better
// conditioned. Returns the value and writes the analytic gradient.
class MlpObjective {
public:
    MlpObjective(const std::vector<std::vector<double>>& X, const std::vector<double>& y,
                 std::vector<int> layer_sizes, double alpha)
        : X_(X), y_(y), sizes_(std::move(layer_sizes)), alpha_(alpha) {}

    const std::vector<int>& sizes() const { return sizes_; }

    double operator()(std::span<const double> params, std::span<double> grad) const {
        const std::size_t m = X_.size();
        std::fill(grad.begin(), grad.end(), 0.0);
        const std::size_t depth = sizes_.size() - 1;

        // Per-layer views into the flat parameter vector.
        std::vector<std::size_t> weight_offset(depth), bias_offset(depth);
        {
            std::size_t offset = 0;
            for (std::size_t l = 0; l < depth; ++l) {
                weight_offset[l] = offset;
                bias_offset[l] = offset + static_cast<std::size_t>(sizes_[l + 1]) * sizes_[l];
                offset = bias_offset[l] + sizes_[l + 1];
            }
        }

        double sse = 0.0;
        std::vector<std::vector<double>> activations(depth + 1);
        std::vector<std::vector<double>> preact(depth);
        for (std::size_t r = 0; r < m; ++r) {
            activations[0].assign(X_[r].begin(), X_[r].end());
            for (std::size_t l = 0; l < depth; ++l) {
                const int fan_in = sizes_[l], fan_out = sizes_[l + 1];
                preact[l].assign(fan_out, 0.0);
                activations[l + 1].assign(fan_out, 0.0);
                for (int o = 0; o < fan_out; ++o) {
                    double z = params[bias_offset[l] + o];
                    const double* w = &params[weight_offset[l] + static_cast<std::size_t>(o) * fan_in];
                    for (int i = 0; i < fan_in; ++i) z += w[i] * activations[l][i];
                    preact[l][o] = z;
                    activations[l + 1][o] = (l + 1 < depth && z < 0.0) ? 0.0 : z;
                }
            }
            const double residual = activations[depth][0] - y_[r];
            sse += residual * residual;

            // Backward pass; delta = dJ_sse/dz per layer (without 1/m yet).
            std::vector<double> delta = {residual};
            for (std::size_t l = depth; l-- > 0;) {
                const int fan_in = sizes_[l], fan_out = sizes_[l + 1];
                for (int o = 0; o < fan_out; ++o) {
                    const double d = delta[o];
                    if (d == 0.0) continue;
                    grad[bias_offset[l] + o] += d;
                    double* gw = &grad[weight_offset[l] + static_cast<std::size_t>(o) * fan_in];
                    for (int i = 0; i < fan_in; ++i) gw[i] += d * activations[l][i];
                }
                if (l == 0) break;
                std::vector<double> prev(fan_in, 0.0);
                for (int i = 0; i < fan_in; ++i) {
                    if (preact[l - 1][i] <= 0.0) continue;  // ReLU gate
                    double sum = 0.0;
                    for (int o = 0; o < fan_out; ++o)
                        sum += delta[o] * params[weight_offset[l] + static_cast<std::size_t>(o) * fan_in + i];
                    prev[i] = sum;
                }
                delta = std::move(prev);
            }
        }

        // L2 penalty on weights only.
        double penalty = 0.0;
        for (std::size_t l = 0; l < depth; ++l) {
            const std::size_t count = static_cast<std::size_t>(sizes_[l + 1]) * sizes_[l];
            for (std::size_t k = 0; k < count; ++k) {
                const double w = params[weight_offset[l] + k];
                penalty += w * w;
                grad[weight_offset[l] + k] += alpha_ * w;
            }
        }

        const double scale = 1.0 / static_cast<double>(m);
        for (auto& g : grad) g *= scale;
        return 0.5 * scale * (sse + alpha_ * penalty);
    }

private:
    const std::vector<std::vector<double>>& X_;
    const std::vector<double>& y_;
    std::vector<int> sizes_;
    double alpha_;
};

inline std::vector<int> mlp_layout(std::size_t inputs, const MlpHyperparams& hyper) {
    if (hyper.layer1 < 1) throw std::runtime_error("mlp layer1 must be at least 1");
    if (hyper.layer2 < 0) throw std::runtime_error("mlp layer2 cannot be negative");
    std::vector<int> sizes = {static_cast<int>(inputs), hyper.layer1};
    if (hyper.layer2 > 0) sizes.push_back(hyper.layer2);
    sizes.push_back(1);
    return sizes;
}

// Scaled-uniform (Glorot) weight init from the stream; biases zero.
inline std::vector<double> mlp_init(const std::vector<int>& sizes, RandomStream rng) {
    std::vector<double> params(MlpModel::parameter_count(sizes), 0.0);
    std::size_t offset = 0;
    for (std::size_t l = 1; l < sizes.size(); ++l) {
        const int fan_in = sizes[l - 1], fan_out = sizes[l];
        const double bound = std::sqrt(6.0 / (fan_in + fan_out));
        const std::size_t count = static_cast<std::size_t>(fan_out) * fan_in;
        for (std::size_t k = 0; k < count; ++k) params[offset + k] = rng.uniform(-bound, bound);
        offset += count + fan_out;  // biases stay zero
    }
    return params;
}

}  // namespace detail

inline MlpModel fit_mlp(const std::vector<std::vector<double>>& X, const std::vector<double>& y,
                        const MlpHyperparams& hyper, RandomStream rng,
                        const OptimizerConfig& optimizer = {}) {
    if (X.empty() || X.size() != y.size())
        throw std::runtime_error("mlp fit needs matching, non-empty X and y");
    const auto sizes = detail::mlp_layout(X[0].size(), hyper);
    detail::MlpObjective objective(X, y, sizes, hyper.alpha);
    const auto start = detail::mlp_init(sizes, rng.fork("mlp-init"));

    auto result = lbfgs_minimize(
        [&](std::span<const double> p, std::span<double> g) { return objective(p, g); }, start,
        optimizer);

    MlpModel model;
    model.layer_sizes = sizes;
    model.parameters = std::move(result.x);
    model.converged = result.converged;
    return model;
}

}  // namespace warcast
