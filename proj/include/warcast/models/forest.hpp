#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "warcast/random.hpp"

namespace warcast {

struct ForestHyperparams {
    int n_trees = 100;
    int max_depth = 5;
    int min_split = 2;  // minimum samples required to split a node
    bool bootstrap = true;

    bool operator==(const ForestHyperparams&) const = default;
};

// Flat node array; leaves have feature = -1 and carry the mean target.
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    double value = 0.0;
    int left = -1;
    int right = -1;
};

struct RegressionTree {
    std::vector<TreeNode> nodes;

    double predict_row(std::span<const double> x) const {
        int node = 0;
        while (nodes[node].feature >= 0)
            node = x[nodes[node].feature] <= nodes[node].threshold ? nodes[node].left
                                                                   : nodes[node].right;
        return nodes[node].value;
    }
};

struct ForestModel {
    std::vector<RegressionTree> trees;

    double predict_row(std::span<const double> x) const {
        double sum = 0.0;
        for (const auto& tree : trees) sum += tree.predict_row(x);
        return sum / static_cast<double>(trees.size());
    }
};

namespace detail {

struct SplitChoice {
    bool found = false;
    int feature = -1;
    double threshold = 0.0;
    double total_sse = 0.0;
};

// Greedy exhaustive search over every feature; candidate thresholds are
// midpoints between consecutive distinct sorted values. Ties break to the
// lowest feature index, then the lowest threshold (strictly-better updates
// on an ascending scan).
inline SplitChoice best_split(const std::vector<std::vector<double>>& X,
                              const std::vector<double>& y,
                              const std::vector<std::size_t>& samples) {
    SplitChoice best;
    const std::size_t n = samples.size();
    const std::size_t width = X[samples[0]].size();
    std::vector<std::size_t> order(n);

    for (std::size_t feature = 0; feature < width; ++feature) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return X[samples[a]][feature] < X[samples[b]][feature];
        });

        double left_sum = 0.0, left_sq = 0.0;
        double right_sum = 0.0, right_sq = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double t = y[samples[k]];
            right_sum += t;
            right_sq += t * t;
        }

        for (std::size_t k = 0; k + 1 < n; ++k) {
            const double t = y[samples[order[k]]];
            left_sum += t;
            left_sq += t * t;
            right_sum -= t;
            right_sq -= t * t;
            const double lo = X[samples[order[k]]][feature];
            const double hi = X[samples[order[k + 1]]][feature];
            if (lo == hi) continue;  // not a boundary between distinct values
            const double nl = static_cast<double>(k + 1);
            const double nr = static_cast<double>(n - k - 1);
            const double sse = (left_sq - left_sum * left_sum / nl) +
                               (right_sq - right_sum * right_sum / nr);
            if (!best.found || sse < best.total_sse) {
                best.found = true;
                best.feature = static_cast<int>(feature);
                best.threshold = lo + (hi - lo) / 2.0;
                best.total_sse = sse;
            }
        }
    }
    return best;
}

inline double mean_of(const std::vector<double>& y, const std::vector<std::size_t>& samples) {
    double sum = 0.0;
    for (std::size_t s : samples) sum += y[s];
    return sum / static_cast<double>(samples.size());
}

inline int grow_tree(RegressionTree& tree, const std::vector<std::vector<double>>& X,
                     const std::vector<double>& y, std::vector<std::size_t> samples, int depth,
                     const ForestHyperparams& hyper) {
    const int index = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes[index].value = mean_of(y, samples);

    const bool pure = std::all_of(samples.begin(), samples.end(),
                                  [&](std::size_t s) { return y[s] == y[samples[0]]; });
    if (depth >= hyper.max_depth || samples.size() < 2 ||
        samples.size() < static_cast<std::size_t>(hyper.min_split) || pure)
        return index;

    const SplitChoice split = best_split(X, y, samples);
    if (!split.found) return index;  // all features constant on this node

    std::vector<std::size_t> left, right;
    for (std::size_t s : samples)
        (X[s][split.feature] <= split.threshold ? left : right).push_back(s);

    tree.nodes[index].feature = split.feature;
    tree.nodes[index].threshold = split.threshold;
    const int left_child = grow_tree(tree, X, y, std::move(left), depth + 1, hyper);
    tree.nodes[index].left = left_child;
    const int right_child = grow_tree(tree, X, y, std::move(right), depth + 1, hyper);
    tree.nodes[index].right = right_child;
    return index;
}

}  // namespace detail

// Bagging ensemble: each tree sees n bootstrap draws (with replacement) from
// its own labeled sub-stream, and splits consider every feature.
inline ForestModel fit_bagging(const std::vector<std::vector<double>>& X,
                               const std::vector<double>& y, const ForestHyperparams& hyper,
                               RandomStream rng) {
    if (X.empty() || X.size() != y.size())
        throw std::runtime_error("bagging fit needs matching, non-empty X and y");
    if (hyper.n_trees < 1) throw std::runtime_error("bagging needs at least one tree");
    const std::size_t n = X.size();

    ForestModel model;
    model.trees.resize(hyper.n_trees);
    for (int t = 0; t < hyper.n_trees; ++t) {
        std::vector<std::size_t> samples(n);
        if (hyper.bootstrap) {
            RandomStream tree_rng = rng.fork("tree/" + std::to_string(t));
            for (auto& s : samples) s = static_cast<std::size_t>(tree_rng.below(n));
        } else {
            std::iota(samples.begin(), samples.end(), 0);
        }
        detail::grow_tree(model.trees[t], X, y, std::move(samples), 0, hyper);
    }
    return model;
}

}  // namespace warcast
