#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "helpers.hpp"
#include "warcast/model.hpp"

using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

namespace {

struct Problem {
    std::vector<std::vector<double>> X;
    std::vector<double> y;
};

Problem random_problem(warcast::RandomStream rng, std::size_t m, std::size_t p) {
    Problem prob;
    for (std::size_t r = 0; r < m; ++r) {
        std::vector<double> row(p);
        for (auto& v : row) v = rng.normal();
        prob.X.push_back(std::move(row));
        prob.y.push_back(rng.normal());
    }
    return prob;
}

// Steepest descent with exact line search on the ridge cost; independent of
// the closed-form path under test.
std::vector<double> ridge_descent_oracle(const Problem& prob, double lambda) {
    const std::size_t m = prob.X.size();
    const std::size_t p = prob.X[0].size();
    const std::size_t n = p + 1;

    auto gradient_at = [&](const std::vector<double>& theta) {
        std::vector<double> g(n, 0.0);
        for (std::size_t r = 0; r < m; ++r) {
            double fitted = theta[0];
            for (std::size_t j = 0; j < p; ++j) fitted += theta[j + 1] * prob.X[r][j];
            const double residual = fitted - prob.y[r];
            g[0] += residual;
            for (std::size_t j = 0; j < p; ++j) g[j + 1] += residual * prob.X[r][j];
        }
        for (std::size_t j = 1; j < n; ++j) g[j] += lambda * theta[j];
        for (auto& v : g) v /= static_cast<double>(m);
        return g;
    };
    auto hessian_product = [&](const std::vector<double>& d) {
        std::vector<double> hd(n, 0.0);
        for (std::size_t r = 0; r < m; ++r) {
            double zd = d[0];
            for (std::size_t j = 0; j < p; ++j) zd += d[j + 1] * prob.X[r][j];
            hd[0] += zd;
            for (std::size_t j = 0; j < p; ++j) hd[j + 1] += zd * prob.X[r][j];
        }
        for (std::size_t j = 1; j < n; ++j) hd[j] += lambda * d[j];
        for (auto& v : hd) v /= static_cast<double>(m);
        return hd;
    };

    std::vector<double> theta(n, 0.0);
    for (int iteration = 0; iteration < 400000; ++iteration) {
        const auto g = gradient_at(theta);
        double worst = 0.0;
        for (double v : g) worst = std::max(worst, std::abs(v));
        if (worst <= 1e-13) break;
        const auto hg = hessian_product(g);
        double gg = 0.0, ghg = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            gg += g[j] * g[j];
            ghg += g[j] * hg[j];
        }
        if (ghg <= 0.0) break;
        const double step = gg / ghg;
        for (std::size_t j = 0; j < n; ++j) theta[j] -= step * g[j];
    }
    return theta;
}

double slope_norm(const warcast::RidgeModel& model) {
    double total = 0.0;
    for (double c : model.coefficients) total += c * c;
    return total;
}

// Exhaustive depth-1 split search recomputed from scratch: every feature,
// every midpoint between consecutive distinct sorted values, group SSE by
// direct two-pass means, first strictly-better candidate wins.
struct StumpOracle {
    bool found = false;
    int feature = -1;
    double threshold = 0.0;
    double left_mean = 0.0, right_mean = 0.0;
    double sse = std::numeric_limits<double>::infinity();
};

StumpOracle stump_oracle(const Problem& prob) {
    StumpOracle best;
    const std::size_t n = prob.X.size();
    const std::size_t width = prob.X[0].size();
    for (std::size_t feature = 0; feature < width; ++feature) {
        std::vector<double> values;
        for (const auto& row : prob.X) values.push_back(row[feature]);
        std::vector<double> sorted = values;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t k = 0; k + 1 < n; ++k) {
            if (sorted[k] == sorted[k + 1]) continue;
            const double threshold = sorted[k] + (sorted[k + 1] - sorted[k]) / 2.0;
            double left_sum = 0.0, right_sum = 0.0;
            std::size_t left_n = 0, right_n = 0;
            for (std::size_t r = 0; r < n; ++r) {
                if (values[r] <= threshold) {
                    left_sum += prob.y[r];
                    ++left_n;
                } else {
                    right_sum += prob.y[r];
                    ++right_n;
                }
            }
            const double lm = left_sum / static_cast<double>(left_n);
            const double rm = right_sum / static_cast<double>(right_n);
            double sse = 0.0;
            for (std::size_t r = 0; r < n; ++r) {
                const double mean = values[r] <= threshold ? lm : rm;
                sse += (prob.y[r] - mean) * (prob.y[r] - mean);
            }
            if (sse < best.sse) {
                best.found = true;
                best.feature = static_cast<int>(feature);
                best.threshold = threshold;
                best.left_mean = lm;
                best.right_mean = rm;
                best.sse = sse;
            }
        }
    }
    return best;
}

// Tree walk written independently of TreeNode::predict_row.
double walk_tree(const warcast::RegressionTree& tree, std::span<const double> x) {
    std::size_t at = 0;
    while (true) {
        const auto& node = tree.nodes[at];
        if (node.feature < 0) return node.value;
        at = static_cast<std::size_t>(x[static_cast<std::size_t>(node.feature)] <= node.threshold
                                          ? node.left
                                          : node.right);
    }
}

bool same_trees(const warcast::ForestModel& a, const warcast::ForestModel& b) {
    if (a.trees.size() != b.trees.size()) return false;
    for (std::size_t t = 0; t < a.trees.size(); ++t) {
        const auto& na = a.trees[t].nodes;
        const auto& nb = b.trees[t].nodes;
        if (na.size() != nb.size()) return false;
        for (std::size_t k = 0; k < na.size(); ++k)
            if (na[k].feature != nb[k].feature || na[k].threshold != nb[k].threshold ||
                na[k].value != nb[k].value || na[k].left != nb[k].left ||
                na[k].right != nb[k].right)
                return false;
    }
    return true;
}

// Dense projected-gradient (FISTA) solver for the same epsilon-insensitive
// dual: minimize 1/2 a'Qa + p'a over the box [0, C]^{2m} with sum z_t a_t = 0.
struct DualOracle {
    std::vector<double> kernel;  // m x m
    std::vector<double> beta;    // alpha - alpha* per point
    double objective = 0.0;
};

DualOracle svr_dual_oracle(const Problem& prob, const warcast::SvrHyperparams& hyper) {
    const std::size_t m = prob.X.size();
    const std::size_t n = 2 * m;
    DualOracle oracle;
    oracle.kernel.assign(m * m, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            oracle.kernel[i * m + j] = warcast::rbf_kernel(prob.X[i], prob.X[j], hyper.gamma);

    auto sign_of = [&](std::size_t t) { return t < m ? 1.0 : -1.0; };
    auto point_of = [&](std::size_t t) { return t < m ? t : t - m; };
    std::vector<double> linear(n);
    for (std::size_t t = 0; t < n; ++t)
        linear[t] = hyper.epsilon - sign_of(t) * prob.y[point_of(t)];

    auto quadratic = [&](std::size_t s, std::size_t t) {
        return sign_of(s) * sign_of(t) * oracle.kernel[point_of(s) * m + point_of(t)];
    };
    auto value_of = [&](const std::vector<double>& a) {
        double quad = 0.0, lin = 0.0;
        for (std::size_t s = 0; s < n; ++s) {
            lin += linear[s] * a[s];
            for (std::size_t t = 0; t < n; ++t) quad += a[s] * quadratic(s, t) * a[t];
        }
        return 0.5 * quad + lin;
    };
    auto gradient_of = [&](const std::vector<double>& a) {
        std::vector<double> g(linear);
        for (std::size_t s = 0; s < n; ++s)
            for (std::size_t t = 0; t < n; ++t) g[s] += quadratic(s, t) * a[t];
        return g;
    };
    // Exact projection onto box intersect hyperplane: bisection on the shift
    // whose clipped image balances the signed sum (monotone in the shift).
    auto project = [&](std::vector<double> v) {
        double bound = hyper.cost + 1.0;
        for (double value : v) bound = std::max(bound, std::abs(value) + hyper.cost + 1.0);
        auto balance = [&](double shift) {
            double total = 0.0;
            for (std::size_t t = 0; t < n; ++t)
                total += sign_of(t) *
                         std::clamp(v[t] - shift * sign_of(t), 0.0, hyper.cost);
            return total;
        };
        double lo = -bound, hi = bound;
        for (int it = 0; it < 100; ++it) {
            const double mid = (lo + hi) / 2.0;
            (balance(mid) >= 0.0 ? lo : hi) = mid;
        }
        const double shift = (lo + hi) / 2.0;
        for (std::size_t t = 0; t < n; ++t)
            v[t] = std::clamp(v[t] - shift * sign_of(t), 0.0, hyper.cost);
        return v;
    };

    // Gershgorin bound on the largest eigenvalue of the symmetric Q.
    double lipschitz = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
        double row = 0.0;
        for (std::size_t t = 0; t < n; ++t) row += std::abs(quadratic(s, t));
        lipschitz = std::max(lipschitz, row);
    }
    const double step = 1.0 / (lipschitz + 1e-12);

    std::vector<double> x(n, 0.0), momentum = x;
    double t_k = 1.0;
    double best = value_of(x);
    for (int iteration = 0; iteration < 200000; ++iteration) {
        auto g = gradient_of(momentum);
        std::vector<double> shifted(n);
        for (std::size_t s = 0; s < n; ++s) shifted[s] = momentum[s] - step * g[s];
        auto next = project(std::move(shifted));

        const double value = value_of(next);
        if (value > best + 1e-15) {  // adaptive restart on any increase
            t_k = 1.0;
            momentum = x;
            continue;
        }
        best = std::min(best, value);

        const double t_next = (1.0 + std::sqrt(1.0 + 4.0 * t_k * t_k)) / 2.0;
        double drift = 0.0;
        for (std::size_t s = 0; s < n; ++s) {
            momentum[s] = next[s] + (t_k - 1.0) / t_next * (next[s] - x[s]);
            drift = std::max(drift, std::abs(next[s] - x[s]));
        }
        x = std::move(next);
        t_k = t_next;
        if (drift < 1e-14 && iteration > 100) break;
    }

    oracle.beta.assign(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) oracle.beta[i] = x[i] - x[i + m];
    oracle.objective = value_of(x);
    return oracle;
}

// Dual objective expressed through the net coefficients with the minimal
// alpha/alpha* decomposition: 1/2 b'Kb - y'b + epsilon * |b|_1.
double dual_value(const std::vector<double>& kernel, const std::vector<double>& y,
                  double epsilon, const std::vector<double>& beta) {
    const std::size_t m = y.size();
    double quad = 0.0, lin = 0.0, l1 = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        lin += y[i] * beta[i];
        l1 += std::abs(beta[i]);
        for (std::size_t j = 0; j < m; ++j) quad += beta[i] * kernel[i * m + j] * beta[j];
    }
    return 0.5 * quad - lin + epsilon * l1;
}

// Net dual coefficient per training row, recovered by aligning the stored
// support vectors (kept in row order) with the training matrix.
std::vector<double> full_beta(const std::vector<std::vector<double>>& X,
                              const warcast::SvrModel& model) {
    std::vector<double> beta(X.size(), 0.0);
    std::size_t s = 0;
    for (std::size_t p = 0; p < X.size() && s < model.support_vectors.size(); ++p)
        if (X[p] == model.support_vectors[s]) {
            beta[p] = model.dual_coefs[s];
            ++s;
        }
    REQUIRE(s == model.support_vectors.size());
    return beta;
}

warcast::FeatureMatrix named_matrix(const Problem& prob) {
    warcast::FeatureMatrix matrix;
    for (std::size_t j = 0; j < prob.X[0].size(); ++j)
        matrix.feature_names.push_back("f" + std::to_string(j));
    matrix.one_hot.assign(matrix.feature_names.size(), false);
    for (std::size_t r = 0; r < prob.X.size(); ++r) {
        matrix.player_ids.push_back("row" + std::to_string(r));
        matrix.rows.push_back(prob.X[r]);
    }
    return matrix;
}

}  // namespace

TEST_CASE("fit_ridge recovers exact linear data with no penalty") {
    Problem prob;
    for (int i = 0; i < 12; ++i) {
        const double x = 0.5 * i - 2.0;
        prob.X.push_back({x});
        prob.y.push_back(2.0 * x);
    }
    const auto model = warcast::fit_ridge(prob.X, prob.y, {.lambda = 0.0});
    CHECK_THAT(model.coefficients[0], WithinAbs(2.0, 1e-10));
    CHECK_THAT(model.intercept, WithinAbs(0.0, 1e-10));
}

TEST_CASE("fit_ridge with a huge penalty predicts the target mean") {
    auto rng = warcast::seeded_stream(11, "ridge-limit");
    Problem prob = random_problem(rng, 40, 3);
    // Center each feature so the intercept limit is exactly the target mean.
    for (std::size_t j = 0; j < 3; ++j) {
        double mean = 0.0;
        for (const auto& row : prob.X) mean += row[j];
        mean /= static_cast<double>(prob.X.size());
        for (auto& row : prob.X) row[j] -= mean;
    }
    double target_mean = 0.0;
    for (double v : prob.y) target_mean += v;
    target_mean /= static_cast<double>(prob.y.size());

    const auto model = warcast::fit_ridge(prob.X, prob.y, {.lambda = 1e9});
    for (double c : model.coefficients) CHECK_THAT(c, WithinAbs(0.0, 1e-6));
    CHECK_THAT(model.intercept, WithinAbs(target_mean, 1e-6));
}

TEST_CASE("fit_ridge matches a gradient descent oracle on a random problem") {
    auto rng = warcast::seeded_stream(29, "ridge-oracle");
    const Problem prob = random_problem(rng, 30, 5);
    const double lambda = 0.7;

    const auto oracle = ridge_descent_oracle(prob, lambda);
    const auto model = warcast::fit_ridge(prob.X, prob.y, {.lambda = lambda});

    CHECK_THAT(model.intercept, WithinAbs(oracle[0], 1e-6));
    for (std::size_t j = 0; j < 5; ++j)
        CHECK_THAT(model.coefficients[j], WithinAbs(oracle[j + 1], 1e-6));
}

TEST_CASE("ridge solutions zero the cost gradient and shrink with lambda") {
    auto rng = warcast::seeded_stream(41, "ridge-path");
    const Problem prob = random_problem(rng, 25, 4);

    double previous_norm = std::numeric_limits<double>::infinity();
    for (double lambda : {0.0, 0.01, 0.1, 1.0, 10.0, 100.0, 1000.0}) {
        const auto model = warcast::fit_ridge(prob.X, prob.y, {.lambda = lambda});
        const auto grad = warcast::ridge_cost_gradient(prob.X, prob.y, lambda, model);
        for (double g : grad) CHECK_THAT(g, WithinAbs(0.0, 1e-8));

        const double norm = slope_norm(model);
        CHECK(norm <= previous_norm + 1e-12);
        previous_norm = norm;
    }
}

TEST_CASE("fit_ridge reports singular systems") {
    Problem prob;
    for (int i = 0; i < 6; ++i) {
        const double x = 1.0 * i;
        prob.X.push_back({x, x});  // perfectly collinear columns
        prob.y.push_back(3.0 * x);
    }
    CHECK_THROWS_WITH(warcast::fit_ridge(prob.X, prob.y, {.lambda = 0.0}),
                      ContainsSubstring("singular; increase lambda"));
}

TEST_CASE("mlp backpropagation matches finite differences") {
    auto rng = warcast::seeded_stream(57, "mlp-grad");
    const Problem prob = random_problem(rng, 12, 3);

    const std::pair<int, int> architectures[] = {{4, 0}, {9, 3}, {16, 5}};
    for (const auto& [layer1, layer2] : architectures) {
        const auto sizes =
            warcast::detail::mlp_layout(3, {.alpha = 0.37, .layer1 = layer1, .layer2 = layer2});
        warcast::detail::MlpObjective objective(prob.X, prob.y, sizes, 0.37);
        const std::size_t count = warcast::MlpModel::parameter_count(sizes);

        for (int point = 0; point < 10; ++point) {
            std::vector<double> params(count);
            for (auto& v : params) v = 0.8 * rng.normal();

            std::vector<double> analytic(count);
            objective(params, analytic);

            std::vector<double> scratch(count);
            const auto numeric = warcast::finite_difference_gradient(
                [&](std::span<const double> p) { return objective(p, scratch); }, params, 1e-6);

            double diff = 0.0, scale = 0.0;
            for (std::size_t k = 0; k < count; ++k) {
                diff += (analytic[k] - numeric[k]) * (analytic[k] - numeric[k]);
                scale += numeric[k] * numeric[k];
            }
            CHECK(std::sqrt(diff) <= 1e-4 * std::max(std::sqrt(scale), 1e-12));
        }
    }
}

TEST_CASE("mlp layout honors the single hidden layer setting") {
    auto rng = warcast::seeded_stream(3, "mlp-layout");
    const Problem prob = random_problem(rng, 8, 3);
    warcast::OptimizerConfig quick;
    quick.max_iterations = 5;

    const auto single = warcast::fit_mlp(prob.X, prob.y, {.alpha = 1.0, .layer1 = 5, .layer2 = 0},
                                         rng.fork("fit1"), quick);
    CHECK(single.layer_sizes == std::vector<int>{3, 5, 1});
    // 3*5 weights + 5 biases, then 5*1 weights + 1 bias.
    CHECK(single.parameters.size() == 26);
    CHECK(warcast::MlpModel::parameter_count(single.layer_sizes) == 26);

    const auto stacked = warcast::fit_mlp(prob.X, prob.y, {.alpha = 1.0, .layer1 = 5, .layer2 = 2},
                                          rng.fork("fit2"), quick);
    CHECK(stacked.layer_sizes == std::vector<int>{3, 5, 2, 1});
    CHECK(stacked.parameters.size() == 35);
}

TEST_CASE("mlp learns a representable ramp") {
    auto rng = warcast::seeded_stream(8, "mlp-ramp");
    Problem prob;
    for (int i = 0; i < 60; ++i) {
        const double x = rng.uniform(-2.0, 2.0);
        prob.X.push_back({x});
        prob.y.push_back(std::max(0.0, x));
    }

    warcast::OptimizerConfig config;
    config.max_iterations = 2000;
    config.gradient_tolerance = 1e-12;
    const warcast::MlpHyperparams hyper{.alpha = 1e-6, .layer1 = 4, .layer2 = 0};
    const auto model = warcast::fit_mlp(prob.X, prob.y, hyper, rng.fork("train"), config);

    double mse = 0.0;
    for (std::size_t r = 0; r < prob.X.size(); ++r) {
        const double residual = model.predict_row(prob.X[r]) - prob.y[r];
        mse += residual * residual;
    }
    mse /= static_cast<double>(prob.X.size());
    CHECK(mse <= 1e-3);

    const auto again = warcast::fit_mlp(prob.X, prob.y, hyper, rng.fork("train"), config);
    CHECK(again.parameters == model.parameters);
}

TEST_CASE("bagging memorizes distinct training data with one unrestricted tree") {
    auto rng = warcast::seeded_stream(91, "forest-memorize");
    const Problem prob = random_problem(rng, 32, 3);

    warcast::ForestHyperparams hyper;
    hyper.n_trees = 1;
    hyper.bootstrap = false;
    hyper.max_depth = 10;  // >= log2(32)
    hyper.min_split = 1;
    const auto model = warcast::fit_bagging(prob.X, prob.y, hyper, rng.fork("fit"));

    for (std::size_t r = 0; r < prob.X.size(); ++r)
        CHECK(model.predict_row(prob.X[r]) == prob.y[r]);
}

TEST_CASE("bagging predictions stay inside the per-tree envelope") {
    auto rng = warcast::seeded_stream(92, "forest-envelope");
    const Problem prob = random_problem(rng, 40, 4);

    warcast::ForestHyperparams hyper;
    hyper.n_trees = 15;
    hyper.max_depth = 4;
    const auto model = warcast::fit_bagging(prob.X, prob.y, hyper, rng.fork("fit"));
    REQUIRE(model.trees.size() == 15);

    for (int probe = 0; probe < 50; ++probe) {
        std::vector<double> x(4);
        for (auto& v : x) v = rng.normal();
        double lowest = std::numeric_limits<double>::infinity();
        double highest = -lowest;
        for (const auto& tree : model.trees) {
            const double value = walk_tree(tree, x);
            lowest = std::min(lowest, value);
            highest = std::max(highest, value);
        }
        const double combined = model.predict_row(x);
        CHECK(combined >= lowest - 1e-12);
        CHECK(combined <= highest + 1e-12);
    }
}

TEST_CASE("a depth one tree recovers the step function split") {
    auto rng = warcast::seeded_stream(93, "forest-step");
    Problem prob;
    for (int i = 0; i < 40; ++i) {
        const double x = rng.uniform(-1.0, 1.0);
        prob.X.push_back({x});
        prob.y.push_back(x > 0.0 ? 1.0 : 0.0);
    }

    warcast::ForestHyperparams hyper;
    hyper.n_trees = 1;
    hyper.bootstrap = false;
    hyper.max_depth = 1;
    const auto model = warcast::fit_bagging(prob.X, prob.y, hyper, rng.fork("fit"));

    const auto oracle = stump_oracle(prob);
    REQUIRE(oracle.found);
    const auto& root = model.trees[0].nodes[0];
    CHECK(root.feature == oracle.feature);
    CHECK(root.threshold == oracle.threshold);
    CHECK_THAT(root.threshold, WithinAbs(0.0, 0.2));
    CHECK(model.trees[0].nodes[root.left].value == oracle.left_mean);
    CHECK(model.trees[0].nodes[root.right].value == oracle.right_mean);
    CHECK(oracle.left_mean == 0.0);
    CHECK(oracle.right_mean == 1.0);
}

TEST_CASE("depth one splits match the exhaustive oracle on random data") {
    for (std::uint64_t seed : {5ULL, 6ULL, 7ULL, 8ULL}) {
        auto rng = warcast::seeded_stream(seed, "forest-stump");
        const Problem prob = random_problem(rng, 25, 3);

        warcast::ForestHyperparams hyper;
        hyper.n_trees = 1;
        hyper.bootstrap = false;
        hyper.max_depth = 1;
        const auto model = warcast::fit_bagging(prob.X, prob.y, hyper, rng.fork("fit"));

        const auto oracle = stump_oracle(prob);
        const auto& root = model.trees[0].nodes[0];
        REQUIRE(oracle.found);
        CHECK(root.feature == oracle.feature);
        CHECK(root.threshold == oracle.threshold);
        CHECK_THAT(model.trees[0].nodes[root.left].value, WithinAbs(oracle.left_mean, 1e-12));
        CHECK_THAT(model.trees[0].nodes[root.right].value, WithinAbs(oracle.right_mean, 1e-12));
    }
}

TEST_CASE("bagging refits are bit identical with a shared seed") {
    auto rng = warcast::seeded_stream(94, "forest-refit");
    const Problem prob = random_problem(rng, 30, 3);

    warcast::ForestHyperparams hyper;
    hyper.n_trees = 8;
    hyper.max_depth = 4;

    SECTION("bootstrap off") {
        hyper.bootstrap = false;
        const auto first = warcast::fit_bagging(prob.X, prob.y, hyper, rng.fork("fit"));
        const auto second = warcast::fit_bagging(prob.X, prob.y, hyper, rng.fork("other-label"));
        CHECK(same_trees(first, second));  // no randomness consumed at all
    }
    SECTION("bootstrap on, same stream") {
        const auto first = warcast::fit_bagging(prob.X, prob.y, hyper, rng.fork("fit"));
        const auto second = warcast::fit_bagging(prob.X, prob.y, hyper, rng.fork("fit"));
        CHECK(same_trees(first, second));
        const auto other = warcast::fit_bagging(prob.X, prob.y, hyper, rng.fork("fit2"));
        CHECK_FALSE(same_trees(first, other));
    }
}

TEST_CASE("bagging honors the minimum split size") {
    auto rng = warcast::seeded_stream(95, "forest-minsplit");
    const Problem prob = random_problem(rng, 12, 2);

    warcast::ForestHyperparams hyper;
    hyper.n_trees = 1;
    hyper.bootstrap = false;
    hyper.max_depth = 6;
    hyper.min_split = 13;  // larger than any node
    const auto model = warcast::fit_bagging(prob.X, prob.y, hyper, rng.fork("fit"));

    REQUIRE(model.trees[0].nodes.size() == 1);
    double mean = 0.0;
    for (double v : prob.y) mean += v;
    mean /= static_cast<double>(prob.y.size());
    CHECK_THAT(model.trees[0].nodes[0].value, WithinAbs(mean, 1e-12));
}

TEST_CASE("fit_svr returns the flat tube solution") {
    auto rng = warcast::seeded_stream(71, "svr-flat");
    Problem prob;
    for (int i = 0; i < 8; ++i) {
        prob.X.push_back({rng.normal(), rng.normal()});
        prob.y.push_back(1.5);
    }

    const warcast::SvrHyperparams hyper{.epsilon = 0.5, .cost = 2.0, .gamma = 0.3};
    const auto model = warcast::fit_svr(prob.X, prob.y, hyper);

    CHECK(model.support_vectors.empty());
    CHECK(model.dual_coefs.empty());
    CHECK_THAT(model.bias, WithinAbs(1.5, 1e-12));
    CHECK(model.converged);
    CHECK_THAT(model.predict_row(prob.X[0]), WithinAbs(1.5, 1e-12));
    const std::vector<double> novel = {3.0, -4.0};
    CHECK_THAT(model.predict_row(novel), WithinAbs(1.5, 1e-12));
}

TEST_CASE("fit_svr agrees with a projected gradient dual oracle") {
    Problem prob;
    prob.X = {{0.0, 0.2}, {0.5, -0.1}, {1.0, 0.4}, {1.5, -0.5}, {2.0, 0.1}, {2.5, 0.3}};
    prob.y = {0.1, 0.9, 1.4, 0.6, -0.4, -1.1};
    const warcast::SvrHyperparams hyper{.epsilon = 0.1, .cost = 2.0, .gamma = 0.5};

    const auto oracle = svr_dual_oracle(prob, hyper);
    const auto model = warcast::fit_svr(prob.X, prob.y, hyper);
    REQUIRE(model.converged);

    const auto beta = full_beta(prob.X, model);
    const double fitted_value = dual_value(oracle.kernel, prob.y, hyper.epsilon, beta);
    const double oracle_value = dual_value(oracle.kernel, prob.y, hyper.epsilon, oracle.beta);
    CHECK_THAT(fitted_value, WithinAbs(oracle_value, 1e-4));
}

TEST_CASE("the rbf kernel is one at zero distance") {
    auto rng = warcast::seeded_stream(72, "svr-kernel");
    for (double gamma : {1e-5, 0.1, 1.0, 50.0}) {
        std::vector<double> x(5);
        for (auto& v : x) v = rng.normal(0.0, 3.0);
        CHECK(warcast::rbf_kernel(x, x, gamma) == 1.0);
    }
}

TEST_CASE("svr solutions satisfy the kkt conditions") {
    auto rng = warcast::seeded_stream(73, "svr-kkt");
    Problem prob;
    for (int i = 0; i < 14; ++i) {
        const double x0 = rng.uniform(-2.0, 2.0);
        const double x1 = rng.uniform(-2.0, 2.0);
        prob.X.push_back({x0, x1});
        prob.y.push_back(std::sin(x0) + 0.3 * x1 + rng.normal(0.0, 0.4));
    }

    const warcast::SvrHyperparams hyper{.epsilon = 0.15, .cost = 1.5, .gamma = 0.7};
    const auto model = warcast::fit_svr(prob.X, prob.y, hyper);
    REQUIRE(model.converged);
    REQUIRE_FALSE(model.support_vectors.empty());

    const auto beta = full_beta(prob.X, model);
    const double tolerance = 1e-3;

    double coefficient_sum = 0.0;
    for (double b : beta) {
        coefficient_sum += b;
        CHECK(std::abs(b) <= hyper.cost + 1e-12);
    }
    CHECK_THAT(coefficient_sum, WithinAbs(0.0, 1e-9));

    std::size_t at_bound = 0;
    for (std::size_t i = 0; i < prob.X.size(); ++i) {
        const double slack = std::abs(prob.y[i] - model.predict_row(prob.X[i]));
        if (slack < hyper.epsilon - tolerance) CHECK(beta[i] == 0.0);
        if (std::abs(beta[i]) >= hyper.cost - 1e-9) {
            CHECK(slack >= hyper.epsilon - tolerance);
            ++at_bound;
        }
        if (beta[i] != 0.0 && std::abs(beta[i]) < hyper.cost - 1e-6)
            CHECK_THAT(slack, WithinAbs(hyper.epsilon, tolerance));
    }
    INFO("support vectors at the box bound: " << at_bound);
    CHECK(at_bound >= 1);  // the noisy fixture saturates at least one point
}

TEST_CASE("svr reports hitting the update cap") {
    auto rng = warcast::seeded_stream(74, "svr-cap");
    Problem prob;
    for (int i = 0; i < 10; ++i) {
        prob.X.push_back({rng.uniform(-1.0, 1.0)});
        prob.y.push_back(rng.uniform(-2.0, 2.0));
    }
    const warcast::SvrHyperparams hyper{.epsilon = 0.05, .cost = 5.0, .gamma = 1.0};

    const auto capped = warcast::fit_svr(prob.X, prob.y, hyper, 1);
    CHECK_FALSE(capped.converged);
    const auto full = warcast::fit_svr(prob.X, prob.y, hyper);
    CHECK(full.converged);
}

TEST_CASE("predict applies each fitted model kind") {
    SECTION("ridge affine evaluation") {
        warcast::RidgeModel model;
        model.intercept = 1.0;
        model.coefficients = {2.0};
        const std::vector<double> x = {3.0};
        CHECK(model.predict_row(x) == 7.0);
    }
    SECTION("forest prediction is the mean of per-tree walks") {
        auto rng = warcast::seeded_stream(75, "predict-forest");
        const Problem prob = random_problem(rng, 30, 3);
        warcast::ForestHyperparams hyper;
        hyper.n_trees = 7;
        hyper.max_depth = 3;
        const auto model = warcast::fit_bagging(prob.X, prob.y, hyper, rng.fork("fit"));

        for (int probe = 0; probe < 20; ++probe) {
            std::vector<double> x(3);
            for (auto& v : x) v = rng.normal();
            double total = 0.0;
            for (const auto& tree : model.trees) total += walk_tree(tree, x);
            CHECK_THAT(model.predict_row(x), WithinAbs(total / 7.0, 1e-12));
        }
    }
    SECTION("svr matches a hand kernel sum on its own support vector") {
        auto rng = warcast::seeded_stream(76, "predict-svr");
        Problem prob;
        for (int i = 0; i < 12; ++i) {
            prob.X.push_back({rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)});
            prob.y.push_back(prob.X.back()[0] * prob.X.back()[0] - prob.X.back()[1]);
        }
        const warcast::SvrHyperparams hyper{.epsilon = 0.1, .cost = 3.0, .gamma = 0.4};
        const auto model = warcast::fit_svr(prob.X, prob.y, hyper);
        REQUIRE_FALSE(model.support_vectors.empty());

        const auto& probe = model.support_vectors[0];
        double by_hand = model.bias;
        for (std::size_t s = 0; s < model.support_vectors.size(); ++s) {
            double dist = 0.0;
            for (std::size_t j = 0; j < probe.size(); ++j) {
                const double d = model.support_vectors[s][j] - probe[j];
                dist += d * d;
            }
            by_hand += model.dual_coefs[s] * std::exp(-hyper.gamma * dist);
        }
        CHECK_THAT(model.predict_row(probe), WithinAbs(by_hand, 1e-12));
    }
}

TEST_CASE("fit_model dispatches on the hyperparameter variant") {
    auto rng = warcast::seeded_stream(77, "dispatch");
    const Problem prob = random_problem(rng, 20, 3);
    const auto matrix = named_matrix(prob);

    const warcast::Hyperparams grid[] = {
        warcast::RidgeHyperparams{.lambda = 2.0},
        warcast::MlpHyperparams{.alpha = 0.5, .layer1 = 4, .layer2 = 0},
        warcast::ForestHyperparams{.n_trees = 3, .max_depth = 3},
        warcast::SvrHyperparams{.epsilon = 0.2, .cost = 1.0, .gamma = 0.5},
    };
    const warcast::ModelKind expected[] = {warcast::ModelKind::ridge, warcast::ModelKind::mlp,
                                           warcast::ModelKind::forest, warcast::ModelKind::svr};

    for (std::size_t i = 0; i < 4; ++i) {
        const auto fitted = warcast::fit_model(matrix, prob.y, grid[i], rng.fork("fit"), 99);
        CHECK(fitted.kind == expected[i]);
        CHECK(fitted.seed == 99);
        CHECK(fitted.feature_names == matrix.feature_names);
        CHECK(warcast::kind_of(fitted.hyper) == expected[i]);
        const auto predictions = warcast::predict(fitted, matrix);
        REQUIRE(predictions.size() == prob.X.size());
        for (double v : predictions) CHECK(std::isfinite(v));
    }
}

TEST_CASE("predict validates feature names") {
    auto rng = warcast::seeded_stream(78, "names");
    const Problem prob = random_problem(rng, 10, 2);
    const auto matrix = named_matrix(prob);
    const auto fitted = warcast::fit_model(matrix, prob.y, warcast::RidgeHyperparams{.lambda = 1.0},
                                           rng.fork("fit"));

    warcast::FeatureMatrix renamed = matrix;
    renamed.feature_names[1] = "other";
    CHECK_THROWS_WITH(warcast::predict(fitted, renamed),
                      ContainsSubstring("feature names do not match"));
}

TEST_CASE("models round trip through the text format") {
    auto rng = warcast::seeded_stream(79, "roundtrip");
    const Problem prob = random_problem(rng, 18, 3);
    const auto matrix = named_matrix(prob);

    const warcast::Hyperparams grid[] = {
        warcast::RidgeHyperparams{.lambda = 0.25},
        warcast::MlpHyperparams{.alpha = 0.1, .layer1 = 4, .layer2 = 2},
        warcast::ForestHyperparams{.n_trees = 4, .max_depth = 3, .min_split = 2},
        warcast::SvrHyperparams{.epsilon = 0.15, .cost = 2.0, .gamma = 0.8},
    };

    testutil::TempDir dir;
    Problem probe_data = random_problem(rng.fork("probe"), 6, 3);
    const auto probes = named_matrix(probe_data);

    for (const auto& hyper : grid) {
        const auto fitted = warcast::fit_model(matrix, prob.y, hyper, rng.fork("fit"), 1234);
        const std::string path =
            dir.file(std::string(warcast::to_string(fitted.kind)) + ".model");
        warcast::save_model(fitted, path);

        const std::string text = testutil::slurp(path);
        CHECK(text.starts_with("warcast-model v1\n"));

        const auto loaded = warcast::load_model(path);
        CHECK(loaded.kind == fitted.kind);
        CHECK(loaded.seed == 1234);
        CHECK(loaded.feature_names == matrix.feature_names);
        CHECK(loaded.converged() == fitted.converged());
        CHECK(warcast::predict(loaded, probes) == warcast::predict(fitted, probes));
    }
}

TEST_CASE("load_model rejects malformed files") {
    testutil::TempDir dir;
    const auto path = testutil::write_file(dir.file("bad.model"), "warcast-model v2\nkind ridge\n");
    CHECK_THROWS_WITH(warcast::load_model(path), ContainsSubstring("expected 'v1'"));
    const auto truncated = testutil::write_file(dir.file("cut.model"), "warcast-model v1\nkind ");
    CHECK_THROWS_WITH(warcast::load_model(truncated), ContainsSubstring("model file"));
}
