#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "warcast/metrics.hpp"
#include "warcast/features.hpp"
#include "warcast/model.hpp"
#include "warcast/random.hpp"

namespace warcast {

// ---------------------------------------------------------------------------
// Train/test partition at player granularity, so every target year of a
// player lands on the same side of the split.

struct SplitSpec {
    double train_fraction = 0.8;
    std::uint64_t seed = 0;
};

struct PlayerSplit {
    std::vector<std::string> train;
    std::vector<std::string> test;
};

inline PlayerSplit split_players(std::vector<std::string> player_ids, const SplitSpec& spec) {
    if (player_ids.size() < 5) throw std::runtime_error("cohort too small to split");
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
        throw std::runtime_error("train fraction must lie strictly between 0 and 1");

    // Canonical order first, so the partition depends only on the id set and
    // the seed, not on the caller's ordering.
    std::sort(player_ids.begin(), player_ids.end());
    auto rng = seeded_stream(spec.seed, "split");
    rng.shuffle(player_ids);

    const auto n_train = static_cast<std::size_t>(
        std::floor(spec.train_fraction * static_cast<double>(player_ids.size())));
    PlayerSplit split;
    split.train.assign(player_ids.begin(), player_ids.begin() + n_train);
    split.test.assign(player_ids.begin() + n_train, player_ids.end());
    return split;
}

// ---------------------------------------------------------------------------
// k-fold assignment over row indices; validation folds are disjoint, cover
// every row, and differ in size by at most one.

struct FoldPair {
    std::vector<std::size_t> train;
    std::vector<std::size_t> validation;
};

inline std::vector<FoldPair> kfold_indices(std::size_t n, std::size_t k, std::uint64_t seed) {
    if (k < 2) throw std::runtime_error("cross validation needs at least two folds");
    if (n < k) throw std::runtime_error("cross validation needs at least one row per fold");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    auto rng = seeded_stream(seed, "folds");
    rng.shuffle(order);

    std::vector<FoldPair> folds(k);
    std::size_t cursor = 0;
    for (std::size_t f = 0; f < k; ++f) {
        const std::size_t size = n / k + (f < n % k ? 1 : 0);
        folds[f].validation.assign(order.begin() + cursor, order.begin() + cursor + size);
        cursor += size;
    }
    for (std::size_t f = 0; f < k; ++f) {
        for (std::size_t g = 0; g < k; ++g)
            if (g != f)
                folds[f].train.insert(folds[f].train.end(), folds[g].validation.begin(),
                                      folds[g].validation.end());
        std::sort(folds[f].train.begin(), folds[f].train.end());
        std::sort(folds[f].validation.begin(), folds[f].validation.end());
    }
    return folds;
}

// ---------------------------------------------------------------------------
// Recursive feature elimination with a fixed ridge scorer.

struct EliminationTrace {
    std::vector<std::string> elimination_order;  // first-removed first
    std::vector<double> scores;                  // mean CV R^2 after each removal
    double initial_score = 0.0;                  // mean CV R^2 with every feature
    std::vector<std::string> retained;           // survivors, in matrix column order
};

// Regularization strength of the elimination ranker; fixed, not tuned.
inline constexpr double kRfeLambda = 2.0;
inline constexpr std::size_t kRfeDefaultRetained = 20;

namespace detail {

inline std::vector<std::vector<double>> take_columns(const std::vector<std::vector<double>>& rows,
                                                     const std::vector<std::size_t>& columns) {
    std::vector<std::vector<double>> out;
    out.reserve(rows.size());
    for (const auto& row : rows) {
        std::vector<double> slim;
        slim.reserve(columns.size());
        for (std::size_t c : columns) slim.push_back(row[c]);
        out.push_back(std::move(slim));
    }
    return out;
}

inline std::vector<double> take_rows(const std::vector<double>& y,
                                     const std::vector<std::size_t>& rows) {
    std::vector<double> out;
    out.reserve(rows.size());
    for (std::size_t r : rows) out.push_back(y[r]);
    return out;
}

template <class RowIndex>
std::vector<std::vector<double>> take_row_subset(const std::vector<std::vector<double>>& rows,
                                                 const std::vector<RowIndex>& keep) {
    std::vector<std::vector<double>> out;
    out.reserve(keep.size());
    for (auto r : keep) out.push_back(rows[r]);
    return out;
}

// Mean validation R^2 of a fixed-lambda ridge over k folds.
inline double rfe_cv_score(const std::vector<std::vector<double>>& rows,
                           const std::vector<double>& y,
                           const std::vector<FoldPair>& folds) {
    double total = 0.0;
    for (const auto& fold : folds) {
        const auto train_x = take_row_subset(rows, fold.train);
        const auto train_y = take_rows(y, fold.train);
        const auto model = fit_ridge(train_x, train_y, {.lambda = kRfeLambda});

        std::vector<double> actual, predicted;
        for (std::size_t r : fold.validation) {
            actual.push_back(y[r]);
            predicted.push_back(model.predict_row(rows[r]));
        }
        total += r_squared(actual, predicted);
    }
    return total / static_cast<double>(folds.size());
}

}  // namespace detail

// Repeatedly fits the fixed ridge ranker on the surviving columns and drops
// the single feature with the smallest absolute coefficient (ties broken by
// lexicographically smallest name) until target_count features remain. The
// matrix is expected to be scaled so coefficient magnitudes are comparable.
inline EliminationTrace rfe_rank(const FeatureMatrix& matrix, const std::vector<double>& y,
                                 std::size_t target_count, std::uint64_t seed = 0) {
    if (target_count < 1) throw std::runtime_error("rfe must retain at least one feature");
    if (matrix.rows.size() != y.size())
        throw std::runtime_error("rfe needs one target per feature row");

    std::vector<std::size_t> active(matrix.feature_names.size());
    std::iota(active.begin(), active.end(), 0);
    const auto folds = kfold_indices(matrix.rows.size(), 3, seed);

    EliminationTrace trace;
    trace.initial_score = detail::rfe_cv_score(
        detail::take_columns(matrix.rows, active), y, folds);

    while (active.size() > target_count) {
        const auto columns = detail::take_columns(matrix.rows, active);
        const auto model = fit_ridge(columns, y, {.lambda = kRfeLambda});

        std::size_t drop = 0;
        for (std::size_t j = 1; j < active.size(); ++j) {
            const double candidate = std::abs(model.coefficients[j]);
            const double incumbent = std::abs(model.coefficients[drop]);
            if (candidate < incumbent ||
                (candidate == incumbent &&
                 matrix.feature_names[active[j]] < matrix.feature_names[active[drop]]))
                drop = j;
        }

        trace.elimination_order.push_back(matrix.feature_names[active[drop]]);
        active.erase(active.begin() + static_cast<std::ptrdiff_t>(drop));
        trace.scores.push_back(
            detail::rfe_cv_score(detail::take_columns(matrix.rows, active), y, folds));
    }

    for (std::size_t c : active) trace.retained.push_back(matrix.feature_names[c]);
    return trace;
}

// Reduces a matrix to the named columns, preserving the requested order.
inline FeatureMatrix select_features(const FeatureMatrix& matrix,
                                     const std::vector<std::string>& names) {
    std::vector<std::size_t> columns;
    for (const auto& name : names) columns.push_back(matrix.find_feature(name));
    FeatureMatrix out;
    out.feature_names = names;
    out.player_ids = matrix.player_ids;
    out.rows = detail::take_columns(matrix.rows, columns);
    for (std::size_t c : columns) out.one_hot.push_back(matrix.one_hot[c]);
    return out;
}

// ---------------------------------------------------------------------------
// Grid search: mean validation R^2 over k folds per grid point.

struct GridPoint {
    Hyperparams hyper;
    std::vector<double> fold_scores;
    double mean_score = -std::numeric_limits<double>::infinity();
    bool failed = false;
};

struct TuneResult {
    std::size_t best_index = 0;
    Hyperparams best;
    std::vector<GridPoint> points;
    std::size_t fold_count = 0;
    std::vector<std::string> failures;  // one line per failed (point, fold)
};

// Evaluates every grid point with the same fold assignment; returns the
// argmax of mean validation R^2, first point winning ties. A grid point
// whose fit or scoring throws is scored -infinity and the run continues;
// only a grid with no scorable point at all is fatal.
inline TuneResult grid_search(const std::vector<Hyperparams>& grid, const FeatureMatrix& matrix,
                              const std::vector<double>& y, std::size_t folds = 3,
                              std::uint64_t seed = 0) {
    if (grid.empty()) throw std::runtime_error("grid search needs at least one grid point");
    if (matrix.rows.size() != y.size())
        throw std::runtime_error("grid search needs one target per feature row");

    const auto fold_pairs = kfold_indices(matrix.rows.size(), folds, seed);
    auto root = seeded_stream(seed, "grid");

    TuneResult result;
    result.fold_count = folds;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        GridPoint point;
        point.hyper = grid[i];
        double total = 0.0;
        for (std::size_t j = 0; j < fold_pairs.size(); ++j) {
            const auto& fold = fold_pairs[j];
            try {
                const auto train_x = detail::take_row_subset(matrix.rows, fold.train);
                const auto train_y = detail::take_rows(y, fold.train);
                auto stream = root.fork(std::to_string(i) + "/" + std::to_string(j));
                const auto fitted =
                    fit_model(train_x, train_y, matrix.feature_names, grid[i], stream, seed);

                std::vector<double> actual, predicted;
                for (std::size_t r : fold.validation) {
                    actual.push_back(y[r]);
                    predicted.push_back(fitted.predict_row(matrix.rows[r]));
                }
                const double score = r_squared(actual, predicted);
                point.fold_scores.push_back(score);
                total += score;
            } catch (const std::exception& error) {
                point.failed = true;
                result.failures.push_back("grid point " + std::to_string(i) + ", fold " +
                                          std::to_string(j) + ": " + error.what());
                break;
            }
        }
        if (!point.failed) point.mean_score = total / static_cast<double>(fold_pairs.size());
        result.points.push_back(std::move(point));
    }

    result.best_index = 0;
    for (std::size_t i = 1; i < result.points.size(); ++i)
        if (result.points[i].mean_score > result.points[result.best_index].mean_score)
            result.best_index = i;
    if (!std::isfinite(result.points[result.best_index].mean_score))
        throw std::runtime_error("every grid point failed to fit");
    result.best = result.points[result.best_index].hyper;
    return result;
}

// ---------------------------------------------------------------------------
// Default grids spanning the documented tuning ranges. Points enumerate in
// row-major order over the parameters as listed per kind, continuous ranges
// log-spaced with exact endpoints.

inline std::vector<double> log_spaced(double lo, double hi, std::size_t count) {
    if (!(lo > 0.0) || !(hi > lo)) throw std::runtime_error("log_spaced needs 0 < lo < hi");
    if (count < 2) throw std::runtime_error("log_spaced needs at least two points");
    std::vector<double> values(count);
    const double step = (std::log(hi) - std::log(lo)) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i)
        values[i] = std::exp(std::log(lo) + step * static_cast<double>(i));
    values.front() = lo;  // pin endpoints against rounding drift
    values.back() = hi;
    return values;
}

// ridge: lambda over 7 log points in [0.01, 100].
// mlp: alpha (5 log points in [0.01, 100]) x layer1 (4..16) x layer2 (0..5).
// forest: max_depth (2..7) x min_split (1..4), 100 trees, bootstrap on.
// svr: epsilon (5 log points in [1e-4, 1e2]) x cost (5 log points in
//      [1e-2, 1e6]) x gamma (5 log points in [1e-5, 1e2]).
inline std::vector<Hyperparams> default_grid(ModelKind kind) {
    std::vector<Hyperparams> grid;
    switch (kind) {
        case ModelKind::ridge:
            for (double lambda : log_spaced(0.01, 100.0, 7))
                grid.push_back(RidgeHyperparams{.lambda = lambda});
            break;
        case ModelKind::mlp:
            for (double alpha : log_spaced(0.01, 100.0, 5))
                for (int layer1 = 4; layer1 <= 16; ++layer1)
                    for (int layer2 = 0; layer2 <= 5; ++layer2)
                        grid.push_back(
                            MlpHyperparams{.alpha = alpha, .layer1 = layer1, .layer2 = layer2});
            break;
        case ModelKind::forest:
            for (int depth = 2; depth <= 7; ++depth)
                for (int min_split = 1; min_split <= 4; ++min_split)
                    grid.push_back(ForestHyperparams{
                        .n_trees = 100, .max_depth = depth, .min_split = min_split});
            break;
        case ModelKind::svr:
            for (double epsilon : log_spaced(1e-4, 1e2, 5))
                for (double cost : log_spaced(1e-2, 1e6, 5))
                    for (double gamma : log_spaced(1e-5, 1e2, 5))
                        grid.push_back(
                            SvrHyperparams{.epsilon = epsilon, .cost = cost, .gamma = gamma});
            break;
    }
    return grid;
}

}  // namespace warcast
