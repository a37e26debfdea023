#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "warcast/baseline.hpp"
#include "warcast/cohort.hpp"
#include "warcast/features.hpp"
#include "warcast/metrics.hpp"
#include "warcast/model.hpp"
#include "warcast/selection.hpp"
#include "warcast/svg.hpp"

namespace warcast {

struct EvaluationEntry {
    CareerKind cohort;
    std::string model;  // model kind name, or "delta" for the baseline
    int target_season = 0;
    double r2 = 0.0;
    std::size_t n_test = 0;
};

struct PredictionRow {
    std::string player_id;
    int target_season = 0;
    double actual = 0.0;
    std::vector<double> predicted;  // aligned with PredictionTable::models
};

// Per-player forecasts for every target season, one column per model plus the
// delta-method baseline.
struct PredictionTable {
    std::vector<std::string> models;
    std::vector<PredictionRow> rows;
};

struct EvaluationReport {
    std::vector<EvaluationEntry> entries;
    PredictionTable predictions;
    std::uint64_t seed = 0;
    std::string config_digest;
};

// Scores every fitted model and the delta-method baseline on the held-out
// test players, one R-squared per (model, target season). Models may carry
// different retained feature subsets; each prediction selects the columns the
// model was fitted on. Targets follow the same missing-season policy used in
// training, so retired seasons count against the forecasts.
template <class SeasonT>
EvaluationReport evaluate_models(const std::map<int, std::vector<FittedModel>>& models_by_year,
                                 const AgingCurve& baseline,
                                 const std::vector<Career<SeasonT>>& test_careers,
                                 const FeatureMatrix& test_features, MissingPolicy policy,
                                 std::uint64_t seed = 0, const std::string& config_digest = "",
                                 std::vector<int> years = {}) {
    if (test_careers.empty()) throw std::runtime_error("cannot evaluate on an empty test set");
    if (years.empty())
        for (int year = kSeasonBoundary + 1; year <= kSeasonBoundary + 5; ++year)
            years.push_back(year);
    if (test_features.rows.size() != test_careers.size())
        throw std::runtime_error("test features and test careers are misaligned");
    for (std::size_t i = 0; i < test_careers.size(); ++i)
        if (test_features.player_ids.at(i) != test_careers[i].player_id)
            throw std::runtime_error("test features and test careers are misaligned");

    EvaluationReport report;
    report.seed = seed;
    report.config_digest = config_digest;
    const CareerKind cohort = test_careers.front().kind;
    const std::size_t n_test = test_careers.size();

    for (const int year : years) {
        const auto found = models_by_year.find(year);
        if (found == models_by_year.end() || found->second.empty())
            throw std::runtime_error("no fitted models for target season " +
                                     std::to_string(year));
        const auto& models = found->second;

        const TargetVector targets = build_targets(test_careers, year, policy);

        if (report.predictions.models.empty()) {
            for (const auto& model : models)
                report.predictions.models.push_back(std::string(to_string(model.kind)));
            report.predictions.models.push_back("delta");
        } else if (report.predictions.models.size() != models.size() + 1) {
            throw std::runtime_error("every target season needs the same set of models");
        }

        std::vector<std::vector<double>> columns;
        for (std::size_t m = 0; m < models.size(); ++m) {
            if (std::string(to_string(models[m].kind)) != report.predictions.models[m])
                throw std::runtime_error("every target season needs the same set of models");
            const FeatureMatrix selected = select_features(test_features, models[m].feature_names);
            columns.push_back(predict(models[m], selected));
        }
        std::vector<double> delta_column;
        delta_column.reserve(n_test);
        for (const auto& career : test_careers)
            delta_column.push_back(predict_delta_method(career, baseline, year).war);
        columns.push_back(std::move(delta_column));

        for (std::size_t m = 0; m < columns.size(); ++m)
            report.entries.push_back({.cohort = cohort,
                                      .model = report.predictions.models[m],
                                      .target_season = year,
                                      .r2 = r_squared(targets.values, columns[m]),
                                      .n_test = n_test});

        for (std::size_t i = 0; i < n_test; ++i) {
            PredictionRow row{.player_id = test_careers[i].player_id,
                              .target_season = year,
                              .actual = targets.values[i],
                              .predicted = {}};
            for (const auto& column : columns) row.predicted.push_back(column[i]);
            report.predictions.rows.push_back(std::move(row));
        }
    }
    return report;
}

inline void write_metrics_csv(const EvaluationReport& report, const std::string& path) {
    CsvWriter writer(path);
    writer.comment("seed: " + std::to_string(report.seed));
    if (!report.config_digest.empty()) writer.comment("config: " + report.config_digest);
    writer.row({"cohort", "model", "target_season", "r2", "n_test"});
    for (const auto& entry : report.entries)
        writer.row({std::string(to_string(entry.cohort)), entry.model,
                    std::to_string(entry.target_season), format_double(entry.r2),
                    std::to_string(entry.n_test)});
}

inline void write_predictions_csv(const PredictionTable& table, const std::string& path) {
    CsvWriter writer(path);
    std::vector<std::string> header = {"player_id", "target_season", "actual"};
    for (const auto& model : table.models) header.push_back(model);
    writer.row(header);
    for (const auto& row : table.rows) {
        std::vector<std::string> cells = {row.player_id, std::to_string(row.target_season),
                                          format_double(row.actual)};
        for (double value : row.predicted) cells.push_back(format_double(value));
        writer.row(cells);
    }
}

// Pools every model's predictions for one cohort across all five target
// seasons into a single predicted-vs-actual heatmap per model.
inline void render_report_heatmaps(const EvaluationReport& report, const std::string& directory) {
    if (report.entries.empty()) throw std::runtime_error("cannot render an empty report");
    const auto cohort = std::string(to_string(report.entries.front().cohort));
    for (std::size_t m = 0; m < report.predictions.models.size(); ++m) {
        std::vector<double> actual, predicted;
        for (const auto& row : report.predictions.rows) {
            actual.push_back(row.actual);
            predicted.push_back(row.predicted[m]);
        }
        HeatmapOptions options;
        options.title = cohort + ", " + report.predictions.models[m] + ": predicted vs actual";
        render_heatmap(actual, predicted, options,
                       directory + "/heatmap_" + cohort + "_" + report.predictions.models[m] +
                           ".svg");
    }
}

// Score-versus-retained-count table and line figure for one elimination
// trace. Rows run from one elimination (all but one feature kept) down to the
// final retained set, so the table has exactly one row per removed feature;
// the all-features score rides along as a comment and as the first point of
// the figure.
inline void rfe_curve_report(const EliminationTrace& trace, const std::string& csv_path,
                             const std::string& svg_path) {
    const std::size_t total = trace.elimination_order.size() + trace.retained.size();

    CsvWriter writer(csv_path);
    writer.comment("score with all " + std::to_string(total) +
                   " features: " + format_double(trace.initial_score));
    writer.row({"retained", "cv_r2"});
    for (std::size_t step = 0; step < trace.scores.size(); ++step)
        writer.row({std::to_string(total - 1 - step), format_double(trace.scores[step])});

    std::vector<double> xs, ys;
    xs.push_back(static_cast<double>(total));
    ys.push_back(trace.initial_score);
    for (std::size_t step = 0; step < trace.scores.size(); ++step) {
        xs.push_back(static_cast<double>(total - 1 - step));
        ys.push_back(trace.scores[step]);
    }
    // Plot with retained count ascending left to right.
    std::reverse(xs.begin(), xs.end());
    std::reverse(ys.begin(), ys.end());
    LineChartOptions options;
    options.x_label = "features retained";
    options.y_label = "cross-validation R^2";
    render_line_chart(xs, ys, options, svg_path);
}

}  // namespace warcast
