#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "warcast/baseline.hpp"
#include "warcast/cohort.hpp"
#include "warcast/config.hpp"
#include "warcast/csv.hpp"
#include "warcast/evaluation.hpp"
#include "warcast/features.hpp"
#include "warcast/ingest.hpp"
#include "warcast/model.hpp"
#include "warcast/random.hpp"
#include "warcast/selection.hpp"
#include "warcast/synth.hpp"

namespace warcast {

inline constexpr std::array<std::string_view, 10> kPipelineCommands = {
    "synth", "ingest", "cohort", "features", "select",
    "tune",  "train",  "baseline", "evaluate", "all"};

// One-line hyperparameter summary for tuning tables and logs.
inline std::string hyper_label(const Hyperparams& hyper) {
    if (const auto* r = std::get_if<RidgeHyperparams>(&hyper))
        return "lambda=" + format_exact(r->lambda);
    if (const auto* m = std::get_if<MlpHyperparams>(&hyper))
        return "alpha=" + format_exact(m->alpha) + " layer1=" + std::to_string(m->layer1) +
               " layer2=" + std::to_string(m->layer2);
    if (const auto* f = std::get_if<ForestHyperparams>(&hyper))
        return "trees=" + std::to_string(f->n_trees) + " depth=" + std::to_string(f->max_depth) +
               " min_split=" + std::to_string(f->min_split);
    const auto& s = std::get<SvrHyperparams>(hyper);
    return "epsilon=" + format_exact(s.epsilon) + " cost=" + format_exact(s.cost) +
           " gamma=" + format_exact(s.gamma);
}

// Which pipeline stages a command activates. Every stage recomputes its
// upstream state from the raw data, the config, and the seed, so commands can
// run standalone in any order; only `evaluate` reads artifacts (saved models)
// back from disk.
struct StageSet {
    bool cohort = false;
    bool features = false;
    bool select = false;
    bool tune = false;
    bool train = false;
    bool baseline = false;
    bool evaluate = false;
};

// Everything derived per cohort before the modeling stages: the cohort build,
// the player-level split, and min-max features scaled on the training rows
// only (the test rows reuse the training bounds).
template <class SeasonT>
struct CohortState {
    CareerKind kind = CareerKind::batter;
    CohortBuildResult<SeasonT> build;
    CohortReport report;
    PlayerSplit split;
    std::vector<Career<SeasonT>> train_careers;
    std::vector<Career<SeasonT>> test_careers;
    FeatureMatrix features;  // every cohort player, scaled
    FeatureMatrix train_features;
    FeatureMatrix test_features;
};

class Pipeline {
  public:
    explicit Pipeline(RunConfig config)
        : config_(std::move(config)), digest_(config_digest(config_)) {}

    void run(const std::string& command) {
        if (std::find(kPipelineCommands.begin(), kPipelineCommands.end(), command) ==
            kPipelineCommands.end())
            throw std::runtime_error("unknown command '" + command + "'");

        std::filesystem::create_directories(config_.out_dir);
        write_run_config();

        if (command == "synth") {
            run_synth();
            return;
        }
        if (command == "ingest") {
            dataset();  // loads the inputs and writes rejects.csv
            return;
        }

        StageSet stages;
        if (command == "cohort") stages.cohort = true;
        if (command == "features") stages.features = true;
        if (command == "select") stages.select = true;
        if (command == "tune") stages.tune = true;
        if (command == "train") stages.train = true;
        if (command == "baseline") stages.baseline = true;
        if (command == "evaluate") stages.evaluate = true;
        if (command == "all")
            stages = {.cohort = true, .features = true, .select = true, .tune = true,
                      .train = true, .baseline = true, .evaluate = true};

        std::vector<EvaluationEntry> metrics;
        if (config_.cohort != "pitchers") {
            const auto state = prepare<BattingSeason>(
                build_batting_cohort(dataset(), config_.cohort_options), CareerKind::batter);
            run_stages(state, stages, metrics);
        }
        if (config_.cohort != "batters") {
            const auto state = prepare<PitchingSeason>(
                build_pitching_cohort(dataset(), config_.cohort_options), CareerKind::pitcher);
            run_stages(state, stages, metrics);
        }
        if (stages.evaluate) write_metrics(metrics);
    }

  private:
    RunConfig config_;
    std::string digest_;
    std::optional<Dataset> dataset_;

    std::string out_path(const std::string& name) const { return config_.out_dir + "/" + name; }
    std::string models_dir() const { return out_path("models"); }
    std::string synth_dir() const { return out_path("synth"); }

    std::string model_path(const std::string& cohort, ModelKind kind, int year) const {
        return models_dir() + "/" + cohort + "_" + std::string(to_string(kind)) + "_y" +
               std::to_string(year) + ".model";
    }

    // The canonical config plus its digest; the file round-trips through the
    // config parser, so a run can be reproduced with --config run_config.txt.
    void write_run_config() const {
        const std::string path = out_path("run_config.txt");
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot write file: " + path);
        out << canonical_config(config_);
        out << "# digest: " << digest_ << "\n";
    }

    void run_synth() const {
        std::filesystem::create_directories(synth_dir());
        const SynthConfig synth{.seed = config_.seed,
                                .n_players = config_.synth_players,
                                .peak_age = config_.synth_peak_age,
                                .curvature = config_.synth_curvature,
                                .noise_sd = config_.synth_noise_sd,
                                .retirement_hazard = config_.synth_retirement_hazard};
        generate_synthetic_league(synth, synth_dir());
    }

    // Explicit data paths win; otherwise fall back to a synthetic league
    // generated earlier under the output directory.
    LoadPaths resolve_paths() const {
        const bool any_explicit = !config_.batting_csv.empty() || !config_.pitching_csv.empty() ||
                                  !config_.people_csv.empty() || !config_.fielding_csv.empty() ||
                                  !config_.war_csvs.empty();
        if (!any_explicit) {
            const std::string dir = synth_dir();
            const SynthFiles files{.people = dir + "/people.csv",
                                   .batting = dir + "/batting.csv",
                                   .pitching = dir + "/pitching.csv",
                                   .fielding = dir + "/fielding.csv",
                                   .war = dir + "/war.csv",
                                   .truth = dir + "/truth.csv"};
            if (!std::filesystem::exists(files.people))
                throw std::runtime_error(
                    "no input data configured; set batting_csv and the other data paths, or run "
                    "the synth command first");
            return load_paths(files);
        }
        const std::array<std::pair<const std::string*, std::string_view>, 4> required = {
            {{&config_.batting_csv, "batting_csv"},
             {&config_.pitching_csv, "pitching_csv"},
             {&config_.people_csv, "people_csv"},
             {&config_.fielding_csv, "fielding_csv"}}};
        for (const auto& [value, key] : required)
            if (value->empty())
                throw std::runtime_error("config key '" + std::string(key) +
                                         "' is required when any data path is set");
        if (config_.war_csvs.empty())
            throw std::runtime_error("config key 'war_csv' is required when any data path is set");
        return {.batting = config_.batting_csv,
                .pitching = config_.pitching_csv,
                .people = config_.people_csv,
                .fielding = config_.fielding_csv,
                .wars = config_.war_csvs};
    }

    const Dataset& dataset() {
        if (dataset_) return *dataset_;
        LoadResult loaded = load_dataset(resolve_paths());
        Dataset ds = attach_war(merge_stints(std::move(loaded.dataset)), loaded.rejects);
        loaded.rejects.write_csv(out_path("rejects.csv"));
        dataset_ = std::move(ds);
        return *dataset_;
    }

    template <class SeasonT>
    CohortState<SeasonT> prepare(CohortBuildResult<SeasonT> build, CareerKind kind) {
        CohortState<SeasonT> state;
        state.kind = kind;
        state.build = std::move(build);
        state.report = cohort_report(state.build, dataset(), config_.cohort_options);

        std::vector<std::string> ids;
        ids.reserve(state.build.careers.size());
        for (const auto& career : state.build.careers) ids.push_back(career.player_id);
        state.split = split_players(
            ids, {.train_fraction = config_.train_fraction, .seed = config_.seed});

        const std::set<std::string> train_ids(state.split.train.begin(), state.split.train.end());
        std::vector<std::size_t> train_rows, test_rows;
        for (std::size_t i = 0; i < state.build.careers.size(); ++i) {
            if (train_ids.count(state.build.careers[i].player_id)) {
                train_rows.push_back(i);
                state.train_careers.push_back(state.build.careers[i]);
            } else {
                test_rows.push_back(i);
                state.test_careers.push_back(state.build.careers[i]);
            }
        }

        FeatureMatrix raw = build_features(state.build.careers);
        const ScalerParams scaler = fit_scaler(raw, train_rows);
        state.features = apply_scaler(scaler, std::move(raw));
        state.train_features = subset_rows(state.features, train_rows);
        state.test_features = subset_rows(state.features, test_rows);
        return state;
    }

    template <class SeasonT>
    void run_stages(const CohortState<SeasonT>& state, const StageSet& stages,
                    std::vector<EvaluationEntry>& metrics) {
        const std::string cohort(to_string(state.kind));

        if (stages.cohort) write_cohort_report(state, cohort);

        if (stages.features) {
            write_features_csv(state.features, out_path("features_" + cohort + ".csv"));
            for (const int year : config_.years) {
                const TargetVector targets =
                    build_targets(state.build.careers, year, config_.missing_policy);
                write_targets_csv(
                    targets, out_path("targets_" + cohort + "_y" + std::to_string(year) + ".csv"));
            }
        }

        // Feature elimination runs on the training rows only; tuning and the
        // final fits reuse the retained subset for the same target season.
        std::map<int, EliminationTrace> traces;
        if (stages.select || stages.tune || stages.train) {
            const std::size_t target_count = std::min(
                config_.retained_features, state.train_features.feature_names.size());
            for (const int year : config_.years) {
                const TargetVector targets =
                    build_targets(state.train_careers, year, config_.missing_policy);
                EliminationTrace trace =
                    rfe_rank(state.train_features, targets.values, target_count, config_.seed);
                if (stages.select) {
                    const std::string stem = "rfe_" + cohort + "_y" + std::to_string(year);
                    rfe_curve_report(trace, out_path(stem + ".csv"), out_path(stem + ".svg"));
                }
                traces.emplace(year, std::move(trace));
            }
        }

        std::map<int, FeatureMatrix> selected;
        std::map<int, std::map<ModelKind, TuneResult>> tuned;
        if (stages.tune || stages.train) {
            std::optional<CsvWriter> tuning;
            if (stages.tune) {
                tuning.emplace(out_path("tuning_" + cohort + ".csv"));
                tuning->comment("seed: " + std::to_string(config_.seed));
                tuning->comment("config: " + digest_);
                tuning->row({"model", "target_season", "grid_index", "params", "mean_cv_r2",
                             "selected"});
            }
            for (const int year : config_.years) {
                const TargetVector targets =
                    build_targets(state.train_careers, year, config_.missing_policy);
                selected.emplace(year,
                                 select_features(state.train_features, traces.at(year).retained));
                for (const ModelKind kind : all_model_kinds) {
                    TuneResult result = grid_search(build_grid(config_, kind), selected.at(year),
                                                    targets.values, 3, config_.seed);
                    if (tuning) {
                        for (std::size_t g = 0; g < result.points.size(); ++g) {
                            const GridPoint& point = result.points[g];
                            tuning->row({std::string(to_string(kind)), std::to_string(year),
                                         std::to_string(g), hyper_label(point.hyper),
                                         format_double(point.mean_score),
                                         g == result.best_index ? "1" : "0"});
                        }
                        for (const auto& line : result.failures) tuning->comment("failed: " + line);
                    }
                    tuned[year].emplace(kind, std::move(result));
                }
            }
        }

        if (stages.train) {
            std::filesystem::create_directories(models_dir());
            for (const int year : config_.years) {
                const TargetVector targets =
                    build_targets(state.train_careers, year, config_.missing_policy);
                for (const ModelKind kind : all_model_kinds) {
                    auto rng = seeded_stream(config_.seed,
                                             "train/" + cohort + "/y" + std::to_string(year) +
                                                 "/" + std::string(to_string(kind)));
                    const FittedModel model =
                        fit_model(selected.at(year), targets.values, tuned.at(year).at(kind).best,
                                  rng, config_.seed);
                    save_model(model, model_path(cohort, kind, year));
                }
            }
        }

        if (stages.baseline || stages.evaluate) {
            const AgingCurve curve = fit_aging_curve(state.train_careers);
            if (stages.baseline)
                write_aging_curve_csv(curve, out_path("aging_curve_" + cohort + ".csv"));
            if (stages.evaluate) {
                std::map<int, std::vector<FittedModel>> models_by_year;
                for (const int year : config_.years) {
                    for (const ModelKind kind : all_model_kinds) {
                        const std::string path = model_path(cohort, kind, year);
                        if (!std::filesystem::exists(path))
                            throw std::runtime_error("missing model file '" + path +
                                                     "'; run the train command first");
                        models_by_year[year].push_back(load_model(path));
                    }
                }
                const EvaluationReport report = evaluate_models(
                    models_by_year, curve, state.test_careers, state.test_features,
                    config_.missing_policy, config_.seed, digest_, config_.years);
                write_predictions_csv(report.predictions,
                                      out_path("predictions_" + cohort + ".csv"));
                render_report_heatmaps(report, config_.out_dir);
                metrics.insert(metrics.end(), report.entries.begin(), report.entries.end());
            }
        }
    }

    template <class SeasonT>
    void write_cohort_report(const CohortState<SeasonT>& state, const std::string& cohort) const {
        const CohortReport& report = state.report;
        const ExclusionTally& excluded = state.build.exclusions;
        const std::vector<std::pair<std::string, std::string>> rows = {
            {"contemporary_players", std::to_string(report.contemporary_players)},
            {"included_players", std::to_string(report.included_players)},
            {"percent_included", format_double(report.percent_included, 1)},
            {"volume_contemporary_thousands", format_double(report.volume_contemporary, 1)},
            {"volume_included_thousands", format_double(report.volume_included, 1)},
            {"volume_percent", format_double(report.volume_percent, 1)},
            {"excluded_unknown_birth_year", std::to_string(excluded.unknown_birth_year)},
            {"excluded_short_span", std::to_string(excluded.short_span)},
            {"excluded_no_early_activity", std::to_string(excluded.no_early_activity)},
            {"excluded_no_late_activity", std::to_string(excluded.no_late_activity)},
            {"excluded_pitching_overlap", std::to_string(excluded.pitching_overlap)},
            {"train_players", std::to_string(state.split.train.size())},
            {"test_players", std::to_string(state.split.test.size())},
        };

        CsvWriter out(out_path("cohort_" + cohort + ".csv"));
        out.comment("config: " + digest_);
        out.row({"metric", "value"});
        for (const auto& [metric, value] : rows) out.row({metric, value});

        const std::string text_path = out_path("cohort_" + cohort + ".txt");
        std::ofstream text(text_path);
        if (!text) throw std::runtime_error("cannot write file: " + text_path);
        text << "cohort: " << cohort << "\n";
        for (const auto& [metric, value] : rows) text << "  " << metric << ": " << value << "\n";
    }

    void write_metrics(const std::vector<EvaluationEntry>& entries) const {
        EvaluationReport combined;
        combined.entries = entries;
        combined.seed = config_.seed;
        combined.config_digest = digest_;
        write_metrics_csv(combined, out_path("metrics.csv"));
    }
};

inline int run_pipeline(RunConfig config, const std::string& command) {
    Pipeline pipeline(std::move(config));
    pipeline.run(command);
    return 0;
}

}  // namespace warcast
