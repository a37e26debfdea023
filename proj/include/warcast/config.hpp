#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "warcast/cohort.hpp"
#include "warcast/csv.hpp"
#include "warcast/features.hpp"
#include "warcast/selection.hpp"
#include "warcast/synth.hpp"

namespace warcast {

// 64-bit FNV-1a; fingerprints the run configuration in every report.
inline std::uint64_t fnv1a_64(std::string_view text) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char byte : text) {
        hash ^= byte;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

// Full run configuration: data paths, pipeline options, hyperparameter grid
// axes, and synthetic-league settings. Everything has a default, so an empty
// config file is valid (though data commands then need the path keys).
struct RunConfig {
    std::string batting_csv;
    std::string pitching_csv;
    std::string people_csv;
    std::string fielding_csv;
    std::vector<std::string> war_csvs;

    std::string out_dir = "reports";
    std::uint64_t seed = 0;
    std::string cohort = "both";  // batters | pitchers | both
    std::vector<int> years = {7, 8, 9, 10, 11};
    MissingPolicy missing_policy = MissingPolicy::zero;
    std::size_t retained_features = kRfeDefaultRetained;
    CohortOptions cohort_options;
    double train_fraction = 0.8;

    std::vector<double> ridge_lambda = log_spaced(0.01, 100.0, 7);
    std::vector<double> mlp_alpha = log_spaced(0.01, 100.0, 5);
    std::vector<int> mlp_layer1 = {4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16};
    std::vector<int> mlp_layer2 = {0, 1, 2, 3, 4, 5};
    int forest_trees = 100;
    std::vector<int> forest_depth = {2, 3, 4, 5, 6, 7};
    std::vector<int> forest_min_split = {1, 2, 3, 4};
    std::vector<double> svr_epsilon = log_spaced(1e-4, 1e2, 5);
    std::vector<double> svr_cost = log_spaced(1e-2, 1e6, 5);
    std::vector<double> svr_gamma = log_spaced(1e-5, 1e2, 5);

    std::size_t synth_players = 200;
    double synth_peak_age = 27.0;
    double synth_curvature = 0.05;
    double synth_noise_sd = 0.3;
    double synth_retirement_hazard = 0.1;
};

namespace detail {

inline std::string join(const std::vector<std::string>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) out += ',';
        out += values[i];
    }
    return out;
}

inline std::string join_ints(const std::vector<int>& values) {
    std::vector<std::string> cells;
    for (int v : values) cells.push_back(std::to_string(v));
    return join(cells);
}

inline std::string join_reals(const std::vector<double>& values) {
    std::vector<std::string> cells;
    for (double v : values) cells.push_back(format_exact(v));
    return join(cells);
}

inline std::vector<std::string> split_list(std::string_view value) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= value.size()) {
        const auto comma = value.find(',', start);
        const auto end = comma == std::string_view::npos ? value.size() : comma;
        auto piece = value.substr(start, end - start);
        while (!piece.empty() && (piece.front() == ' ' || piece.front() == '\t'))
            piece.remove_prefix(1);
        while (!piece.empty() && (piece.back() == ' ' || piece.back() == '\t'))
            piece.remove_suffix(1);
        out.push_back(std::string(piece));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

[[noreturn]] inline void bad_value(const std::string& key, const std::string& value,
                                   const std::string& expected) {
    throw std::runtime_error("config key '" + key + "' needs " + expected + ", got '" + value +
                             "'");
}

inline double parse_config_real(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double parsed = std::stod(value, &used);
        if (used != value.size()) bad_value(key, value, "a number");
        return parsed;
    } catch (const std::invalid_argument&) {
        bad_value(key, value, "a number");
    } catch (const std::out_of_range&) {
        bad_value(key, value, "a number");
    }
}

inline long long parse_config_int(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const long long parsed = std::stoll(value, &used);
        if (used != value.size()) bad_value(key, value, "an integer");
        return parsed;
    } catch (const std::invalid_argument&) {
        bad_value(key, value, "an integer");
    } catch (const std::out_of_range&) {
        bad_value(key, value, "an integer");
    }
}

inline std::vector<double> parse_real_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    for (const auto& piece : split_list(value)) out.push_back(parse_config_real(key, piece));
    if (out.empty()) bad_value(key, value, "a comma-separated list of numbers");
    return out;
}

inline std::vector<int> parse_int_list(const std::string& key, const std::string& value) {
    std::vector<int> out;
    for (const auto& piece : split_list(value))
        out.push_back(static_cast<int>(parse_config_int(key, piece)));
    if (out.empty()) bad_value(key, value, "a comma-separated list of integers");
    return out;
}

// Target seasons accept either a comma list (7,9,11) or a range (7..11).
inline std::vector<int> parse_years(const std::string& key, const std::string& value) {
    std::vector<int> years;
    const auto dots = value.find("..");
    if (dots != std::string::npos) {
        const int lo = static_cast<int>(parse_config_int(key, value.substr(0, dots)));
        const int hi = static_cast<int>(parse_config_int(key, value.substr(dots + 2)));
        for (int y = lo; y <= hi; ++y) years.push_back(y);
    } else {
        years = parse_int_list(key, value);
    }
    if (years.empty()) bad_value(key, value, "target seasons in [7, 11]");
    for (std::size_t i = 0; i < years.size(); ++i) {
        if (years[i] < 7 || years[i] > 11) bad_value(key, value, "target seasons in [7, 11]");
        if (i > 0 && years[i] <= years[i - 1])
            bad_value(key, value, "strictly increasing target seasons");
    }
    return years;
}

inline MissingPolicy parse_policy(const std::string& key, const std::string& value) {
    if (value == "zero") return MissingPolicy::zero;
    if (value == "-0.5") return MissingPolicy::penalty_half;
    if (value == "-1") return MissingPolicy::penalty_one;
    bad_value(key, value, "one of zero, -0.5, -1");
}

}  // namespace detail

// Applies one key=value assignment to the config. Unknown keys and malformed
// values throw with the offending key named, so a bad config dies before any
// pipeline work starts.
inline void apply_config_key(RunConfig& config, const std::string& key,
                             const std::string& value) {
    using detail::parse_config_int;
    using detail::parse_config_real;

    if (key == "batting_csv") config.batting_csv = value;
    else if (key == "pitching_csv") config.pitching_csv = value;
    else if (key == "people_csv") config.people_csv = value;
    else if (key == "fielding_csv") config.fielding_csv = value;
    else if (key == "war_csv") {
        config.war_csvs.clear();  // an empty value clears the list
        for (auto& piece : detail::split_list(value))
            if (!piece.empty()) config.war_csvs.push_back(std::move(piece));
    }
    else if (key == "out_dir") config.out_dir = value;
    else if (key == "seed") {
        const long long seed = parse_config_int(key, value);
        if (seed < 0) detail::bad_value(key, value, "a non-negative integer");
        config.seed = static_cast<std::uint64_t>(seed);
    } else if (key == "cohort") {
        if (value != "batters" && value != "pitchers" && value != "both")
            detail::bad_value(key, value, "one of batters, pitchers, both");
        config.cohort = value;
    } else if (key == "years") {
        config.years = detail::parse_years(key, value);
    } else if (key == "missing_policy") {
        config.missing_policy = detail::parse_policy(key, value);
    } else if (key == "retained_features") {
        const long long count = parse_config_int(key, value);
        if (count < 1) detail::bad_value(key, value, "a positive integer");
        config.retained_features = static_cast<std::size_t>(count);
    } else if (key == "cutoff_year") {
        config.cohort_options.cutoff_year = static_cast<int>(parse_config_int(key, value));
    } else if (key == "min_span") {
        const long long span = parse_config_int(key, value);
        if (span < 1) detail::bad_value(key, value, "a positive integer");
        config.cohort_options.min_span = static_cast<int>(span);
    } else if (key == "train_fraction") {
        const double fraction = parse_config_real(key, value);
        if (!(fraction > 0.0) || !(fraction < 1.0))
            detail::bad_value(key, value, "a fraction in (0, 1)");
        config.train_fraction = fraction;
    } else if (key == "ridge_lambda") {
        config.ridge_lambda = detail::parse_real_list(key, value);
    } else if (key == "mlp_alpha") {
        config.mlp_alpha = detail::parse_real_list(key, value);
    } else if (key == "mlp_layer1") {
        config.mlp_layer1 = detail::parse_int_list(key, value);
    } else if (key == "mlp_layer2") {
        config.mlp_layer2 = detail::parse_int_list(key, value);
    } else if (key == "forest_trees") {
        const long long trees = parse_config_int(key, value);
        if (trees < 1) detail::bad_value(key, value, "a positive integer");
        config.forest_trees = static_cast<int>(trees);
    } else if (key == "forest_depth") {
        config.forest_depth = detail::parse_int_list(key, value);
    } else if (key == "forest_min_split") {
        config.forest_min_split = detail::parse_int_list(key, value);
    } else if (key == "svr_epsilon") {
        config.svr_epsilon = detail::parse_real_list(key, value);
    } else if (key == "svr_cost") {
        config.svr_cost = detail::parse_real_list(key, value);
    } else if (key == "svr_gamma") {
        config.svr_gamma = detail::parse_real_list(key, value);
    } else if (key == "synth_players") {
        const long long players = parse_config_int(key, value);
        if (players < 10) detail::bad_value(key, value, "an integer of at least 10");
        config.synth_players = static_cast<std::size_t>(players);
    } else if (key == "synth_peak_age") {
        config.synth_peak_age = parse_config_real(key, value);
    } else if (key == "synth_curvature") {
        config.synth_curvature = parse_config_real(key, value);
    } else if (key == "synth_noise_sd") {
        const double sd = parse_config_real(key, value);
        if (sd < 0.0) detail::bad_value(key, value, "a non-negative number");
        config.synth_noise_sd = sd;
    } else if (key == "synth_retirement_hazard") {
        const double hazard = parse_config_real(key, value);
        if (hazard < 0.0 || hazard > 1.0) detail::bad_value(key, value, "a probability in [0, 1]");
        config.synth_retirement_hazard = hazard;
    } else {
        throw std::runtime_error("unknown config key '" + key + "'");
    }
}

// Flat key=value format: one assignment per line, '#' starts a comment,
// blank lines ignored. Duplicate keys are an error rather than last-wins.
inline RunConfig parse_run_config(const std::string& text) {
    RunConfig config;
    std::map<std::string, bool> seen;
    std::istringstream lines(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(lines, line)) {
        line_no += 1;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        auto trimmed = std::string_view(line);
        while (!trimmed.empty() && (trimmed.front() == ' ' || trimmed.front() == '\t'))
            trimmed.remove_prefix(1);
        while (!trimmed.empty() &&
               (trimmed.back() == ' ' || trimmed.back() == '\t' || trimmed.back() == '\r'))
            trimmed.remove_suffix(1);
        if (trimmed.empty()) continue;

        const auto equals = trimmed.find('=');
        if (equals == std::string_view::npos)
            throw std::runtime_error("config line " + std::to_string(line_no) +
                                     " is not a key=value assignment");
        auto key = trimmed.substr(0, equals);
        auto value = trimmed.substr(equals + 1);
        while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.remove_suffix(1);
        while (!value.empty() && (value.front() == ' ' || value.front() == '\t'))
            value.remove_prefix(1);
        if (key.empty())
            throw std::runtime_error("config line " + std::to_string(line_no) + " has no key");

        const std::string key_str(key);
        if (seen[key_str])
            throw std::runtime_error("duplicate config key '" + key_str + "'");
        seen[key_str] = true;
        apply_config_key(config, key_str, std::string(value));
    }
    return config;
}

inline RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_run_config(buffer.str());
}

// Canonical serialization: fixed key order, exact number formatting. The
// digest of this text identifies the run in every report.
inline std::string canonical_config(const RunConfig& config) {
    using detail::join;
    using detail::join_ints;
    using detail::join_reals;
    std::string out;
    out += "batting_csv=" + config.batting_csv + "\n";
    out += "cohort=" + config.cohort + "\n";
    out += "cutoff_year=" + std::to_string(config.cohort_options.cutoff_year) + "\n";
    out += "fielding_csv=" + config.fielding_csv + "\n";
    out += "forest_depth=" + join_ints(config.forest_depth) + "\n";
    out += "forest_min_split=" + join_ints(config.forest_min_split) + "\n";
    out += "forest_trees=" + std::to_string(config.forest_trees) + "\n";
    out += "min_span=" + std::to_string(config.cohort_options.min_span) + "\n";
    out += "missing_policy=" + std::string(to_string(config.missing_policy)) + "\n";
    out += "mlp_alpha=" + join_reals(config.mlp_alpha) + "\n";
    out += "mlp_layer1=" + join_ints(config.mlp_layer1) + "\n";
    out += "mlp_layer2=" + join_ints(config.mlp_layer2) + "\n";
    out += "out_dir=" + config.out_dir + "\n";
    out += "people_csv=" + config.people_csv + "\n";
    out += "pitching_csv=" + config.pitching_csv + "\n";
    out += "retained_features=" + std::to_string(config.retained_features) + "\n";
    out += "ridge_lambda=" + join_reals(config.ridge_lambda) + "\n";
    out += "seed=" + std::to_string(config.seed) + "\n";
    out += "svr_cost=" + join_reals(config.svr_cost) + "\n";
    out += "svr_epsilon=" + join_reals(config.svr_epsilon) + "\n";
    out += "svr_gamma=" + join_reals(config.svr_gamma) + "\n";
    out += "synth_curvature=" + format_exact(config.synth_curvature) + "\n";
    out += "synth_noise_sd=" + format_exact(config.synth_noise_sd) + "\n";
    out += "synth_peak_age=" + format_exact(config.synth_peak_age) + "\n";
    out += "synth_players=" + std::to_string(config.synth_players) + "\n";
    out += "synth_retirement_hazard=" + format_exact(config.synth_retirement_hazard) + "\n";
    out += "train_fraction=" + format_exact(config.train_fraction) + "\n";
    out += "war_csv=" + join(config.war_csvs) + "\n";
    out += "years=" + join_ints(config.years) + "\n";
    return out;
}

// Sixteen-hex-digit fingerprint of the canonical configuration.
inline std::string config_digest(const RunConfig& config) {
    char buffer[17];
    std::snprintf(buffer, sizeof buffer, "%016llx",
                  static_cast<unsigned long long>(fnv1a_64(canonical_config(config))));
    return buffer;
}

// Hyperparameter grid for one model kind from the configured axes, enumerated
// row-major with the last axis varying fastest.
inline std::vector<Hyperparams> build_grid(const RunConfig& config, ModelKind kind) {
    std::vector<Hyperparams> grid;
    switch (kind) {
        case ModelKind::ridge:
            for (double lambda : config.ridge_lambda)
                grid.push_back(RidgeHyperparams{.lambda = lambda});
            break;
        case ModelKind::mlp:
            for (double alpha : config.mlp_alpha)
                for (int layer1 : config.mlp_layer1)
                    for (int layer2 : config.mlp_layer2)
                        grid.push_back(
                            MlpHyperparams{.alpha = alpha, .layer1 = layer1, .layer2 = layer2});
            break;
        case ModelKind::forest:
            for (int depth : config.forest_depth)
                for (int min_split : config.forest_min_split)
                    grid.push_back(ForestHyperparams{.n_trees = config.forest_trees,
                                                     .max_depth = depth,
                                                     .min_split = min_split});
            break;
        case ModelKind::svr:
            for (double epsilon : config.svr_epsilon)
                for (double cost : config.svr_cost)
                    for (double gamma : config.svr_gamma)
                        grid.push_back(
                            SvrHyperparams{.epsilon = epsilon, .cost = cost, .gamma = gamma});
            break;
    }
    return grid;
}

}  // namespace warcast
