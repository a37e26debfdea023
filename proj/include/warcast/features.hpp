#pragma once

#include <algorithm>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "warcast/cohort.hpp"
#include "warcast/csv.hpp"

namespace warcast {

struct FeatureMatrix {
    std::vector<std::string> feature_names;
    std::vector<std::string> player_ids;
    std::vector<std::vector<double>> rows;   // aligned to feature_names
    std::vector<bool> one_hot;               // one-hot columns skip scaling

    std::size_t find_feature(std::string_view name) const {
        for (std::size_t i = 0; i < feature_names.size(); ++i)
            if (feature_names[i] == name) return i;
        throw std::runtime_error("unknown feature name: " + std::string(name));
    }
};

enum class MissingPolicy { zero, penalty_half, penalty_one };

inline double policy_value(MissingPolicy p) {
    switch (p) {
        case MissingPolicy::penalty_half: return -0.5;
        case MissingPolicy::penalty_one: return -1.0;
        default: return 0.0;
    }
}

inline std::string_view to_string(MissingPolicy p) {
    switch (p) {
        case MissingPolicy::penalty_half: return "-0.5";
        case MissingPolicy::penalty_one: return "-1";
        default: return "zero";
    }
}

struct TargetVector {
    int target_year = 7;  // season index in [7, 11]
    MissingPolicy policy = MissingPolicy::zero;
    std::vector<std::string> player_ids;
    std::vector<double> values;
    std::vector<bool> substituted;  // true where the policy value was used
};

struct ScalerParams {
    std::vector<std::string> feature_names;
    std::vector<double> mins;
    std::vector<double> maxs;
    std::vector<bool> one_hot;
};

namespace detail {

inline double safe_div(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

// Appends (name, value) pairs while keeping names, values, and one-hot flags
// aligned; rows after the first only validate the established layout.
class FeatureRowBuilder {
public:
    explicit FeatureRowBuilder(FeatureMatrix& matrix) : matrix_(matrix) {}

    void begin_row(const std::string& player_id) {
        matrix_.player_ids.push_back(player_id);
        row_.clear();
        cursor_ = 0;
    }

    void add(std::string name, double value, bool one_hot = false) {
        if (matrix_.rows.empty()) {
            matrix_.feature_names.push_back(std::move(name));
            matrix_.one_hot.push_back(one_hot);
        } else {
            if (cursor_ >= matrix_.feature_names.size() ||
                matrix_.feature_names[cursor_] != name)
                throw std::runtime_error("feature layout mismatch at '" + name + "'");
        }
        row_.push_back(value);
        ++cursor_;
    }

    void end_row() {
        if (!matrix_.rows.empty() && row_.size() != matrix_.feature_names.size())
            throw std::runtime_error("feature row length mismatch");
        matrix_.rows.push_back(row_);
    }

private:
    FeatureMatrix& matrix_;
    std::vector<double> row_;
    std::size_t cursor_ = 0;
};

inline double batting_average(const BattingCounts& c) {
    return safe_div(static_cast<double>(c.hits), static_cast<double>(c.at_bats));
}
inline double on_base_percentage(const BattingCounts& c) {
    const double reached = static_cast<double>(c.hits + c.walks + c.hbp);
    const double chances = static_cast<double>(c.at_bats + c.walks + c.hbp + c.sac_flies);
    return safe_div(reached, chances);
}
inline double slugging(const BattingCounts& c) {
    const double total_bases =
        static_cast<double>(c.hits + c.doubles + 2 * c.triples + 3 * c.home_runs);
    return safe_div(total_bases, static_cast<double>(c.at_bats));
}
inline double era(const PitchingCounts& c) {
    return safe_div(27.0 * static_cast<double>(c.earned_runs), static_cast<double>(c.ipouts));
}
inline double whip(const PitchingCounts& c) {
    return safe_div(3.0 * static_cast<double>(c.walks + c.hits), static_cast<double>(c.ipouts));
}
inline double strikeouts_per_nine(const PitchingCounts& c) {
    return safe_div(27.0 * static_cast<double>(c.strikeouts), static_cast<double>(c.ipouts));
}

inline void add_rates(FeatureRowBuilder& out, const std::string& prefix, const BattingCounts& c) {
    out.add(prefix + "batting_average", batting_average(c));
    out.add(prefix + "obp", on_base_percentage(c));
    out.add(prefix + "slugging", slugging(c));
}
inline void add_rates(FeatureRowBuilder& out, const std::string& prefix, const PitchingCounts& c) {
    out.add(prefix + "era", era(c));
    out.add(prefix + "whip", whip(c));
    out.add(prefix + "k_per_9", strikeouts_per_nine(c));
}

inline void add_counts(FeatureRowBuilder& out, const std::string& prefix, const BattingCounts& c) {
    for (const auto& def : batting_fields())
        out.add(prefix + def.name, static_cast<double>(c.*(def.member)));
}
inline void add_counts(FeatureRowBuilder& out, const std::string& prefix, const PitchingCounts& c) {
    for (const auto& def : pitching_fields())
        out.add(prefix + def.name, static_cast<double>(c.*(def.member)));
}

inline void accumulate(BattingCounts& total, const BattingCounts& c) {
    for (const auto& def : batting_fields()) total.*(def.member) += c.*(def.member);
}
inline void accumulate(PitchingCounts& total, const PitchingCounts& c) {
    for (const auto& def : pitching_fields()) total.*(def.member) += c.*(def.member);
}

// Kind-specific tail: batters carry position one-hots, pitchers a
// starter-share ratio over the feature window.
inline void add_kind_specific(FeatureRowBuilder& out, const BattingCareer& career,
                              const BattingCounts&) {
    for (Position p : all_positions)
        out.add(std::string("pos_") + std::string(to_string(p)),
                career.bio.primary_position == p ? 1.0 : 0.0, true);
}
inline void add_kind_specific(FeatureRowBuilder& out, const PitchingCareer& career,
                              const PitchingCounts& window) {
    (void)career;
    out.add("starter_share", safe_div(static_cast<double>(window.games_started),
                                      static_cast<double>(window.games)));
}

}  // namespace detail

// Feature vector layout, per player:
//   y{1..6}_<stat>      counting stats for that season index (0 when absent)
//   y{1..6}_<rate>      rates recomputed from that season's counts
//   y{1..6}_war         season WAR (0 when absent or unrecorded)
//   y{1..6}_active      activity indicator
//   agg_<stat>          counting stats summed over seasons 1-6
//   agg_<rate>          rates recomputed from the summed counts
//   agg_war             cumulative WAR over seasons 1-6
//   age_at_debut, height, weight
//   decade_<year>       one-hot decade of debut (observed decades only)
//   pos_<position>      one-hot primary position (batters only)
//   starter_share       games_started/games over seasons 1-6 (pitchers only)
//   bats_*, throws_*    one-hot handedness
template <class SeasonT>
FeatureMatrix build_features(const std::vector<Career<SeasonT>>& careers) {
    FeatureMatrix matrix;
    std::set<int> decades;
    for (const auto& career : careers) decades.insert(career.debut_year / 10 * 10);

    detail::FeatureRowBuilder out(matrix);
    for (const auto& career : careers) {
        out.begin_row(career.player_id);

        decltype(SeasonT{}.counts) window_total{};
        double war_total = 0.0;
        for (int index = 1; index <= kSeasonBoundary; ++index) {
            const std::string prefix = "y" + std::to_string(index) + "_";
            auto it = career.seasons.find(index);
            const bool active = it != career.seasons.end();
            const decltype(SeasonT{}.counts) counts = active ? it->second.counts : decltype(SeasonT{}.counts){};
            const double war = active && it->second.war ? *it->second.war : 0.0;
            detail::add_counts(out, prefix, counts);
            detail::add_rates(out, prefix, counts);
            out.add(prefix + "war", war);
            out.add(prefix + "active", active ? 1.0 : 0.0, true);
            if (active) {
                detail::accumulate(window_total, counts);
                war_total += war;
            }
        }
        detail::add_counts(out, "agg_", window_total);
        detail::add_rates(out, "agg_", window_total);
        out.add("agg_war", war_total);

        out.add("age_at_debut", career.age_at_debut);
        out.add("height", career.bio.height);
        out.add("weight", career.bio.weight);
        for (int decade : decades)
            out.add("decade_" + std::to_string(decade),
                    career.debut_year / 10 * 10 == decade ? 1.0 : 0.0, true);
        detail::add_kind_specific(out, career, window_total);
        for (Hand h : {Hand::right, Hand::left, Hand::switch_hitter, Hand::unknown})
            out.add(std::string("bats_") + std::string(to_string(h)),
                    career.bio.bats == h ? 1.0 : 0.0, true);
        for (Hand h : {Hand::right, Hand::left, Hand::unknown})
            out.add(std::string("throws_") + std::string(to_string(h)),
                    career.bio.throws == h ? 1.0 : 0.0, true);
        out.end_row();
    }
    return matrix;
}

// Season-index WAR for seasons 7-11. Recorded WAR passes through exactly;
// anything else (retired, gap year, unrecorded) takes the policy value.
template <class SeasonT>
TargetVector build_targets(const std::vector<Career<SeasonT>>& careers, int target_year,
                           MissingPolicy policy) {
    if (target_year < kSeasonBoundary + 1 || target_year > 11)
        throw std::runtime_error("target year must be in [7, 11], got " +
                                 std::to_string(target_year));
    TargetVector targets;
    targets.target_year = target_year;
    targets.policy = policy;
    for (const auto& career : careers) {
        targets.player_ids.push_back(career.player_id);
        auto it = career.seasons.find(target_year);
        if (it != career.seasons.end() && it->second.war) {
            targets.values.push_back(*it->second.war);
            targets.substituted.push_back(false);
        } else {
            targets.values.push_back(policy_value(policy));
            targets.substituted.push_back(true);
        }
    }
    return targets;
}

// Per-feature min/max over the given rows (all rows when omitted).
inline ScalerParams fit_scaler(const FeatureMatrix& matrix, const std::vector<std::size_t>& rows) {
    if (rows.empty()) throw std::runtime_error("cannot fit scaler on an empty training set");
    ScalerParams params;
    params.feature_names = matrix.feature_names;
    params.one_hot = matrix.one_hot;
    const std::size_t width = matrix.feature_names.size();
    params.mins.assign(width, 0.0);
    params.maxs.assign(width, 0.0);
    for (std::size_t j = 0; j < width; ++j) {
        double lo = matrix.rows.at(rows[0]).at(j), hi = lo;
        for (std::size_t r : rows) {
            const double v = matrix.rows.at(r).at(j);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        params.mins[j] = lo;
        params.maxs[j] = hi;
    }
    return params;
}

inline ScalerParams fit_scaler(const FeatureMatrix& matrix) {
    std::vector<std::size_t> all(matrix.rows.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return fit_scaler(matrix, all);
}

// (x - min)/(max - min) per non-one-hot feature; constant features map to 0;
// values outside the fitted range are NOT clipped.
inline FeatureMatrix apply_scaler(const ScalerParams& params, FeatureMatrix matrix) {
    if (params.feature_names != matrix.feature_names)
        throw std::runtime_error("scaler feature names do not match the matrix");
    for (auto& row : matrix.rows) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (params.one_hot[j]) continue;
            const double range = params.maxs[j] - params.mins[j];
            row[j] = range == 0.0 ? 0.0 : (row[j] - params.mins[j]) / range;
        }
    }
    return matrix;
}

inline FeatureMatrix subset_rows(const FeatureMatrix& matrix, const std::vector<std::size_t>& rows) {
    FeatureMatrix out;
    out.feature_names = matrix.feature_names;
    out.one_hot = matrix.one_hot;
    for (std::size_t r : rows) {
        out.player_ids.push_back(matrix.player_ids.at(r));
        out.rows.push_back(matrix.rows.at(r));
    }
    return out;
}

inline FeatureMatrix subset_columns(const FeatureMatrix& matrix,
                                    const std::vector<std::size_t>& cols) {
    FeatureMatrix out;
    out.player_ids = matrix.player_ids;
    for (std::size_t c : cols) {
        out.feature_names.push_back(matrix.feature_names.at(c));
        out.one_hot.push_back(matrix.one_hot.at(c));
    }
    for (const auto& row : matrix.rows) {
        std::vector<double> subset;
        subset.reserve(cols.size());
        for (std::size_t c : cols) subset.push_back(row.at(c));
        out.rows.push_back(std::move(subset));
    }
    return out;
}

inline void write_features_csv(const FeatureMatrix& matrix, const std::string& path) {
    CsvWriter out(path);
    std::vector<std::string> header = {"player_id"};
    header.insert(header.end(), matrix.feature_names.begin(), matrix.feature_names.end());
    out.row(header);
    for (std::size_t r = 0; r < matrix.rows.size(); ++r) {
        std::vector<std::string> fields = {matrix.player_ids[r]};
        for (double v : matrix.rows[r]) fields.push_back(format_double(v));
        out.row(fields);
    }
}

inline void write_targets_csv(const TargetVector& targets, const std::string& path) {
    CsvWriter out(path);
    out.row({"player_id", "war"});
    for (std::size_t i = 0; i < targets.values.size(); ++i)
        out.row({targets.player_ids[i], format_double(targets.values[i])});
}

}  // namespace warcast
