#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "warcast/ingest.hpp"

namespace warcast {

enum class CareerKind { batter, pitcher };

inline std::string_view to_string(CareerKind k) {
    return k == CareerKind::batter ? "batters" : "pitchers";
}

// A season counts toward cohort activity only above these floors; inactive
// seasons are dropped from careers entirely.
inline bool is_active(const BattingSeason& s) { return s.counts.at_bats > 0; }
inline bool is_active(const PitchingSeason& s) { return s.counts.games >= 1; }

// One player's merged seasons keyed by season index: calendar offset from
// debut, so gap years are simply absent keys.
template <class SeasonT>
struct Career {
    std::string player_id;
    int debut_year = 0;
    CareerKind kind = CareerKind::batter;
    int age_at_debut = 0;
    PlayerBio bio;
    std::map<int, SeasonT> seasons;

    // Span counts all recorded activity (fielding and both-role years
    // included), not just the seasons retained here.
    int span() const { return bio.final_year - debut_year + 1; }
};

using BattingCareer = Career<BattingSeason>;
using PitchingCareer = Career<PitchingSeason>;

constexpr int kSeasonBoundary = 6;  // features end here; targets start after

struct CohortOptions {
    int cutoff_year = 1970;  // debuts before this are outside the study
    int min_span = 7;
};

// Why each contemporary player was excluded; each player lands in exactly
// one bucket (first failing rule, in this order).
struct ExclusionTally {
    long long unknown_birth_year = 0;
    long long short_span = 0;
    long long no_early_activity = 0;  // nothing active in seasons 1..6
    long long no_late_activity = 0;   // nothing active in season 7+
    long long pitching_overlap = 0;   // batting cohort only

    long long total() const {
        return unknown_birth_year + short_span + no_early_activity + no_late_activity +
               pitching_overlap;
    }
};

template <class SeasonT>
struct CohortBuildResult {
    std::vector<Career<SeasonT>> careers;  // sorted by player_id
    ExclusionTally exclusions;
    long long contemporary_players = 0;  // debut >= cutoff with rows of this kind
};

struct CohortReport {
    long long contemporary_players = 0;
    long long included_players = 0;
    double percent_included = 0.0;
    double volume_contemporary = 0.0;  // thousands of at-bats (batters) or ipouts (pitchers)
    double volume_included = 0.0;
    double volume_percent = 0.0;
};

// Indexes one player's merged seasons by calendar offset from debut. The
// debut is lowered to the earliest observed season if the recorded debut
// post-dates it, keeping every index >= 1.
template <class SeasonT>
Career<SeasonT> index_seasons(const std::vector<SeasonT>& seasons, const PlayerBio& bio,
                              CareerKind kind) {
    Career<SeasonT> career;
    career.player_id = bio.player_id;
    career.kind = kind;
    career.bio = bio;
    career.debut_year = bio.debut_year;
    for (const auto& s : seasons)
        if (s.year < career.debut_year) career.debut_year = s.year;
    if (bio.birth_year) career.age_at_debut = career.debut_year - *bio.birth_year;
    for (const auto& s : seasons) {
        if (!is_active(s)) continue;
        career.seasons.emplace(s.year - career.debut_year + 1, s);
    }
    return career;
}

namespace detail {

template <class SeasonT>
std::map<std::string, std::vector<SeasonT>> group_by_player(const std::vector<SeasonT>& seasons) {
    std::map<std::string, std::vector<SeasonT>> grouped;
    for (const auto& s : seasons) grouped[s.player_id].push_back(s);
    for (auto& [pid, rows] : grouped)
        std::sort(rows.begin(), rows.end(),
                  [](const SeasonT& a, const SeasonT& b) { return a.year < b.year; });
    return grouped;
}

// Shared inclusion logic; `overlap` holds player ids claimed by the other
// cohort (used only when building batters).
template <class SeasonT>
CohortBuildResult<SeasonT> build_cohort(const Dataset& ds, const std::vector<SeasonT>& seasons,
                                        CareerKind kind, const CohortOptions& options,
                                        const std::set<std::string>* overlap) {
    CohortBuildResult<SeasonT> result;
    for (const auto& [pid, rows] : group_by_player(seasons)) {
        const PlayerBio* bio = ds.find_bio(pid);
        if (!bio || bio->debut_year < options.cutoff_year) continue;
        ++result.contemporary_players;

        if (!bio->birth_year) {
            ++result.exclusions.unknown_birth_year;
            continue;
        }
        Career<SeasonT> career = index_seasons(rows, *bio, kind);
        if (career.span() < options.min_span) {
            ++result.exclusions.short_span;
            continue;
        }
        bool early = false, late = false;
        for (const auto& [index, season] : career.seasons) {
            (index <= kSeasonBoundary ? early : late) = true;
        }
        if (!early) {
            ++result.exclusions.no_early_activity;
            continue;
        }
        if (!late) {
            ++result.exclusions.no_late_activity;
            continue;
        }
        if (overlap && overlap->count(pid)) {
            ++result.exclusions.pitching_overlap;
            continue;
        }
        result.careers.push_back(std::move(career));
    }
    return result;
}

}  // namespace detail

inline CohortBuildResult<PitchingSeason> build_pitching_cohort(const Dataset& ds,
                                                               const CohortOptions& options = {}) {
    return detail::build_cohort(ds, ds.pitching_seasons, CareerKind::pitcher, options, nullptr);
}

// Batters with enough data to appear in the pitching cohort are excluded,
// keeping the two cohorts disjoint.
inline CohortBuildResult<BattingSeason> build_batting_cohort(const Dataset& ds,
                                                             const CohortOptions& options = {}) {
    std::set<std::string> pitchers;
    for (const auto& career : build_pitching_cohort(ds, options).careers)
        pitchers.insert(career.player_id);
    return detail::build_cohort(ds, ds.batting_seasons, CareerKind::batter, options, &pitchers);
}

namespace detail {

inline long long season_volume(const BattingSeason& s) { return s.counts.at_bats; }
inline long long season_volume(const PitchingSeason& s) { return s.counts.ipouts; }

template <class SeasonT>
const std::vector<SeasonT>& seasons_of(const Dataset& ds);
template <>
inline const std::vector<BattingSeason>& seasons_of<BattingSeason>(const Dataset& ds) {
    return ds.batting_seasons;
}
template <>
inline const std::vector<PitchingSeason>& seasons_of<PitchingSeason>(const Dataset& ds) {
    return ds.pitching_seasons;
}

}  // namespace detail

// Population and volume summary for cleaning tables: players and playing
// volume, contemporary versus included.
template <class SeasonT>
CohortReport cohort_report(const CohortBuildResult<SeasonT>& cohort, const Dataset& ds,
                           const CohortOptions& options = {}) {
    CohortReport report;
    report.contemporary_players = cohort.contemporary_players;
    report.included_players = static_cast<long long>(cohort.careers.size());

    std::set<std::string_view> included;
    for (const auto& career : cohort.careers) included.insert(career.player_id);

    long long volume_contemporary = 0, volume_included = 0;
    for (const auto& season : detail::seasons_of<SeasonT>(ds)) {
        const PlayerBio* bio = ds.find_bio(season.player_id);
        if (!bio || bio->debut_year < options.cutoff_year) continue;
        volume_contemporary += detail::season_volume(season);
        if (included.count(season.player_id)) volume_included += detail::season_volume(season);
    }
    report.volume_contemporary = volume_contemporary / 1000.0;
    report.volume_included = volume_included / 1000.0;
    if (report.contemporary_players > 0)
        report.percent_included = 100.0 * report.included_players / report.contemporary_players;
    if (volume_contemporary > 0)
        report.volume_percent = 100.0 * volume_included / volume_contemporary;
    return report;
}

}  // namespace warcast
