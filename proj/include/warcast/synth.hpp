#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "warcast/csv.hpp"
#include "warcast/ingest.hpp"
#include "warcast/random.hpp"

namespace warcast {

// Synthetic-league generator configuration. WAR follows a quadratic aging
// curve with a player-specific intercept:
//   war(age) = quality - curvature * (age - peak_age)^2 + noise
// Players always play seasons 1..6; from season 7 on, each season survives
// the retirement hazard independently, up to a 12-season career.
struct SynthConfig {
    std::uint64_t seed = 0;
    std::size_t n_players = 200;
    double peak_age = 27.0;
    double curvature = 0.05;
    double noise_sd = 0.0;
    double retirement_hazard = 0.0;
};

struct SynthFiles {
    std::string people;
    std::string batting;
    std::string pitching;
    std::string fielding;
    std::string war;
    std::string truth;  // ground-truth table, not part of the ingest surface
};

inline LoadPaths load_paths(const SynthFiles& files) {
    return {.batting = files.batting,
            .pitching = files.pitching,
            .people = files.people,
            .fielding = files.fielding,
            .wars = {files.war}};
}

namespace detail {

// Deterministic counting stats scaled by WAR level and stint share. Each
// stint row satisfies the ingest invariants on its own, so their merged sums
// do as well (every invariant is a sum-preserving inequality).
struct SynthBattingRow {
    long long games, at_bats, runs, hits, doubles, triples, home_runs, rbi, stolen_bases,
        caught_stealing, walks, strikeouts, hbp, sac_flies, gidp;
};

inline SynthBattingRow synth_batting_counts(double war, double share) {
    const double level = std::clamp(war, -2.0, 8.0);
    SynthBattingRow r{};
    r.games = std::llround(share * (100.0 + 4.0 * level));
    r.at_bats = std::llround(share * (350.0 + 25.0 * level));
    r.hits = std::llround(static_cast<double>(r.at_bats) * (0.22 + 0.008 * level));
    r.doubles = r.hits / 5;
    r.triples = r.hits / 40;
    r.home_runs = std::min(std::llround(share * (2.0 + 3.0 * std::max(level, 0.0))),
                           r.hits - r.doubles - r.triples);
    r.home_runs = std::max(r.home_runs, 0LL);
    r.runs = r.hits / 2 + r.home_runs;
    r.rbi = r.hits / 2 + r.home_runs;
    r.stolen_bases = r.hits / 10;
    r.caught_stealing = r.stolen_bases / 3;
    r.walks = r.at_bats / 9;
    r.strikeouts = r.at_bats / 6;
    r.hbp = std::llround(share * 3.0);
    r.sac_flies = std::llround(share * 4.0);
    r.gidp = std::llround(share * 9.0);
    return r;
}

struct SynthPitchingRow {
    long long wins, losses, games, games_started, complete_games, shutouts, saves, ipouts, hits,
        earned_runs, home_runs, walks, strikeouts, batters_faced;
};

inline SynthPitchingRow synth_pitching_counts(double war, double share) {
    const double level = std::clamp(war, -2.0, 8.0);
    SynthPitchingRow r{};
    r.games = std::llround(share * 32.0);
    r.games_started = std::llround(share * 28.0);
    r.complete_games = std::llround(share * (1.0 + std::max(level, 0.0) / 4.0));
    r.shutouts = r.complete_games / 2;
    r.saves = 0;
    r.ipouts = std::llround(share * (450.0 + 25.0 * level));
    r.hits = r.ipouts / 3;
    r.earned_runs = std::llround(static_cast<double>(r.ipouts) * (0.048 - 0.003 * level));
    r.earned_runs = std::max(r.earned_runs, 0LL);
    r.home_runs = r.earned_runs / 5;
    r.walks = r.ipouts / 9;
    r.strikeouts = std::llround(static_cast<double>(r.ipouts) * (0.18 + 0.01 * level));
    r.wins = std::max(std::llround(share * (6.0 + level)), 0LL);
    r.losses = std::max(std::llround(share * (8.0 - level / 2.0)), 0LL);
    r.batters_faced = r.ipouts + r.hits + r.walks;
    return r;
}

inline std::string synth_player_id(std::size_t index) {
    char buffer[24];
    std::snprintf(buffer, sizeof buffer, "syn%04zu01", index);
    return buffer;
}

}  // namespace detail

// Writes a complete synthetic league into `directory`: the four season/bio
// tables in the same column layout the loader consumes, a WAR file, and a
// ground-truth table recording each player-season's true (noise-free) curve
// value. Identical configs produce byte-identical files.
inline SynthFiles generate_synthetic_league(const SynthConfig& config,
                                            const std::string& directory) {
    if (config.n_players < 10)
        throw std::runtime_error("synthetic league needs at least 10 players");
    if (config.noise_sd < 0.0)
        throw std::runtime_error("synthetic league noise_sd must be non-negative");
    if (config.retirement_hazard < 0.0 || config.retirement_hazard > 1.0)
        throw std::runtime_error("synthetic league retirement_hazard must lie in [0, 1]");

    SynthFiles files{.people = directory + "/people.csv",
                     .batting = directory + "/batting.csv",
                     .pitching = directory + "/pitching.csv",
                     .fielding = directory + "/fielding.csv",
                     .war = directory + "/war.csv",
                     .truth = directory + "/truth.csv"};

    CsvWriter people(files.people);
    people.row({"playerID", "birthYear", "bats", "throws", "height", "weight", "debut"});
    CsvWriter batting(files.batting);
    batting.row({"playerID", "yearID", "stint", "teamID", "G", "AB", "R", "H", "2B", "3B", "HR",
                 "RBI", "SB", "CS", "BB", "SO", "HBP", "SF", "GIDP"});
    CsvWriter pitching(files.pitching);
    pitching.row({"playerID", "yearID", "stint", "teamID", "W", "L", "G", "GS", "CG", "SHO", "SV",
                  "IPouts", "H", "ER", "HR", "BB", "SO", "BFP"});
    CsvWriter fielding(files.fielding);
    fielding.row({"playerID", "yearID", "POS", "G"});
    CsvWriter war(files.war);
    war.row({"player_id", "year", "kind", "war"});
    CsvWriter truth(files.truth);
    truth.row({"player_id", "year", "age", "season_index", "kind", "true_war", "observed_war"});

    static constexpr const char* kPositions[8] = {"C", "1B", "2B", "3B", "SS", "LF", "CF", "RF"};
    auto rng = seeded_stream(config.seed, "synth");

    for (std::size_t i = 0; i < config.n_players; ++i) {
        const std::string id = detail::synth_player_id(i);
        const bool is_batter = rng.uniform() < 0.6;  // no two-way players
        const int birth_year = 1950 + static_cast<int>(rng.below(26));
        const int debut_age = 20 + static_cast<int>(rng.below(6));
        const int debut_year = birth_year + debut_age;
        const double quality = rng.uniform(1.0, 5.0);
        const char* bats = (rng.below(3) == 0) ? "L" : (rng.below(2) == 0 ? "B" : "R");
        const char* throws = rng.below(4) == 0 ? "L" : "R";
        const long long height = 68 + static_cast<long long>(rng.below(8));
        const long long weight = 160 + static_cast<long long>(rng.below(60));
        const char* position = is_batter ? kPositions[i % 8] : "P";

        people.row({id, std::to_string(birth_year), bats, throws, std::to_string(height),
                    std::to_string(weight), std::to_string(debut_year) + "-04-01"});

        for (int index = 1; index <= 12; ++index) {
            if (index > 6 && rng.uniform() < config.retirement_hazard) break;
            const int age = debut_age + index - 1;
            const int year = debut_year + index - 1;
            const double true_war =
                quality - config.curvature * (age - config.peak_age) * (age - config.peak_age);
            const double observed = true_war + config.noise_sd * rng.normal();
            const bool split = rng.uniform() < 0.15;

            const auto emit_batting = [&](int stint, const char* team, double share) {
                const auto c = detail::synth_batting_counts(observed, share);
                batting.row({id, std::to_string(year), std::to_string(stint), team,
                             std::to_string(c.games), std::to_string(c.at_bats),
                             std::to_string(c.runs), std::to_string(c.hits),
                             std::to_string(c.doubles), std::to_string(c.triples),
                             std::to_string(c.home_runs), std::to_string(c.rbi),
                             std::to_string(c.stolen_bases), std::to_string(c.caught_stealing),
                             std::to_string(c.walks), std::to_string(c.strikeouts),
                             std::to_string(c.hbp), std::to_string(c.sac_flies),
                             std::to_string(c.gidp)});
                return c.games;
            };
            const auto emit_pitching = [&](int stint, const char* team, double share) {
                const auto c = detail::synth_pitching_counts(observed, share);
                pitching.row({id, std::to_string(year), std::to_string(stint), team,
                              std::to_string(c.wins), std::to_string(c.losses),
                              std::to_string(c.games), std::to_string(c.games_started),
                              std::to_string(c.complete_games), std::to_string(c.shutouts),
                              std::to_string(c.saves), std::to_string(c.ipouts),
                              std::to_string(c.hits), std::to_string(c.earned_runs),
                              std::to_string(c.home_runs), std::to_string(c.walks),
                              std::to_string(c.strikeouts), std::to_string(c.batters_faced)});
                return c.games;
            };

            long long fielding_games = 0;
            if (is_batter) {
                if (split) {
                    fielding_games += emit_batting(1, "SYA", 0.55);
                    fielding_games += emit_batting(2, "SYB", 0.45);
                } else {
                    fielding_games += emit_batting(1, "SYN", 1.0);
                }
            } else {
                if (split) {
                    fielding_games += emit_pitching(1, "SYA", 0.55);
                    fielding_games += emit_pitching(2, "SYB", 0.45);
                } else {
                    fielding_games += emit_pitching(1, "SYN", 1.0);
                }
            }
            fielding.row({id, std::to_string(year), position, std::to_string(fielding_games)});

            const char* kind = is_batter ? "batting" : "pitching";
            war.row({id, std::to_string(year), kind, format_exact(observed)});
            truth.row({id, std::to_string(year), std::to_string(age), std::to_string(index), kind,
                       format_exact(true_war), format_exact(observed)});
        }
    }
    return files;
}

}  // namespace warcast
