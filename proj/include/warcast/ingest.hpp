#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "warcast/csv.hpp"

namespace warcast {

enum class Hand { right, left, switch_hitter, unknown };
enum class Position { P, C, first, second, third, SS, LF, CF, RF, DH, unknown };
enum class WarKind { batting, pitching };

inline std::string_view to_string(Hand h) {
    switch (h) {
        case Hand::right: return "right";
        case Hand::left: return "left";
        case Hand::switch_hitter: return "switch";
        default: return "unknown";
    }
}

inline std::string_view to_string(Position p) {
    switch (p) {
        case Position::P: return "P";
        case Position::C: return "C";
        case Position::first: return "1B";
        case Position::second: return "2B";
        case Position::third: return "3B";
        case Position::SS: return "SS";
        case Position::LF: return "LF";
        case Position::CF: return "CF";
        case Position::RF: return "RF";
        case Position::DH: return "DH";
        default: return "unknown";
    }
}

inline std::string_view to_string(WarKind k) {
    return k == WarKind::batting ? "batting" : "pitching";
}

constexpr std::array<Position, 11> all_positions = {
    Position::P,  Position::C,  Position::first, Position::second, Position::third, Position::SS,
    Position::LF, Position::CF, Position::RF,    Position::DH,     Position::unknown};

// Defensive-spectrum order used for tie-breaking; harder position first.
constexpr std::array<Position, 10> defensive_spectrum = {
    Position::P,  Position::C,  Position::SS, Position::second, Position::CF,
    Position::third, Position::RF, Position::LF, Position::first,  Position::DH};

struct BattingCounts {
    long long games = 0, at_bats = 0, runs = 0, hits = 0, doubles = 0, triples = 0, home_runs = 0,
              rbi = 0, stolen_bases = 0, caught_stealing = 0, walks = 0, strikeouts = 0, hbp = 0,
              sac_flies = 0, gidp = 0;

    bool operator==(const BattingCounts&) const = default;
};

struct PitchingCounts {
    long long wins = 0, losses = 0, games = 0, games_started = 0, complete_games = 0, shutouts = 0,
              saves = 0, ipouts = 0, hits = 0, earned_runs = 0, home_runs = 0, walks = 0,
              strikeouts = 0, batters_faced = 0;

    bool operator==(const PitchingCounts&) const = default;
};

// (logical name, member) tables drive parsing, merging, the conservation
// oracle, and feature naming from one place.
struct BattingFieldDef {
    const char* name;
    long long BattingCounts::* member;
};
struct PitchingFieldDef {
    const char* name;
    long long PitchingCounts::* member;
};

inline const std::array<BattingFieldDef, 15>& batting_fields() {
    static const std::array<BattingFieldDef, 15> defs = {{
        {"games", &BattingCounts::games},
        {"at_bats", &BattingCounts::at_bats},
        {"runs", &BattingCounts::runs},
        {"hits", &BattingCounts::hits},
        {"doubles", &BattingCounts::doubles},
        {"triples", &BattingCounts::triples},
        {"home_runs", &BattingCounts::home_runs},
        {"rbi", &BattingCounts::rbi},
        {"stolen_bases", &BattingCounts::stolen_bases},
        {"caught_stealing", &BattingCounts::caught_stealing},
        {"walks", &BattingCounts::walks},
        {"strikeouts", &BattingCounts::strikeouts},
        {"hbp", &BattingCounts::hbp},
        {"sac_flies", &BattingCounts::sac_flies},
        {"gidp", &BattingCounts::gidp},
    }};
    return defs;
}

inline const std::array<PitchingFieldDef, 14>& pitching_fields() {
    static const std::array<PitchingFieldDef, 14> defs = {{
        {"wins", &PitchingCounts::wins},
        {"losses", &PitchingCounts::losses},
        {"games", &PitchingCounts::games},
        {"games_started", &PitchingCounts::games_started},
        {"complete_games", &PitchingCounts::complete_games},
        {"shutouts", &PitchingCounts::shutouts},
        {"saves", &PitchingCounts::saves},
        {"ipouts", &PitchingCounts::ipouts},
        {"hits", &PitchingCounts::hits},
        {"earned_runs", &PitchingCounts::earned_runs},
        {"home_runs", &PitchingCounts::home_runs},
        {"walks", &PitchingCounts::walks},
        {"strikeouts", &PitchingCounts::strikeouts},
        {"batters_faced", &PitchingCounts::batters_faced},
    }};
    return defs;
}

struct RawBattingStint {
    std::string player_id;
    int year = 0;
    int stint_no = 0;
    std::string team;
    BattingCounts counts;

    bool operator==(const RawBattingStint&) const = default;
};

struct RawPitchingStint {
    std::string player_id;
    int year = 0;
    int stint_no = 0;
    std::string team;
    PitchingCounts counts;

    bool operator==(const RawPitchingStint&) const = default;
};

struct BattingSeason {
    std::string player_id;
    int year = 0;
    std::string team;  // team of the highest stint
    BattingCounts counts;
    std::optional<double> war;  // absent until attach_war finds a record

    bool operator==(const BattingSeason&) const = default;
};

struct PitchingSeason {
    std::string player_id;
    int year = 0;
    std::string team;
    PitchingCounts counts;
    std::optional<double> war;

    bool operator==(const PitchingSeason&) const = default;
};

struct FieldingRow {
    std::string player_id;
    int year = 0;
    std::string position;  // raw token, e.g. "SS" or "OF"
    long long games = 0;

    bool operator==(const FieldingRow&) const = default;
};

struct PlayerBio {
    std::string player_id;
    std::optional<int> birth_year;
    int debut_year = 0;   // from the people table when present, else min year of any activity
    int final_year = -1;  // last year with any activity
    Hand bats = Hand::unknown;
    Hand throws = Hand::unknown;
    int height = 0;  // inches, 0 when unrecorded
    int weight = 0;  // pounds, 0 when unrecorded
    Position primary_position = Position::unknown;

    bool operator==(const PlayerBio&) const = default;

    int career_span() const { return final_year - debut_year + 1; }
    std::optional<int> age_at_debut() const {
        if (!birth_year) return std::nullopt;
        return debut_year - *birth_year;
    }
};

struct WarRecord {
    std::string player_id;
    int year = 0;
    WarKind kind = WarKind::batting;
    double war = 0.0;

    bool operator==(const WarRecord&) const = default;
};

struct Reject {
    std::string file;
    std::size_t line = 0;
    std::string reason;
};

struct RejectsReport {
    std::vector<Reject> entries;

    void add(std::string file, std::size_t line, std::string reason) {
        entries.push_back({std::move(file), line, std::move(reason)});
    }

    void write_csv(const std::string& path) const {
        CsvWriter out(path);
        out.row({"file", "line", "reason"});
        for (const auto& r : entries) out.row({r.file, std::to_string(r.line), r.reason});
    }
};

struct Dataset {
    std::vector<RawBattingStint> batting_stints;
    std::vector<RawPitchingStint> pitching_stints;
    std::vector<BattingSeason> batting_seasons;    // filled by merge_stints
    std::vector<PitchingSeason> pitching_seasons;  // filled by merge_stints
    std::vector<FieldingRow> fielding;
    std::vector<PlayerBio> bios;  // sorted by player_id
    std::vector<WarRecord> wars;

    const PlayerBio* find_bio(std::string_view player_id) const {
        auto it = std::lower_bound(bios.begin(), bios.end(), player_id,
                                   [](const PlayerBio& b, std::string_view id) {
                                       return b.player_id < id;
                                   });
        if (it == bios.end() || it->player_id != player_id) return nullptr;
        return &*it;
    }
};

// Logical-name -> CSV-header mapping per input table, overridable from the
// run config so non-Lahman exports can be adapted.
struct ColumnMap {
    std::map<std::string, std::string> batting, pitching, people, fielding, war;

    static ColumnMap lahman() {
        ColumnMap m;
        m.batting = {{"player_id", "playerID"}, {"year", "yearID"},   {"stint", "stint"},
                     {"team", "teamID"},        {"games", "G"},       {"at_bats", "AB"},
                     {"runs", "R"},             {"hits", "H"},        {"doubles", "2B"},
                     {"triples", "3B"},         {"home_runs", "HR"},  {"rbi", "RBI"},
                     {"stolen_bases", "SB"},    {"caught_stealing", "CS"}, {"walks", "BB"},
                     {"strikeouts", "SO"},      {"hbp", "HBP"},       {"sac_flies", "SF"},
                     {"gidp", "GIDP"}};
        m.pitching = {{"player_id", "playerID"}, {"year", "yearID"},       {"stint", "stint"},
                      {"team", "teamID"},        {"wins", "W"},            {"losses", "L"},
                      {"games", "G"},            {"games_started", "GS"},  {"complete_games", "CG"},
                      {"shutouts", "SHO"},       {"saves", "SV"},          {"ipouts", "IPouts"},
                      {"hits", "H"},             {"earned_runs", "ER"},    {"home_runs", "HR"},
                      {"walks", "BB"},           {"strikeouts", "SO"},     {"batters_faced", "BFP"}};
        m.people = {{"player_id", "playerID"}, {"birth_year", "birthYear"}, {"bats", "bats"},
                    {"throws", "throws"},      {"height", "height"},        {"weight", "weight"},
                    {"debut", "debut"}};
        m.fielding = {{"player_id", "playerID"},
                      {"year", "yearID"},
                      {"position", "POS"},
                      {"games", "G"}};
        m.war = {{"player_id", "player_id"}, {"year", "year"}, {"kind", "kind"}, {"war", "war"}};
        return m;
    }
};

struct LoadPaths {
    std::string batting, pitching, people, fielding;
    std::vector<std::string> wars;
};

struct LoadResult {
    Dataset dataset;
    RejectsReport rejects;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

inline std::optional<long long> parse_int(std::string_view cell) {
    cell = trim(cell);
    if (cell.empty()) return std::nullopt;
    long long v = 0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc{} || ptr != cell.data() + cell.size()) return std::nullopt;
    return v;
}

// Blank numeric cells read as 0; anything else must be an integer.
inline std::optional<long long> parse_count(std::string_view cell) {
    cell = trim(cell);
    if (cell.empty()) return 0;
    return parse_int(cell);
}

inline std::optional<double> parse_real(std::string_view cell) {
    cell = trim(cell);
    if (cell.empty()) return std::nullopt;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc{} || ptr != cell.data() + cell.size()) return std::nullopt;
    return v;
}

inline Hand parse_hand(std::string_view cell) {
    cell = trim(cell);
    if (cell == "R") return Hand::right;
    if (cell == "L") return Hand::left;
    if (cell == "B" || cell == "S") return Hand::switch_hitter;
    return Hand::unknown;
}

inline const std::string& mapped(const std::map<std::string, std::string>& columns,
                                 const std::string& logical) {
    auto it = columns.find(logical);
    if (it == columns.end())
        throw std::runtime_error("column map is missing logical column '" + logical + "'");
    return it->second;
}

// Resolves the required columns of `table` per the map; throws naming any
// absent column.
inline std::size_t required_index(const CsvTable& table,
                                  const std::map<std::string, std::string>& columns,
                                  const std::string& logical) {
    return table.require_column(mapped(columns, logical));
}

inline const std::string& cell_at(const std::vector<std::string>& row, std::size_t idx) {
    static const std::string empty;
    return idx < row.size() ? row[idx] : empty;
}

template <class CountsT, class FieldDefs>
bool parse_counts(const std::vector<std::string>& row, const std::vector<std::size_t>& indices,
                  const FieldDefs& defs, CountsT& out, std::string& error) {
    for (std::size_t f = 0; f < defs.size(); ++f) {
        const auto parsed = parse_count(cell_at(row, indices[f]));
        if (!parsed) {
            error = std::string("unparseable ") + defs[f].name + " value '" +
                    cell_at(row, indices[f]) + "'";
            return false;
        }
        if (*parsed < 0) {
            error = std::string("negative ") + defs[f].name;
            return false;
        }
        out.*(defs[f].member) = *parsed;
    }
    return true;
}

}  // namespace detail

// Career-games position leader; ties go to the harder position on the
// defensive spectrum. "OF" rows (exports that pre-date the LF/CF/RF split)
// count toward CF.
inline Position derive_primary_position(const std::vector<FieldingRow>& fielding,
                                        std::string_view player_id) {
    std::map<Position, long long> games;
    for (const auto& row : fielding) {
        if (row.player_id != player_id || row.games <= 0) continue;
        Position pos = Position::unknown;
        for (Position p : all_positions)
            if (row.position == to_string(p)) pos = p;
        if (row.position == "OF") pos = Position::CF;
        if (pos != Position::unknown) games[pos] += row.games;
    }
    Position best = Position::unknown;
    long long best_games = 0;
    for (Position p : defensive_spectrum) {
        auto it = games.find(p);
        if (it != games.end() && it->second > best_games) {
            best = p;
            best_games = it->second;
        }
    }
    return best;
}

// Parses the five raw tables. Rows with unparseable required fields are
// recorded in the rejects report and skipped; the load itself only fails on
// unreadable files or missing columns.
inline LoadResult load_dataset(const LoadPaths& paths, const ColumnMap& columns = ColumnMap::lahman()) {
    LoadResult result;
    Dataset& ds = result.dataset;
    RejectsReport& rejects = result.rejects;

    // people first; season rows must reference a known player.
    {
        const CsvTable table = read_csv(paths.people);
        const auto idx_pid = detail::required_index(table, columns.people, "player_id");
        const auto idx_birth = detail::required_index(table, columns.people, "birth_year");
        const auto idx_bats = detail::required_index(table, columns.people, "bats");
        const auto idx_throws = detail::required_index(table, columns.people, "throws");
        const auto idx_height = detail::required_index(table, columns.people, "height");
        const auto idx_weight = detail::required_index(table, columns.people, "weight");
        const auto idx_debut = table.column(detail::mapped(columns.people, "debut"));

        std::set<std::string> seen;
        for (std::size_t r = 0; r < table.rows.size(); ++r) {
            const auto& row = table.rows[r];
            const std::size_t line = r + 2;
            const std::string pid(detail::trim(detail::cell_at(row, idx_pid)));
            if (pid.empty()) {
                rejects.add(paths.people, line, "blank player_id");
                continue;
            }
            if (!seen.insert(pid).second) {
                rejects.add(paths.people, line, "duplicate player_id " + pid);
                continue;
            }
            PlayerBio bio;
            bio.player_id = pid;
            if (auto birth = detail::parse_int(detail::cell_at(row, idx_birth))) {
                bio.birth_year = static_cast<int>(*birth);
            }
            bio.bats = detail::parse_hand(detail::cell_at(row, idx_bats));
            bio.throws = detail::parse_hand(detail::cell_at(row, idx_throws));
            if (bio.throws == Hand::switch_hitter) bio.throws = Hand::unknown;
            bio.height = static_cast<int>(detail::parse_count(detail::cell_at(row, idx_height)).value_or(0));
            bio.weight = static_cast<int>(detail::parse_count(detail::cell_at(row, idx_weight)).value_or(0));
            if (idx_debut) {
                // Lahman stores a date string; only the year is needed.
                const auto debut = detail::trim(detail::cell_at(row, *idx_debut));
                if (debut.size() >= 4)
                    if (auto year = detail::parse_int(debut.substr(0, 4)))
                        bio.debut_year = static_cast<int>(*year);
            }
            ds.bios.push_back(std::move(bio));
        }
        std::sort(ds.bios.begin(), ds.bios.end(),
                  [](const PlayerBio& a, const PlayerBio& b) { return a.player_id < b.player_id; });
    }

    auto known_player = [&](const std::string& pid) { return ds.find_bio(pid) != nullptr; };

    // batting stints
    {
        const CsvTable table = read_csv(paths.batting);
        const auto idx_pid = detail::required_index(table, columns.batting, "player_id");
        const auto idx_year = detail::required_index(table, columns.batting, "year");
        const auto idx_stint = detail::required_index(table, columns.batting, "stint");
        const auto idx_team = detail::required_index(table, columns.batting, "team");
        std::vector<std::size_t> stat_idx;
        for (const auto& def : batting_fields())
            stat_idx.push_back(detail::required_index(table, columns.batting, def.name));

        std::set<std::tuple<std::string, int, int>> seen;
        for (std::size_t r = 0; r < table.rows.size(); ++r) {
            const auto& row = table.rows[r];
            const std::size_t line = r + 2;
            RawBattingStint stint;
            stint.player_id = std::string(detail::trim(detail::cell_at(row, idx_pid)));
            const auto year = detail::parse_int(detail::cell_at(row, idx_year));
            const auto stint_no = detail::parse_int(detail::cell_at(row, idx_stint));
            if (stint.player_id.empty() || !year || !stint_no || *stint_no < 1) {
                rejects.add(paths.batting, line, "bad player_id/year/stint key");
                continue;
            }
            stint.year = static_cast<int>(*year);
            stint.stint_no = static_cast<int>(*stint_no);
            stint.team = std::string(detail::trim(detail::cell_at(row, idx_team)));
            std::string error;
            if (!detail::parse_counts(row, stat_idx, batting_fields(), stint.counts, error)) {
                rejects.add(paths.batting, line, error);
                continue;
            }
            const auto& c = stint.counts;
            if (c.hits > c.at_bats) {
                rejects.add(paths.batting, line, "hits exceed at_bats");
                continue;
            }
            if (c.doubles + c.triples + c.home_runs > c.hits) {
                rejects.add(paths.batting, line, "extra-base hits exceed hits");
                continue;
            }
            if (!known_player(stint.player_id)) {
                rejects.add(paths.batting, line, "unknown player_id " + stint.player_id);
                continue;
            }
            if (!seen.insert({stint.player_id, stint.year, stint.stint_no}).second) {
                rejects.add(paths.batting, line, "duplicate (player_id, year, stint)");
                continue;
            }
            ds.batting_stints.push_back(std::move(stint));
        }
    }

    // pitching stints
    {
        const CsvTable table = read_csv(paths.pitching);
        const auto idx_pid = detail::required_index(table, columns.pitching, "player_id");
        const auto idx_year = detail::required_index(table, columns.pitching, "year");
        const auto idx_stint = detail::required_index(table, columns.pitching, "stint");
        const auto idx_team = detail::required_index(table, columns.pitching, "team");
        std::vector<std::size_t> stat_idx;
        for (const auto& def : pitching_fields())
            stat_idx.push_back(detail::required_index(table, columns.pitching, def.name));

        std::set<std::tuple<std::string, int, int>> seen;
        for (std::size_t r = 0; r < table.rows.size(); ++r) {
            const auto& row = table.rows[r];
            const std::size_t line = r + 2;
            RawPitchingStint stint;
            stint.player_id = std::string(detail::trim(detail::cell_at(row, idx_pid)));
            const auto year = detail::parse_int(detail::cell_at(row, idx_year));
            const auto stint_no = detail::parse_int(detail::cell_at(row, idx_stint));
            if (stint.player_id.empty() || !year || !stint_no || *stint_no < 1) {
                rejects.add(paths.pitching, line, "bad player_id/year/stint key");
                continue;
            }
            stint.year = static_cast<int>(*year);
            stint.stint_no = static_cast<int>(*stint_no);
            stint.team = std::string(detail::trim(detail::cell_at(row, idx_team)));
            std::string error;
            if (!detail::parse_counts(row, stat_idx, pitching_fields(), stint.counts, error)) {
                rejects.add(paths.pitching, line, error);
                continue;
            }
            const auto& c = stint.counts;
            if (c.complete_games > c.games_started || c.games_started > c.games) {
                rejects.add(paths.pitching, line, "complete_games/games_started/games out of order");
                continue;
            }
            if (!known_player(stint.player_id)) {
                rejects.add(paths.pitching, line, "unknown player_id " + stint.player_id);
                continue;
            }
            if (!seen.insert({stint.player_id, stint.year, stint.stint_no}).second) {
                rejects.add(paths.pitching, line, "duplicate (player_id, year, stint)");
                continue;
            }
            ds.pitching_stints.push_back(std::move(stint));
        }
    }

    // fielding
    {
        const CsvTable table = read_csv(paths.fielding);
        const auto idx_pid = detail::required_index(table, columns.fielding, "player_id");
        const auto idx_year = detail::required_index(table, columns.fielding, "year");
        const auto idx_pos = detail::required_index(table, columns.fielding, "position");
        const auto idx_games = detail::required_index(table, columns.fielding, "games");

        for (std::size_t r = 0; r < table.rows.size(); ++r) {
            const auto& row = table.rows[r];
            const std::size_t line = r + 2;
            FieldingRow frow;
            frow.player_id = std::string(detail::trim(detail::cell_at(row, idx_pid)));
            const auto year = detail::parse_int(detail::cell_at(row, idx_year));
            const auto games = detail::parse_count(detail::cell_at(row, idx_games));
            if (frow.player_id.empty() || !year) {
                rejects.add(paths.fielding, line, "bad player_id/year key");
                continue;
            }
            if (!games || *games < 0) {
                rejects.add(paths.fielding, line, "unparseable games value");
                continue;
            }
            frow.year = static_cast<int>(*year);
            frow.games = *games;
            frow.position = std::string(detail::trim(detail::cell_at(row, idx_pos)));
            if (!known_player(frow.player_id)) {
                rejects.add(paths.fielding, line, "unknown player_id " + frow.player_id);
                continue;
            }
            ds.fielding.push_back(std::move(frow));
        }
        std::sort(ds.fielding.begin(), ds.fielding.end(), [](const FieldingRow& a, const FieldingRow& b) {
            return std::tie(a.player_id, a.year, a.position) < std::tie(b.player_id, b.year, b.position);
        });
    }

    // WAR files (batting WAR and pitching WAR may arrive separately)
    {
        std::set<std::tuple<std::string, int, WarKind>> seen;
        for (const auto& path : paths.wars) {
            const CsvTable table = read_csv(path);
            const auto idx_pid = detail::required_index(table, columns.war, "player_id");
            const auto idx_year = detail::required_index(table, columns.war, "year");
            const auto idx_kind = detail::required_index(table, columns.war, "kind");
            const auto idx_war = detail::required_index(table, columns.war, "war");

            for (std::size_t r = 0; r < table.rows.size(); ++r) {
                const auto& row = table.rows[r];
                const std::size_t line = r + 2;
                WarRecord rec;
                rec.player_id = std::string(detail::trim(detail::cell_at(row, idx_pid)));
                const auto year = detail::parse_int(detail::cell_at(row, idx_year));
                const auto war = detail::parse_real(detail::cell_at(row, idx_war));
                const auto kind = detail::trim(detail::cell_at(row, idx_kind));
                if (rec.player_id.empty() || !year) {
                    rejects.add(path, line, "bad player_id/year key");
                    continue;
                }
                if (kind == "batting") {
                    rec.kind = WarKind::batting;
                } else if (kind == "pitching") {
                    rec.kind = WarKind::pitching;
                } else {
                    rejects.add(path, line, "unknown kind '" + std::string(kind) + "'");
                    continue;
                }
                if (!war) {
                    rejects.add(path, line, "unparseable war value");
                    continue;
                }
                rec.year = static_cast<int>(*year);
                rec.war = *war;
                if (!known_player(rec.player_id)) {
                    rejects.add(path, line, "unknown player_id " + rec.player_id);
                    continue;
                }
                if (!seen.insert({rec.player_id, rec.year, rec.kind}).second) {
                    rejects.add(path, line, "duplicate (player_id, year, kind)");
                    continue;
                }
                ds.wars.push_back(std::move(rec));
            }
        }
        std::sort(ds.wars.begin(), ds.wars.end(), [](const WarRecord& a, const WarRecord& b) {
            return std::tie(a.player_id, a.year, a.kind) < std::tie(b.player_id, b.year, b.kind);
        });
    }

    // Derive debut (when the people table lacked one), final activity year,
    // and primary position.
    {
        std::unordered_map<std::string, std::pair<int, int>> activity;  // pid -> (min, max) year
        auto note = [&](const std::string& pid, int year) {
            auto [it, inserted] = activity.try_emplace(pid, year, year);
            if (!inserted) {
                it->second.first = std::min(it->second.first, year);
                it->second.second = std::max(it->second.second, year);
            }
        };
        for (const auto& s : ds.batting_stints) note(s.player_id, s.year);
        for (const auto& s : ds.pitching_stints) note(s.player_id, s.year);
        for (const auto& f : ds.fielding) note(f.player_id, f.year);

        for (auto& bio : ds.bios) {
            auto it = activity.find(bio.player_id);
            if (it != activity.end()) {
                if (bio.debut_year == 0) bio.debut_year = it->second.first;
                bio.final_year = it->second.second;
            }
            bio.primary_position = derive_primary_position(ds.fielding, bio.player_id);
            if (bio.birth_year && bio.debut_year != 0 && bio.debut_year < *bio.birth_year + 15) {
                rejects.add(paths.people, 0,
                            "implausible debut before age 15 for " + bio.player_id +
                                "; birth year cleared");
                bio.birth_year.reset();
            }
        }
    }

    return result;
}

// Sums stints of the same (player_id, year) component-wise; the merged
// season keeps the team of the highest stint. Already-merged input (no raw
// stints) passes through unchanged.
inline Dataset merge_stints(Dataset ds) {
    if (!ds.batting_stints.empty()) {
        std::sort(ds.batting_stints.begin(), ds.batting_stints.end(),
                  [](const RawBattingStint& a, const RawBattingStint& b) {
                      return std::tie(a.player_id, a.year, a.stint_no) <
                             std::tie(b.player_id, b.year, b.stint_no);
                  });
        ds.batting_seasons.clear();
        for (const auto& stint : ds.batting_stints) {
            auto* season = ds.batting_seasons.empty() ? nullptr : &ds.batting_seasons.back();
            if (!season || season->player_id != stint.player_id || season->year != stint.year) {
                ds.batting_seasons.push_back(
                    {stint.player_id, stint.year, stint.team, stint.counts, std::nullopt});
                continue;
            }
            for (const auto& def : batting_fields())
                season->counts.*(def.member) += stint.counts.*(def.member);
            season->team = stint.team;  // highest stint_no wins; input is sorted
        }
        ds.batting_stints.clear();
    }
    if (!ds.pitching_stints.empty()) {
        std::sort(ds.pitching_stints.begin(), ds.pitching_stints.end(),
                  [](const RawPitchingStint& a, const RawPitchingStint& b) {
                      return std::tie(a.player_id, a.year, a.stint_no) <
                             std::tie(b.player_id, b.year, b.stint_no);
                  });
        ds.pitching_seasons.clear();
        for (const auto& stint : ds.pitching_stints) {
            auto* season = ds.pitching_seasons.empty() ? nullptr : &ds.pitching_seasons.back();
            if (!season || season->player_id != stint.player_id || season->year != stint.year) {
                ds.pitching_seasons.push_back(
                    {stint.player_id, stint.year, stint.team, stint.counts, std::nullopt});
                continue;
            }
            for (const auto& def : pitching_fields())
                season->counts.*(def.member) += stint.counts.*(def.member);
            season->team = stint.team;
        }
        ds.pitching_stints.clear();
    }
    return ds;
}

// Joins WAR records onto merged seasons by (player_id, year, kind). Seasons
// with no record keep the explicit absent marker; the 0-substitution policy
// belongs to target construction, not here.
inline Dataset attach_war(Dataset ds, RejectsReport& rejects) {
    std::map<std::pair<std::string_view, int>, BattingSeason*> batting;
    for (auto& s : ds.batting_seasons) batting[{s.player_id, s.year}] = &s;
    std::map<std::pair<std::string_view, int>, PitchingSeason*> pitching;
    for (auto& s : ds.pitching_seasons) pitching[{s.player_id, s.year}] = &s;

    for (const auto& rec : ds.wars) {
        if (!ds.find_bio(rec.player_id)) {
            rejects.add("war", 0, "WAR record for unknown player_id " + rec.player_id);
            continue;
        }
        if (rec.kind == WarKind::batting) {
            auto it = batting.find({rec.player_id, rec.year});
            if (it != batting.end()) it->second->war = rec.war;
        } else {
            auto it = pitching.find({rec.player_id, rec.year});
            if (it != pitching.end()) it->second->war = rec.war;
        }
    }
    return ds;
}

}  // namespace warcast
