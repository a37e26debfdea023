#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "warcast/cohort.hpp"
#include "warcast/csv.hpp"

namespace warcast {

struct AgeDelta {
    double mean = 0.0;
    long long count = 0;
};

// Mean season-over-season WAR change per age step, the classical aging-curve
// baseline: delta(a) averages WAR(a+1) - WAR(a) over every training player
// with recorded WAR at both ages.
struct AgingCurve {
    std::map<int, AgeDelta> deltas;  // age a -> mean change stepping to a+1

    bool empty() const { return deltas.empty(); }

    // Delta applied when stepping from `age` to `age + 1`. Ages outside the
    // fitted range clamp to the nearest end; interior gaps borrow the nearest
    // recorded age (ties toward the younger age). An empty curve degenerates
    // to persistence: every step contributes zero.
    double delta_at(int age) const {
        if (deltas.empty()) return 0.0;
        const auto at_or_above = deltas.lower_bound(age);
        if (at_or_above != deltas.end() && at_or_above->first == age)
            return at_or_above->second.mean;
        if (at_or_above == deltas.end()) return std::prev(deltas.end())->second.mean;
        if (at_or_above == deltas.begin()) return at_or_above->second.mean;
        const auto below = std::prev(at_or_above);
        return (age - below->first) <= (at_or_above->first - age) ? below->second.mean
                                                                  : at_or_above->second.mean;
    }
};

template <class SeasonT>
AgingCurve fit_aging_curve(const std::vector<Career<SeasonT>>& training_careers) {
    std::map<int, std::pair<double, long long>> sums;  // age -> (sum of changes, n)
    for (const auto& career : training_careers) {
        if (!career.bio.birth_year) continue;  // cohort rules exclude these already
        const int birth = *career.bio.birth_year;

        std::map<int, double> war_by_age;
        for (const auto& [index, season] : career.seasons)
            if (season.war) war_by_age[season.year - birth] = *season.war;

        for (const auto& [age, war] : war_by_age) {
            const auto next = war_by_age.find(age + 1);
            if (next == war_by_age.end()) continue;  // must be recorded at both ages
            auto& slot = sums[age];
            slot.first += next->second - war;
            slot.second += 1;
        }
    }

    AgingCurve curve;
    for (const auto& [age, slot] : sums)
        curve.deltas[age] = {slot.first / static_cast<double>(slot.second), slot.second};
    return curve;
}

struct BaselinePrediction {
    double war = 0.0;
    bool base_substituted = false;  // season-6 WAR missing; zero used as the base
};

// Chains the curve forward from the season-6 WAR: one delta per age step up
// to the target season. The baseline has no retirement model, so it predicts
// for every target season regardless of later activity.
template <class SeasonT>
BaselinePrediction predict_delta_method(const Career<SeasonT>& career, const AgingCurve& curve,
                                        int target_year) {
    if (target_year <= kSeasonBoundary || target_year > 11)
        throw std::runtime_error("delta method target season must lie in [7, 11]");

    BaselinePrediction prediction;
    const auto base = career.seasons.find(kSeasonBoundary);
    if (base != career.seasons.end() && base->second.war) {
        prediction.war = *base->second.war;
    } else {
        prediction.base_substituted = true;  // base stays 0
    }

    int age = career.age_at_debut + kSeasonBoundary - 1;
    for (int season = kSeasonBoundary; season < target_year; ++season, ++age)
        prediction.war += curve.delta_at(age);
    return prediction;
}

inline void write_aging_curve_csv(const AgingCurve& curve, const std::string& path) {
    CsvWriter writer(path);
    writer.row({"age", "delta", "n"});
    for (const auto& [age, delta] : curve.deltas)
        writer.row({std::to_string(age), format_double(delta.mean), std::to_string(delta.count)});
}

}  // namespace warcast
