#pragma once

#include <span>
#include <stdexcept>
#include <vector>

namespace warcast {

// Coefficient of determination: 1 - SS_res / SS_tot.
inline double r_squared(std::span<const double> actual, std::span<const double> predicted) {
    if (actual.size() != predicted.size())
        throw std::runtime_error("r_squared needs equal-length vectors");
    if (actual.size() < 2) throw std::runtime_error("r_squared needs at least two observations");

    double mean = 0.0;
    for (double v : actual) mean += v;
    mean /= static_cast<double>(actual.size());

    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        ss_res += (actual[i] - predicted[i]) * (actual[i] - predicted[i]);
        ss_tot += (actual[i] - mean) * (actual[i] - mean);
    }
    if (ss_tot == 0.0) throw std::runtime_error("r_squared is undefined when actuals are identical");
    return 1.0 - ss_res / ss_tot;
}

}  // namespace warcast
