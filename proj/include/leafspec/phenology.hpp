#pragma once

// Growing-degree-day accumulation and the named growth-stage table.

#include <cmath>
#include <string>
#include <vector>

#include "leafspec/core.hpp"

namespace leafspec {

// Daily record; either t_mean is present or both t_min and t_max are.
// Dates are ISO-8601 strings, which order lexicographically.
struct TemperatureRecord {
    std::string date;
    bool has_mean = false;
    double t_mean = 0.0;
    bool has_min_max = false;
    double t_min = 0.0;
    double t_max = 0.0;

    double daily_mean() const {
        if (has_mean) return t_mean;
        require(has_min_max, "phenology", "record " + date + " has no temperature data");
        return (t_min + t_max) / 2.0;
    }
};

struct GddConfig {
    double t_base_c = 10.0;
    // Daily contributions below the base clamp to zero by default; the flag
    // exposes the unclamped raw sum.
    bool clamp_negative = true;

    void validate() const { require(std::isfinite(t_base_c), "config", "t_base not finite"); }
};

inline double compute_gdd(const std::vector<TemperatureRecord>& records, const GddConfig& cfg) {
    cfg.validate();
    double gdd = 0.0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& rec = records[i];
        require(!rec.date.empty(), "phenology", "record missing date");
        if (i > 0) {
            require(records[i - 1].date < rec.date, "phenology",
                    "records unordered or duplicated at date " + rec.date);
        }
        if (rec.has_min_max)
            require(rec.t_min <= rec.t_max, "phenology", "t_min > t_max at " + rec.date);
        const double inc = rec.daily_mean() - cfg.t_base_c;
        gdd += cfg.clamp_negative ? std::max(0.0, inc) : inc;
    }
    return gdd;
}

struct StageTable {
    std::vector<std::pair<std::string, double>> stages;

    static StageTable standard() {
        return StageTable{{{"vegetative", 585.0},
                           {"flowering", 897.0},
                           {"fruit development", 1216.0},
                           {"ripening", 1568.0}}};
    }

    void validate() const {
        require(!stages.empty(), "phenology", "empty stage table");
        for (std::size_t i = 1; i < stages.size(); ++i)
            require(stages[i].second > stages[i - 1].second, "phenology",
                    "stage GDD values not strictly increasing");
    }
};

// The greatest stage whose threshold is <= gdd; "pre-vegetative" below the
// first threshold.
inline std::string stage_of(double gdd, const StageTable& table) {
    table.validate();
    require(gdd >= 0.0, "phenology", "negative GDD");
    std::string name = "pre-vegetative";
    for (const auto& [stage, threshold] : table.stages) {
        if (gdd >= threshold)
            name = stage;
        else
            break;
    }
    return name;
}

}  // namespace leafspec
