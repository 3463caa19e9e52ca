#pragma once

// Class-contrast diagnostics and the plant-level class balancing rule.

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "leafspec/core.hpp"
#include "leafspec/spectral_types.hpp"

namespace leafspec {

inline ClassMeanProfile class_mean_profile(const SpectralDataset& ds) {
    ClassMeanProfile p;
    p.grid_nm = ds.grid.nm;
    p.mu_non.assign(ds.n_bands(), 0.0);
    p.mu_inf.assign(ds.n_bands(), 0.0);
    std::size_t n_non = 0, n_inf = 0;
    for (std::size_t r = 0; r < ds.n_samples(); ++r) {
        auto& acc = ds.labels[r] == kLabelInfected ? p.mu_inf : p.mu_non;
        (ds.labels[r] == kLabelInfected ? n_inf : n_non) += 1;
        for (std::size_t c = 0; c < ds.n_bands(); ++c) acc[c] += ds.samples(r, c);
    }
    require(n_non > 0 && n_inf > 0, "diagnostics", "both classes required for class means");
    for (std::size_t c = 0; c < ds.n_bands(); ++c) {
        p.mu_non[c] /= static_cast<double>(n_non);
        p.mu_inf[c] /= static_cast<double>(n_inf);
    }
    return p;
}

// RMD_b = (mu_non - mu_inf) / mu_non per band.
inline std::vector<double> relative_mean_difference(const ClassMeanProfile& profile) {
    require(profile.mu_non.size() == profile.mu_inf.size() &&
                profile.mu_non.size() == profile.grid_nm.size(),
            "diagnostics", "profile length mismatch");
    std::vector<double> rmd(profile.mu_non.size());
    for (std::size_t b = 0; b < rmd.size(); ++b) {
        require(profile.mu_non[b] != 0.0, "diagnostics",
                "undefined RMD at band " + std::to_string(profile.grid_nm[b]) + " nm");
        rmd[b] = (profile.mu_non[b] - profile.mu_inf[b]) / profile.mu_non[b];
    }
    return rmd;
}

// Keeps all infected plants; among non-infected plants whose scalar mean
// reflectance lies within one SD (population) of the non-infected grand
// mean, keeps the n_infected plants closest to that grand mean. Ties break
// by plant_id order. Row order of the survivors is preserved. The seed is
// reserved for an optional randomized mode; selection itself is
// deterministic.
inline SpectralDataset balance_dataset(const SpectralDataset& ds, std::uint64_t /*seed*/) {
    struct PlantAgg {
        double sum = 0.0;
        std::size_t count = 0;
        int label = 0;
    };
    std::map<std::string, PlantAgg> plants;  // ordered: plant_id ascending
    for (std::size_t r = 0; r < ds.n_samples(); ++r) {
        auto& a = plants[ds.plant_ids[r]];
        require(a.count == 0 || a.label == ds.labels[r], "diagnostics",
                "plant " + ds.plant_ids[r] + " has mixed labels");
        a.label = ds.labels[r];
        for (std::size_t c = 0; c < ds.n_bands(); ++c) a.sum += ds.samples(r, c);
        a.count += ds.n_bands();
    }

    std::vector<std::pair<std::string, double>> non;  // plant_id, scalar mean
    std::size_t n_infected = 0;
    for (const auto& [id, a] : plants) {
        if (a.label == kLabelInfected) {
            ++n_infected;
        } else {
            non.emplace_back(id, a.sum / static_cast<double>(a.count));
        }
    }
    require(n_infected > 0 && !non.empty(), "diagnostics", "both classes required");
    require(non.size() >= n_infected, "diagnostics",
            "non-infected plant count below infected count");

    double grand = 0.0;
    for (const auto& [id, m] : non) grand += m;
    grand /= static_cast<double>(non.size());
    double ss = 0.0;
    for (const auto& [id, m] : non) ss += (m - grand) * (m - grand);
    const double sd = std::sqrt(ss / static_cast<double>(non.size()));

    std::vector<std::pair<std::string, double>> candidates;
    for (const auto& [id, m] : non)
        if (std::abs(m - grand) <= sd) candidates.emplace_back(id, m);
    if (candidates.size() < n_infected)
        fail("diagnostics", "balance shortfall: " + std::to_string(candidates.size()) +
                                " candidates within 1 SD for " + std::to_string(n_infected) +
                                " infected plants");

    // Closest to the grand mean first; plant_id order breaks distance ties.
    std::stable_sort(candidates.begin(), candidates.end(),
                     [&](const auto& a, const auto& b) {
                         return std::abs(a.second - grand) < std::abs(b.second - grand);
                     });
    candidates.resize(n_infected);

    std::map<std::string, bool> selected;
    for (const auto& [id, m] : candidates) selected[id] = true;

    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < ds.n_samples(); ++r) {
        if (ds.labels[r] == kLabelInfected || selected.count(ds.plant_ids[r]))
            rows.push_back(r);
    }
    return ds.subset(rows);
}

}  // namespace leafspec
