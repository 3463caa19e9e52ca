#pragma once

// Stratified train/validation/test splitting. Within each class the indices
// are shuffled with a class-derived seed, then allocated by largest
// fractional remainder (floor counts first; leftovers go to the split with
// the largest remainder, ties favoring train, then validation, then test).
// A split may be empty only when its ratio is zero.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "leafspec/core.hpp"

namespace leafspec {

struct SplitRatios {
    double train = 0.65;
    double validation = 0.15;
    double test = 0.20;

    void validate() const {
        require(train >= 0 && validation >= 0 && test >= 0, "split config",
                "ratios must be non-negative");
        require(std::abs(train + validation + test - 1.0) < 1e-9, "split config",
                "ratios must sum to 1");
    }
};

struct DataSplit {
    std::vector<std::size_t> train;
    std::vector<std::size_t> validation;
    std::vector<std::size_t> test;
    std::uint64_t seed = 0;
    bool stratified = true;

    void validate(std::size_t n) const {
        std::vector<char> seen(n, 0);
        std::size_t total = 0;
        for (const auto* part : {&train, &validation, &test}) {
            for (std::size_t i : *part) {
                require(i < n, "split", "index out of range");
                require(!seen[i], "split", "index assigned twice");
                seen[i] = 1;
                ++total;
            }
        }
        require(total == n, "split", "indices do not cover the dataset");
    }
};

namespace detail {

// Allocation for one class: floor the fractional targets, then hand the
// leftover samples to the largest remainders (train > validation > test on
// ties).
inline std::array<std::size_t, 3> allocate_counts(std::size_t n, const SplitRatios& r) {
    const double want[3] = {r.train * n, r.validation * n, r.test * n};
    std::array<std::size_t, 3> got{};
    double rem[3];
    std::size_t assigned = 0;
    for (int i = 0; i < 3; ++i) {
        got[i] = static_cast<std::size_t>(want[i]);
        rem[i] = want[i] - static_cast<double>(got[i]);
        assigned += got[i];
    }
    std::array<int, 3> order = {0, 1, 2};
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return rem[a] > rem[b]; });
    for (std::size_t k = 0; assigned < n; ++k, ++assigned) got[order[k % 3]] += 1;
    return got;
}

}  // namespace detail

inline DataSplit stratified_split(std::size_t n, const std::vector<int>& labels,
                                  const SplitRatios& ratios, std::uint64_t seed) {
    ratios.validate();
    require(labels.size() == n, "split", "label count does not match n");
    std::vector<std::vector<std::size_t>> by_class(2);
    for (std::size_t i = 0; i < n; ++i) {
        require(labels[i] == 0 || labels[i] == 1, "split", "labels must be 0/1");
        by_class[static_cast<std::size_t>(labels[i])].push_back(i);
    }
    require(!by_class[0].empty() && !by_class[1].empty(), "split", "both classes required");

    DataSplit out;
    out.seed = seed;
    out.stratified = true;
    for (std::size_t c = 0; c < 2; ++c) {
        auto& idx = by_class[c];
        Rng rng(derive_seed(seed, c));
        rng.shuffle(idx);
        const auto counts = detail::allocate_counts(idx.size(), ratios);
        std::size_t at = 0;
        for (std::size_t k = 0; k < counts[0]; ++k) out.train.push_back(idx[at++]);
        for (std::size_t k = 0; k < counts[1]; ++k) out.validation.push_back(idx[at++]);
        for (std::size_t k = 0; k < counts[2]; ++k) out.test.push_back(idx[at++]);
    }
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.validation.begin(), out.validation.end());
    std::sort(out.test.begin(), out.test.end());

    if (ratios.train > 0) require(!out.train.empty(), "split", "train split is empty");
    if (ratios.validation > 0)
        require(!out.validation.empty(), "split", "validation split is empty");
    if (ratios.test > 0) require(!out.test.empty(), "split", "test split is empty");
    return out;
}

}  // namespace leafspec
