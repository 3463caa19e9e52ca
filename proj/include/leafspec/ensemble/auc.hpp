#pragma once

// Mann-Whitney AUC: (wins + 0.5 * ties) / (n_pos * n_neg) over all
// positive-negative score pairs. Wins and ties are accumulated as integers,
// so the result is exact and trivially invariant under any strictly
// increasing transform of the scores.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "leafspec/core.hpp"

namespace leafspec {

inline double auc_score(const std::vector<double>& scores, const std::vector<int>& labels) {
    require(scores.size() == labels.size(), "auc", "score/label length mismatch");
    require(!scores.empty(), "auc", "empty input");
    std::uint64_t n_pos = 0, n_neg = 0;
    for (int v : labels) {
        require(v == 0 || v == 1, "auc", "labels must be 0/1");
        (v == 1 ? n_pos : n_neg) += 1;
    }
    require(n_pos > 0 && n_neg > 0, "auc", "single class");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return scores[a] < scores[b];
    });

    std::uint64_t wins = 0, ties = 0, neg_below = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        std::uint64_t pos_here = 0, neg_here = 0;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) {
            (labels[order[j]] == 1 ? pos_here : neg_here) += 1;
            ++j;
        }
        wins += pos_here * neg_below;
        ties += pos_here * neg_here;
        neg_below += neg_here;
        i = j;
    }
    return (static_cast<double>(wins) + 0.5 * static_cast<double>(ties)) /
           (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

}  // namespace leafspec
