#pragma once

// k-nearest-neighbour classifier with inverse-distance weighting. Distance
// ties resolve by training index order. An exact match (distance 0) carries
// infinite weight: the vote reduces to the label mean over all zero-distance
// training points.

#include <algorithm>
#include <cmath>
#include <vector>

#include "leafspec/core.hpp"
#include "leafspec/learners/spec.hpp"

namespace leafspec {

struct KnnModel {
    int k = 5;
    Matrix x;
    std::vector<int> y;

    std::size_t n_features() const { return x.cols; }

    double predict_one(const double* q) const {
        const std::size_t n = x.rows;
        std::vector<std::pair<double, std::size_t>> dist(n);
        for (std::size_t r = 0; r < n; ++r) {
            double ss = 0.0;
            for (std::size_t c = 0; c < x.cols; ++c) {
                const double d = q[c] - x(r, c);
                ss += d * d;
            }
            dist[r] = {std::sqrt(ss), r};
        }
        const auto kk = static_cast<std::size_t>(k);
        std::sort(dist.begin(), dist.end());

        if (dist.front().first == 0.0) {
            double pos = 0.0, count = 0.0;
            for (std::size_t i = 0; i < kk; ++i) {
                if (dist[i].first > 0.0) break;
                pos += y[dist[i].second];
                count += 1.0;
            }
            return pos / count;
        }

        double wsum = 0.0, wpos = 0.0;
        for (std::size_t i = 0; i < kk; ++i) {
            const double w = 1.0 / dist[i].first;
            wsum += w;
            wpos += w * static_cast<double>(y[dist[i].second]);
        }
        return wpos / wsum;
    }
};

inline KnnModel fit_knn_model(const LearnerSpec& spec, const LabeledDataset& data) {
    spec.validate();
    data.validate(/*require_both_classes=*/false);
    require(static_cast<std::size_t>(spec.knn_k) <= data.n(), "learner",
            "k exceeds training set size");
    return KnnModel{spec.knn_k, data.x, data.y};
}

}  // namespace leafspec
