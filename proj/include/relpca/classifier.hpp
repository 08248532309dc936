#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "relpca/errors.hpp"
#include "relpca/parallel.hpp"
#include "relpca/types.hpp"

namespace relpca {

enum class KnnWeighting { inverse, inverse_squared, exponential };

// Distance-weighted k-nearest-neighbor vote in component space.  Nearer
// neighbors count more (default weight 1/d); a test point closer than 1e-12
// to a training point inherits that label outright.  Ties break to the single
// nearest neighbor's label, then to the smaller label value.
inline std::vector<int> knn_classify(const MatrixXd& train, const std::vector<int>& labels,
                                     const MatrixXd& test, int neighbors = 3,
                                     KnnWeighting weighting = KnnWeighting::inverse,
                                     int workers = 1) {
    if (train.rows() == 0) throw EmptyTrainingSet("knn training set is empty");
    if (train.cols() != test.cols()) throw DimensionMismatch("knn component dims differ");
    if (static_cast<Index>(labels.size()) != train.rows())
        throw LengthMismatch("knn labels/train size mismatch");
    if (neighbors < 1 || neighbors > train.rows())
        throw ConfigError("knn neighbors outside 1..train size");

    std::vector<int> pred(static_cast<std::size_t>(test.rows()));
    parallel_for(test.rows(), workers, [&](Index t) {
        VectorXd d2 = (train.rowwise() - test.row(t)).rowwise().squaredNorm();
        std::vector<Index> order(static_cast<std::size_t>(train.rows()));
        for (Index i = 0; i < train.rows(); ++i) order[static_cast<std::size_t>(i)] = i;
        std::partial_sort(order.begin(), order.begin() + neighbors, order.end(),
                          [&](Index a, Index b) {
                              if (d2[a] != d2[b]) return d2[a] < d2[b];
                              return a < b;  // stable under training permutation questions
                          });
        const Index nearest = order[0];
        const double d_near = std::sqrt(d2[nearest]);
        if (d_near < 1e-12) {
            pred[static_cast<std::size_t>(t)] = labels[static_cast<std::size_t>(nearest)];
            return;
        }
        std::map<int, double> votes;
        for (int v = 0; v < neighbors; ++v) {
            const Index i = order[static_cast<std::size_t>(v)];
            const double d = std::sqrt(d2[i]);
            double w = 0.0;
            switch (weighting) {
                case KnnWeighting::inverse: w = 1.0 / d; break;
                case KnnWeighting::inverse_squared: w = 1.0 / (d * d); break;
                case KnnWeighting::exponential: w = std::exp(-d); break;
            }
            votes[labels[static_cast<std::size_t>(i)]] += w;
        }
        double best_w = -1.0;
        bool tie = false;
        int best_label = -1;
        for (const auto& [label, w] : votes) {
            if (w > best_w) {
                best_w = w;
                best_label = label;
                tie = false;
            } else if (w == best_w) {
                tie = true;
            }
        }
        if (tie) {
            // nearest neighbor's label wins; if that label is itself part of
            // the tied set it resolves the tie, and map order already gave us
            // the smallest tied label otherwise
            const int near_label = labels[static_cast<std::size_t>(nearest)];
            if (votes[near_label] == best_w) best_label = near_label;
        }
        pred[static_cast<std::size_t>(t)] = best_label;
    });
    return pred;
}

inline double error_rate(const std::vector<int>& predicted, const std::vector<int>& truth) {
    if (predicted.size() != truth.size()) throw LengthMismatch("error_rate length mismatch");
    if (predicted.empty()) throw DataError("error_rate on empty prediction set");
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i)
        if (predicted[i] != truth[i]) ++wrong;
    return 100.0 * double(wrong) / double(predicted.size());
}

}  // namespace relpca
