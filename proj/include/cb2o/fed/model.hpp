#pragma once

#include "cb2o/fed/data.hpp"
#include "cb2o/rng.hpp"
#include "cb2o/types.hpp"

#include <map>
#include <span>
#include <vector>

namespace cb2o::fed {

/// Multinomial logistic regression. Parameters are a flat vector holding a
/// row-major n_classes x (feature_dim + 1) weight matrix, bias last.
struct LogisticModel {
    int n_classes = 2;
    Index feature_dim = 1;

    Index parameter_count() const { return n_classes * (feature_dim + 1); }

    /// n x n_classes logits.
    Matrix logits(const VecRef<double>& theta, const Matrix& features) const;

    /// Mean cross-entropy over `rows` (all rows when empty).
    double loss(const VecRef<double>& theta, const Dataset& data, std::span<const Index> rows = {}) const;

    /// Per-sample cross-entropy.
    Vector sample_losses(const VecRef<double>& theta, const Dataset& data) const;

    /// Mean cross-entropy per class present in `data`.
    std::map<int, double> per_class_loss(const VecRef<double>& theta, const Dataset& data) const;

    /// Gradient of loss(theta, data, rows).
    Vector gradient(const VecRef<double>& theta, const Dataset& data, std::span<const Index> rows = {}) const;

    std::vector<int> predict(const VecRef<double>& theta, const Matrix& features) const;
};

struct LocalUpdateConfig {
    int epochs = 5;        // tau
    double step = 0.004;   // lambda2 * gamma
    Index batch_size = 20;
};

/// `epochs` passes of shuffled mini-batch SGD.
Vector local_update(const LogisticModel& model, Vector theta, const Dataset& data, const LocalUpdateConfig& cfg,
                    rng::Stream& rng);

}  // namespace cb2o::fed
