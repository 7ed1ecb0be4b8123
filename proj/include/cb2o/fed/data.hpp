#pragma once

#include "cb2o/types.hpp"

#include <cstdint>
#include <vector>

namespace cb2o::fed {

/// Labeled samples, one feature vector per row.
struct Dataset {
    Matrix features;
    std::vector<int> labels;

    Index size() const { return features.rows(); }
    Index feature_dim() const { return features.cols(); }
    std::size_t count_label(int c) const;
};

/// Gaussian class mixture. Class means sit on a circle of `class_radius` in
/// the first two feature coordinates, except the target class, which is
/// placed at `source_target_gap` from the source class so the two overlap.
/// Cluster k rotates the first feature plane by `rotations_deg[k]`.
struct SyntheticDatasetSpec {
    int n_classes = 5;
    Index feature_dim = 4;
    double class_radius = 3.0;
    double noise_std = 1.0;
    double source_target_gap = 0.3;
    int source_class = 1;
    int target_class = 2;
    std::vector<double> rotations_deg{0.0, 180.0};
    Index benign_samples = 500;
    Index benign_train = 400;  // the rest is validation
    Index malicious_samples = 1200;
    Index test_samples = 1000;  // per cluster

    int n_clusters() const { return static_cast<int>(rotations_deg.size()); }
    void validate() const;
    /// n_classes x feature_dim matrix of (unrotated) class means.
    Matrix class_means() const;
};

struct AgentData {
    Dataset train;
    Dataset validation;  // empty for malicious agents
};

struct AgentSlot {
    int cluster = 0;
    Role role = Role::benign;
};

struct ClusteredData {
    std::vector<AgentData> agents;
    std::vector<Dataset> test;  // one per cluster
};

/// Rotation of the first two coordinates by `degrees`.
void rotate_features(Matrix& features, double degrees);

/// Draws every agent's data independently from its cluster's distribution,
/// plus one test set per cluster shared by all of its agents.
ClusteredData generate_clustered_data(const SyntheticDatasetSpec& spec, const std::vector<AgentSlot>& roster,
                                      std::uint64_t seed);

/// Relabels every c_source sample as c_target; features are untouched.
Dataset poison_labels(Dataset data, int c_source, int c_target);

}  // namespace cb2o::fed
