#include "cb2o/fed/data.hpp"

#include "cb2o/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cb2o::fed {

std::size_t Dataset::count_label(int c) const
{
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), c));
}

void SyntheticDatasetSpec::validate() const
{
    if (n_classes < 2) throw InvalidArgument("data.classes must be >= 2");
    if (feature_dim < 1) throw InvalidArgument("data.feature_dim must be >= 1");
    if (rotations_deg.empty()) throw InvalidArgument("at least one cluster rotation is required");
    const bool rotates = std::any_of(rotations_deg.begin(), rotations_deg.end(), [](double a) { return a != 0.0; });
    if (feature_dim < 2 && (rotates || n_classes > 2))
        throw InvalidArgument("data.feature_dim must be >= 2 for rotated clusters");
    if (source_class == target_class) throw InvalidArgument("source and target class must differ");
    if (source_class < 0 || source_class >= n_classes || target_class < 0 || target_class >= n_classes)
        throw InvalidArgument("source and target class must lie in [0, classes)");
    if (!(noise_std > 0.0)) throw InvalidArgument("data.noise_std must be positive");
    if (!(class_radius >= 0.0) || !(source_target_gap >= 0.0))
        throw InvalidArgument("class radius and source-target gap must be >= 0");
    if (benign_train < 1 || benign_train >= benign_samples)
        throw InvalidArgument("benign train split must leave a nonempty validation set");
    if (malicious_samples < 1 || test_samples < 1) throw InvalidArgument("sample counts must be positive");
}

Matrix SyntheticDatasetSpec::class_means() const
{
    Matrix means = Matrix::Zero(n_classes, feature_dim);
    if (feature_dim < 2) {
        for (int c = 0; c < n_classes; ++c) means(c, 0) = c == source_class ? -class_radius : class_radius;
        if (n_classes == 2) means(target_class, 0) = means(source_class, 0) + source_target_gap;
        return means;
    }
    const int on_circle = n_classes - 1;
    int slot = 0;
    for (int c = 0; c < n_classes; ++c) {
        if (c == target_class) continue;
        const double angle = 2.0 * std::numbers::pi * slot++ / on_circle;
        means(c, 0) = class_radius * std::cos(angle);
        means(c, 1) = class_radius * std::sin(angle);
    }
    // Target sits next to the source, offset along the tangent of the circle.
    const double sx = means(source_class, 0), sy = means(source_class, 1);
    const double norm = std::hypot(sx, sy);
    const double tx = norm > 0.0 ? -sy / norm : 1.0, ty = norm > 0.0 ? sx / norm : 0.0;
    means(target_class, 0) = sx + source_target_gap * tx;
    means(target_class, 1) = sy + source_target_gap * ty;
    return means;
}

void rotate_features(Matrix& features, double degrees)
{
    if (degrees == 0.0) return;
    if (features.cols() < 2) throw InvalidArgument("rotation needs at least two feature dimensions");
    double c, s;
    // Quarter turns are applied exactly.
    const double quarter = degrees / 90.0;
    if (quarter == std::round(quarter)) {
        const auto q = ((static_cast<long long>(quarter) % 4) + 4) % 4;
        constexpr double cos_table[] = {1.0, 0.0, -1.0, 0.0};
        constexpr double sin_table[] = {0.0, 1.0, 0.0, -1.0};
        c = cos_table[q];
        s = sin_table[q];
    } else {
        const double rad = degrees * std::numbers::pi / 180.0;
        c = std::cos(rad);
        s = std::sin(rad);
    }
    for (Index i = 0; i < features.rows(); ++i) {
        const double x = features(i, 0), y = features(i, 1);
        features(i, 0) = c * x - s * y;
        features(i, 1) = s * x + c * y;
    }
}

namespace {

Dataset draw(const SyntheticDatasetSpec& spec, const Matrix& means, Index n, double rotation, rng::Stream& stream)
{
    Dataset out;
    out.features.resize(n, spec.feature_dim);
    out.labels.resize(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        const int y = static_cast<int>(stream.below(static_cast<std::uint64_t>(spec.n_classes)));
        out.labels[static_cast<std::size_t>(i)] = y;
        for (Index k = 0; k < spec.feature_dim; ++k) out.features(i, k) = means(y, k) + spec.noise_std * stream.normal();
    }
    rotate_features(out.features, rotation);
    return out;
}

Dataset slice(const Dataset& data, Index begin, Index end)
{
    Dataset out;
    out.features = data.features.middleRows(begin, end - begin);
    out.labels.assign(data.labels.begin() + begin, data.labels.begin() + end);
    return out;
}

}  // namespace

ClusteredData generate_clustered_data(const SyntheticDatasetSpec& spec, const std::vector<AgentSlot>& roster,
                                      std::uint64_t seed)
{
    spec.validate();
    const Matrix means = spec.class_means();
    ClusteredData out;
    out.agents.reserve(roster.size());
    for (std::size_t j = 0; j < roster.size(); ++j) {
        const auto& slot = roster[j];
        if (slot.cluster < 0 || slot.cluster >= spec.n_clusters())
            throw InvalidArgument("agent cluster outside the configured clusters");
        auto stream = rng::make_stream(seed, {rng::fed_data, 0, j});
        const double rotation = spec.rotations_deg[static_cast<std::size_t>(slot.cluster)];
        AgentData agent;
        if (slot.role == Role::benign) {
            const Dataset all = draw(spec, means, spec.benign_samples, rotation, stream);
            agent.train = slice(all, 0, spec.benign_train);
            agent.validation = slice(all, spec.benign_train, spec.benign_samples);
        } else {
            agent.train = draw(spec, means, spec.malicious_samples, rotation, stream);
            agent.validation.features.resize(0, spec.feature_dim);
        }
        out.agents.push_back(std::move(agent));
    }
    for (int k = 0; k < spec.n_clusters(); ++k) {
        auto stream = rng::make_stream(seed, {rng::fed_data, 1, static_cast<std::uint64_t>(k)});
        out.test.push_back(draw(spec, means, spec.test_samples, spec.rotations_deg[static_cast<std::size_t>(k)], stream));
    }
    return out;
}

Dataset poison_labels(Dataset data, int c_source, int c_target)
{
    std::replace(data.labels.begin(), data.labels.end(), c_source, c_target);
    return data;
}

}  // namespace cb2o::fed
