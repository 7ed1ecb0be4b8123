#include "cb2o/fed/model.hpp"

#include <cmath>
#include <numeric>

namespace cb2o::fed {

namespace {

using WeightMap = Eigen::Map<const Eigen::Matrix<double, Dyn, Dyn, Eigen::RowMajor>>;

WeightMap weights(const LogisticModel& model, const VecRef<double>& theta)
{
    if (theta.size() != model.parameter_count()) throw InvalidArgument("parameter vector has the wrong size");
    return WeightMap(theta.data(), model.n_classes, model.feature_dim + 1);
}

/// Softmax probabilities and per-row log-normalizers.
void softmax_rows(Matrix& logits, Vector& log_norm)
{
    log_norm.resize(logits.rows());
    for (Index i = 0; i < logits.rows(); ++i) {
        const double top = logits.row(i).maxCoeff();
        logits.row(i) = (logits.row(i).array() - top).exp();
        const double z = logits.row(i).sum();
        logits.row(i) /= z;
        log_norm(i) = top + std::log(z);
    }
}

struct Batch {
    Matrix features;
    std::vector<int> labels;
};

Batch gather(const Dataset& data, std::span<const Index> rows)
{
    Batch b;
    b.features.resize(static_cast<Index>(rows.size()), data.feature_dim());
    b.labels.resize(rows.size());
    for (std::size_t k = 0; k < rows.size(); ++k) {
        b.features.row(static_cast<Index>(k)) = data.features.row(rows[k]);
        b.labels[k] = data.labels[static_cast<std::size_t>(rows[k])];
    }
    return b;
}

double mean_loss(const LogisticModel& model, const VecRef<double>& theta, const Matrix& x, const std::vector<int>& y)
{
    if (x.rows() == 0) throw InvalidArgument("loss of an empty dataset");
    Matrix z = model.logits(theta, x);
    double acc = 0.0;
    for (Index i = 0; i < z.rows(); ++i) {
        const double top = z.row(i).maxCoeff();
        const double lse = top + std::log((z.row(i).array() - top).exp().sum());
        acc += lse - z(i, y[static_cast<std::size_t>(i)]);
    }
    return acc / static_cast<double>(z.rows());
}

Vector mean_gradient(const LogisticModel& model, const VecRef<double>& theta, const Matrix& x,
                     const std::vector<int>& y)
{
    if (x.rows() == 0) throw InvalidArgument("gradient of an empty dataset");
    Matrix p = model.logits(theta, x);
    Vector log_norm;
    softmax_rows(p, log_norm);
    for (Index i = 0; i < p.rows(); ++i) p(i, y[static_cast<std::size_t>(i)]) -= 1.0;
    p /= static_cast<double>(x.rows());
    Eigen::Matrix<double, Dyn, Dyn, Eigen::RowMajor> g(model.n_classes, model.feature_dim + 1);
    g.leftCols(model.feature_dim).noalias() = p.transpose() * x;
    g.col(model.feature_dim) = p.colwise().sum().transpose();
    return Eigen::Map<const Vector>(g.data(), g.size());
}

}  // namespace

Matrix LogisticModel::logits(const VecRef<double>& theta, const Matrix& features) const
{
    if (features.cols() != feature_dim) throw InvalidArgument("feature dimension mismatch");
    const auto w = weights(*this, theta);
    Matrix z = features * w.leftCols(feature_dim).transpose();
    z.rowwise() += w.col(feature_dim).transpose();
    return z;
}

double LogisticModel::loss(const VecRef<double>& theta, const Dataset& data, std::span<const Index> rows) const
{
    if (rows.empty()) return mean_loss(*this, theta, data.features, data.labels);
    const auto b = gather(data, rows);
    return mean_loss(*this, theta, b.features, b.labels);
}

Vector LogisticModel::sample_losses(const VecRef<double>& theta, const Dataset& data) const
{
    Matrix z = logits(theta, data.features);
    Vector out(z.rows());
    for (Index i = 0; i < z.rows(); ++i) {
        const double top = z.row(i).maxCoeff();
        out(i) = top + std::log((z.row(i).array() - top).exp().sum()) - z(i, data.labels[static_cast<std::size_t>(i)]);
    }
    return out;
}

std::map<int, double> LogisticModel::per_class_loss(const VecRef<double>& theta, const Dataset& data) const
{
    const Vector losses = sample_losses(theta, data);
    std::map<int, std::pair<double, std::size_t>> acc;
    for (Index i = 0; i < losses.size(); ++i) {
        auto& slot = acc[data.labels[static_cast<std::size_t>(i)]];
        slot.first += losses(i);
        ++slot.second;
    }
    std::map<int, double> out;
    for (const auto& [c, s] : acc) out[c] = s.first / static_cast<double>(s.second);
    return out;
}

Vector LogisticModel::gradient(const VecRef<double>& theta, const Dataset& data, std::span<const Index> rows) const
{
    if (rows.empty()) return mean_gradient(*this, theta, data.features, data.labels);
    const auto b = gather(data, rows);
    return mean_gradient(*this, theta, b.features, b.labels);
}

std::vector<int> LogisticModel::predict(const VecRef<double>& theta, const Matrix& features) const
{
    const Matrix z = logits(theta, features);
    std::vector<int> out(static_cast<std::size_t>(z.rows()));
    for (Index i = 0; i < z.rows(); ++i) {
        Index best;
        z.row(i).maxCoeff(&best);
        out[static_cast<std::size_t>(i)] = static_cast<int>(best);
    }
    return out;
}

Vector local_update(const LogisticModel& model, Vector theta, const Dataset& data, const LocalUpdateConfig& cfg,
                    rng::Stream& rng)
{
    if (cfg.epochs <= 0) return theta;
    if (data.size() == 0) throw InvalidArgument("local update on an empty dataset");
    if (cfg.batch_size < 1) throw InvalidArgument("batch size must be >= 1");
    std::vector<Index> order(static_cast<std::size_t>(data.size()));
    std::iota(order.begin(), order.end(), Index{0});
    for (int e = 0; e < cfg.epochs; ++e) {
        rng.shuffle(order);
        for (std::size_t begin = 0; begin < order.size(); begin += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t end = std::min(order.size(), begin + static_cast<std::size_t>(cfg.batch_size));
            const std::span<const Index> rows(order.data() + begin, end - begin);
            theta -= cfg.step * model.gradient(theta, data, rows);
        }
    }
    return theta;
}

}  // namespace cb2o::fed
