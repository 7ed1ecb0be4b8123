#pragma once

#include "cb2o/types.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace cb2o {

/// N particles in R^d (one per row) with benign/malicious tags.
template <typename Scalar>
struct ParticleEnsemble {
    Mat<Scalar> positions;
    std::vector<Role> roles;

    ParticleEnsemble() = default;
    ParticleEnsemble(Mat<Scalar> pos, std::vector<Role> r) : positions(std::move(pos)), roles(std::move(r))
    {
        validate();
    }

    Index count() const { return positions.rows(); }
    Index dimension() const { return positions.cols(); }

    Index benign_count() const
    {
        return static_cast<Index>(std::count(roles.begin(), roles.end(), Role::benign));
    }
    Index malicious_count() const { return count() - benign_count(); }

    double benign_weight() const { return static_cast<double>(benign_count()) / static_cast<double>(count()); }
    double malicious_weight() const { return 1.0 - benign_weight(); }

    std::vector<Index> indices_of(Role role) const
    {
        std::vector<Index> out;
        for (Index i = 0; i < count(); ++i)
            if (roles[static_cast<std::size_t>(i)] == role) out.push_back(i);
        return out;
    }

    Mat<Scalar> rows_of(Role role) const
    {
        const auto idx = indices_of(role);
        Mat<Scalar> out(static_cast<Index>(idx.size()), dimension());
        for (std::size_t k = 0; k < idx.size(); ++k) out.row(static_cast<Index>(k)) = positions.row(idx[k]);
        return out;
    }

    void validate() const
    {
        if (positions.rows() < 1) throw InvalidArgument("ensemble needs at least one particle");
        if (static_cast<Index>(roles.size()) != positions.rows())
            throw InvalidArgument("one role per particle required");
        if (!positions.allFinite()) throw InvalidArgument("particle positions must be finite");
    }
};

using Ensemble = ParticleEnsemble<double>;

}  // namespace cb2o
