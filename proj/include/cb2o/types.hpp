#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace cb2o {

static constexpr auto Dyn = Eigen::Dynamic;

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Dyn, 1>;

// One particle per row.
template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Dyn, Dyn, Eigen::RowMajor>;

template <typename Scalar>
using VecRef = Eigen::Ref<const Vec<Scalar>>;

template <typename Scalar>
using MatRef = Eigen::Ref<const Mat<Scalar>>;

using Vector = Vec<double>;
using Matrix = Mat<double>;
using Index = Eigen::Index;

enum class Role { benign, malicious };

/// Raised for violated preconditions on user-facing inputs.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// No particle survives the sublevel filter.
class EmptySublevelSet : public std::runtime_error {
public:
    EmptySublevelSet() : std::runtime_error("sublevel set is empty") {}
};

}  // namespace cb2o
