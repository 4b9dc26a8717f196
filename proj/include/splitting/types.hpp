#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <string>

#include "splitting/errors.hpp"

namespace splitting {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
constexpr Scalar infinity() {
    return std::numeric_limits<Scalar>::infinity();
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& x) {
    return x.allFinite();
}

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& x, const std::string& what) {
    if (!x.allFinite()) {
        throw ConfigError(what + ": entries must be finite");
    }
}

template <typename Derived>
void require_dim(const Eigen::MatrixBase<Derived>& x, Eigen::Index dim, const std::string& what) {
    if (x.size() != dim) {
        throw ConfigError(what + ": dimension mismatch (expected " + std::to_string(dim) +
                          ", got " + std::to_string(x.size()) + ")");
    }
}

/// max(1, ||x||), the scale used by every relative tolerance in the library.
template <typename Derived>
typename Derived::Scalar unit_scale(const Eigen::MatrixBase<Derived>& x) {
    using std::max;
    return max(typename Derived::Scalar(1), x.norm());
}

}  // namespace splitting
