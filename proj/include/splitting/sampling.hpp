#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "splitting/types.hpp"

namespace splitting {

template <typename Scalar, typename Rng>
Vector<Scalar> random_vector(Eigen::Index dim, Rng& rng, Scalar scale = Scalar(1)) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector<Scalar> v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v(i) = scale * Scalar(normal(rng));
    return v;
}

/// Deterministic Gaussian sample pairs for sampled operator checks.
template <typename Scalar>
std::vector<std::pair<Vector<Scalar>, Vector<Scalar>>> random_pairs(Eigen::Index dim, int count, std::uint64_t seed,
                                                                    Scalar scale = Scalar(1)) {
    std::mt19937_64 rng(seed);
    std::vector<std::pair<Vector<Scalar>, Vector<Scalar>>> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        Vector<Scalar> x = random_vector<Scalar>(dim, rng, scale);
        Vector<Scalar> y = random_vector<Scalar>(dim, rng, scale);
        out.emplace_back(std::move(x), std::move(y));
    }
    return out;
}

}  // namespace splitting
