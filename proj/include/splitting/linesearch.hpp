#pragma once

#include <cstddef>
#include <string>

#include "splitting/problems.hpp"

namespace splitting {

template <typename Scalar>
struct LineSearchResult {
    Scalar alpha{0};        ///< accepted stepsize alpha_prev * theta^j
    std::size_t j{0};       ///< accepted inner index
    Vector<Scalar> x_bar;   ///< forward-backward point at the accepted stepsize
    std::size_t trials{0};  ///< resolvent evaluations spent
    Vector<Scalar> a_x;     ///< (A1 + A2) x
    Vector<Scalar> a2_x;    ///< A2 x
    Vector<Scalar> a2_x_bar;
};

/// alpha_prev * theta^j, built by repeated multiplication so every caller
/// lands on the same grid point.
template <typename Scalar>
Scalar trial_stepsize(Scalar alpha_prev, Scalar theta, std::size_t j) {
    Scalar alpha = alpha_prev;
    for (std::size_t i = 0; i < j; ++i) alpha *= theta;
    return alpha;
}

/// alpha <A2 x - A2 x_bar, x - x_bar> - delta ||x - x_bar||^2; the backtracking
/// test accepts when this is <= 0.
template <typename Scalar>
Scalar acceptance_gap(Scalar alpha, Scalar delta, const Vector<Scalar>& x, const Vector<Scalar>& x_bar,
                      const Vector<Scalar>& a2_x, const Vector<Scalar>& a2_x_bar) {
    const Vector<Scalar> d = x - x_bar;
    return alpha * (a2_x - a2_x_bar).dot(d) - delta * d.squaredNorm();
}

/// Smallest j >= 0 such that, with alpha = alpha_prev * theta^j and
/// x_bar = J_{alpha B}(x - alpha (A1 + A2) x),
///
///     alpha <A2 x - A2 x_bar, x - x_bar> <= delta ||x - x_bar||^2.
///
/// A candidate with ||x - x_bar|| <= 1e-14 max(1, ||x||) is accepted at once
/// (x is numerically a fixed point). Throws LineSearchFailure after max_trials.
template <typename Scalar>
LineSearchResult<Scalar> backtrack(const ProblemInstance<Scalar>& problem, const Vector<Scalar>& x, Scalar alpha_prev,
                                   Scalar theta, Scalar delta, std::size_t max_trials = 60) {
    if (!(alpha_prev > Scalar(0))) throw ConfigError("backtrack: alpha_prev must be positive");
    if (!(theta > Scalar(0) && theta < Scalar(1))) throw ConfigError("backtrack: theta must lie in (0,1)");
    if (!(delta > Scalar(0) && delta < Scalar(1))) throw ConfigError("backtrack: delta must lie in (0,1)");
    if (max_trials == 0) throw ConfigError("backtrack: max_trials must be positive");
    require_dim(x, problem.dim(), "backtrack");
    require_finite(x, "backtrack point");

    LineSearchResult<Scalar> res;
    res.a2_x = problem.a2(x);
    res.a_x = problem.a1(x) + res.a2_x;
    const Scalar degenerate = Scalar(1e-14) * unit_scale(x);

    Scalar alpha = alpha_prev;
    for (std::size_t j = 0; j < max_trials; ++j) {
        if (j > 0) alpha *= theta;
        Vector<Scalar> x_bar = problem.b.resolvent(alpha, x - alpha * res.a_x);
        ++res.trials;
        Vector<Scalar> a2_x_bar = problem.a2(x_bar);
        if (!x_bar.allFinite() || !a2_x_bar.allFinite()) {
            throw NumericalError("backtrack: non-finite forward-backward point");
        }
        const bool fixed = (x - x_bar).norm() <= degenerate;
        if (fixed || acceptance_gap(alpha, delta, x, x_bar, res.a2_x, a2_x_bar) <= Scalar(0)) {
            res.alpha = alpha;
            res.j = j;
            res.x_bar = std::move(x_bar);
            res.a2_x_bar = std::move(a2_x_bar);
            return res;
        }
    }
    throw LineSearchFailure("backtrack: acceptance test not met after " + std::to_string(max_trials) +
                                " trials; A2 may violate uniform continuity or the problem is badly scaled",
                            max_trials);
}

}  // namespace splitting
