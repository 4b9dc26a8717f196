#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string_view>

#include "splitting/types.hpp"

namespace splitting {

/// The set {x : <v, x - y> <= r}. A zero normal with r >= 0 is the whole space.
template <typename Scalar>
struct Halfspace {
    Vector<Scalar> v;
    Vector<Scalar> y;
    Scalar r{0};

    static Halfspace whole_space(Eigen::Index dim) {
        return {Vector<Scalar>::Zero(dim), Vector<Scalar>::Zero(dim), Scalar(0)};
    }

    Eigen::Index dim() const { return v.size(); }

    bool degenerate() const { return v.squaredNorm() == Scalar(0); }

    /// <v, x - y> - r; positive outside, zero on the boundary.
    Scalar excess(const Vector<Scalar>& x) const { return v.dot(x - y) - r; }

    bool contains(const Vector<Scalar>& x, Scalar tol = Scalar(0)) const {
        if (degenerate()) return r >= Scalar(0);
        return excess(x) <= tol;
    }

    /// Euclidean distance from x to the set (zero inside).
    Scalar distance(const Vector<Scalar>& x) const {
        if (degenerate()) return Scalar(0);
        using std::max;
        return max(Scalar(0), excess(x)) / v.norm();
    }
};

/// Result of building T_k. `converged` is raised when the separating normal
/// vanishes, which by the acceptance inequality forces x == x_bar.
template <typename Scalar>
struct SeparatingCut {
    Halfspace<Scalar> halfspace;
    bool converged{false};
};

/// T_k = {z : <w, z - x_bar> <= r} with w = (x - x_bar)/alpha - (A2 x - A2 x_bar)
/// and r = (delta_bar/alpha) ||x - x_bar||^2.
template <typename Scalar>
SeparatingCut<Scalar> build_Tk(const Vector<Scalar>& x, const Vector<Scalar>& x_bar, Scalar alpha,
                               const Vector<Scalar>& a2_x, const Vector<Scalar>& a2_x_bar,
                               Scalar delta_bar) {
    if (!(alpha > Scalar(0))) throw ConfigError("build_Tk: alpha must be positive");
    require_dim(x_bar, x.size(), "build_Tk x_bar");
    require_dim(a2_x, x.size(), "build_Tk A2x");
    require_dim(a2_x_bar, x.size(), "build_Tk A2x_bar");

    const Vector<Scalar> d = x - x_bar;
    SeparatingCut<Scalar> cut;
    cut.halfspace.v = d / alpha - (a2_x - a2_x_bar);
    cut.halfspace.y = x_bar;
    cut.halfspace.r = delta_bar / alpha * d.squaredNorm();
    using std::max;
    const Scalar floor = Scalar(1e-14) * max(Scalar(1), x.norm() / alpha);
    cut.converged = cut.halfspace.v.norm() <= floor;
    return cut;
}

/// Gamma_k = {z : <x0 - xk, z - xk> <= 0}; the whole space when xk == x0.
template <typename Scalar>
Halfspace<Scalar> build_Gammak(const Vector<Scalar>& x0, const Vector<Scalar>& xk) {
    require_dim(xk, x0.size(), "build_Gammak");
    return {x0 - xk, xk, Scalar(0)};
}

template <typename Scalar>
Vector<Scalar> project_halfspace(const Halfspace<Scalar>& h, const Vector<Scalar>& w) {
    require_dim(w, h.dim(), "project_halfspace");
    if (h.degenerate()) return w;
    const Scalar e = h.excess(w);
    if (e <= Scalar(0)) return w;
    return w - (e / h.v.squaredNorm()) * h.v;
}

enum class ActiveSet { None, TOnly, GammaOnly, Both };

constexpr std::string_view to_string(ActiveSet a) {
    switch (a) {
        case ActiveSet::None: return "none";
        case ActiveSet::TOnly: return "T-only";
        case ActiveSet::GammaOnly: return "Gamma-only";
        case ActiveSet::Both: return "both";
    }
    return "?";
}

template <typename Scalar>
struct TwoHalfspaceProjection {
    Vector<Scalar> point;
    Scalar lambda1{0};
    Scalar lambda2{0};
    ActiveSet active{ActiveSet::None};
};

namespace detail {

// Slack allowed when deciding whether a candidate is feasible: the halfspace
// excess is measured relative to ||v|| and the size of the point.
template <typename Scalar>
Scalar feasibility_tol(const Halfspace<Scalar>& h, const Vector<Scalar>& u) {
    using std::abs;
    using std::max;
    const Scalar scale = max({Scalar(1), (u - h.y).norm(), abs(h.r) / max(h.v.norm(), Scalar(1e-300))});
    return Scalar(1e-11) * h.v.norm() * scale;
}

template <typename Scalar>
bool feasible(const Halfspace<Scalar>& h, const Vector<Scalar>& u) {
    if (h.degenerate()) return h.r >= Scalar(0);
    return h.excess(u) <= feasibility_tol(h, u);
}

// Linear dependence test on two normals with a relative tolerance.
template <typename Scalar>
bool same_direction(const Vector<Scalar>& a, const Vector<Scalar>& b) {
    const Scalar na_nb = a.norm() * b.norm();
    return na_nb - a.dot(b) <= Scalar(1e-12) * na_nb;
}

}  // namespace detail

/// Nearest point of T ∩ G to x0, with KKT multipliers
/// (point = x0 - lambda1 * T.v - lambda2 * G.v), found by enumerating the
/// active sets. Throws InvariantViolation when no case is consistent, which
/// for T_k and Gamma_k means the solution set is empty.
template <typename Scalar>
TwoHalfspaceProjection<Scalar> project_two_halfspaces(const Halfspace<Scalar>& T,
                                                      const Halfspace<Scalar>& G,
                                                      const Vector<Scalar>& x0) {
    require_dim(x0, T.dim(), "project_two_halfspaces T");
    require_dim(x0, G.dim(), "project_two_halfspaces Gamma");
    using Result = TwoHalfspaceProjection<Scalar>;

    const auto single = [&](const Halfspace<Scalar>& h, ActiveSet tag) {
        Result res;
        res.point = x0;
        if (h.degenerate()) return res;
        const Scalar e = h.excess(x0);
        if (e <= Scalar(0)) return res;
        const Scalar lambda = e / h.v.squaredNorm();
        res.point = x0 - lambda * h.v;
        (tag == ActiveSet::TOnly ? res.lambda1 : res.lambda2) = lambda;
        res.active = tag;
        return res;
    };

    if (detail::feasible(T, x0) && detail::feasible(G, x0)) return Result{x0, 0, 0, ActiveSet::None};

    if (G.degenerate()) return single(T, ActiveSet::TOnly);
    if (T.degenerate()) return single(G, ActiveSet::GammaOnly);

    // Work with unit normals so that the conditioning test sees only the
    // angle between the planes, not their scale.
    const Scalar nT = T.v.norm();
    const Scalar nG = G.v.norm();
    const Scalar cosine = T.v.dot(G.v) / (nT * nG);
    const Scalar det = Scalar(1) - cosine * cosine;

    // (Nearly) parallel normals pointing the same way: the intersection is
    // the halfspace whose boundary lies further in.
    if (cosine > Scalar(0) && det <= Scalar(1e-14)) {
        const Scalar cT = (T.v.dot(T.y) + T.r) / nT;
        const Scalar cG = (G.v.dot(G.y) + G.r) / nG;
        return cT <= cG ? single(T, ActiveSet::TOnly) : single(G, ActiveSet::GammaOnly);
    }

    // KKT case enumeration. A single-constraint projection that is feasible
    // for the other halfspace is optimal; otherwise both constraints are active.
    const Result only_T = single(T, ActiveSet::TOnly);
    if (detail::feasible(G, only_T.point)) return only_T;
    const Result only_G = single(G, ActiveSet::GammaOnly);
    if (detail::feasible(T, only_G.point)) return only_G;

    // Both active: 2x2 Gram system in unit normals. The corner lies on both
    // boundaries by construction, so only the multiplier signs are tested.
    if (det > Scalar(1e-14)) {
        const auto solve = [&](Scalar e1, Scalar e2) {
            return std::array<Scalar, 2>{(e1 - cosine * e2) / det, (e2 - cosine * e1) / det};
        };
        auto [mu1, mu2] = solve(T.excess(x0) / nT, G.excess(x0) / nG);
        const Scalar neg_tol = Scalar(-1e-12) * std::max({Scalar(1), std::abs(mu1), std::abs(mu2)});
        if (mu1 >= neg_tol && mu2 >= neg_tol) {
            Result res;
            res.lambda1 = mu1 / nT;
            res.lambda2 = mu2 / nG;
            res.point = x0 - res.lambda1 * T.v - res.lambda2 * G.v;
            // Rounding in the corner grows like 1/det; one pass of iterative
            // refinement on the boundary residuals recovers it.
            const auto [d1, d2] = solve(T.excess(res.point) / nT, G.excess(res.point) / nG);
            res.lambda1 += d1 / nT;
            res.lambda2 += d2 / nG;
            res.point -= (d1 / nT) * T.v + (d2 / nG) * G.v;
            res.lambda1 = std::max(res.lambda1, Scalar(0));
            res.lambda2 = std::max(res.lambda2, Scalar(0));
            res.active = ActiveSet::Both;
            return res;
        }
    }
    throw InvariantViolation("project_two_halfspaces: intersection appears empty");
}

/// Closed-form multipliers for the case where both T_k and Gamma_k are active,
/// with T_k = {<w, z - x_bar> <= r} and Gamma_k = {<x0 - xk, z - xk> <= 0}.
/// Returns nullopt when w and x0 - xk are linearly dependent.
template <typename Scalar>
std::optional<std::array<Scalar, 2>> both_active_multipliers(const Vector<Scalar>& w,
                                                             const Vector<Scalar>& x0,
                                                             const Vector<Scalar>& xk,
                                                             const Vector<Scalar>& x_bar, Scalar r) {
    const Vector<Scalar> g = x0 - xk;
    const Scalar wg = w.dot(g);
    const Scalar ww = w.squaredNorm();
    const Scalar gg = g.squaredNorm();
    const Scalar det = ww * gg - wg * wg;
    if (detail::same_direction(w, g) || det <= Scalar(0)) return std::nullopt;
    const Scalar t_excess = w.dot(x0 - x_bar) - r;
    const Scalar l1 = (t_excess * gg - wg * gg) / det;
    const Scalar l2 = (ww * gg - wg * t_excess) / det;
    return std::array<Scalar, 2>{l1, l2};
}

}  // namespace splitting
