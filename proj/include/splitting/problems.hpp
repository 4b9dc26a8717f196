#pragma once

#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <type_traits>
#include <variant>
#include <vector>

#include "splitting/operators.hpp"
#include "splitting/sampling.hpp"

namespace splitting {

/// Descriptors for zer(A1 + A2 + B) when it is known in closed form.
namespace solution_set {

struct Unknown {};

template <typename Scalar>
struct SinglePoint {
    Vector<Scalar> point;
};

/// {x : E x = d}
template <typename Scalar>
struct AffineSet {
    Matrix<Scalar> E;
    Vector<Scalar> d;
};

/// {x : lo <= x <= hi, E x = d}
template <typename Scalar>
struct BoxAffine {
    Vector<Scalar> lo;
    Vector<Scalar> hi;
    Matrix<Scalar> E;
    Vector<Scalar> d;
};

}  // namespace solution_set

template <typename Scalar>
using SolutionSet = std::variant<solution_set::Unknown, solution_set::SinglePoint<Scalar>,
                                 solution_set::AffineSet<Scalar>, solution_set::BoxAffine<Scalar>>;

namespace detail {

template <typename Scalar>
Vector<Scalar> project_affine(const Matrix<Scalar>& E, const Vector<Scalar>& d, const Vector<Scalar>& x) {
    Eigen::CompleteOrthogonalDecomposition<Matrix<Scalar>> cod(E);
    return x - cod.solve(E * x - d);
}

}  // namespace detail

/// Closed-form nearest point of the solution descriptor. Box ∩ affine has no
/// closed form and is resolved by Dykstra's alternating projections.
template <typename Scalar>
Vector<Scalar> solution_project(const SolutionSet<Scalar>& set, const Vector<Scalar>& x) {
    using namespace solution_set;
    if (std::holds_alternative<Unknown>(set)) {
        throw UnsupportedError("solution_project: solution set is unknown");
    }
    if (const auto* p = std::get_if<SinglePoint<Scalar>>(&set)) {
        require_dim(x, p->point.size(), "solution_project");
        return p->point;
    }
    if (const auto* a = std::get_if<AffineSet<Scalar>>(&set)) {
        require_dim(x, a->E.cols(), "solution_project");
        return detail::project_affine(a->E, a->d, x);
    }
    const auto& ba = std::get<BoxAffine<Scalar>>(set);
    require_dim(x, ba.E.cols(), "solution_project");
    Eigen::CompleteOrthogonalDecomposition<Matrix<Scalar>> cod(ba.E);
    Vector<Scalar> u = x;
    Vector<Scalar> p = Vector<Scalar>::Zero(x.size());
    Vector<Scalar> q = Vector<Scalar>::Zero(x.size());
    for (int it = 0; it < 1000000; ++it) {
        const Vector<Scalar> yb = (u + p).cwiseMax(ba.lo).cwiseMin(ba.hi);
        p = u + p - yb;
        const Vector<Scalar> z = yb + q;
        const Vector<Scalar> ya = z - cod.solve(ba.E * z - ba.d);
        q = z - ya;
        const Scalar change = (ya - u).norm();
        u = ya;
        if (change <= Scalar(1e-15) * unit_scale(u)) break;
    }
    return u;
}

/// 0 ∈ (A1 + A2 + B) x with A1 beta-cocoercive, A2 monotone and uniformly
/// continuous, and B maximal monotone through its resolvent.
template <typename Scalar>
struct ProblemInstance {
    std::string name;
    SingleValuedOp<Scalar> a1;
    SingleValuedOp<Scalar> a2;
    SetValuedOp<Scalar> b;
    SolutionSet<Scalar> solution{solution_set::Unknown{}};

    Eigen::Index dim() const { return a1.dim(); }
    /// Cocoercivity constant of A1 (+inf when A1 is constant).
    Scalar beta() const { return *a1.cocoercivity(); }
    std::optional<Scalar> lipschitz_a2() const { return a2.lipschitz(); }
    bool has_known_solution() const { return !std::holds_alternative<solution_set::Unknown>(solution); }

    Vector<Scalar> eval_a(const Vector<Scalar>& x) const { return a1(x) + a2(x); }
};

/// Validates and certifies a problem: dimensions agree, A1 declares a
/// cocoercivity constant that holds on 200 random pairs, A2 is usable as the
/// monotone part and its declared Lipschitz constant (if any) holds on samples.
template <typename Scalar>
ProblemInstance<Scalar> make_problem(std::string name, SingleValuedOp<Scalar> a1, SingleValuedOp<Scalar> a2,
                                     SetValuedOp<Scalar> b,
                                     SolutionSet<Scalar> solution = solution_set::Unknown{},
                                     std::uint64_t certification_seed = 20240601) {
    const Eigen::Index n = a1.dim();
    if (a2.dim() != n || b.dim() != n) {
        throw ConfigError("problem '" + name + "': operator dimensions disagree");
    }
    if (!a1.cocoercivity()) {
        throw ConfigError("problem '" + name + "': A1 must declare a cocoercivity constant");
    }
    if (!a2.usable_as_a2()) {
        throw ConfigError("problem '" + name + "': A2 operator is not declared usable as the monotone part");
    }
    const auto pairs = random_pairs<Scalar>(n, 200, certification_seed, Scalar(3));
    const auto co = check_cocoercive_sampled(a1, *a1.cocoercivity(), pairs);
    if (!co.pass) {
        throw ConfigError("problem '" + name + "': declared beta fails sampled cocoercivity (slack " +
                          std::to_string(static_cast<double>(co.value)) + ")");
    }
    if (!check_monotone_sampled(a2, pairs).pass) {
        throw ConfigError("problem '" + name + "': A2 fails sampled monotonicity");
    }
    if (const auto L = a2.lipschitz()) {
        const auto lip = check_lipschitz_sampled(a2, *L, pairs);
        if (!lip.pass) {
            throw ConfigError("problem '" + name + "': declared Lipschitz constant fails sampled check");
        }
    }
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, solution_set::SinglePoint<Scalar>>) {
                require_dim(s.point, n, "solution point");
            } else if constexpr (!std::is_same_v<T, solution_set::Unknown>) {
                if (s.E.cols() != n || s.E.rows() != s.d.size()) {
                    throw ConfigError("problem '" + name + "': solution descriptor has wrong shape");
                }
            }
        },
        solution);
    return ProblemInstance<Scalar>{std::move(name), std::move(a1), std::move(a2), std::move(b), std::move(solution)};
}

/// Forward-backward residual ||x - J_{alpha B}(x - alpha A x)||; zero exactly on zer(A+B).
template <typename Scalar>
Scalar natural_residual(const ProblemInstance<Scalar>& problem, const Vector<Scalar>& x, Scalar alpha) {
    return (x - problem.b.resolvent(alpha, x - alpha * problem.eval_a(x))).norm();
}

/// Points drawn from the known solution set for invariant checks. A single
/// point yields itself; affine sets yield projections of random points.
template <typename Scalar>
std::vector<Vector<Scalar>> sample_solutions(const ProblemInstance<Scalar>& problem, int count, std::uint64_t seed) {
    std::vector<Vector<Scalar>> out;
    if (!problem.has_known_solution()) return out;
    if (const auto* p = std::get_if<solution_set::SinglePoint<Scalar>>(&problem.solution)) {
        out.push_back(p->point);
        return out;
    }
    std::mt19937_64 rng(seed);
    for (int i = 0; i < count; ++i) {
        out.push_back(solution_project(problem.solution, random_vector<Scalar>(problem.dim(), rng, Scalar(5))));
    }
    return out;
}

/// The named fixtures used throughout the test and acceptance suites.
///
///  rotation2d   A2 = pi/2 rotation, solution {0}; FB diverges here.
///  affine_grad  A1 = grad 1/2 x1^2 (beta = 1), solution {x1 = 0}.
///  box_vip      A2 = [[2,1],[1,2]] x + (-1,-1), B = N_[0,1]^2, solution (1/3, 1/3).
///  skew_mix     A1 = x - b (beta = 1), A2 = skew, B = N_[-1,1]^3, solution (1, 0.2, -0.5).
///  lasso_like   A1 = M'M x - M'y, B = d|.|_1, closed-form solution (1.5, 0.5, 0).
///  lasso_dense  dense M, solution unknown.
template <typename Scalar>
std::vector<ProblemInstance<Scalar>> catalog() {
    using V = Vector<Scalar>;
    using M = Matrix<Scalar>;
    using SV = SingleValuedOp<Scalar>;
    using BV = SetValuedOp<Scalar>;
    std::vector<ProblemInstance<Scalar>> out;

    out.push_back(make_problem<Scalar>("rotation2d", SV::zero(2), SV::rotation2d(), BV::zero(2),
                                       solution_set::SinglePoint<Scalar>{V::Zero(2)}));

    {
        M Q{{1, 0}, {0, 0}};
        M E{{1, 0}};
        out.push_back(make_problem<Scalar>("affine_grad", SV::affine_gradient(Q, V::Zero(2)), SV::zero(2), BV::zero(2),
                                           solution_set::AffineSet<Scalar>{E, V::Zero(1)}));
    }

    {
        // M x + q = 0 at (1/3, 1/3), interior to the box.
        M A{{2, 1}, {1, 2}};
        V q{{-1, -1}};
        out.push_back(make_problem<Scalar>("box_vip", SV::zero(2), SV::linear(A, q), BV::box(V::Zero(2), V::Ones(2)),
                                           solution_set::SinglePoint<Scalar>{V{{Scalar(1) / 3, Scalar(1) / 3}}}));
    }

    {
        // F(x) = x - b + S x with b chosen so that x* = (1, 0.2, -0.5) has
        // F(x*) = (-0.5, 0, 0), an outward normal of the box face x1 = 1.
        M S{{0, 1, 0}, {-1, 0, 1}, {0, -1, 0}};
        V b{{Scalar(1.7), Scalar(-1.3), Scalar(-0.7)}};
        V star{{Scalar(1), Scalar(0.2), Scalar(-0.5)}};
        out.push_back(make_problem<Scalar>(
            "skew_mix", SV::affine_gradient(M::Identity(3, 3), b),
            SV::linear(S).with_lipschitz(std::sqrt(Scalar(2))), BV::box(-V::Ones(3), V::Ones(3)),
            solution_set::SinglePoint<Scalar>{star}));
    }

    {
        // M'M = diag(2, 2, 1), M'y = (4, 2, 0.2); soft-threshold at 1 then
        // divide by the diagonal gives (1.5, 0.5, 0).
        M data{{1, 1, 0}, {1, -1, 0}, {0, 0, 1}};
        V y{{3, 1, Scalar(0.2)}};
        out.push_back(make_problem<Scalar>(
            "lasso_like", SV::affine_gradient(data.transpose() * data, data.transpose() * y), SV::zero(3), BV::l1(3, 1),
            solution_set::SinglePoint<Scalar>{V{{Scalar(1.5), Scalar(0.5), Scalar(0)}}}));
    }

    {
        M data{{Scalar(0.9), Scalar(-0.3), Scalar(0.4), Scalar(0.1)},
               {Scalar(0.2), Scalar(1.1), Scalar(-0.5), Scalar(0.3)},
               {Scalar(-0.4), Scalar(0.6), Scalar(0.8), Scalar(-0.2)},
               {Scalar(0.5), Scalar(0.1), Scalar(-0.3), Scalar(1.2)},
               {Scalar(0.3), Scalar(-0.7), Scalar(0.2), Scalar(0.6)}};
        V y{{Scalar(1.0), Scalar(-2.0), Scalar(0.5), Scalar(1.5), Scalar(-0.5)}};
        out.push_back(make_problem<Scalar>("lasso_dense",
                                           SV::affine_gradient(data.transpose() * data, data.transpose() * y),
                                           SV::zero(4), BV::l1(4, Scalar(0.3))));
    }
    return out;
}

template <typename Scalar>
std::optional<ProblemInstance<Scalar>> find_problem(const std::string& name) {
    for (auto& p : catalog<Scalar>()) {
        if (p.name == name) return std::move(p);
    }
    return std::nullopt;
}

}  // namespace splitting
