#include <doctest.h>

#include "oracles.hpp"
#include "splitting/splitting.hpp"

using namespace splitting;
using V = Vector<double>;
using M = Matrix<double>;
using SV = SingleValuedOp<double>;
using BV = SetValuedOp<double>;

TEST_CASE("catalog fixtures are certified and named uniquely") {
    const auto all = catalog<double>();
    CHECK(all.size() >= 5);
    for (const auto& p : all) {
        CHECK(find_problem<double>(p.name).has_value());
        CHECK(p.a2.dim() == p.dim());
        CHECK(p.b.dim() == p.dim());
    }
    CHECK_FALSE(find_problem<double>("nope").has_value());
}

TEST_CASE("known solutions are fixed points of the forward-backward map") {
    for (const auto& p : catalog<double>()) {
        if (!p.has_known_solution()) continue;
        for (const auto& xs : sample_solutions(p, 5, 1)) {
            for (double a : {0.05, 0.5, 2.0}) CHECK_MESSAGE(natural_residual(p, xs, a) <= 1e-9, p.name);
        }
    }
}

TEST_CASE("box VI solution agrees with a grid and projected-iteration oracle") {
    const auto p = *find_problem<double>("box_vip");
    const V ref = oracle::box_vi_2d(M{{2, 1}, {1, 2}}, V{{-1, -1}}, 0.0, 1.0);
    CHECK((solution_project(p.solution, V{{5, -5}}) - ref).norm() <= 1e-9);
    CHECK((ref - V{{1.0 / 3, 1.0 / 3}}).norm() <= 1e-9);
}

TEST_CASE("solution-set projections") {
    CHECK(solution_project<double>(solution_set::SinglePoint<double>{V{{0, 0}}}, V{{3, 4}}) == V{{0, 0}});
    const auto ag = *find_problem<double>("affine_grad");
    CHECK(solution_project(ag.solution, V{{1, 2}}).isApprox(V{{0, 2}}));
    const solution_set::AffineSet<double> line{M{{1, 1}}, V{{1}}};
    CHECK(solution_project<double>(line, V{{1, 1}}).isApprox(V{{0.5, 0.5}}));
    const auto q = oracle::hildreth_two(V{{1, 1}}, V{{0.5, 0.5}}, 0.0, V{{-1, -1}}, V{{0.5, 0.5}}, 0.0, V{{1, 1}});
    CHECK((q.point - V{{0.5, 0.5}}).norm() <= 1e-12);

    const solution_set::BoxAffine<double> seg{V{{0, 0}}, V{{0.4, 1}}, M{{1, 1}}, V{{1}}};
    // {x1 + x2 = 1, 0 <= x1 <= 0.4}: nearest point to (1, 1) is (0.4, 0.6)
    CHECK((solution_project<double>(seg, V{{1, 1}}) - V{{0.4, 0.6}}).norm() <= 1e-8);
}

TEST_CASE("problem construction rejects inconsistent data") {
    CHECK_THROWS_AS(make_problem<double>("dims", SV::zero(2), SV::zero(3), BV::zero(2)), ConfigError);
    CHECK_THROWS_AS(make_problem<double>("beta", SV::rotation2d(), SV::zero(2), BV::zero(2)), ConfigError);
    CHECK_THROWS_AS(make_problem<double>("false beta", SV::scaled_identity(2, 2.0).with_cocoercivity(1.0),
                                         SV::zero(2), BV::zero(2)),
                    ConfigError);
    CHECK_THROWS_AS(make_problem<double>("false L", SV::zero(2), SV::rotation2d().with_lipschitz(0.5), BV::zero(2)),
                    ConfigError);
    const auto not_a2 = SV::custom(2, [](const V& x) { return x; }, false);
    CHECK_THROWS_AS(make_problem<double>("custom", SV::zero(2), not_a2, BV::zero(2)), ConfigError);
}

TEST_CASE("natural residual vanishes only at solutions") {
    const auto p = *find_problem<double>("lasso_like");
    const V xs{{1.5, 0.5, 0}};
    CHECK(natural_residual(p, xs, 0.3) <= 1e-12);
    CHECK(natural_residual(p, V{{1.5, 0.5, 0.1}}, 0.3) > 1e-3);
}
