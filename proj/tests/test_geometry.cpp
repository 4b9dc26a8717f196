#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "splitting/splitting.hpp"

using namespace splitting;
using V = Vector<double>;

TEST_CASE("T_k construction") {
    SUBCASE("at a fixed point the cut is degenerate") {
        const auto cut = build_Tk(V{{1, 2}}, V{{1, 2}}, 0.5, V{{3, 1}}, V{{3, 1}}, 0.2);
        CHECK(cut.converged);
        CHECK(cut.halfspace.degenerate());
        CHECK(cut.halfspace.r == 0);
    }
    SUBCASE("A2 = 0 reduces to the scaled displacement") {
        const auto cut = build_Tk(V{{1, 0}}, V{{0, 0}}, 1.0, V{{0, 0}}, V{{0, 0}}, 0.2);
        CHECK(cut.halfspace.v == V{{1, 0}});
        CHECK(cut.halfspace.y == V{{0, 0}});
        CHECK(cut.halfspace.r == doctest::Approx(0.2));
        CHECK_FALSE(cut.converged);
    }
    SUBCASE("rotation problem: the cut contains the solution and excludes x") {
        const auto p = *find_problem<double>("rotation2d");
        const V x{{1, 0}};
        const double alpha = 0.5;
        // forward-backward point with B = 0 and A = rotation
        const V x_bar{{x(0) - alpha * x(1), x(1) + alpha * x(0)}};
        const auto cut = build_Tk(x, x_bar, alpha, p.a2(x), p.a2(x_bar), 0.2);
        CHECK(cut.halfspace.contains(V{{0, 0}}, 0.0));
        CHECK(cut.halfspace.excess(x) > 0);
    }
}

TEST_CASE("Gamma_k construction") {
    CHECK(build_Gammak(V{{1, 1}}, V{{1, 1}}).degenerate());
    const auto g = build_Gammak(V{{1, 0}}, V{{0, 0}});
    CHECK(g.contains(V{{-3, 7}}, 0.0));
    CHECK_FALSE(g.contains(V{{0.1, 0}}, 0.0));
    CHECK(build_Gammak(V{{2, 2}}, V{{1, 1}}).contains(V{{0, 0}}, 0.0));
}

TEST_CASE("single halfspace projection") {
    const Halfspace<double> h{V{{1, 0}}, V{{0, 0}}, 0.0};
    CHECK(project_halfspace(h, V{{2, 3}}) == V{{0, 3}});
    CHECK(project_halfspace(h, V{{-1, 5}}) == V{{-1, 5}});

    std::mt19937_64 rng(99);
    for (int t = 0; t < 200; ++t) {
        const Halfspace<double> r{random_vector<double>(6, rng), random_vector<double>(6, rng),
                                  std::abs(random_vector<double>(1, rng)(0))};
        const V w = random_vector<double>(6, rng, 3.0);
        CHECK((project_halfspace(r, w) - oracle::bisect_halfspace(r.v, r.y, r.r, w)).norm() <= 1e-8);
    }
}

TEST_CASE("two-halfspace projection examples") {
    const Halfspace<double> x1{V{{1, 0}}, V{{0, 0}}, 0.0};
    const Halfspace<double> x2{V{{0, 1}}, V{{0, 0}}, 0.0};

    SUBCASE("feasible start") {
        const auto p = project_two_halfspaces(x1, x2, V{{-1, -2}});
        CHECK(p.point == V{{-1, -2}});
        CHECK(p.lambda1 == 0);
        CHECK(p.lambda2 == 0);
        CHECK(p.active == ActiveSet::None);
    }
    SUBCASE("degenerate second halfspace") {
        const auto p = project_two_halfspaces(x1, Halfspace<double>::whole_space(2), V{{2, 3}});
        CHECK(p.point == V{{0, 3}});
        CHECK(p.active == ActiveSet::TOnly);
    }
    SUBCASE("symmetric corner") {
        const V x0{{1, 1}};
        const auto p = project_two_halfspaces(x1, x2, x0);
        CHECK(p.point.norm() <= 1e-15);
        CHECK(p.lambda1 == doctest::Approx(1));
        CHECK(p.lambda2 == doctest::Approx(1));
        CHECK(p.active == ActiveSet::Both);
        const auto q = oracle::hildreth_two(x1.v, x1.y, x1.r, x2.v, x2.y, x2.r, x0);
        CHECK((p.point - q.point).norm() <= 1e-12);
    }
    SUBCASE("nested parallel halfspaces") {
        const Halfspace<double> tight{V{{2, 0}}, V{{-1, 0}}, 0.0};
        const auto p = project_two_halfspaces(x1, tight, V{{3, 1}});
        CHECK(p.point.isApprox(V{{-1, 1}}));
    }
    SUBCASE("disjoint halfspaces are reported") {
        const Halfspace<double> left{V{{1, 0}}, V{{-1, 0}}, 0.0};
        const Halfspace<double> right{V{{-1, 0}}, V{{1, 0}}, 0.0};
        CHECK_THROWS_AS(project_two_halfspaces(left, right, V{{0, 0}}), InvariantViolation);
    }
}

TEST_CASE("two-halfspace projection against Hildreth's method on random instances") {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> dim(2, 10);
    for (int t = 0; t < 300; ++t) {
        const int n = dim(rng);
        const V z = random_vector<double>(n, rng);
        Halfspace<double> T{random_vector<double>(n, rng), random_vector<double>(n, rng), 0.0};
        Halfspace<double> G{random_vector<double>(n, rng), random_vector<double>(n, rng), 0.0};
        T.r = T.v.dot(z - T.y) + 0.1;
        G.r = G.v.dot(z - G.y);
        const V x0 = random_vector<double>(n, rng, 4.0);
        const auto got = project_two_halfspaces(T, G, x0);
        const auto ref = oracle::hildreth_two(T.v, T.y, T.r, G.v, G.y, G.r, x0);
        CHECK((got.point - ref.point).norm() <= 1e-8);
        CHECK(got.lambda1 >= 0);
        CHECK(got.lambda2 >= 0);
        CHECK(std::abs(got.lambda1 * T.excess(got.point)) <= 1e-10);
        CHECK(std::abs(got.lambda2 * G.excess(got.point)) <= 1e-10);
    }
}

TEST_CASE("closed-form multipliers agree with the enumerated corner") {
    // T = {<w, z - x_bar> <= r}, Gamma = {<x0 - xk, z - xk> <= 0}
    const V w{{1, 0.2}}, x_bar{{0.5, 0.5}}, x0{{2, 1}}, xk{{1, 0.1}};
    const double r = 0.05;
    const Halfspace<double> T{w, x_bar, r};
    const auto G = build_Gammak(x0, xk);
    const auto p = project_two_halfspaces(T, G, x0);
    REQUIRE(p.active == ActiveSet::Both);
    const auto l = both_active_multipliers(w, x0, xk, x_bar, r);
    REQUIRE(l.has_value());
    CHECK((*l)[0] == doctest::Approx(p.lambda1).epsilon(1e-12));
    CHECK((*l)[1] == doctest::Approx(p.lambda2).epsilon(1e-12));
}
