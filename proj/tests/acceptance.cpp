// Acceptance suite: one PASS/FAIL line per criterion.
//
// Exit status is 0 when every failure is listed in kKnownGaps (each one is
// explained in the README); pass --strict to fail on any FAIL line.

#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "splitting/splitting.hpp"

using namespace splitting;
using V = Vector<double>;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
};

// The stepsize floor min{alpha_init, delta / L2} is not implied by
// backtracking on a geometric grid; only theta * delta / L2 is.
const std::set<int> kKnownGaps = {6};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

std::vector<ProblemInstance<double>> with_known_solution() {
    std::vector<ProblemInstance<double>> out;
    for (auto& p : catalog<double>()) {
        if (p.has_known_solution()) out.push_back(std::move(p));
    }
    return out;
}

std::vector<V> starts(Eigen::Index dim, int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<V> out;
    for (int i = 0; i < count; ++i) out.push_back(random_vector<double>(dim, rng, 2.0));
    return out;
}

Outcome fb_divergence() {
    const auto p = *find_problem<double>("rotation2d");
    double worst = 0;
    for (double a : {0.1, 1.0}) {
        SolverConfig<double> c;
        c.fixed_alpha = a;
        c.max_iter = 100;
        const auto res = solve(p, Method::FB, c, V{{1, 0}});
        const auto xs = res.trace.iterates();
        if (xs.size() != 101) return {false, "expected 100 steps, got " + std::to_string(xs.size() - 1)};
        const double factor = std::sqrt(1 + a * a);
        for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
            worst = std::max(worst, std::abs(xs[k + 1].norm() / (factor * xs[k].norm()) - 1));
        }
    }
    return {worst <= 1e-9, "max relative deviation from sqrt(1+a^2) growth " + fmt(worst) + " (<= 1e-9)"};
}

Outcome rotation_convergence() {
    const auto p = *find_problem<double>("rotation2d");
    SolverConfig<double> c;
    c.tol = 1e-6;
    c.max_iter = 10000;
    c.fixed_alpha = 0.5;
    double worst = 0;
    std::size_t most_iters = 0;
    for (const V& x0 : starts(2, 5, 11)) {
        for (Method m : {Method::Method1, Method::Method2, Method::FBF, Method::FBHF}) {
            const auto res = solve(p, m, c, x0);
            if (!res.succeeded()) return {false, std::string(to_string(m)) + " did not converge"};
            worst = std::max(worst, res.final_residual);
            most_iters = std::max(most_iters, res.iterations);
        }
    }
    return {worst <= 1e-6, "worst final residual " + fmt(worst) + " (<= 1e-6), most iterations " +
                               std::to_string(most_iters)};
}

Outcome fejer() {
    double worst = -1;
    std::string where;
    for (const auto& p : with_known_solution()) {
        for (const V& x0 : starts(p.dim(), 3, 21)) {
            const auto res = solve(p, Method::Method1, SolverConfig<double>{}, x0);
            auto sols = sample_solutions(p, 3, 5);
            sols.push_back(solution_project(p.solution, x0));
            for (const V& xs : sols) {
                const auto rep = fejer_check(res.trace, xs);
                if (rep.measured > worst) {
                    worst = rep.measured;
                    where = p.name;
                }
            }
        }
    }
    return {worst <= 1e-10, "max distance increase " + fmt(worst) + " on " + where + " (<= 1e-10)"};
}

Outcome ball() {
    double worst = -1;
    for (const char* name : {"affine_grad", "box_vip"}) {
        const auto p = *find_problem<double>(name);
        for (const V& x0 : starts(2, 5, 31)) {
            const auto res = solve(p, Method::Method2, SolverConfig<double>{}, x0);
            worst = std::max(worst, ball_check(res.trace, x0, solution_project(p.solution, x0)).measured);
        }
    }
    return {worst <= 1e-8, "max excess over the ball radius " + fmt(worst) + " (<= 1e-8)"};
}

Outcome strong_limit() {
    const auto p = *find_problem<double>("affine_grad");
    double worst = 0;
    for (const V& x0 : starts(2, 20, 41)) {
        const auto res = solve(p, Method::Method2, SolverConfig<double>{}, x0);
        worst = std::max(worst, (res.final_x - solution_project(p.solution, x0)).norm());
    }
    return {worst <= 1e-6, "max distance to the projection of x0 onto the solution set " + fmt(worst) +
                               " over 20 starts (<= 1e-6)"};
}

Outcome stepsize_floor() {
    double worst = 1;
    std::string where;
    const SolverConfig<double> c;
    for (const auto& p : catalog<double>()) {
        const auto L2 = p.lipschitz_a2();
        if (!L2) continue;
        for (Method m : {Method::Method1, Method::Method2}) {
            for (const V& x0 : starts(p.dim(), 3, 51)) {
                const auto rep = stepsize_floor_check(solve(p, m, c, x0).trace, *L2, c.resolved_alpha_init(p),
                                                      c.delta, 1.0);
                if (rep.measured < worst) {
                    worst = rep.measured;
                    where = p.name + " (" + rep.detail + ")";
                }
            }
        }
    }
    return {worst >= -1e-15, "min alpha_k - min(alpha_init, delta/L2) = " + fmt(worst) + " on " + where};
}

Outcome two_halfspace_oracle() {
    std::mt19937_64 rng(71);
    std::uniform_int_distribution<int> dims(2, 10);
    double dev = 0, low = 0, comp = 0;
    for (int t = 0; t < 1000; ++t) {
        const int n = dims(rng);
        const V z = random_vector<double>(n, rng);
        Halfspace<double> T{random_vector<double>(n, rng), random_vector<double>(n, rng), 0.0};
        Halfspace<double> G{random_vector<double>(n, rng), random_vector<double>(n, rng), 0.0};
        // z is feasible for both, so the intersection is nonempty
        T.r = T.v.dot(z - T.y) + std::abs(random_vector<double>(1, rng)(0));
        G.r = G.v.dot(z - G.y);
        const V x0 = random_vector<double>(n, rng, 4.0);
        const auto got = project_two_halfspaces(T, G, x0);
        const auto ref = oracle::hildreth_two(T.v, T.y, T.r, G.v, G.y, G.r, x0);
        dev = std::max(dev, (got.point - ref.point).norm());
        low = std::min({low, got.lambda1, got.lambda2});
        comp = std::max({comp, std::abs(got.lambda1 * T.excess(got.point)), std::abs(got.lambda2 * G.excess(got.point))});
    }
    return {dev <= 1e-8 && low >= 0 && comp <= 1e-10,
            "max deviation " + fmt(dev) + " (<= 1e-8), smallest multiplier " + fmt(low) +
                ", max complementarity " + fmt(comp) + " (<= 1e-10)"};
}

Outcome fbhf_recovery() {
    double worst = 0;
    for (const char* name : {"rotation2d", "skew_mix"}) {
        const auto p = *find_problem<double>(name);
        // alternate between two stepsizes admissible for FBHF on both problems
        std::vector<double> alphas;
        for (int k = 0; k < 50; ++k) alphas.push_back(k % 2 ? 0.25 : 0.5);
        V xm = V::Ones(p.dim());
        V xf = xm;
        for (double a : alphas) {
            xm = method1_step(make_state(p, xm, a, 0.25), 1.0, std::optional<double>(a)).x_next;
            xf = fbhf_step(p, xf, a);
            worst = std::max(worst, (xm - xf).norm());
        }
    }
    return {worst <= 1e-12, "max iterate discrepancy over 50 steps " + fmt(worst) + " (<= 1e-12)"};
}

Outcome separation() {
    std::string failure;
    double worst = 0;
    std::size_t records = 0;
    for (const auto& p : with_known_solution()) {
        for (Method m : {Method::Method1, Method::Method2}) {
            for (const V& x0 : starts(p.dim(), 2, 61)) {
                SolverConfig<double> c;
                const auto res = solve(p, m, c, x0);
                records += res.trace.records.size();
                auto sols = sample_solutions(p, 3, 7);
                sols.push_back(solution_project(p.solution, x0));
                const auto rep = separation_check(res.trace, sols, c.tol);
                worst = std::max(worst, rep.measured);
                if (!rep.ok() && failure.empty()) failure = p.name + ": " + rep.detail;
            }
        }
    }
    return {failure.empty(), failure.empty() ? "max solution distance to T_k/Gamma_k " + fmt(worst) + " over " +
                                                   std::to_string(records) + " records; iterates always cut off"
                                             : failure};
}

Outcome resolvents() {
    double firm = -1;
    for (const auto& p : catalog<double>()) {
        const auto pairs = random_pairs<double>(p.dim(), 100, 81, 3.0);
        for (double a : {0.1, 1.0, 3.0}) firm = std::max(firm, check_firm_nonexpansiveness(p.b, a, pairs).value);
    }
    double st = 0;
    std::mt19937_64 rng(83);
    const auto l1 = SetValuedOp<double>::l1(5, 1.5);
    for (int t = 0; t < 40; ++t) {
        const V x = random_vector<double>(5, rng, 3.0);
        const double a = 0.05 * (t + 1);
        const V got = l1.resolvent(a, x);
        for (Eigen::Index i = 0; i < 5; ++i) st = std::max(st, std::abs(got(i) - oracle::grid_prox_abs(x(i), a * 1.5)));
    }
    return {firm <= 1e-10 && st <= 1e-6,
            "max firm-nonexpansiveness violation " + fmt(firm) + " (<= 1e-10), soft-threshold vs grid " + fmt(st) +
                " (<= 1e-6)"};
}

Outcome line_search() {
    double worst = -1;
    std::size_t traces = 0;
    std::string failure;
    for (const auto& p : catalog<double>()) {
        for (Method m : {Method::Method1, Method::Method2}) {
            for (const V& x0 : starts(p.dim(), 2, 91)) {
                SolverConfig<double> c;
                const auto res = solve(p, m, c, x0);
                const auto rep = line_search_audit(res.trace, p, c.theta, c.delta);
                ++traces;
                worst = std::max(worst, rep.measured);
                if (!rep.ok() && failure.empty()) failure = p.name + ": " + rep.detail;
            }
        }
    }
    return {failure.empty(), failure.empty() ? "max acceptance gap " + fmt(worst) + " (<= 1e-12), j(k) minimal in " +
                                                   std::to_string(traces) + " traces"
                                             : failure};
}

}  // namespace

int main(int argc, char** argv) {
    const bool strict = argc > 1 && std::strcmp(argv[1], "--strict") == 0;
    const std::vector<Criterion> criteria = {
        {1, "forward-backward diverges on the rotation", fb_divergence},
        {2, "rotation problem solved by Method1, Method2, FBF, FBHF", rotation_convergence},
        {3, "Fejer monotonicity of Method1", fejer},
        {4, "Method2 iterates stay in the ball", ball},
        {5, "Method2 strong limit on affine_grad", strong_limit},
        {6, "stepsize floor min(alpha_init, delta/L2)", stepsize_floor},
        {7, "two-halfspace projection vs QP oracle", two_halfspace_oracle},
        {8, "Method1 with lambda_k = alpha_k recovers FBHF", fbhf_recovery},
        {9, "separation invariants", separation},
        {10, "resolvent correctness", resolvents},
        {11, "line-search audit", line_search},
    };
    int unexpected = 0;
    int failed = 0;
    for (const auto& c : criteria) {
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const bool known = kKnownGaps.count(c.id) > 0;
        std::printf("%s  [%2d] %s: %s%s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                    !o.pass && known ? "  (known gap, see README)" : "");
        if (!o.pass) {
            ++failed;
            if (!known || strict) ++unexpected;
        }
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return unexpected == 0 ? 0 : 1;
}
