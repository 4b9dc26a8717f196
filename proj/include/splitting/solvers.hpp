#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "splitting/geometry.hpp"
#include "splitting/linesearch.hpp"
#include "splitting/problems.hpp"

namespace splitting {

enum class Method { FB, FBF, FBHF, Method1, Method2 };

constexpr std::string_view to_string(Method m) {
    switch (m) {
        case Method::FB: return "FB";
        case Method::FBF: return "FBF";
        case Method::FBHF: return "FBHF";
        case Method::Method1: return "Method1";
        case Method::Method2: return "Method2";
    }
    return "?";
}

inline std::optional<Method> parse_method(std::string_view text) {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "fb") return Method::FB;
    if (lower == "fbf") return Method::FBF;
    if (lower == "fbhf") return Method::FBHF;
    if (lower == "method1" || lower == "m1") return Method::Method1;
    if (lower == "method2" || lower == "m2") return Method::Method2;
    return std::nullopt;
}

constexpr bool is_baseline(Method m) { return m == Method::FB || m == Method::FBF || m == Method::FBHF; }

template <typename Scalar>
struct SolverConfig {
    Scalar theta{0.5};
    Scalar delta{0.5};
    Scalar delta_bar{0.25};
    std::optional<Scalar> alpha_init;  ///< alpha_{-1}; defaults to min(1, 4 beta delta_bar)
    Scalar gamma{1};                   ///< Method 1 relaxation in (0, 2)
    Scalar tol{1e-10};
    std::size_t max_iter{10000};
    std::size_t max_trials{60};
    std::optional<Scalar> fixed_alpha;  ///< constant stepsize for FB/FBF/FBHF

    Scalar resolved_alpha_init(const ProblemInstance<Scalar>& problem) const {
        if (alpha_init) return *alpha_init;
        using std::min;
        return min(Scalar(1), Scalar(4) * problem.beta() * delta_bar);
    }
};

/// Every violated constraint, each prefixed with its name. Empty when valid.
template <typename Scalar>
std::vector<std::string> config_violations(const SolverConfig<Scalar>& c, const ProblemInstance<Scalar>& problem,
                                           Method method) {
    std::vector<std::string> out;
    const auto fail = [&](const char* name, const std::string& msg) { out.push_back(std::string(name) + ": " + msg); };
    if (!(c.theta > 0 && c.theta < 1)) fail("theta_range", "theta must lie in (0,1)");
    if (!(c.delta > 0 && c.delta < 1)) fail("delta_range", "delta must lie in (0,1)");
    if (!(c.delta_bar > 0)) fail("delta_bar_positive", "delta_bar must be positive");
    if (!(1 - c.delta - c.delta_bar > 0)) fail("delta_sum", "1 - delta - delta_bar must be positive");
    if (c.alpha_init && !(*c.alpha_init > 0)) fail("alpha_init_positive", "alpha_init must be positive");
    const Scalar beta = problem.beta();
    if (c.alpha_init && beta < infinity<Scalar>() && *c.alpha_init > Scalar(4) * beta * c.delta_bar) {
        fail("alpha_init_cocoercive_bound", "alpha_init must not exceed 4 * beta * delta_bar = " +
                                                std::to_string(static_cast<double>(4 * beta * c.delta_bar)));
    }
    if (!(c.gamma > 0 && c.gamma < 2)) fail("gamma_range", "gamma must lie in (0,2)");
    if (!(c.tol > 0)) fail("tol_positive", "tol must be positive");
    if (c.max_iter == 0) fail("max_iter_positive", "max_iter must be positive");
    if (c.max_trials == 0) fail("max_trials_positive", "max_trials must be positive");
    if (is_baseline(method) && !c.fixed_alpha) {
        fail("fixed_alpha_required", std::string(to_string(method)) + " needs a fixed stepsize");
    }
    if (c.fixed_alpha && !(*c.fixed_alpha > 0)) fail("fixed_alpha_positive", "fixed_alpha must be positive");
    return out;
}

template <typename Scalar>
void validate_config(const SolverConfig<Scalar>& c, const ProblemInstance<Scalar>& problem, Method method) {
    const auto v = config_violations(c, problem, method);
    if (v.empty()) return;
    std::string msg = "invalid solver configuration:";
    for (const auto& s : v) msg += "\n  " + s;
    throw ConfigError(msg);
}

template <typename Scalar>
struct IterationState {
    std::size_t k{0};
    Vector<Scalar> x;      ///< x^k
    Vector<Scalar> x_bar;  ///< forward-backward point
    Scalar alpha{0};       ///< accepted stepsize alpha_k
    std::size_t j{0};
    Vector<Scalar> w2;  ///< (x - x_bar)/alpha - (A2 x - A2 x_bar)
    Scalar r{0};        ///< (delta_bar/alpha) ||x - x_bar||^2
    Scalar residual{0};
    Vector<Scalar> a2_x;
    Vector<Scalar> a2_x_bar;
    std::size_t trials{0};
};

template <typename Scalar>
IterationState<Scalar> make_state(const LineSearchResult<Scalar>& ls, const Vector<Scalar>& x, Scalar delta_bar,
                                  std::size_t k = 0) {
    IterationState<Scalar> s;
    s.k = k;
    s.x = x;
    s.x_bar = ls.x_bar;
    s.alpha = ls.alpha;
    s.j = ls.j;
    s.a2_x = ls.a2_x;
    s.a2_x_bar = ls.a2_x_bar;
    s.trials = ls.trials;
    const Vector<Scalar> d = x - ls.x_bar;
    s.w2 = d / ls.alpha - (ls.a2_x - ls.a2_x_bar);
    s.r = delta_bar / ls.alpha * d.squaredNorm();
    s.residual = d.norm();
    return s;
}

/// State at a prescribed stepsize, bypassing the line search.
template <typename Scalar>
IterationState<Scalar> make_state(const ProblemInstance<Scalar>& problem, const Vector<Scalar>& x, Scalar alpha,
                                  Scalar delta_bar, std::size_t k = 0) {
    LineSearchResult<Scalar> ls;
    ls.a2_x = problem.a2(x);
    ls.a_x = problem.a1(x) + ls.a2_x;
    ls.alpha = alpha;
    ls.x_bar = problem.b.resolvent(alpha, x - alpha * ls.a_x);
    ls.a2_x_bar = problem.a2(ls.x_bar);
    ls.trials = 1;
    return make_state(ls, x, delta_bar, k);
}

/// J_{alpha B}(x - alpha (A1 + A2) x)
template <typename Scalar>
Vector<Scalar> fb_step(const ProblemInstance<Scalar>& problem, const Vector<Scalar>& x, Scalar alpha) {
    if (!(alpha > 0)) throw ConfigError("fb_step: alpha must be positive");
    return problem.b.resolvent(alpha, x - alpha * problem.eval_a(x));
}

template <typename Scalar>
Vector<Scalar> fbf_step(const ProblemInstance<Scalar>& problem, const Vector<Scalar>& x, Scalar alpha) {
    if (!(alpha > 0)) throw ConfigError("fbf_step: alpha must be positive");
    const Vector<Scalar> ax = problem.eval_a(x);
    const Vector<Scalar> x_bar = problem.b.resolvent(alpha, x - alpha * ax);
    return x_bar - alpha * (problem.eval_a(x_bar) - ax);
}

/// Like fbf_step, but the correction uses A2 only; A1 is never evaluated at x_bar.
template <typename Scalar>
Vector<Scalar> fbhf_step(const ProblemInstance<Scalar>& problem, const Vector<Scalar>& x, Scalar alpha) {
    if (!(alpha > 0)) throw ConfigError("fbhf_step: alpha must be positive");
    const Vector<Scalar> a2x = problem.a2(x);
    const Vector<Scalar> x_bar = problem.b.resolvent(alpha, x - alpha * (problem.a1(x) + a2x));
    return x_bar - alpha * (problem.a2(x_bar) - a2x);
}

template <typename Scalar>
struct Method1Step {
    Vector<Scalar> x_next;
    Scalar lambda{0};
    bool detected_solution{false};
};

/// x - gamma * lambda_k * w2 with lambda_k = (<w2, x - x_bar> - r)/||w2||^2.
/// With gamma = 1 this is the projection of x onto T_k. `lambda_override`
/// replaces lambda_k (lambda_k = alpha_k recovers the FBHF step).
template <typename Scalar>
Method1Step<Scalar> method1_step(const IterationState<Scalar>& s, Scalar gamma,
                                 std::optional<Scalar> lambda_override = std::nullopt) {
    Method1Step<Scalar> out;
    const Scalar w_sq = s.w2.squaredNorm();
    using std::max;
    const Scalar floor = Scalar(1e-14) * max(Scalar(1), s.x.norm() / s.alpha);
    if (!lambda_override && s.w2.norm() <= floor) {
        out.x_next = s.x;
        out.detected_solution = true;
        return out;
    }
    out.lambda = lambda_override ? *lambda_override : (s.w2.dot(s.x - s.x_bar) - s.r) / w_sq;
    if (!lambda_override && out.lambda <= Scalar(0)) {
        out.x_next = s.x;
        out.detected_solution = true;
        return out;
    }
    out.x_next = s.x - gamma * out.lambda * s.w2;
    return out;
}

template <typename Scalar>
Halfspace<Scalar> state_Tk(const IterationState<Scalar>& s) {
    return Halfspace<Scalar>{s.w2, s.x_bar, s.r};
}

/// Projection of x0 onto T_k ∩ Gamma_k.
template <typename Scalar>
TwoHalfspaceProjection<Scalar> method2_step(const IterationState<Scalar>& s, const Vector<Scalar>& x0) {
    return project_two_halfspaces(state_Tk(s), build_Gammak(x0, s.x), x0);
}

enum class SolveStatus { Converged, MaxIter, LineSearchFailed, DetectedSolution };

constexpr std::string_view to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Converged: return "converged";
        case SolveStatus::MaxIter: return "max_iter";
        case SolveStatus::LineSearchFailed: return "line_search_failed";
        case SolveStatus::DetectedSolution: return "detected_solution";
    }
    return "?";
}

/// One row per outer iteration, describing the state at x^k.
template <typename Scalar>
struct TraceRecord {
    std::size_t k{0};
    Vector<Scalar> x;
    Vector<Scalar> x_bar;
    Scalar alpha{0};
    Scalar alpha_prev{0};  ///< stepsize the backtracking started from
    std::size_t j{0};
    Scalar residual{0};
    std::size_t trials{0};
    Vector<Scalar> a2_x;
    Vector<Scalar> a2_x_bar;
    std::optional<Scalar> lambda_k;
    std::optional<Scalar> lambda1;
    std::optional<Scalar> lambda2;
    std::optional<Scalar> dist_to_solution;
    /// Whether the best-approximation solution lies in T_k / Gamma_k.
    std::optional<bool> in_Tk;
    std::optional<bool> in_Gammak;
    std::optional<Halfspace<Scalar>> Tk;
    std::optional<Halfspace<Scalar>> Gammak;
    /// <w2, x - x_bar> - r, which tends to zero along Method 1 runs.
    std::optional<Scalar> separation_gap;
    std::optional<Scalar> step;  ///< ||x^{k+1} - x^k|| when a step was taken
};

template <typename Scalar>
struct Trace {
    Method method{Method::Method1};
    Vector<Scalar> x0;
    std::vector<TraceRecord<Scalar>> records;
    Vector<Scalar> final_x;

    /// x^0, x^1, ..., final_x without duplicates at the end.
    std::vector<Vector<Scalar>> iterates() const {
        std::vector<Vector<Scalar>> xs;
        for (const auto& r : records) xs.push_back(r.x);
        if (xs.empty() || final_x.size() != xs.back().size() || final_x != xs.back()) xs.push_back(final_x);
        return xs;
    }
};

struct EvaluationCounters {
    std::size_t resolvent_calls{0};
    std::size_t a1_evals{0};
    std::size_t a2_evals{0};
};

template <typename Scalar>
struct SolveResult {
    SolveStatus status{SolveStatus::MaxIter};
    Vector<Scalar> final_x;
    std::size_t iterations{0};
    Scalar final_residual{0};
    Scalar final_alpha{0};
    Trace<Scalar> trace;
    EvaluationCounters counters;
    std::optional<std::size_t> failed_iteration;
    std::string message;

    bool succeeded() const { return status == SolveStatus::Converged || status == SolveStatus::DetectedSolution; }
};

/// Runs one of the five iterations from x0. Conceptual methods backtrack at
/// every outer iteration starting from the previous accepted stepsize;
/// baselines use config.fixed_alpha. Stops when the forward-backward residual
/// or the step length drops below tol * max(1, ||x^k||).
template <typename Scalar>
SolveResult<Scalar> solve(const ProblemInstance<Scalar>& problem, Method method, const SolverConfig<Scalar>& config,
                          const Vector<Scalar>& x0) {
    require_dim(x0, problem.dim(), "solve x0");
    require_finite(x0, "solve x0");
    validate_config(config, problem, method);

    SolveResult<Scalar> res;
    res.trace.method = method;
    res.trace.x0 = x0;
    auto& cnt = res.counters;

    std::optional<Vector<Scalar>> best_approx;
    if (problem.has_known_solution()) best_approx = solution_project(problem.solution, x0);

    const auto residual_at = [&](const Vector<Scalar>& x, Scalar alpha) {
        ++cnt.resolvent_calls;
        ++cnt.a1_evals;
        ++cnt.a2_evals;
        return natural_residual(problem, x, alpha);
    };
    const auto finish = [&](SolveStatus status, Vector<Scalar> x, std::size_t iterations, Scalar alpha) {
        res.status = status;
        res.final_x = std::move(x);
        res.iterations = iterations;
        res.final_alpha = alpha;
        res.final_residual = residual_at(res.final_x, alpha);
        res.trace.final_x = res.final_x;
        return res;
    };
    const auto fill_distance = [&](TraceRecord<Scalar>& rec) {
        if (problem.has_known_solution()) rec.dist_to_solution = (rec.x - solution_project(problem.solution, rec.x)).norm();
    };

    Vector<Scalar> x = x0;
    if (is_baseline(method)) {
        const Scalar alpha = *config.fixed_alpha;
        for (std::size_t k = 0; k < config.max_iter; ++k) {
            const Scalar scale = unit_scale(x);
            const Vector<Scalar> a1x = problem.a1(x);
            const Vector<Scalar> a2x = problem.a2(x);
            const Vector<Scalar> x_bar = problem.b.resolvent(alpha, x - alpha * (a1x + a2x));
            ++cnt.resolvent_calls;
            ++cnt.a1_evals;
            ++cnt.a2_evals;

            TraceRecord<Scalar> rec;
            rec.k = k;
            rec.x = x;
            rec.x_bar = x_bar;
            rec.alpha = rec.alpha_prev = alpha;
            rec.residual = (x - x_bar).norm();
            rec.trials = 1;
            rec.a2_x = a2x;
            fill_distance(rec);

            if (rec.residual <= config.tol * scale) {
                res.trace.records.push_back(std::move(rec));
                return finish(SolveStatus::Converged, x, k, alpha);
            }

            Vector<Scalar> next;
            switch (method) {
                case Method::FB: next = x_bar; break;
                case Method::FBF:
                    next = x_bar - alpha * (problem.a1(x_bar) + problem.a2(x_bar) - a1x - a2x);
                    ++cnt.a1_evals;
                    ++cnt.a2_evals;
                    break;
                default:
                    rec.a2_x_bar = problem.a2(x_bar);
                    next = x_bar - alpha * (rec.a2_x_bar - a2x);
                    ++cnt.a2_evals;
                    break;
            }
            if (!next.allFinite()) {
                res.trace.records.push_back(std::move(rec));
                res.message = "iterate became non-finite";
                return finish(SolveStatus::MaxIter, x, k, alpha);
            }
            rec.step = (next - x).norm();
            const bool small_step = *rec.step <= config.tol * scale;
            res.trace.records.push_back(std::move(rec));
            x = std::move(next);
            if (small_step && residual_at(x, alpha) <= config.tol * unit_scale(x)) {
                return finish(SolveStatus::Converged, x, k + 1, alpha);
            }
        }
        return finish(SolveStatus::MaxIter, x, config.max_iter, alpha);
    }

    Scalar alpha_prev = config.resolved_alpha_init(problem);
    for (std::size_t k = 0; k < config.max_iter; ++k) {
        const Scalar scale = unit_scale(x);
        LineSearchResult<Scalar> ls;
        try {
            ls = backtrack(problem, x, alpha_prev, config.theta, config.delta, config.max_trials);
        } catch (const LineSearchFailure& e) {
            cnt.resolvent_calls += e.trials();
            cnt.a2_evals += e.trials() + 1;
            ++cnt.a1_evals;
            res.failed_iteration = k;
            res.message = e.what();
            return finish(SolveStatus::LineSearchFailed, x, k, alpha_prev);
        }
        cnt.resolvent_calls += ls.trials;
        cnt.a2_evals += ls.trials + 1;
        ++cnt.a1_evals;

        const IterationState<Scalar> s = make_state(ls, x, config.delta_bar, k);
        TraceRecord<Scalar> rec;
        rec.k = k;
        rec.x = x;
        rec.x_bar = s.x_bar;
        rec.alpha = s.alpha;
        rec.alpha_prev = alpha_prev;
        rec.j = s.j;
        rec.residual = s.residual;
        rec.trials = s.trials;
        rec.a2_x = s.a2_x;
        rec.a2_x_bar = s.a2_x_bar;
        rec.Tk = state_Tk(s);
        rec.separation_gap = s.w2.dot(s.x - s.x_bar) - s.r;
        fill_distance(rec);
        if (best_approx) rec.in_Tk = rec.Tk->distance(*best_approx) <= Scalar(1e-9);

        if (s.residual <= config.tol * scale) {
            res.trace.records.push_back(std::move(rec));
            return finish(SolveStatus::Converged, x, k, s.alpha);
        }
        const auto cut = build_Tk(s.x, s.x_bar, s.alpha, s.a2_x, s.a2_x_bar, config.delta_bar);
        if (cut.converged) {
            res.trace.records.push_back(std::move(rec));
            return finish(SolveStatus::DetectedSolution, x, k, s.alpha);
        }

        Vector<Scalar> next;
        if (method == Method::Method1) {
            const auto step = method1_step(s, config.gamma);
            if (step.detected_solution) {
                res.trace.records.push_back(std::move(rec));
                return finish(SolveStatus::DetectedSolution, x, k, s.alpha);
            }
            rec.lambda_k = step.lambda;
            next = step.x_next;
        } else {
            rec.Gammak = build_Gammak(x0, x);
            if (best_approx) rec.in_Gammak = rec.Gammak->distance(*best_approx) <= Scalar(1e-9);
            auto proj = project_two_halfspaces(*rec.Tk, *rec.Gammak, x0);
            rec.lambda1 = proj.lambda1;
            rec.lambda2 = proj.lambda2;
            next = std::move(proj.point);
        }
        rec.step = (next - x).norm();
        const bool small_step = *rec.step <= config.tol * scale;
        res.trace.records.push_back(std::move(rec));
        x = std::move(next);
        alpha_prev = s.alpha;
        if (small_step && residual_at(x, s.alpha) <= config.tol * unit_scale(x)) {
            return finish(SolveStatus::Converged, x, k + 1, s.alpha);
        }
    }
    return finish(SolveStatus::MaxIter, x, config.max_iter, alpha_prev);
}

}  // namespace splitting
