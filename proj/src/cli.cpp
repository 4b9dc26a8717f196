#include "splitting/cli.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "splitting/diagnostics.hpp"
#include "splitting/io.hpp"
#include "splitting/solvers.hpp"

namespace splitting::cli {

namespace {

using nlohmann::json;
using Problem = ProblemInstance<double>;
using Config = SolverConfig<double>;

struct Options {
    std::string problem;
    std::vector<std::string> methods;
    std::string x0;
    std::optional<double> tol, theta, delta, delta_bar, alpha_init, gamma, fixed_alpha;
    std::optional<std::size_t> max_iter;
    std::string trace_out;
    std::string report_out;
    std::uint64_t seed{0};
};

/// Input problems are reported with exit code 2.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Loaded {
    Problem problem;
    Config config;
    std::optional<io::Document> doc;
};

Vector<double> parse_x0(const std::string& text) {
    std::string body = text;
    if (body.find('[') == std::string::npos) body = "[" + body + "]";
    const json j = json::parse(body, nullptr, false);
    if (j.is_discarded()) throw InputError("--x0: cannot parse '" + text + "'");
    try {
        return io::vector_from_json(j, 0, "--x0");
    } catch (const io::ParseError& e) {
        throw InputError(e.what());
    }
}

void apply_flags(const Options& o, Config& c) {
    if (o.tol) c.tol = *o.tol;
    if (o.theta) c.theta = *o.theta;
    if (o.delta) c.delta = *o.delta;
    if (o.delta_bar) c.delta_bar = *o.delta_bar;
    if (o.alpha_init) c.alpha_init = *o.alpha_init;
    if (o.gamma) c.gamma = *o.gamma;
    if (o.fixed_alpha) c.fixed_alpha = *o.fixed_alpha;
    if (o.max_iter) c.max_iter = *o.max_iter;
}

// --problem is a catalog name or a document with a [problem] section and
// optional [config] and [run] sections.
Loaded load(const Options& o) {
    if (o.problem.empty()) throw InputError("--problem is required");
    if (auto p = find_problem<double>(o.problem)) {
        Loaded l{std::move(*p), Config{}, std::nullopt};
        apply_flags(o, l.config);
        return l;
    }
    if (!std::filesystem::exists(o.problem)) {
        throw InputError("--problem: '" + o.problem + "' is neither a catalog name nor a readable file");
    }
    io::Document doc = io::load_document(o.problem);
    const io::Section* ps = doc.find("problem");
    if (!ps) throw io::ParseError(o.problem + ": missing [problem] section", 0);
    Loaded l{io::problem_from_section(*ps), Config{}, std::nullopt};
    if (const io::Section* cs = doc.find("config")) io::apply_config_section(*cs, l.config);
    apply_flags(o, l.config);
    l.doc = std::move(doc);
    return l;
}

Method method_from(const std::string& text) {
    const auto m = parse_method(text);
    if (!m) throw InputError("unknown method '" + text + "' (expected FB, FBF, FBHF, Method1 or Method2)");
    return *m;
}

std::string string_entry(const io::Section& s, const std::string& key) {
    const io::Entry* e = s.find(key);
    if (!e) return {};
    if (!e->value.is_string()) throw io::ParseError(s.name + "." + key + ": expected a string", e->line);
    return e->value.get<std::string>();
}

Vector<double> default_x0(const Problem& p, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return random_vector<double>(p.dim(), rng, 2.0);
}

void check_config(const Config& c, const Problem& p, Method m, const std::string& who) {
    const auto v = config_violations(c, p, m);
    if (v.empty()) return;
    std::string msg = who + ": invalid solver configuration:";
    for (const auto& s : v) msg += "\n  " + s;
    throw InputError(msg);
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + path + "'");
    f << content;
}

// Solver exceptions become a failed result rather than escaping the run.
SolveResult<double> guarded_solve(const Problem& p, Method m, const Config& c, const Vector<double>& x0) {
    try {
        return solve(p, m, c, x0);
    } catch (const std::exception& e) {
        SolveResult<double> r;
        r.status = SolveStatus::MaxIter;
        r.final_x = x0;
        r.trace.method = m;
        r.trace.x0 = x0;
        r.message = e.what();
        r.failed_iteration = 0;
        return r;
    }
}

int cmd_run(const Options& o, std::ostream& out) {
    Loaded l = load(o);
    const io::Section* rs = l.doc ? l.doc->find("run") : nullptr;

    std::string method_text = o.methods.empty() ? std::string() : o.methods.front();
    if (o.methods.size() > 1) throw InputError("run takes a single --method; use compare for several");
    if (method_text.empty() && rs) method_text = string_entry(*rs, "method");
    if (method_text.empty()) throw InputError("--method is required");
    const Method method = method_from(method_text);

    Vector<double> x0;
    if (!o.x0.empty()) {
        x0 = parse_x0(o.x0);
    } else if (const io::Entry* e = rs ? rs->find("x0") : nullptr) {
        x0 = io::vector_from_json(e->value, e->line, "run.x0");
    } else {
        x0 = default_x0(l.problem, o.seed);
    }
    if (x0.size() != l.problem.dim()) {
        throw InputError("x0 has dimension " + std::to_string(x0.size()) + " but the problem has dimension " +
                         std::to_string(l.problem.dim()));
    }
    check_config(l.config, l.problem, method, "run");

    const auto result = guarded_solve(l.problem, method, l.config, x0);
    if (!o.trace_out.empty()) {
        std::ostringstream csv;
        io::write_trace_csv(csv, result.trace);
        write_file(o.trace_out, csv.str());
    }
    std::ostringstream summary;
    io::write_summary(summary, l.problem.name, result);
    out << summary.str();
    if (!o.report_out.empty()) write_file(o.report_out, summary.str());
    return result.succeeded() ? kExitOk : kExitFailure;
}

struct RunSpec {
    std::string label;
    Method method;
    Config config;
    Vector<double> x0;
};

int cmd_compare(const Options& o, std::ostream& out) {
    Loaded l = load(o);
    std::vector<RunSpec> specs;
    std::optional<Vector<double>> shared_x0;
    if (!o.x0.empty()) shared_x0 = parse_x0(o.x0);

    if (!o.methods.empty()) {
        for (const auto& m : o.methods) {
            const Method method = method_from(m);
            specs.push_back({std::string(to_string(method)), method, l.config,
                             shared_x0 ? *shared_x0 : default_x0(l.problem, o.seed)});
        }
    } else if (l.doc) {
        for (const io::Section* s : l.doc->with_prefix("run")) {
            if (s->name == "run") continue;
            RunSpec spec{s->name.substr(4), Method::Method1, l.config, {}};
            const std::string m = string_entry(*s, "method");
            if (m.empty()) throw io::ParseError("[" + s->name + "]: missing 'method'", s->line);
            spec.method = method_from(m);
            io::Section overrides{s->name, s->line, {}};
            for (const auto& [key, entry] : s->entries) {
                if (key != "method" && key != "x0") overrides.entries.emplace(key, entry);
            }
            io::apply_config_section(overrides, spec.config);
            apply_flags(o, spec.config);
            if (shared_x0) {
                spec.x0 = *shared_x0;
            } else if (const io::Entry* e = s->find("x0")) {
                spec.x0 = io::vector_from_json(e->value, e->line, s->name + ".x0");
            } else {
                spec.x0 = default_x0(l.problem, o.seed);
            }
            specs.push_back(std::move(spec));
        }
    }
    if (specs.empty()) throw InputError("compare: empty run matrix (give --method or [run.<label>] sections)");
    for (const auto& s : specs) {
        if (s.x0.size() != l.problem.dim()) {
            throw InputError("compare: mixed dimensions; run '" + s.label + "' has x0 of dimension " +
                             std::to_string(s.x0.size()) + ", problem has " + std::to_string(l.problem.dim()));
        }
        check_config(s.config, l.problem, s.method, "run '" + s.label + "'");
    }

    std::vector<std::future<SolveResult<double>>> futures;
    for (const auto& s : specs) {
        futures.push_back(std::async(std::launch::async, [&l, &s, &o] {
            auto r = guarded_solve(l.problem, s.method, s.config, s.x0);
            if (!o.trace_out.empty()) {
                std::ostringstream csv;
                io::write_trace_csv(csv, r.trace);
                write_file(o.trace_out + "." + s.label + ".csv", csv.str());
            }
            return r;
        }));
    }

    std::ostringstream table;
    table << "problem: " << l.problem.name << "\n";
    table << std::left << std::setw(12) << "run" << std::setw(18) << "status" << std::right << std::setw(10)
          << "iters" << std::setw(24) << "final_residual" << std::setw(12) << "resolvents" << std::setw(12)
          << "a2_evals" << "\n";
    bool all_ok = true;
    for (std::size_t i = 0; i < specs.size(); ++i) {
        const auto r = futures[i].get();
        all_ok = all_ok && r.succeeded();
        table << std::left << std::setw(12) << specs[i].label << std::setw(18) << to_string(r.status) << std::right
              << std::setw(10) << r.iterations << std::setw(24) << io::format_double(r.final_residual)
              << std::setw(12) << r.counters.resolvent_calls << std::setw(12) << r.counters.a2_evals << "\n";
        if (!r.message.empty()) table << "  " << specs[i].label << ": " << r.message << "\n";
    }
    out << table.str();
    if (!o.report_out.empty()) write_file(o.report_out, table.str());
    return all_ok ? kExitOk : kExitFailure;
}

int cmd_check(const Options& o, std::ostream& out) {
    Loaded l = load(o);
    check_config(l.config, l.problem, Method::Method1, "check");
    const auto reports = check_suite(l.problem, l.config, o.seed);
    std::ostringstream text;
    text << "problem: " << l.problem.name << "  seed: " << o.seed << "\n";
    io::write_check_reports(text, reports);
    bool ok = true;
    for (const auto& r : reports) ok = ok && r.ok();
    text << (ok ? "all checks passed" : "some checks FAILED") << "\n";
    out << text.str();
    if (!o.report_out.empty()) write_file(o.report_out, text.str());
    return ok ? kExitOk : kExitFailure;
}

void add_common(CLI::App* sub, Options& o, bool many_methods) {
    sub->add_option("--problem", o.problem, "catalog name or problem file")->required();
    if (many_methods) {
        sub->add_option("--method", o.methods, "methods to compare (FB, FBF, FBHF, Method1, Method2)")
            ->delimiter(',');
    } else {
        sub->add_option("--method", o.methods, "FB, FBF, FBHF, Method1 or Method2")->expected(1);
    }
    sub->add_option("--x0", o.x0, "starting point, e.g. 1,2 or [1,2]");
    sub->add_option("--tol", o.tol);
    sub->add_option("--max-iter", o.max_iter);
    sub->add_option("--theta", o.theta);
    sub->add_option("--delta", o.delta);
    sub->add_option("--delta-bar", o.delta_bar);
    sub->add_option("--alpha-init", o.alpha_init);
    sub->add_option("--gamma", o.gamma);
    sub->add_option("--fixed-alpha", o.fixed_alpha, "constant stepsize for FB, FBF and FBHF");
    sub->add_option("--trace-out", o.trace_out, many_methods ? "trace prefix; writes <prefix>.<run>.csv" : "trace CSV");
    sub->add_option("--report-out", o.report_out);
    sub->add_option("--seed", o.seed, "seed for random starting points and checks");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Monotone inclusion solver: backtracking separating-hyperplane methods and FB-type baselines",
                 "splitting"};
    app.require_subcommand(1);
    Options o;
    CLI::App* run = app.add_subcommand("run", "run one method and emit a trace");
    CLI::App* compare = app.add_subcommand("compare", "run several methods on one problem");
    CLI::App* check = app.add_subcommand("check", "run the diagnostics suite");
    add_common(run, o, false);
    add_common(compare, o, true);
    add_common(check, o, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (*run) return cmd_run(o, out);
        if (*compare) return cmd_compare(o, out);
        return cmd_check(o, out);
    } catch (const io::ParseError& e) {
        err << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const InputError& e) {
        err << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const ConfigError& e) {
        err << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}

}  // namespace splitting::cli
