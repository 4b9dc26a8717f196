#include <doctest.h>

#include <charconv>
#include <random>
#include <sstream>

#include "splitting/io.hpp"

using namespace splitting;
using V = Vector<double>;

TEST_CASE("document parsing") {
    const auto doc = io::parse_document(R"(# leading comment
[problem]
name = "box_vip"   # trailing comment

[config]
theta = 0.25
max_iter = 50
matrix = [[1, 2],
          [3, 4]]
)");
    REQUIRE(doc.sections.size() == 2);
    const auto* cfg = doc.find("config");
    REQUIRE(cfg);
    CHECK(cfg->find("theta")->value.get<double>() == 0.25);
    CHECK(cfg->find("matrix")->value[1][0].get<int>() == 3);
    CHECK(cfg->find("matrix")->line == 8);
    CHECK(doc.find("problem")->find("name")->value.get<std::string>() == "box_vip");
}

TEST_CASE("parse errors carry the line number") {
    const auto line_of = [](const std::string& text) -> std::size_t {
        try {
            io::parse_document(text);
        } catch (const io::ParseError& e) {
            return e.line();
        }
        return 0;
    };
    CHECK(line_of("[a]\nx = 1\ny = [1, 2\n") == 3);
    CHECK(line_of("x = 1\n") == 1);
    CHECK(line_of("[a]\n\nnot a pair\n") == 3);
    CHECK(line_of("[a]\nx = {bad}\n") == 2);
    CHECK(line_of("[a]\n[a]\n") == 2);
    CHECK(line_of("[a]\nx = 1\nx = 2\n") == 3);
}

TEST_CASE("config sections") {
    SolverConfig<double> c;
    io::apply_config_section(*io::parse_document("[config]\ntheta = 0.3\nalpha_init = 0.5\nmax_iter = 7\n"
                                                 "fixed_alpha = 0.2\ntol = 1e-8\n")
                                  .find("config"),
                             c);
    CHECK(c.theta == 0.3);
    CHECK(*c.alpha_init == 0.5);
    CHECK(c.max_iter == 7);
    CHECK(*c.fixed_alpha == 0.2);
    CHECK(c.tol == 1e-8);
    CHECK_THROWS_AS(io::apply_config_section(*io::parse_document("[config]\nthetta = 1\n").find("config"), c),
                    io::ParseError);
    CHECK_THROWS_AS(io::apply_config_section(*io::parse_document("[config]\nmax_iter = -3\n").find("config"), c),
                    io::ParseError);
}

TEST_CASE("inline problem definitions") {
    const auto doc = io::parse_document(R"([problem]
name = "inline_box"
a1 = {"kind": "Zero"}
a2 = {"kind": "LinearMonotone", "matrix": [[2, 1], [1, 2]], "offset": [-1, -1]}
b = {"kind": "NormalConeBox", "lo": [0, 0], "hi": [1, "inf"]}
solution = {"kind": "SinglePoint", "point": [0.3333333333333333, 0.3333333333333333]}
)");
    const auto p = io::problem_from_section(*doc.find("problem"));
    CHECK(p.name == "inline_box");
    CHECK(p.dim() == 2);
    CHECK(p.b.hi()(1) == infinity<double>());
    CHECK(*p.lipschitz_a2() == doctest::Approx(3));
    CHECK(p.has_known_solution());

    const auto bad = io::parse_document("[problem]\na1 = {\"kind\": \"Zero\"}\na2 = {\"kind\": \"Warp\"}\n"
                                        "b = {\"kind\": \"Zero\"}\ndim = 2\n");
    try {
        io::problem_from_section(*bad.find("problem"));
        FAIL("expected ParseError");
    } catch (const io::ParseError& e) {
        CHECK(e.line() == 3);
    }
}

TEST_CASE("catalog problems round-trip through text") {
    for (const auto& p : catalog<double>()) {
        const std::string text = io::problem_to_text(p);
        const auto q = io::problem_from_section(*io::parse_document(text).find("problem"));
        CHECK_MESSAGE(io::problem_to_text(q) == text, p.name);

        // identical operators give identical traces
        SolverConfig<double> c;
        c.max_iter = 25;
        const V x0 = V::LinSpaced(p.dim(), -1, 2);
        std::ostringstream a, b;
        io::write_trace_csv(a, solve(p, Method::Method2, c, x0).trace);
        io::write_trace_csv(b, solve(q, Method::Method2, c, x0).trace);
        CHECK_MESSAGE(a.str() == b.str(), p.name);
    }
}

TEST_CASE("doubles are written in shortest round-trip form") {
    CHECK(io::format_double(0.1) == "0.1");
    CHECK(io::format_double(1e-10) == "1e-10");
    CHECK(io::format_double(2.0) == "2");
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
        const double v = u(rng) * std::pow(10.0, i % 30 - 15);
        const std::string s = io::format_double(v);
        double back = 0;
        std::from_chars(s.data(), s.data() + s.size(), back);
        CHECK(back == v);
    }
}

TEST_CASE("trace CSV layout") {
    SolverConfig<double> c;
    c.max_iter = 3;
    const auto res = solve(*find_problem<double>("affine_grad"), Method::Method2, c, V{{1, 2}});
    std::ostringstream os;
    io::write_trace_csv(os, res.trace);
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "k,residual,alpha,j,trials,dist_to_solution,lambda_k,lambda1,lambda2,in_Tk,in_Gammak");
    int rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        CHECK(std::count(line.begin(), line.end(), ',') == 10);
        CHECK(line.find("true") != std::string::npos);
    }
    CHECK(rows == static_cast<int>(res.trace.records.size()));
}
