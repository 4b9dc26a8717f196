#include "splitting/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace splitting::io {

using nlohmann::json;

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

// Strips a trailing comment, ignoring '#' inside string literals.
std::string strip_comment(std::string_view line) {
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (c == '"' && (i == 0 || line[i - 1] != '\\')) in_string = !in_string;
        if (c == '#' && !in_string) return std::string(line.substr(0, i));
    }
    return std::string(line);
}

int bracket_depth(std::string_view s) {
    int depth = 0;
    bool in_string = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char c = s[i];
        if (c == '"' && (i == 0 || s[i - 1] != '\\')) in_string = !in_string;
        if (in_string) continue;
        if (c == '[' || c == '{') ++depth;
        if (c == ']' || c == '}') --depth;
    }
    return depth;
}

double number_from_json(const json& j, std::size_t line, const std::string& what) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf" || s == "+inf" || s == "Infinity") return std::numeric_limits<double>::infinity();
        if (s == "-inf" || s == "-Infinity") return -std::numeric_limits<double>::infinity();
    }
    throw ParseError(what + ": expected a number", line);
}

json number_to_json(double v) {
    if (std::isinf(v)) return v > 0 ? json("inf") : json("-inf");
    return json(v);
}

json vector_to_json(const Vector<double>& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(number_to_json(v(i)));
    return a;
}

json matrix_to_json(const Matrix<double>& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(vector_to_json(m.row(i).transpose()));
    return rows;
}

Matrix<double> matrix_from_json(const json& j, std::size_t line, const std::string& what) {
    if (!j.is_array() || j.empty()) throw ParseError(what + ": expected a nonempty row-major nested array", line);
    const std::size_t cols = j.front().is_array() ? j.front().size() : 0;
    if (cols == 0) throw ParseError(what + ": rows must be nonempty arrays", line);
    Matrix<double> m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < j.size(); ++r) {
        if (!j[r].is_array() || j[r].size() != cols) throw ParseError(what + ": ragged matrix rows", line);
        for (std::size_t c = 0; c < cols; ++c) {
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = number_from_json(j[r][c], line, what);
        }
    }
    return m;
}

const json& field(const json& obj, const char* key, std::size_t line, const std::string& what) {
    if (!obj.contains(key)) throw ParseError(what + ": missing field '" + key + "'", line);
    return obj.at(key);
}

std::string kind_of(const json& obj, std::size_t line, const std::string& what) {
    if (!obj.is_object()) throw ParseError(what + ": expected an object with a 'kind' field", line);
    const auto& k = field(obj, "kind", line, what);
    if (!k.is_string()) throw ParseError(what + ": 'kind' must be a string", line);
    return k.get<std::string>();
}

SingleValuedOp<double> single_from_json(const json& j, Eigen::Index dim, std::size_t line, const std::string& what) {
    using Op = SingleValuedOp<double>;
    const std::string kind = kind_of(j, line, what);
    Op op = [&] {
        if (kind == "Zero") return Op::zero(dim);
        if (kind == "Rotation2D") return Op::rotation2d();
        if (kind == "ScaledIdentity") return Op::scaled_identity(dim, number_from_json(field(j, "c", line, what), line, what));
        if (kind == "LinearMonotone") {
            Vector<double> offset;
            if (j.contains("offset")) offset = vector_from_json(j.at("offset"), line, what + ".offset");
            return Op::linear(matrix_from_json(field(j, "matrix", line, what), line, what + ".matrix"), offset);
        }
        if (kind == "AffineGradient") {
            return Op::affine_gradient(matrix_from_json(field(j, "matrix", line, what), line, what + ".matrix"),
                                       vector_from_json(field(j, "vector", line, what), line, what + ".vector"));
        }
        throw ParseError(what + ": unknown single-valued kind '" + kind + "'", line);
    }();
    if (j.contains("beta")) op = op.with_cocoercivity(number_from_json(j.at("beta"), line, what + ".beta"));
    if (j.contains("lipschitz")) op = op.with_lipschitz(number_from_json(j.at("lipschitz"), line, what + ".lipschitz"));
    return op;
}

SetValuedOp<double> set_from_json(const json& j, Eigen::Index dim, std::size_t line, const std::string& what) {
    using Op = SetValuedOp<double>;
    const std::string kind = kind_of(j, line, what);
    const auto vec = [&](const char* key) { return vector_from_json(field(j, key, line, what), line, what + "." + key); };
    const auto num = [&](const char* key) { return number_from_json(field(j, key, line, what), line, what + "." + key); };
    const auto mat = [&](const char* key) { return matrix_from_json(field(j, key, line, what), line, what + "." + key); };
    if (kind == "Zero") return Op::zero(dim);
    if (kind == "NormalConeBox") return Op::box(vec("lo"), vec("hi"));
    if (kind == "NormalConeBall") return Op::ball(vec("center"), num("radius"));
    if (kind == "NormalConeHalfspace") return Op::halfspace(vec("normal"), vec("anchor"), num("offset"));
    if (kind == "NormalConeAffine") return Op::affine(mat("matrix"), vec("vector"));
    if (kind == "L1Subdifferential") return Op::l1(dim, num("weight"));
    if (kind == "LinearMonotone") return Op::linear(mat("matrix"));
    throw ParseError(what + ": unknown set-valued kind '" + kind + "'", line);
}

SolutionSet<double> solution_from_json(const json& j, std::size_t line) {
    const std::string what = "solution";
    const std::string kind = kind_of(j, line, what);
    const auto vec = [&](const char* key) { return vector_from_json(field(j, key, line, what), line, what + "." + key); };
    const auto mat = [&](const char* key) { return matrix_from_json(field(j, key, line, what), line, what + "." + key); };
    if (kind == "Unknown") return solution_set::Unknown{};
    if (kind == "SinglePoint") return solution_set::SinglePoint<double>{vec("point")};
    if (kind == "AffineSet") return solution_set::AffineSet<double>{mat("matrix"), vec("vector")};
    if (kind == "BoxAffine") return solution_set::BoxAffine<double>{vec("lo"), vec("hi"), mat("matrix"), vec("vector")};
    throw ParseError("solution: unknown kind '" + kind + "'", line);
}

// Dimension implied by an operator description when `dim` is absent.
std::optional<Eigen::Index> implied_dim(const json& j) {
    if (!j.is_object()) return std::nullopt;
    if (j.value("kind", "") == "Rotation2D") return 2;
    for (const char* key : {"matrix", "vector", "lo", "center", "normal"}) {
        if (!j.contains(key) || !j.at(key).is_array()) continue;
        const auto& a = j.at(key);
        if (std::string(key) == "matrix") {
            if (!a.empty() && a.front().is_array()) return static_cast<Eigen::Index>(a.front().size());
        } else {
            return static_cast<Eigen::Index>(a.size());
        }
    }
    return std::nullopt;
}

json single_to_json(const SingleValuedOp<double>& op) {
    json j;
    j["kind"] = std::string(to_string(op.kind()));
    switch (op.kind()) {
        case SingleValuedKind::ScaledIdentity: j["c"] = op.scale(); break;
        case SingleValuedKind::LinearMonotone:
            j["matrix"] = matrix_to_json(op.matrix());
            j["offset"] = vector_to_json(op.vector());
            break;
        case SingleValuedKind::AffineGradient:
            j["matrix"] = matrix_to_json(op.matrix());
            j["vector"] = vector_to_json(op.vector());
            break;
        case SingleValuedKind::Custom: throw UnsupportedError("custom operators cannot be serialized");
        default: break;
    }
    if (const auto b = op.cocoercivity()) j["beta"] = number_to_json(*b);
    if (const auto L = op.lipschitz()) j["lipschitz"] = number_to_json(*L);
    return j;
}

json set_to_json(const SetValuedOp<double>& op) {
    json j;
    j["kind"] = std::string(to_string(op.kind()));
    switch (op.kind()) {
        case SetValuedKind::Zero: break;
        case SetValuedKind::NormalConeBox:
            j["lo"] = vector_to_json(op.lo());
            j["hi"] = vector_to_json(op.hi());
            break;
        case SetValuedKind::NormalConeBall:
            j["center"] = vector_to_json(op.center());
            j["radius"] = op.radius();
            break;
        case SetValuedKind::NormalConeHalfspace:
            j["normal"] = vector_to_json(op.normal());
            j["anchor"] = vector_to_json(op.anchor());
            j["offset"] = op.offset();
            break;
        case SetValuedKind::NormalConeAffine:
            j["matrix"] = matrix_to_json(op.matrix());
            j["vector"] = vector_to_json(op.rhs());
            break;
        case SetValuedKind::L1Subdifferential: j["weight"] = op.weight(); break;
        case SetValuedKind::LinearMonotone: j["matrix"] = matrix_to_json(op.matrix()); break;
    }
    return j;
}

json solution_to_json(const SolutionSet<double>& s) {
    json j;
    std::visit(
        [&](const auto& d) {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, solution_set::Unknown>) {
                j["kind"] = "Unknown";
            } else if constexpr (std::is_same_v<T, solution_set::SinglePoint<double>>) {
                j["kind"] = "SinglePoint";
                j["point"] = vector_to_json(d.point);
            } else if constexpr (std::is_same_v<T, solution_set::AffineSet<double>>) {
                j["kind"] = "AffineSet";
                j["matrix"] = matrix_to_json(d.E);
                j["vector"] = vector_to_json(d.d);
            } else {
                j["kind"] = "BoxAffine";
                j["lo"] = vector_to_json(d.lo);
                j["hi"] = vector_to_json(d.hi);
                j["matrix"] = matrix_to_json(d.E);
                j["vector"] = vector_to_json(d.d);
            }
        },
        s);
    return j;
}

template <typename T>
T integer_from(const Entry& e, const std::string& what) {
    if (!e.value.is_number_integer() || e.value.get<long long>() < 0) {
        throw ParseError(what + ": expected a nonnegative integer", e.line);
    }
    return static_cast<T>(e.value.get<long long>());
}

}  // namespace

Vector<double> vector_from_json(const json& j, std::size_t line, const std::string& what) {
    if (!j.is_array() || j.empty()) throw ParseError(what + ": expected a nonempty array of numbers", line);
    Vector<double> v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = number_from_json(j[i], line, what);
    return v;
}

const Section* Document::find(std::string_view name) const {
    for (const auto& s : sections) {
        if (s.name == name) return &s;
    }
    return nullptr;
}

std::vector<const Section*> Document::with_prefix(std::string_view prefix) const {
    std::vector<const Section*> out;
    for (const auto& s : sections) {
        if (s.name == prefix || (s.name.size() > prefix.size() && s.name.compare(0, prefix.size(), prefix) == 0 &&
                                 s.name[prefix.size()] == '.')) {
            out.push_back(&s);
        }
    }
    return out;
}

Document parse_document(std::string_view text) {
    Document doc;
    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t lineno = 0;
    Section* current = nullptr;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = trim(strip_comment(raw));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ParseError("unterminated section header", lineno);
            const std::string name = trim(line.substr(1, line.size() - 2));
            if (name.empty()) throw ParseError("empty section name", lineno);
            if (doc.find(name)) throw ParseError("duplicate section [" + name + "]", lineno);
            doc.sections.push_back(Section{name, lineno, {}});
            current = &doc.sections.back();
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError("expected 'key = value'", lineno);
        if (!current) throw ParseError("entry outside of any section", lineno);
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw ParseError("empty key", lineno);
        std::string value = trim(line.substr(eq + 1));
        const std::size_t start = lineno;
        while (bracket_depth(value) > 0 && std::getline(in, raw)) {
            ++lineno;
            value += " " + trim(strip_comment(raw));
        }
        if (bracket_depth(value) != 0) throw ParseError("unbalanced brackets in value of '" + key + "'", start);
        json parsed = json::parse(value, nullptr, false);
        if (parsed.is_discarded()) throw ParseError("cannot parse value of '" + key + "'", start);
        if (current->entries.count(key)) throw ParseError("duplicate key '" + key + "'", start);
        current->entries.emplace(key, Entry{std::move(parsed), start});
    }
    return doc;
}

Document load_document(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ParseError("cannot open '" + path + "'", 0);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_document(ss.str());
}

ProblemInstance<double> problem_from_section(const Section& section) {
    if (const Entry* name = section.find("name"); name && !section.find("a1")) {
        if (!name->value.is_string()) throw ParseError("problem.name must be a string", name->line);
        auto p = find_problem<double>(name->value.get<std::string>());
        if (!p) throw ParseError("unknown catalog problem '" + name->value.get<std::string>() + "'", name->line);
        return std::move(*p);
    }
    for (const char* key : {"a1", "a2", "b"}) {
        if (!section.find(key)) throw ParseError(std::string("problem: missing '") + key + "'", section.line);
    }
    const Entry& a1 = *section.find("a1");
    const Entry& a2 = *section.find("a2");
    const Entry& b = *section.find("b");

    Eigen::Index dim = 0;
    if (const Entry* d = section.find("dim")) {
        dim = integer_from<Eigen::Index>(*d, "problem.dim");
    } else {
        for (const Entry* e : {&a1, &a2, &b}) {
            if (const auto implied = implied_dim(e->value)) {
                dim = *implied;
                break;
            }
        }
    }
    if (dim <= 0) throw ParseError("problem: cannot determine dimension; add 'dim = <n>'", section.line);

    std::string name = "inline";
    if (const Entry* n = section.find("name"); n && n->value.is_string()) name = n->value.get<std::string>();
    SolutionSet<double> solution = solution_set::Unknown{};
    if (const Entry* s = section.find("solution")) solution = solution_from_json(s->value, s->line);

    try {
        return make_problem<double>(name, single_from_json(a1.value, dim, a1.line, "a1"),
                                    single_from_json(a2.value, dim, a2.line, "a2"),
                                    set_from_json(b.value, dim, b.line, "b"), std::move(solution));
    } catch (const ConfigError& e) {
        throw ParseError(e.what(), section.line);
    }
}

std::string problem_to_text(const ProblemInstance<double>& problem) {
    std::ostringstream os;
    os << "[problem]\n";
    os << "name = " << json(problem.name).dump() << "\n";
    os << "dim = " << problem.dim() << "\n";
    os << "a1 = " << single_to_json(problem.a1).dump() << "\n";
    os << "a2 = " << single_to_json(problem.a2).dump() << "\n";
    os << "b = " << set_to_json(problem.b).dump() << "\n";
    os << "solution = " << solution_to_json(problem.solution).dump() << "\n";
    return os.str();
}

void apply_config_section(const Section& section, SolverConfig<double>& config) {
    for (const auto& [key, entry] : section.entries) {
        const auto num = [&] { return number_from_json(entry.value, entry.line, "config." + key); };
        if (key == "theta") config.theta = num();
        else if (key == "delta") config.delta = num();
        else if (key == "delta_bar") config.delta_bar = num();
        else if (key == "alpha_init") config.alpha_init = num();
        else if (key == "gamma") config.gamma = num();
        else if (key == "tol") config.tol = num();
        else if (key == "fixed_alpha") config.fixed_alpha = num();
        else if (key == "max_iter") config.max_iter = integer_from<std::size_t>(entry, "config.max_iter");
        else if (key == "max_trials") config.max_trials = integer_from<std::size_t>(entry, "config.max_trials");
        else throw ParseError("unknown config key '" + key + "'", entry.line);
    }
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_trace_csv(std::ostream& os, const Trace<double>& trace) {
    const auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
    const auto flag = [](const std::optional<bool>& b) { return b ? std::string(*b ? "true" : "false") : std::string(); };
    os << kTraceHeader << "\n";
    for (const auto& r : trace.records) {
        os << r.k << ',' << format_double(r.residual) << ',' << format_double(r.alpha) << ',' << r.j << ',' << r.trials
           << ',' << opt(r.dist_to_solution) << ',' << opt(r.lambda_k) << ',' << opt(r.lambda1) << ','
           << opt(r.lambda2) << ',' << flag(r.in_Tk) << ',' << flag(r.in_Gammak) << "\n";
    }
}

void write_summary(std::ostream& os, const std::string& problem_name, const SolveResult<double>& result) {
    os << "problem: " << problem_name << "\n";
    os << "method: " << to_string(result.trace.method) << "\n";
    os << "status: " << to_string(result.status) << "\n";
    os << "iterations: " << result.iterations << "\n";
    os << "final_residual: " << format_double(result.final_residual) << "\n";
    os << "final_x: [";
    for (Eigen::Index i = 0; i < result.final_x.size(); ++i) {
        os << (i ? ", " : "") << format_double(result.final_x(i));
    }
    os << "]\n";
    os << "resolvent_calls: " << result.counters.resolvent_calls << "\n";
    os << "a2_evals: " << result.counters.a2_evals << "\n";
    if (result.failed_iteration) os << "failed_iteration: " << *result.failed_iteration << "\n";
    if (!result.message.empty()) os << "message: " << result.message << "\n";
}

void write_check_reports(std::ostream& os, const std::vector<CheckReport>& reports) {
    for (const auto& r : reports) {
        os << to_string(r.status) << "  " << r.name;
        if (r.status != CheckStatus::Skip) {
            os << "  measured=" << format_double(r.measured) << " threshold=" << format_double(r.threshold);
        }
        if (!r.detail.empty()) os << "  (" << r.detail << ")";
        os << "\n";
    }
}

}  // namespace splitting::io
