#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "splitting/diagnostics.hpp"
#include "splitting/solvers.hpp"

namespace splitting::io {

/// Malformed input document; carries the 1-based line of the offending entry.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

struct Entry {
    nlohmann::json value;
    std::size_t line{0};
};

struct Section {
    std::string name;
    std::size_t line{0};
    std::map<std::string, Entry> entries;

    const Entry* find(const std::string& key) const {
        const auto it = entries.find(key);
        return it == entries.end() ? nullptr : &it->second;
    }
};

/// A sectioned text document:
///
///     # comment
///     [section]
///     key = <JSON value>
///
/// Values may span lines while brackets are unbalanced.
struct Document {
    std::vector<Section> sections;

    const Section* find(std::string_view name) const;
    std::vector<const Section*> with_prefix(std::string_view prefix) const;
};

Document parse_document(std::string_view text);
Document load_document(const std::string& path);

/// Builds a problem from a [problem] section: either `name = "<catalog name>"`
/// or an inline definition with a1, a2, b, and optionally dim and solution.
ProblemInstance<double> problem_from_section(const Section& section);
/// Inline [problem] section text for the given problem (custom operators are rejected).
std::string problem_to_text(const ProblemInstance<double>& problem);

/// Applies keys of a [config] section onto `config`.
void apply_config_section(const Section& section, SolverConfig<double>& config);

Vector<double> vector_from_json(const nlohmann::json& j, std::size_t line, const std::string& what);

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);

inline constexpr std::string_view kTraceHeader =
    "k,residual,alpha,j,trials,dist_to_solution,lambda_k,lambda1,lambda2,in_Tk,in_Gammak";

void write_trace_csv(std::ostream& os, const Trace<double>& trace);

void write_summary(std::ostream& os, const std::string& problem_name, const SolveResult<double>& result);

void write_check_reports(std::ostream& os, const std::vector<CheckReport>& reports);

}  // namespace splitting::io
