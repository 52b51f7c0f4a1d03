#ifndef RELKIT_SCENARIO_HPP
#define RELKIT_SCENARIO_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "relkit/grid.hpp"
#include "relkit/relation.hpp"
#include "relkit/report.hpp"

namespace relkit {

/// Malformed scenario or unresolved name; line/column are 1-based (0 = unknown).
class ScenarioError : public std::runtime_error {
public:
    ScenarioError(const std::string& what, int line, int column = 0);
    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

struct Expectation {
    std::string kind;
    std::vector<double> numbers;
    std::vector<std::vector<ClosedInterval>> rects;
    std::string text;
};

struct SetDefinition {
    enum class Kind { Rects, Empty, Full, Interior, ClosureComplement, Image, Omega, Attractor, Block, Union, Intersection };
    Kind kind = Kind::Empty;
    std::vector<std::vector<ClosedInterval>> rects;
    std::vector<std::string> refs;  // relation name first where one is taken
};

struct Statement {
    enum class Kind { Relation, Set, Command, Note };
    Kind kind = Kind::Command;
    int line = 0;
    std::string text;
    std::string name;               // defined name, or command keyword
    RelationSpecPtr relation;       // Relation
    SetDefinition set;              // Set
    std::vector<std::string> args;  // Command
    std::vector<Expectation> expectations;
};

/// Parsed scenario: one grid, named relations and sets, and commands run in order.
///
/// Line-oriented grammar (`#` starts a comment):
///
///     scenario NAME
///     grid [lo,hi]x[lo,hi] NxM
///     seed N
///     output DIR
///     param NAME = EXPR
///     relation NAME = map EXPR[; EXPR]... | map[N] EXPR... | pairs RECT -> RECT[; RECT -> RECT]...
///                   | transpose REL | union REL... | intersect REL... | bloat REL EXPR
///                   | identity | empty
///     set NAME = rect RECT[; RECT]... | empty | full | interior SET | closure-complement SET
///              | image REL SET | omega REL SET | attractor REL SET | block REL SET
///              | union SET... | intersect SET...
///     note TEXT
///     COMMAND ARGS... [expect CONDITION]...
///
/// Commands: block-check, invariant, omega, attractor, find-block, fixed-points,
/// radius, distance, perturb, sweep, oracle, render, export.
struct Scenario {
    std::string name;
    std::vector<ClosedInterval> bounds;
    std::vector<int> divisions;
    std::uint64_t seed = 1;
    std::optional<std::string> output;
    std::vector<Statement> statements;
};

Scenario parse_scenario(const std::string& text, const std::string& name = "scenario");

/// The same structure as a JSON tree: {"name", "grid": {"bounds", "divisions"},
/// "seed", "output", "statements": [lines...]}.
Scenario parse_scenario_json(const std::string& text, const std::string& name = "scenario");

/// Dispatches on extension: `.json` is read as JSON, anything else as text.
Scenario load_scenario(const std::filesystem::path& path);

struct RunOptions {
    std::filesystem::path out_dir;  // empty: scenario `output`, else relkit-out/<name>
    std::optional<std::uint64_t> seed;
};

struct RunResult {
    Json report;
    int exit_code = 0;  // 0 ok, 1 error, 2 expectation failed
    std::filesystem::path out_dir;
    std::vector<std::filesystem::path> files;
    double seconds = 0.0;
};

/// Runs every statement, writing report.json, CSVs and SVGs into the output
/// directory. Errors during a command are reported with exit code 1.
RunResult run_scenario(const Scenario& scenario, const RunOptions& options = {});

/// Re-renders a box-set element recorded in a report as an SVG next to it.
std::filesystem::path render_report_element(const std::filesystem::path& report_path, const std::string& element,
                                            const std::filesystem::path& out = {});

}  // namespace relkit

#endif  // RELKIT_SCENARIO_HPP
