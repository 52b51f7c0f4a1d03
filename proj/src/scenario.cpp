#include "relkit/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "relkit/attractor.hpp"
#include "relkit/finite_oracle.hpp"
#include "relkit/semicontinuity.hpp"
#include "relkit/svg.hpp"

namespace relkit {

ScenarioError::ScenarioError(const std::string& what, int line, int column)
    : std::runtime_error(line > 0 ? (column > 0 ? fmt::format("line {}, column {}: {}", line, column, what)
                                                : fmt::format("line {}: {}", line, what))
                                  : what),
      line_(line),
      column_(column) {}

namespace {

// ---------------------------------------------------------------------------
// Lexing

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

// Splits at `sep` outside brackets and parentheses.
std::vector<std::string> split_top(const std::string& s, const std::string& sep) {
    std::vector<std::string> out;
    int depth = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char c = s[i];
        if (c == '[' || c == '(') ++depth;
        else if (c == ']' || c == ')') --depth;
        else if (depth == 0 && s.compare(i, sep.size(), sep) == 0) {
            out.push_back(s.substr(start, i - start));
            start = i + sep.size();
            i = start - 1;
        }
    }
    out.push_back(s.substr(start));
    return out;
}

/// Whitespace-separated words of one line; whitespace inside brackets or
/// parentheses does not split.
class Cursor {
public:
    Cursor(std::string text, int line) : text_(std::move(text)), line_(line) {}

    bool done() {
        skip();
        return pos_ >= text_.size();
    }

    std::string word() {
        skip();
        const std::size_t start = pos_;
        int depth = 0;
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (c == '[' || c == '(') ++depth;
            else if (c == ']' || c == ')') depth = std::max(0, depth - 1);
            else if (depth == 0 && std::isspace(static_cast<unsigned char>(c))) break;
            ++pos_;
        }
        last_ = start;
        if (start == pos_) fail("unexpected end of line");
        return text_.substr(start, pos_ - start);
    }

    std::string rest() {
        skip();
        last_ = pos_;
        std::string out = trim(text_.substr(pos_));
        pos_ = text_.size();
        return out;
    }

    /// Consumes `tok` if it is the next word.
    bool accept(const std::string& tok) {
        skip();
        if (text_.compare(pos_, tok.size(), tok) == 0 &&
            (pos_ + tok.size() == text_.size() || std::isspace(static_cast<unsigned char>(text_[pos_ + tok.size()])))) {
            pos_ += tok.size();
            return true;
        }
        return false;
    }

    int column() const { return static_cast<int>(last_) + 1; }
    int line() const { return line_; }

    [[noreturn]] void fail(const std::string& msg) const { throw ScenarioError(msg, line_, column()); }

private:
    void skip() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    std::string text_;
    int line_;
    std::size_t pos_ = 0;
    std::size_t last_ = 0;
};

// "[a,b]x[c,d]" -> per-axis expression pairs
std::vector<std::pair<Expr, Expr>> parse_rect_exprs(const std::string& token, const Cursor& at) {
    std::vector<std::pair<Expr, Expr>> axes;
    std::size_t i = 0;
    const std::string s = trim(token);
    for (;;) {
        if (i >= s.size() || s[i] != '[') at.fail("expected '[' in rectangle '" + s + "'");
        const std::size_t close = s.find(']', i);
        if (close == std::string::npos) at.fail("unterminated '[' in rectangle '" + s + "'");
        const auto parts = split_top(s.substr(i + 1, close - i - 1), ",");
        if (parts.size() != 2) at.fail("interval needs exactly two bounds in '" + s + "'");
        try {
            axes.emplace_back(Expr::parse(trim(parts[0])), Expr::parse(trim(parts[1])));
        } catch (const ParseError& e) {
            at.fail(std::string("bad interval bound: ") + e.what());
        }
        i = close + 1;
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        if (i >= s.size()) break;
        if (s[i] != 'x') at.fail("expected 'x' between intervals in '" + s + "'");
        ++i;
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    }
    return axes;
}

double eval_constant(const Expr& e, const ParameterMap& params, const Cursor& at) {
    try {
        Expr b = e.bind(params);
        const auto free = b.free_parameters();
        if (!free.empty()) at.fail("unknown parameter '" + *free.begin() + "'");
        return b.constant_value();
    } catch (const SpecError& err) {
        at.fail(err.what());
    }
}

std::vector<ClosedInterval> parse_rect(const std::string& token, const ParameterMap& params, const Cursor& at) {
    std::vector<ClosedInterval> out;
    for (const auto& [lo, hi] : parse_rect_exprs(token, at)) {
        const double a = eval_constant(lo, params, at);
        const double b = eval_constant(hi, params, at);
        if (a > b) at.fail("interval lower bound exceeds upper bound in '" + token + "'");
        out.push_back({a, b});
    }
    return out;
}

double parse_number(const std::string& token, const ParameterMap& params, const Cursor& at) {
    try {
        return eval_constant(Expr::parse(token), params, at);
    } catch (const ParseError& e) {
        at.fail(e.what());
    }
}

// ---------------------------------------------------------------------------
// Parsing

struct CommandShape {
    std::vector<char> args;  // 'r' relation, 's' set, 'n' number, '*' free word
    int optional = 0;        // trailing args that may be omitted
    bool variadic = false;   // render: any number of extra items
};

const std::map<std::string, CommandShape>& command_shapes() {
    static const std::map<std::string, CommandShape> shapes = {
        {"block-check", {{'r', 's'}}}, {"invariant", {{'r', 's'}}},    {"omega", {{'r', 's'}}},
        {"attractor", {{'r', 's'}}},   {"find-block", {{'r', 's'}}},   {"fixed-points", {{'r'}}},
        {"radius", {{'r', 's'}}},      {"distance", {{'s', 's'}}},     {"perturb", {{'r', 's', 'r'}}},
        {"sweep", {{'r', 's', '*'}}},  {"oracle", {{'n', 'n', 'n'}, 1}}, {"render", {{'*'}, 0, true}},
        {"export", {{'s'}}},
    };
    return shapes;
}

class Parser {
public:
    explicit Parser(std::string name) { scenario_.name = std::move(name); }

    Scenario parse(const std::string& text) {
        std::istringstream in(text);
        std::string raw;
        int line_no = 0;
        while (std::getline(in, raw)) {
            ++line_no;
            const auto hash = raw.find('#');
            const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
            if (line.empty()) continue;
            statement(Cursor(line, line_no), line);
        }
        if (scenario_.bounds.empty()) throw ScenarioError("scenario declares no grid", 0);
        return std::move(scenario_);
    }

private:
    void statement(Cursor c, const std::string& line) {
        const std::string kw = c.word();
        if (kw == "scenario") {
            scenario_.name = c.rest();
        } else if (kw == "grid") {
            grid(c);
        } else if (kw == "seed") {
            const std::string w = c.word();
            try {
                scenario_.seed = std::stoull(w);
            } catch (const std::exception&) {
                c.fail("seed must be a nonnegative integer");
            }
        } else if (kw == "output") {
            scenario_.output = c.rest();
        } else if (kw == "param") {
            const std::string name = c.word();
            c.accept("=");
            params_[name] = parse_number(c.rest(), params_, c);
        } else if (kw == "note") {
            Statement st;
            st.kind = Statement::Kind::Note;
            st.line = c.line();
            st.text = c.rest();
            scenario_.statements.push_back(std::move(st));
        } else if (kw == "relation") {
            relation(c, line);
        } else if (kw == "set") {
            set(c, line);
        } else if (command_shapes().count(kw)) {
            command(c, kw, line);
        } else {
            c.fail("unknown statement '" + kw + "'");
        }
    }

    void require_grid(const Cursor& c) const {
        if (scenario_.bounds.empty()) c.fail("declare the grid before relations, sets and commands");
    }

    void grid(Cursor& c) {
        if (!scenario_.bounds.empty()) c.fail("a scenario has exactly one grid");
        scenario_.bounds = parse_rect(c.word(), params_, c);
        const std::string divs = c.word();
        for (const auto& part : split_top(divs, "x")) {
            try {
                std::size_t used = 0;
                const int d = std::stoi(part, &used);
                if (used != part.size()) throw std::invalid_argument(part);
                scenario_.divisions.push_back(d);
            } catch (const std::exception&) {
                c.fail("division counts must be integers, got '" + divs + "'");
            }
        }
        try {
            build_grid(scenario_.bounds, scenario_.divisions);
        } catch (const std::exception& e) {
            c.fail(e.what());
        }
    }

    RelationSpecPtr relation_ref(const std::string& name, const Cursor& c) const {
        auto it = relations_.find(name);
        if (it == relations_.end()) c.fail("undefined relation '" + name + "'");
        return it->second;
    }

    void set_ref(const std::string& name, const Cursor& c) const {
        if (!sets_.count(name)) c.fail("undefined set '" + name + "'");
    }

    void relation(Cursor& c, const std::string& line) {
        require_grid(c);
        const std::string name = c.word();
        c.accept("=");
        const std::string kind = c.word();
        RelationSpecPtr spec;
        try {
            if (kind == "map" || kind.rfind("map[", 0) == 0) {
                int sub = 1;
                if (kind != "map") {
                    const std::string digits = kind.substr(4, kind.size() - 5);
                    if (kind.back() != ']' || digits.empty() ||
                        digits.find_first_not_of("0123456789") != std::string::npos)
                        c.fail("map subdivisions are written map[N]");
                    sub = std::stoi(digits);
                }
                std::vector<Expr> comps;
                for (const auto& part : split_top(c.rest(), ";")) comps.push_back(Expr::parse(trim(part)));
                spec = RelationSpec::subdivided_map(std::move(comps), sub, params_);
            } else if (kind == "pairs") {
                std::vector<std::pair<RectSpec, RectSpec>> products;
                for (const auto& part : split_top(c.rest(), ";")) {
                    const auto sides = split_top(part, "->");
                    if (sides.size() != 2) c.fail("each product is written SOURCE -> TARGET");
                    products.emplace_back(RectSpec{parse_rect_exprs(sides[0], c)},
                                          RectSpec{parse_rect_exprs(sides[1], c)});
                }
                spec = RelationSpec::box_union(std::move(products), params_);
            } else if (kind == "transpose") {
                spec = RelationSpec::transpose_of(relation_ref(c.word(), c));
            } else if (kind == "union") {
                std::vector<RelationSpecPtr> parts;
                while (!c.done()) parts.push_back(relation_ref(c.word(), c));
                spec = RelationSpec::union_of(std::move(parts));
            } else if (kind == "intersect") {
                std::vector<RelationSpecPtr> parts;
                while (!c.done()) parts.push_back(relation_ref(c.word(), c));
                if (parts.empty()) c.fail("intersect needs at least one relation");
                spec = RelationSpec::intersection_of(std::move(parts));
            } else if (kind == "bloat") {
                RelationSpecPtr inner = relation_ref(c.word(), c);
                RelationSpec b = *RelationSpec::bloat_of(std::move(inner), Expr::parse(c.rest()));
                b.bindings = params_;
                spec = std::make_shared<const RelationSpec>(std::move(b));
            } else if (kind == "identity") {
                spec = RelationSpec::identity();
            } else if (kind == "empty") {
                spec = RelationSpec::empty();
            } else {
                c.fail("unknown relation kind '" + kind + "'");
            }
        } catch (const ParseError& e) {
            c.fail(e.what());
        } catch (const SpecError& e) {
            c.fail(e.what());
        }
        if (!c.done()) c.fail("trailing text after relation definition");
        relations_[name] = spec;
        Statement st;
        st.kind = Statement::Kind::Relation;
        st.line = c.line();
        st.text = line;
        st.name = name;
        st.relation = std::move(spec);
        scenario_.statements.push_back(std::move(st));
    }

    void set(Cursor& c, const std::string& line) {
        require_grid(c);
        const std::string name = c.word();
        c.accept("=");
        const std::string kind = c.word();
        SetDefinition def;
        using K = SetDefinition::Kind;
        auto take_rel = [&] {
            const std::string r = c.word();
            relation_ref(r, c);
            def.refs.push_back(r);
        };
        auto take_set = [&] {
            const std::string s = c.word();
            set_ref(s, c);
            def.refs.push_back(s);
        };
        if (kind == "rect") {
            def.kind = K::Rects;
            for (const auto& part : split_top(c.rest(), ";")) {
                auto rect = parse_rect(part, params_, c);
                if (rect.size() != scenario_.bounds.size()) c.fail("rectangle dimension does not match the grid");
                def.rects.push_back(std::move(rect));
            }
        } else if (kind == "empty") {
            def.kind = K::Empty;
        } else if (kind == "full") {
            def.kind = K::Full;
        } else if (kind == "interior") {
            def.kind = K::Interior;
            take_set();
        } else if (kind == "closure-complement") {
            def.kind = K::ClosureComplement;
            take_set();
        } else if (kind == "image" || kind == "omega" || kind == "attractor" || kind == "block") {
            def.kind = kind == "image" ? K::Image : kind == "omega" ? K::Omega : kind == "attractor" ? K::Attractor : K::Block;
            take_rel();
            take_set();
        } else if (kind == "union" || kind == "intersect") {
            def.kind = kind == "union" ? K::Union : K::Intersection;
            while (!c.done()) take_set();
            if (def.refs.empty()) c.fail(kind + " needs at least one set");
        } else {
            c.fail("unknown set kind '" + kind + "'");
        }
        if (!c.done()) c.fail("trailing text after set definition");
        sets_.insert(name);
        Statement st;
        st.kind = Statement::Kind::Set;
        st.line = c.line();
        st.text = line;
        st.name = name;
        st.set = std::move(def);
        scenario_.statements.push_back(std::move(st));
    }

    Expectation expectation(const std::string& clause, const Cursor& at) {
        Cursor c(clause, at.line());
        Expectation e;
        e.text = clause;
        e.kind = c.word();
        static const std::set<std::string> bare = {"true",     "false", "empty", "nonempty", "found",
                                                   "absent",   "admitted", "rejected", "pass", "contained"};
        if (bare.count(e.kind)) {
            // no arguments
        } else if (e.kind == "between" || e.kind == "diameter-at-most" || e.kind == "admitted-range") {
            while (!c.done()) e.numbers.push_back(parse_number(c.word(), params_, c));
            const std::size_t want = e.kind == "between" ? 2 : e.kind == "diameter-at-most" ? 1 : 3;
            if (e.numbers.size() != want) at.fail(fmt::format("'{}' takes {} numbers", e.kind, want));
        } else if (e.kind == "within" || e.kind == "contains" || e.kind == "disjoint") {
            for (const auto& part : split_top(c.rest(), ";")) e.rects.push_back(parse_rect(part, params_, c));
        } else {
            at.fail("unknown expectation '" + e.kind + "'");
        }
        if (!c.done()) at.fail("trailing text in expectation '" + clause + "'");
        return e;
    }

    void command(Cursor& c, const std::string& kw, const std::string& line) {
        require_grid(c);
        const CommandShape& shape = command_shapes().at(kw);
        Statement st;
        st.kind = Statement::Kind::Command;
        st.line = c.line();
        st.text = line;
        st.name = kw;

        const std::string rest = c.rest();
        const auto clauses = split_top(" " + rest + " ", " expect ");
        Cursor args(clauses[0], c.line());
        while (!args.done()) st.args.push_back(args.word());
        for (std::size_t i = 1; i < clauses.size(); ++i) st.expectations.push_back(expectation(trim(clauses[i]), c));

        const std::size_t need = shape.args.size() - static_cast<std::size_t>(shape.optional);
        if (st.args.size() < need || (!shape.variadic && st.args.size() > shape.args.size()))
            c.fail(fmt::format("'{}' takes {} arguments, got {}", kw, shape.args.size(), st.args.size()));
        for (std::size_t i = 0; i < st.args.size() && i < shape.args.size(); ++i) {
            if (shape.args[i] == 'r') relation_ref(st.args[i], c);
            if (shape.args[i] == 's') set_ref(st.args[i], c);
        }
        if (kw == "render") {
            for (std::size_t i = 1; i < st.args.size(); ++i) {
                const std::string& item = st.args[i];
                if (item == "diagonal") continue;
                const auto colon = item.find(':');
                if (colon == std::string::npos) c.fail("render items are relation:NAME, set:NAME, forbidden:NAME or diagonal");
                const std::string what = item.substr(0, colon), ref = item.substr(colon + 1);
                if (what == "relation") relation_ref(ref, c);
                else if (what == "set" || what == "forbidden") set_ref(ref, c);
                else c.fail("unknown render item '" + item + "'");
            }
        }
        scenario_.statements.push_back(std::move(st));
    }

    Scenario scenario_;
    ParameterMap params_;
    std::map<std::string, RelationSpecPtr> relations_;
    std::set<std::string> sets_;
};

// ---------------------------------------------------------------------------
// Running

std::vector<double> parse_values(const std::string& token, int line) {
    std::vector<double> out;
    auto num = [&](const std::string& s) {
        try {
            return Expr::parse(trim(s)).constant_value();
        } catch (const std::exception& e) {
            throw ScenarioError(std::string("bad sweep value: ") + e.what(), line);
        }
    };
    const auto range = split_top(token, ":");
    if (range.size() == 3) {
        const double from = num(range[0]), step = num(range[1]), to = num(range[2]);
        if (!(step > 0) || to < from) throw ScenarioError("sweep range must be FROM:STEP:TO with STEP > 0", line);
        const auto count = static_cast<long>(std::floor((to - from) / step + 1e-9)) + 1;
        for (long i = 0; i < count; ++i) out.push_back(std::round((from + static_cast<double>(i) * step) * 1e12) / 1e12);
        return out;
    }
    for (const auto& part : split_top(token, ",")) out.push_back(num(part));
    return out;
}

bool rect_contains_set(const std::vector<std::vector<ClosedInterval>>& rects, const BoxSetSummary& s, const BoxSet& set) {
    // every box lies inside one of the rectangles
    const Grid& grid = *set.grid();
    bool ok = true;
    set.for_each([&](BoxIndex b) {
        const auto lo = grid.box_lower(b);
        const auto hi = grid.box_upper(b);
        bool inside = false;
        for (const auto& r : rects) {
            bool in = true;
            for (int k = 0; k < grid.dimension(); ++k)
                in = in && lo[k] >= r[static_cast<std::size_t>(k)].lo - 1e-12 && hi[k] <= r[static_cast<std::size_t>(k)].hi + 1e-12;
            inside = inside || in;
        }
        ok = ok && inside;
    });
    (void)s;
    return ok;
}

class Runner {
public:
    Runner(const Scenario& sc, const RunOptions& opt) : sc_(sc) {
        grid_ = build_grid(sc.bounds, sc.divisions);
        seed_ = opt.seed.value_or(sc.seed);
        if (!opt.out_dir.empty()) out_ = opt.out_dir;
        else if (sc.output) out_ = *sc.output;
        else out_ = std::filesystem::path("relkit-out") / sc.name;
    }

    RunResult run() {
        const auto start = std::chrono::steady_clock::now();
        RunResult result;
        result.out_dir = out_;
        Json report;
        report["toolkit"] = "relkit";
        report["version"] = RELKIT_VERSION;
        report["scenario"] = sc_.name;
        report["seed"] = seed_;
        report["grid"] = grid_json(*grid_);
        Json commands = Json::array();
        Json timing = Json::array();
        bool expectation_failed = false;
        std::filesystem::create_directories(out_);
        for (const auto& st : sc_.statements) {
            const auto t0 = std::chrono::steady_clock::now();
            try {
                Json entry = execute(st);
                if (!entry.is_null()) {
                    for (const auto& e : entry["expectations"])
                        if (!e["passed"].get<bool>()) expectation_failed = true;
                    commands.push_back(std::move(entry));
                }
            } catch (const std::exception& e) {
                report["commands"] = commands;
                report["elements"] = elements_;
                if (!notes_.empty()) report["notes"] = notes_;
                report["status"] = "error";
                report["error"] = fmt::format("line {}: {}", st.line, e.what());
                finish(report, result);
                result.exit_code = 1;
                return result;
            }
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            timing.push_back({{"line", st.line}, {"seconds", secs}});
        }
        report["commands"] = commands;
        report["elements"] = elements_;
        if (!notes_.empty()) report["notes"] = notes_;
        report["status"] = expectation_failed ? "expectation-failed" : "ok";
        result.exit_code = expectation_failed ? 2 : 0;
        finish(report, result);
        result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        // wall-times vary run to run, so they stay out of report.json
        write("timing.json", Json{{"total_seconds", result.seconds}, {"statements", timing}}.dump(2) + "\n", result);
        return result;
    }

private:
    void finish(Json& report, RunResult& result) {
        write("report.json", report.dump(2) + "\n", result);
        result.report = report;
    }

    void write(const std::string& name, const std::string& contents, RunResult& result) {
        write_file_atomic(out_ / name, contents);
        result.files.push_back(out_ / name);
        files_.push_back(out_ / name);
    }

    void write(const std::string& name, const std::string& contents) {
        write_file_atomic(out_ / name, contents);
        files_.push_back(out_ / name);
    }

    const BoxRelation& relation(const std::string& name) {
        auto it = rel_cache_.find(name);
        if (it != rel_cache_.end()) return it->second;
        return rel_cache_.emplace(name, rasterize(grid_, *rel_specs_.at(name))).first->second;
    }

    std::string element(const std::string& name, const BoxSet& set) {
        const std::string file = name + ".csv";
        write(file, box_set_csv(set));
        Json e = summary_json(set, 0);
        e["csv"] = file;
        elements_[name] = e;
        return file;
    }

    static Json expectation_entry(const Expectation& e, bool passed) {
        return Json{{"condition", e.text}, {"passed", passed}};
    }

    Json check_set(const Expectation& e, const BoxSet& set) {
        const auto s = summarize(set);
        bool ok = false;
        if (e.kind == "empty") ok = set.empty();
        else if (e.kind == "nonempty") ok = !set.empty();
        else if (e.kind == "within") ok = rect_contains_set(e.rects, s, set);
        else if (e.kind == "contains") ok = cover_union(grid_, e.rects).is_subset_of(set);
        else if (e.kind == "disjoint") ok = (cover_union(grid_, e.rects) & set).empty();
        else if (e.kind == "diameter-at-most") ok = diameter(set) <= e.numbers[0] + 1e-12;
        else throw ScenarioError("expectation '" + e.kind + "' does not apply to a box set", 0);
        return expectation_entry(e, ok);
    }

    Json check_bool(const Expectation& e, bool value, const char* yes, const char* no) {
        if (e.kind != yes && e.kind != no)
            throw ScenarioError(fmt::format("expectation '{}' must be '{}' or '{}'", e.kind, yes, no), 0);
        return expectation_entry(e, value == (e.kind == yes));
    }

    Json check_number(const Expectation& e, double v) {
        if (e.kind != "between") throw ScenarioError("numeric results take 'expect between LO HI'", 0);
        return expectation_entry(e, v >= e.numbers[0] - 1e-12 && v <= e.numbers[1] + 1e-12);
    }

    BoxSet evaluate_set(const SetDefinition& def) {
        using K = SetDefinition::Kind;
        auto set = [&](std::size_t i) -> const BoxSet& { return sets_.at(def.refs[i]); };
        switch (def.kind) {
            case K::Rects: return cover_union(grid_, def.rects);
            case K::Empty: return BoxSet(grid_);
            case K::Full: return BoxSet::full(grid_);
            case K::Interior: return combinatorial_interior(set(0));
            case K::ClosureComplement: return closure_of_complement(set(0));
            case K::Image: return image(relation(def.refs[0]), set(1));
            case K::Omega: return omega_limit(relation(def.refs[0]), set(1)).limit;
            case K::Attractor: return attractor_from_block(relation(def.refs[0]), set(1));
            case K::Block: {
                auto found = find_attractor_block(relation(def.refs[0]), set(1));
                if (!found.block) throw std::runtime_error("no attractor block found inside '" + def.refs[1] + "'");
                return *found.block;
            }
            case K::Union: {
                BoxSet out(grid_);
                for (std::size_t i = 0; i < def.refs.size(); ++i) out |= set(i);
                return out;
            }
            case K::Intersection: {
                BoxSet out = set(0);
                for (std::size_t i = 1; i < def.refs.size(); ++i) out &= set(i);
                return out;
            }
        }
        return BoxSet(grid_);
    }

    Json execute(const Statement& st) {
        switch (st.kind) {
            case Statement::Kind::Note: notes_.push_back(st.text); return nullptr;
            case Statement::Kind::Relation:
                rel_specs_[st.name] = st.relation;
                rel_cache_.erase(st.name);
                return nullptr;
            case Statement::Kind::Set: sets_.insert_or_assign(st.name, evaluate_set(st.set)); return nullptr;
            case Statement::Kind::Command: break;
        }
        const std::size_t index = command_index_++;
        Json entry;
        entry["index"] = index;
        entry["line"] = st.line;
        entry["command"] = st.text;
        Json result;
        Json checks = Json::array();
        const std::string tag = fmt::format("cmd{:02d}_{}", index, st.name);
        const auto& a = st.args;
        const double h = grid_->width().maxCoeff();

        if (st.name == "block-check" || st.name == "invariant") {
            const BoxRelation& rel = relation(a[0]);
            const BoxSet& b = sets_.at(a[1]);
            if (st.name == "block-check") {
                const BlockVerdict v = is_attractor_block(rel, b);
                result["is_block"] = v.is_block;
                result["verdict"] = v.is_block ? "certified attractor block"
                                               : "not certified at this resolution; try refining the grid by 2";
                result["witness_count"] = v.witnesses.size();
                if (!v.is_block) result["witnesses"] = pairs_json(v.witnesses);
                for (const auto& e : st.expectations) checks.push_back(check_bool(e, v.is_block, "true", "false"));
            } else {
                const bool inv = is_invariant(rel, b);
                result["invariant"] = inv;
                for (const auto& e : st.expectations) checks.push_back(check_bool(e, inv, "true", "false"));
            }
        } else if (st.name == "omega" || st.name == "attractor" || st.name == "fixed-points") {
            BoxSet out(grid_);
            if (st.name == "omega") {
                const OmegaResult r = omega_limit(relation(a[0]), sets_.at(a[1]));
                out = r.limit;
                result["transient"] = r.transient;
                result["period"] = r.period;
                result["stabilized"] = r.stabilized;
            } else if (st.name == "attractor") {
                out = attractor_from_block(relation(a[0]), sets_.at(a[1]));
            } else {
                out = intersect(relation(a[0]), identity_raster(grid_)).domain();
            }
            result["set"] = summary_json(out);
            result["diameter"] = diameter(out);
            result["csv"] = element(tag, out);
            for (const auto& e : st.expectations) checks.push_back(check_set(e, out));
        } else if (st.name == "find-block") {
            const BlockSearch r = find_attractor_block(relation(a[0]), sets_.at(a[1]));
            result["found"] = r.block.has_value();
            result["steps"] = r.steps;
            if (r.block) {
                result["block"] = summary_json(*r.block);
                result["csv"] = element(tag, *r.block);
            } else {
                result["escape_frontier"] = summary_json(r.frontier - sets_.at(a[1]));
            }
            for (const auto& e : st.expectations) checks.push_back(check_bool(e, r.block.has_value(), "found", "absent"));
        } else if (st.name == "radius") {
            const double r = separation_radius(relation(a[0]), sets_.at(a[1]));
            result["radius"] = number_json(r);
            result["error_bar"] = Json::array({number_json(r), number_json(r + 2 * h)});
            result["resolution"] = h;
            for (const auto& e : st.expectations) checks.push_back(check_number(e, r));
        } else if (st.name == "distance") {
            const double d = set_distance(sets_.at(a[0]), sets_.at(a[1]));
            result["distance"] = number_json(d);
            result["resolution"] = h;
            for (const auto& e : st.expectations) checks.push_back(check_number(e, d));
        } else if (st.name == "perturb") {
            const PersistenceReport r = perturbation_report(relation(a[0]), sets_.at(a[1]), relation(a[2]));
            result["radius"] = number_json(r.radius);
            result["admitted"] = r.admitted;
            result["witness_count"] = r.witnesses.size();
            if (!r.admitted) result["witnesses"] = pairs_json(r.witnesses);
            if (r.perturbed_attractor) {
                result["perturbed_attractor"] = summary_json(*r.perturbed_attractor);
                result["csv"] = element(tag, *r.perturbed_attractor);
            }
            result["contained"] = r.contained;
            for (const auto& e : st.expectations) {
                if (e.kind == "contained") checks.push_back(expectation_entry(e, r.contained));
                else if (e.kind == "admitted" || e.kind == "rejected")
                    checks.push_back(check_bool(e, r.admitted, "admitted", "rejected"));
                else checks.push_back(check_set(e, r.perturbed_attractor.value_or(BoxSet(grid_))));
            }
        } else if (st.name == "sweep") {
            const std::vector<double> values = parse_values(a[2], st.line);
            const RelationSpec& family = *rel_specs_.at(a[0]);
            const auto rows = parameter_sweep(grid_, family, sets_.at(a[1]), values);
            const std::string file = tag + ".csv";
            write(file, sweep_csv(rows));
            std::optional<double> amin, amax;
            std::size_t admitted = 0;
            for (const auto& row : rows) {
                if (!row.admitted) continue;
                ++admitted;
                if (!amin) amin = row.value;
                amax = row.value;
            }
            result["parameter"] = sweep_parameter(family);
            result["rows"] = rows.size();
            result["admitted_count"] = admitted;
            if (amin) result["admitted_range"] = Json::array({*amin, *amax});
            result["csv"] = file;
            for (const auto& e : st.expectations) {
                if (e.kind != "admitted-range") throw ScenarioError("sweep takes 'expect admitted-range LO HI TOL'", st.line);
                const double lo = e.numbers[0], hi = e.numbers[1], tol = e.numbers[2];
                bool ok = true;
                for (const auto& row : rows) {
                    if (row.value > lo + tol && row.value < hi - tol && !row.admitted) ok = false;
                    if ((row.value < lo - tol || row.value > hi + tol) && row.admitted) ok = false;
                }
                checks.push_back(expectation_entry(e, ok));
            }
        } else if (st.name == "oracle") {
            const int n_max = std::stoi(a[0]);
            const auto trials = static_cast<std::size_t>(std::stoul(a[1]));
            const std::uint64_t seed = a.size() > 2 ? std::stoull(a[2]) : seed_;
            const auto r = oracle::fo_theorem_suite(n_max, trials, seed);
            result["n_max"] = n_max;
            result["trials"] = trials;
            result["seed"] = seed;
            result["checks"] = r.checks();
            result["failures"] = r.failures();
            auto tally = [](const oracle::CheckTally& t) { return Json{{"passed", t.passed}, {"failed", t.failed}}; };
            result["block_forms_agree"] = tally(r.block_forms_agree);
            result["block_yields_attractor"] = tally(r.block_yields_attractor);
            result["attractor_has_block"] = tally(r.attractor_has_block);
            result["perturbation_persists"] = tally(r.perturbation_persists);
            if (!r.first_counterexample.empty()) result["first_counterexample"] = r.first_counterexample;
            for (const auto& e : st.expectations) {
                if (e.kind != "pass") throw ScenarioError("oracle takes 'expect pass'", st.line);
                checks.push_back(expectation_entry(e, r.failures() == 0));
            }
        } else if (st.name == "render") {
            PhasePlot plot(grid_, sc_.name);
            for (std::size_t i = 1; i < a.size(); ++i) {
                const std::string& item = a[i];
                if (item == "diagonal") {
                    plot.add_diagonal();
                    continue;
                }
                const auto colon = item.find(':');
                const std::string what = item.substr(0, colon), ref = item.substr(colon + 1);
                if (what == "relation") plot.add_relation(ref, relation(ref));
                else if (what == "set") plot.add_set(ref, sets_.at(ref));
                else plot.add_product(ref + " x cl(complement)", sets_.at(ref), closure_of_complement(sets_.at(ref)));
            }
            write(a[0], plot.str());
            result["svg"] = a[0];
        } else if (st.name == "export") {
            result["set"] = summary_json(sets_.at(a[0]));
            result["csv"] = element(a[0], sets_.at(a[0]));
        }
        entry["result"] = result;
        entry["expectations"] = checks;
        return entry;
    }

    const Scenario& sc_;
    GridPtr grid_;
    std::uint64_t seed_ = 1;
    std::filesystem::path out_;
    std::map<std::string, RelationSpecPtr> rel_specs_;
    std::map<std::string, BoxRelation> rel_cache_;
    std::map<std::string, BoxSet> sets_;
    Json elements_ = Json::object();
    std::vector<std::string> notes_;
    std::vector<std::filesystem::path> files_;
    std::size_t command_index_ = 0;
};

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& name) { return Parser(name).parse(text); }

Scenario parse_scenario_json(const std::string& text, const std::string& name) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ScenarioError(std::string("invalid JSON: ") + e.what(), 0);
    }
    std::string lines;
    try {
        if (j.contains("name")) lines += "scenario " + j["name"].get<std::string>() + "\n";
        const auto& g = j.at("grid");
        std::string rect, divs;
        for (const auto& b : g.at("bounds"))
            rect += fmt::format("{}[{},{}]", rect.empty() ? "" : "x", b.at(0).get<double>(), b.at(1).get<double>());
        for (const auto& d : g.at("divisions")) divs += fmt::format("{}{}", divs.empty() ? "" : "x", d.get<int>());
        lines += "grid " + rect + " " + divs + "\n";
        if (j.contains("seed")) lines += fmt::format("seed {}\n", j["seed"].get<std::uint64_t>());
        if (j.contains("output")) lines += "output " + j["output"].get<std::string>() + "\n";
        for (const auto& s : j.value("statements", Json::array())) lines += s.get<std::string>() + "\n";
    } catch (const Json::exception& e) {
        throw ScenarioError(std::string("malformed scenario tree: ") + e.what(), 0);
    }
    return parse_scenario(lines, name);
}

Scenario load_scenario(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    const std::string stem = path.stem().string();
    if (path.extension() == ".json") return parse_scenario_json(text, stem);
    return parse_scenario(text, stem);
}

RunResult run_scenario(const Scenario& scenario, const RunOptions& options) {
    return Runner(scenario, options).run();
}

std::filesystem::path render_report_element(const std::filesystem::path& report_path, const std::string& element,
                                            const std::filesystem::path& out) {
    const Json report = Json::parse(read_file(report_path));
    const GridPtr grid = grid_from_json(report.at("grid"));
    const auto& elements = report.at("elements");
    if (!elements.contains(element)) throw std::runtime_error("report has no element named '" + element + "'");
    const auto dir = report_path.parent_path();
    const BoxSet set = parse_box_set_csv(grid, read_file(dir / elements[element].at("csv").get<std::string>()));
    PhasePlot plot(grid, element);
    plot.add_set(element, set);
    const auto target = out.empty() ? dir / (element + ".svg") : out;
    write_file_atomic(target, plot.str());
    return target;
}

}  // namespace relkit
