#include "relkit/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

namespace relkit {

Json number_json(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    return v;
}

double number_from_json(const Json& j) {
    if (j.is_number()) return j.get<double>();
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    return std::numeric_limits<double>::quiet_NaN();
}

std::string format_number(double v) { return fmt::format("{}", v); }

Json grid_json(const Grid& grid) {
    Json bounds = Json::array(), divisions = Json::array(), widths = Json::array();
    for (int k = 0; k < grid.dimension(); ++k) {
        bounds.push_back({grid.lower()[k], grid.upper()[k]});
        divisions.push_back(grid.divisions()[k]);
        widths.push_back(grid.width()[k]);
    }
    Json out;
    out["dimension"] = grid.dimension();
    out["bounds"] = bounds;
    out["divisions"] = divisions;
    out["box_width"] = widths;
    out["box_count"] = grid.box_count();
    return out;
}

GridPtr grid_from_json(const Json& j) {
    std::vector<ClosedInterval> bounds;
    std::vector<int> divisions;
    for (const auto& b : j.at("bounds")) bounds.push_back({b.at(0).get<double>(), b.at(1).get<double>()});
    for (const auto& d : j.at("divisions")) divisions.push_back(d.get<int>());
    return build_grid(bounds, divisions);
}

Json summary_json(const BoxSetSummary& s) {
    Json out;
    out["count"] = s.count;
    if (s.count > 0) {
        Json lo = Json::array(), hi = Json::array();
        for (Eigen::Index k = 0; k < s.lower.size(); ++k) {
            lo.push_back(s.lower[k]);
            hi.push_back(s.upper[k]);
        }
        out["lower"] = lo;
        out["upper"] = hi;
    }
    return out;
}

Json summary_json(const BoxSet& set, std::size_t inline_limit) {
    Json out = summary_json(summarize(set));
    if (set.count() > 0 && set.count() <= inline_limit) out["boxes"] = set.indices();
    return out;
}

Json pairs_json(std::span<const BoxPair> pairs, std::size_t limit) {
    Json out = Json::array();
    for (std::size_t i = 0; i < pairs.size() && i < limit; ++i) out.push_back({pairs[i].first, pairs[i].second});
    return out;
}

std::string box_set_csv(const BoxSet& set) {
    const Grid& grid = *set.grid();
    const int n = grid.dimension();
    std::string out;
    for (int k = 0; k < n; ++k) out += fmt::format("{}i{}", k ? "," : "", k + 1);
    for (int k = 0; k < n; ++k) out += fmt::format(",lo{0},hi{0}", k + 1);
    out += '\n';
    set.for_each([&](BoxIndex b) {
        for (int k = 0; k < n; ++k) out += fmt::format("{}{}", k ? "," : "", grid.coordinate(b, k));
        for (int k = 0; k < n; ++k) {
            const int c = grid.coordinate(b, k);
            out += fmt::format(",{},{}", grid.edge(k, c), grid.edge(k, c + 1));
        }
        out += '\n';
    });
    return out;
}

BoxSet parse_box_set_csv(const GridPtr& grid, const std::string& text) {
    const int n = grid->dimension();
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("box-set CSV is missing its header");
    const auto columns = static_cast<int>(std::count(line.begin(), line.end(), ',')) + 1;
    if (columns != 3 * n)
        throw ArityError(fmt::format("box-set CSV has {} columns, expected {} for a {}-D grid", columns, 3 * n, n));
    BoxSet out(grid);
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream row(line);
        MultiIndex idx(n);
        std::string cell;
        for (int k = 0; k < n; ++k) {
            if (!std::getline(row, cell, ','))
                throw std::runtime_error(fmt::format("box-set CSV line {} is truncated", line_no));
            idx[k] = std::stoi(cell);
            if (idx[k] < 0 || idx[k] >= grid->divisions()[k])
                throw DomainError(fmt::format("box-set CSV line {} has an index outside the grid", line_no));
        }
        out.insert(grid->ravel(idx));
    }
    return out;
}

std::string sweep_csv(std::span<const SweepRow> rows) {
    int n = 0;
    for (const auto& r : rows) n = std::max(n, static_cast<int>(r.attractor.lower.size()));
    n = std::max(n, 1);
    std::string out = "value,admitted,radius";
    for (int k = 0; k < n; ++k) out += fmt::format(",lo{0},hi{0}", k + 1);
    out += ",box_count\n";
    for (const auto& r : rows) {
        out += fmt::format("{},{},{}", r.value, r.admitted ? "true" : "false",
                           std::isinf(r.radius) ? std::string("inf") : format_number(r.radius));
        for (int k = 0; k < n; ++k) {
            if (r.attractor.count > 0)
                out += fmt::format(",{},{}", r.attractor.lower[k], r.attractor.upper[k]);
            else
                out += ",,";
        }
        out += fmt::format(",{}\n", r.attractor.count);
    }
    return out;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << contents;
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace relkit
