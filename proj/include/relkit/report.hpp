#ifndef RELKIT_REPORT_HPP
#define RELKIT_REPORT_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "relkit/grid.hpp"
#include "relkit/relation.hpp"
#include "relkit/semicontinuity.hpp"

namespace relkit {

using Json = nlohmann::ordered_json;

/// Finite numbers as JSON numbers; infinities as the strings "inf" / "-inf".
Json number_json(double v);
double number_from_json(const Json& j);

Json grid_json(const Grid& grid);
GridPtr grid_from_json(const Json& j);

/// Box count and bounding rectangle; member indices inline for small sets.
Json summary_json(const BoxSet& set, std::size_t inline_limit = 32);
Json summary_json(const BoxSetSummary& summary);
Json pairs_json(std::span<const BoxPair> pairs, std::size_t limit = 16);

/// Header row, then one box per line: multi-index columns followed by the
/// real lower/upper bound of each axis.
std::string box_set_csv(const BoxSet& set);
BoxSet parse_box_set_csv(const GridPtr& grid, const std::string& text);

std::string sweep_csv(std::span<const SweepRow> rows);

/// Shortest round-trip decimal for a double.
std::string format_number(double v);

/// Writes to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);
std::string read_file(const std::filesystem::path& path);

}  // namespace relkit

#endif  // RELKIT_REPORT_HPP
