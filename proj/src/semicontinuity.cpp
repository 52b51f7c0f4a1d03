#include "relkit/semicontinuity.hpp"

#include <algorithm>
#include <limits>

#include "relkit/parallel.hpp"

namespace relkit {

double separation_radius(const BoxRelation& rel, const BoxSet& block) {
    require_same_grid(rel.grid(), block.grid());
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (rel.empty() || block.empty() || block.count() == block.grid()->box_count()) return inf;
    const BoxSet forbidden = closure_of_complement(block);
    if (forbidden.empty()) return inf;
    const Eigen::ArrayXd to_block = distance_field(block);
    const Eigen::ArrayXd to_forbidden = distance_field(forbidden);
    double best = inf;
    const auto& succ = rel.successors();
    for (std::size_t s = 0; s < succ.size(); ++s) {
        if (succ[s].empty()) continue;
        const double ds = to_block[static_cast<Eigen::Index>(s)];
        if (ds >= best) continue;
        for (BoxIndex t : succ[s]) best = std::min(best, std::max(ds, to_forbidden[t]));
    }
    return best;
}

BlockVerdict admits(const BoxRelation& g, const BoxSet& block) { return is_attractor_block(g, block); }

PersistenceReport perturbation_report(const BoxRelation& f, const BoxSet& block, const BoxRelation& g) {
    BlockVerdict base = is_attractor_block(f, block);
    if (!base.is_block)
        throw PreconditionError("set is not a certified attractor block for the base relation",
                                std::move(base.witnesses));
    PersistenceReport report;
    report.radius = separation_radius(f, block);
    BlockVerdict verdict = admits(g, block);
    report.admitted = verdict.is_block;
    report.witnesses = std::move(verdict.witnesses);
    if (report.admitted) {
        report.perturbed_attractor = omega_limit(g, block).limit;
        report.contained = report.perturbed_attractor->is_subset_of(block);
    }
    return report;
}

std::string sweep_parameter(const RelationSpec& family) {
    const auto free = free_parameters(family);
    if (free.size() != 1)
        throw SpecError("a sweep family needs exactly one free parameter, found " + std::to_string(free.size()));
    return *free.begin();
}

std::vector<SweepRow> parameter_sweep(const GridPtr& grid, const RelationSpec& family, const BoxSet& block,
                                      std::span<const double> values) {
    require_same_grid(grid, block.grid());
    const std::string name = sweep_parameter(family);
    std::vector<SweepRow> rows(values.size());
    parallel_for(values.size(), [&](std::size_t i) {
        SweepRow& row = rows[i];
        row.value = values[i];
        const BoxRelation rel = rasterize(grid, family, {{name, values[i]}});
        row.radius = separation_radius(rel, block);
        row.admitted = admits(rel, block).is_block;
        row.attractor = summarize(omega_limit(rel, block).limit);
    });
    return rows;
}

}  // namespace relkit
