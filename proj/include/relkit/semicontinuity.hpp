#ifndef RELKIT_SEMICONTINUITY_HPP
#define RELKIT_SEMICONTINUITY_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "relkit/attractor.hpp"
#include "relkit/grid.hpp"
#include "relkit/relation.hpp"

namespace relkit {

/// Certified lower bound on d(f, B x cl(X \ B)) in the max product metric:
/// min over pairs (P, Q) of max(d(P, B), d(Q, closure_of_complement(B))).
/// +inf when rel is empty or B is empty or the whole grid.
double separation_radius(const BoxRelation& rel, const BoxSet& block);

/// Whether g avoids B x cl(X \ B), i.e. g lies in the open neighbourhood that
/// keeps B an attractor block.
BlockVerdict admits(const BoxRelation& g, const BoxSet& block);

struct PersistenceReport {
    bool admitted = false;
    std::vector<BoxPair> witnesses;
    double radius = 0.0;
    std::optional<BoxSet> perturbed_attractor;
    bool contained = false;
};

/// Requires B to be a certified block for f (PreconditionError otherwise).
PersistenceReport perturbation_report(const BoxRelation& f, const BoxSet& block, const BoxRelation& g);

struct SweepRow {
    double value = 0.0;
    bool admitted = false;
    double radius = 0.0;
    BoxSetSummary attractor;  // omega(B); an attractor enclosure when admitted
};

/// Rasterizes `family` once per value of its single free parameter and checks
/// B against each member. Rows follow the order of `values`.
std::vector<SweepRow> parameter_sweep(const GridPtr& grid, const RelationSpec& family, const BoxSet& block,
                                      std::span<const double> values);

/// Name of the single free parameter of a family (SpecError otherwise).
std::string sweep_parameter(const RelationSpec& family);

}  // namespace relkit

#endif  // RELKIT_SEMICONTINUITY_HPP
