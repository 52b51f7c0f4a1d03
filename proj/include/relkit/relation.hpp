#ifndef RELKIT_RELATION_HPP
#define RELKIT_RELATION_HPP

#include <memory>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "relkit/expression.hpp"
#include "relkit/grid.hpp"

namespace relkit {

using BoxPair = std::pair<BoxIndex, BoxIndex>;

/// Finite set of box pairs (source, target), denoting the closed relation
/// that is the union of the products box_source x box_target.
///
/// Stored as one sorted, duplicate-free successor list per source box.
class BoxRelation {
public:
    explicit BoxRelation(GridPtr grid);
    BoxRelation(GridPtr grid, std::vector<std::vector<BoxIndex>> successors);

    static BoxRelation from_pairs(GridPtr grid, std::span<const BoxPair> pairs);

    const GridPtr& grid() const { return grid_; }
    const std::vector<BoxIndex>& targets(BoxIndex source) const { return successors_[source]; }
    const std::vector<std::vector<BoxIndex>>& successors() const { return successors_; }

    bool contains(BoxIndex source, BoxIndex target) const;
    std::size_t pair_count() const;
    bool empty() const { return pair_count() == 0; }

    /// Pairs in (source, target) lexicographic order.
    std::vector<BoxPair> pairs() const;

    /// Sources with at least one target.
    BoxSet domain() const;

    bool is_subset_of(const BoxRelation& other) const;
    friend bool operator==(const BoxRelation& a, const BoxRelation& b);

    /// Union of pair sets.
    BoxRelation& operator|=(const BoxRelation& other);
    /// Pairs present in both.
    friend BoxRelation intersect(const BoxRelation& a, const BoxRelation& b);

private:
    GridPtr grid_;
    std::vector<std::vector<BoxIndex>> successors_;
};

/// Closed rectangle whose bounds are constant expressions (parameters allowed).
struct RectSpec {
    std::vector<std::pair<Expr, Expr>> axes;

    static RectSpec constant(std::span<const ClosedInterval> rect);
    std::vector<ClosedInterval> evaluate(const ParameterMap& params) const;
};

struct RelationSpec;
using RelationSpecPtr = std::shared_ptr<const RelationSpec>;

/// Description of a closed relation on X, rasterized on demand.
struct RelationSpec {
    /// Graph of x -> (F_1(x), ..., F_n(x)). Each source box is split into
    /// `subdivisions` pieces per axis before interval evaluation.
    struct Map {
        std::vector<Expr> components;
        int subdivisions = 1;
    };
    /// Union of rectangle products source x target; rectangles may be degenerate.
    struct BoxUnion {
        std::vector<std::pair<RectSpec, RectSpec>> products;
    };
    struct Transpose {
        RelationSpecPtr inner;
    };
    struct Union {
        std::vector<RelationSpecPtr> parts;
    };
    /// Pairs present in every part, e.g. a map restricted to U x U.
    struct Intersection {
        std::vector<RelationSpecPtr> parts;
    };
    /// Closed epsilon-neighbourhood of a relation in the max product metric.
    struct Bloat {
        RelationSpecPtr inner;
        Expr epsilon;
    };
    struct Identity {};
    struct Empty {};

    std::variant<Map, BoxUnion, Transpose, Union, Intersection, Bloat, Identity, Empty> node;
    ParameterMap bindings;

    static RelationSpecPtr map(std::vector<Expr> components, ParameterMap bindings = {});
    static RelationSpecPtr map(const std::string& text, ParameterMap bindings = {});
    static RelationSpecPtr subdivided_map(std::vector<Expr> components, int subdivisions, ParameterMap bindings = {});
    static RelationSpecPtr box_union(std::vector<std::pair<RectSpec, RectSpec>> products,
                                     ParameterMap bindings = {});
    static RelationSpecPtr transpose_of(RelationSpecPtr inner);
    static RelationSpecPtr union_of(std::vector<RelationSpecPtr> parts);
    static RelationSpecPtr intersection_of(std::vector<RelationSpecPtr> parts);
    static RelationSpecPtr bloat_of(RelationSpecPtr inner, Expr epsilon);
    static RelationSpecPtr bloat_of(RelationSpecPtr inner, double epsilon);
    static RelationSpecPtr identity();
    static RelationSpecPtr empty();
};

/// Parameters referenced anywhere in the spec and not bound by it.
std::set<std::string> free_parameters(const RelationSpec& spec);

/// Outer approximation of the relation on `grid`. `params` takes precedence
/// over bindings stored in the spec.
BoxRelation rasterize(const GridPtr& grid, const RelationSpec& spec, const ParameterMap& params = {});

/// Pairs (b, b') with b' in the Moore neighbourhood of b (b included):
/// an outer approximation of the diagonal.
BoxRelation identity_raster(const GridPtr& grid);

BoxSet image(const BoxRelation& rel, const BoxSet& set);
BoxRelation transpose(const BoxRelation& rel);
/// {(a, c) : (a, b) in inner and (b, c) in outer}.
BoxRelation compose(const BoxRelation& outer, const BoxRelation& inner);
BoxRelation iterate(const BoxRelation& rel, int n);
/// Every pair (P, Q) whose product lies within max-metric distance epsilon of
/// some product in rel.
BoxRelation bloat(const BoxRelation& rel, double epsilon);

}  // namespace relkit

#endif  // RELKIT_RELATION_HPP
