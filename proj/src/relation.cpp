#include "relkit/relation.hpp"

#include <algorithm>
#include <cmath>

#include "relkit/interval.hpp"
#include "relkit/parallel.hpp"

namespace relkit {

namespace {

void canonicalize(std::vector<BoxIndex>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

ParameterMap merged(const ParameterMap& own, const ParameterMap& outer) {
    ParameterMap out = own;
    for (const auto& [k, v] : outer) out[k] = v;
    return out;
}

double bound_constant(const Expr& e, const ParameterMap& params) {
    Expr b = e.bind(params);
    auto free = b.free_parameters();
    if (!free.empty()) throw SpecError("unbound parameter '" + *free.begin() + "'");
    return b.constant_value();
}

BoxRelation rasterize_map(const GridPtr& grid, const RelationSpec::Map& map, const ParameterMap& params) {
    const int n = grid->dimension();
    if (static_cast<int>(map.components.size()) != n)
        throw ArityError("map has " + std::to_string(map.components.size()) + " components, grid has " +
                         std::to_string(n) + " axes");
    std::vector<Expr> comps;
    comps.reserve(map.components.size());
    for (const auto& c : map.components) {
        Expr b = c.bind(params);
        auto free = b.free_parameters();
        if (!free.empty()) throw SpecError("unbound parameter '" + *free.begin() + "'");
        if (b.max_variable() >= n)
            throw SpecError("expression uses x" + std::to_string(b.max_variable() + 1) + " on a " +
                            std::to_string(n) + "-dimensional grid");
        comps.push_back(std::move(b));
    }

    const int sub = map.subdivisions;
    std::size_t pieces = 1;
    for (int k = 0; k < n; ++k) {
        pieces *= static_cast<std::size_t>(sub);
        if (pieces > 4096) throw SpecError("map subdivisions exceed 4096 pieces per box");
    }

    using I = Interval<double>;
    std::vector<std::vector<BoxIndex>> succ(grid->box_count());
    parallel_for(grid->box_count(), [&](std::size_t s) {
        const auto src = static_cast<BoxIndex>(s);
        const Eigen::VectorXd lo = grid->box_lower(src);
        const Eigen::VectorXd hi = grid->box_upper(src);
        std::vector<I> box(static_cast<std::size_t>(n));
        std::vector<ClosedInterval> rect(static_cast<std::size_t>(n));
        for (std::size_t piece = 0; piece < pieces; ++piece) {
            std::size_t rest = piece;
            for (int k = 0; k < n; ++k) {
                const auto j = static_cast<double>(rest % static_cast<std::size_t>(sub));
                rest /= static_cast<std::size_t>(sub);
                const double w = (hi[k] - lo[k]) / sub;
                // outer pieces keep the exact box edges; inner cuts are shared by neighbours
                const double a = j == 0 ? lo[k] : lo[k] + j * w;
                const double b = j + 1 == sub ? hi[k] : lo[k] + (j + 1) * w;
                box[static_cast<std::size_t>(k)] = I(a, b);
            }
            for (int k = 0; k < n; ++k) {
                const I y = comps[static_cast<std::size_t>(k)].evaluate<I>(std::span<const I>(box));
                rect[static_cast<std::size_t>(k)] = {y.lo, y.hi};
            }
            // the relation lives in X x X: images leaving X contribute nothing
            if (auto range = cover_range(*grid, rect))
                for_each_in_range(*grid, *range, [&](BoxIndex t) { succ[s].push_back(t); });
        }
        canonicalize(succ[s]);
    });
    return BoxRelation(grid, std::move(succ));
}

BoxRelation rasterize_boxes(const GridPtr& grid, const RelationSpec::BoxUnion& u, const ParameterMap& params) {
    std::vector<std::vector<BoxIndex>> succ(grid->box_count());
    std::vector<BoxIndex> targets;
    for (const auto& [src, dst] : u.products) {
        const auto src_rect = src.evaluate(params);
        const auto dst_rect = dst.evaluate(params);
        auto sr = cover_range(*grid, src_rect);
        auto tr = cover_range(*grid, dst_rect);
        if (!sr || !tr) continue;
        targets.clear();
        for_each_in_range(*grid, *tr, [&](BoxIndex t) { targets.push_back(t); });
        for_each_in_range(*grid, *sr, [&](BoxIndex s) {
            succ[s].insert(succ[s].end(), targets.begin(), targets.end());
        });
    }
    return BoxRelation(grid, std::move(succ));
}

}  // namespace

// ---------------------------------------------------------------------------
// BoxRelation

BoxRelation::BoxRelation(GridPtr grid) : grid_(std::move(grid)), successors_(grid_->box_count()) {}

BoxRelation::BoxRelation(GridPtr grid, std::vector<std::vector<BoxIndex>> successors)
    : grid_(std::move(grid)), successors_(std::move(successors)) {
    if (successors_.size() != grid_->box_count()) throw ArityError("successor table does not match grid");
    for (auto& v : successors_) {
        canonicalize(v);
        if (!v.empty() && v.back() >= grid_->box_count()) throw DomainError("target index outside the grid");
    }
}

BoxRelation BoxRelation::from_pairs(GridPtr grid, std::span<const BoxPair> pairs) {
    std::vector<std::vector<BoxIndex>> succ(grid->box_count());
    for (const auto& [s, t] : pairs) {
        if (s >= grid->box_count() || t >= grid->box_count()) throw DomainError("pair index outside the grid");
        succ[s].push_back(t);
    }
    return BoxRelation(std::move(grid), std::move(succ));
}

bool BoxRelation::contains(BoxIndex source, BoxIndex target) const {
    const auto& v = successors_[source];
    return std::binary_search(v.begin(), v.end(), target);
}

std::size_t BoxRelation::pair_count() const {
    std::size_t n = 0;
    for (const auto& v : successors_) n += v.size();
    return n;
}

std::vector<BoxPair> BoxRelation::pairs() const {
    std::vector<BoxPair> out;
    out.reserve(pair_count());
    for (std::size_t s = 0; s < successors_.size(); ++s)
        for (BoxIndex t : successors_[s]) out.emplace_back(static_cast<BoxIndex>(s), t);
    return out;
}

BoxSet BoxRelation::domain() const {
    BoxSet out(grid_);
    for (std::size_t s = 0; s < successors_.size(); ++s)
        if (!successors_[s].empty()) out.insert(static_cast<BoxIndex>(s));
    return out;
}

bool BoxRelation::is_subset_of(const BoxRelation& other) const {
    require_same_grid(grid_, other.grid_);
    for (std::size_t s = 0; s < successors_.size(); ++s) {
        const auto& a = successors_[s];
        const auto& b = other.successors_[s];
        if (!std::includes(b.begin(), b.end(), a.begin(), a.end())) return false;
    }
    return true;
}

bool operator==(const BoxRelation& a, const BoxRelation& b) {
    require_same_grid(a.grid_, b.grid_);
    return a.successors_ == b.successors_;
}

BoxRelation& BoxRelation::operator|=(const BoxRelation& other) {
    require_same_grid(grid_, other.grid_);
    std::vector<BoxIndex> merged_list;
    for (std::size_t s = 0; s < successors_.size(); ++s) {
        const auto& b = other.successors_[s];
        if (b.empty()) continue;
        auto& a = successors_[s];
        merged_list.clear();
        std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(merged_list));
        a = merged_list;
    }
    return *this;
}

BoxRelation intersect(const BoxRelation& a, const BoxRelation& b) {
    require_same_grid(a.grid_, b.grid_);
    std::vector<std::vector<BoxIndex>> succ(a.successors_.size());
    for (std::size_t s = 0; s < succ.size(); ++s) {
        const auto& x = a.successors_[s];
        const auto& y = b.successors_[s];
        std::set_intersection(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(succ[s]));
    }
    return BoxRelation(a.grid_, std::move(succ));
}

// ---------------------------------------------------------------------------
// Specs

RectSpec RectSpec::constant(std::span<const ClosedInterval> rect) {
    RectSpec out;
    for (const auto& iv : rect) out.axes.emplace_back(Expr::literal(iv.lo), Expr::literal(iv.hi));
    return out;
}

std::vector<ClosedInterval> RectSpec::evaluate(const ParameterMap& params) const {
    std::vector<ClosedInterval> out;
    out.reserve(axes.size());
    for (const auto& [lo, hi] : axes) {
        const double a = bound_constant(lo, params);
        const double b = bound_constant(hi, params);
        if (a > b) throw SpecError("rectangle side has lower bound above upper bound");
        out.push_back({a, b});
    }
    return out;
}

RelationSpecPtr RelationSpec::map(std::vector<Expr> components, ParameterMap bindings) {
    return subdivided_map(std::move(components), 1, std::move(bindings));
}

RelationSpecPtr RelationSpec::subdivided_map(std::vector<Expr> components, int subdivisions, ParameterMap bindings) {
    if (subdivisions < 1) throw SpecError("map subdivisions must be at least 1");
    return std::make_shared<const RelationSpec>(
        RelationSpec{Map{std::move(components), subdivisions}, std::move(bindings)});
}

RelationSpecPtr RelationSpec::map(const std::string& text, ParameterMap bindings) {
    std::vector<Expr> comps;
    std::size_t start = 0;
    for (;;) {
        const std::size_t semi = text.find(';', start);
        comps.push_back(Expr::parse(text.substr(start, semi == std::string::npos ? semi : semi - start)));
        if (semi == std::string::npos) break;
        start = semi + 1;
    }
    return map(std::move(comps), std::move(bindings));
}

RelationSpecPtr RelationSpec::box_union(std::vector<std::pair<RectSpec, RectSpec>> products, ParameterMap bindings) {
    return std::make_shared<const RelationSpec>(
        RelationSpec{BoxUnion{std::move(products)}, std::move(bindings)});
}

RelationSpecPtr RelationSpec::transpose_of(RelationSpecPtr inner) {
    return std::make_shared<const RelationSpec>(RelationSpec{Transpose{std::move(inner)}, {}});
}

RelationSpecPtr RelationSpec::union_of(std::vector<RelationSpecPtr> parts) {
    return std::make_shared<const RelationSpec>(RelationSpec{Union{std::move(parts)}, {}});
}

RelationSpecPtr RelationSpec::intersection_of(std::vector<RelationSpecPtr> parts) {
    if (parts.empty()) throw SpecError("an intersection needs at least one part");
    return std::make_shared<const RelationSpec>(RelationSpec{Intersection{std::move(parts)}, {}});
}

RelationSpecPtr RelationSpec::bloat_of(RelationSpecPtr inner, Expr epsilon) {
    return std::make_shared<const RelationSpec>(RelationSpec{Bloat{std::move(inner), std::move(epsilon)}, {}});
}

RelationSpecPtr RelationSpec::bloat_of(RelationSpecPtr inner, double epsilon) {
    return bloat_of(std::move(inner), Expr::literal(epsilon));
}

RelationSpecPtr RelationSpec::identity() { return std::make_shared<const RelationSpec>(RelationSpec{Identity{}, {}}); }

RelationSpecPtr RelationSpec::empty() { return std::make_shared<const RelationSpec>(RelationSpec{Empty{}, {}}); }

std::set<std::string> free_parameters(const RelationSpec& spec) {
    std::set<std::string> out;
    auto add = [&](const Expr& e) {
        for (auto& p : e.free_parameters()) out.insert(p);
    };
    std::visit(
        [&](const auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, RelationSpec::Map>) {
                for (const auto& c : node.components) add(c);
            } else if constexpr (std::is_same_v<T, RelationSpec::BoxUnion>) {
                for (const auto& [s, t] : node.products) {
                    for (const auto& [lo, hi] : s.axes) add(lo), add(hi);
                    for (const auto& [lo, hi] : t.axes) add(lo), add(hi);
                }
            } else if constexpr (std::is_same_v<T, RelationSpec::Transpose>) {
                out.merge(free_parameters(*node.inner));
            } else if constexpr (std::is_same_v<T, RelationSpec::Union> ||
                                 std::is_same_v<T, RelationSpec::Intersection>) {
                for (const auto& p : node.parts) out.merge(free_parameters(*p));
            } else if constexpr (std::is_same_v<T, RelationSpec::Bloat>) {
                out.merge(free_parameters(*node.inner));
                add(node.epsilon);
            }
        },
        spec.node);
    for (const auto& [k, v] : spec.bindings) out.erase(k);
    return out;
}

BoxRelation rasterize(const GridPtr& grid, const RelationSpec& spec, const ParameterMap& params) {
    const ParameterMap p = merged(spec.bindings, params);
    return std::visit(
        [&](const auto& node) -> BoxRelation {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, RelationSpec::Map>) {
                return rasterize_map(grid, node, p);
            } else if constexpr (std::is_same_v<T, RelationSpec::BoxUnion>) {
                return rasterize_boxes(grid, node, p);
            } else if constexpr (std::is_same_v<T, RelationSpec::Transpose>) {
                return transpose(rasterize(grid, *node.inner, p));
            } else if constexpr (std::is_same_v<T, RelationSpec::Union>) {
                BoxRelation out(grid);
                for (const auto& part : node.parts) out |= rasterize(grid, *part, p);
                return out;
            } else if constexpr (std::is_same_v<T, RelationSpec::Intersection>) {
                BoxRelation out = rasterize(grid, *node.parts.front(), p);
                for (std::size_t i = 1; i < node.parts.size(); ++i) out = intersect(out, rasterize(grid, *node.parts[i], p));
                return out;
            } else if constexpr (std::is_same_v<T, RelationSpec::Bloat>) {
                const double eps = bound_constant(node.epsilon, p);
                if (!(eps >= 0.0)) throw SpecError("bloat radius must be nonnegative");
                return bloat(rasterize(grid, *node.inner, p), eps);
            } else if constexpr (std::is_same_v<T, RelationSpec::Identity>) {
                return identity_raster(grid);
            } else {
                return BoxRelation(grid);
            }
        },
        spec.node);
}

// ---------------------------------------------------------------------------
// Calculus

BoxRelation identity_raster(const GridPtr& grid) {
    std::vector<std::vector<BoxIndex>> succ(grid->box_count());
    const Eigen::VectorXi one = Eigen::VectorXi::Ones(grid->dimension());
    parallel_for(grid->box_count(), [&](std::size_t s) {
        for_each_in_range(*grid, ball_range(*grid, static_cast<BoxIndex>(s), one),
                          [&](BoxIndex t) { succ[s].push_back(t); });
    });
    return BoxRelation(grid, std::move(succ));
}

BoxSet image(const BoxRelation& rel, const BoxSet& set) {
    require_same_grid(rel.grid(), set.grid());
    BoxSet out(rel.grid());
    set.for_each([&](BoxIndex s) {
        for (BoxIndex t : rel.targets(s)) out.insert(t);
    });
    return out;
}

BoxRelation transpose(const BoxRelation& rel) {
    std::vector<std::vector<BoxIndex>> succ(rel.grid()->box_count());
    const auto& fwd = rel.successors();
    for (std::size_t s = 0; s < fwd.size(); ++s)
        for (BoxIndex t : fwd[s]) succ[t].push_back(static_cast<BoxIndex>(s));
    return BoxRelation(rel.grid(), std::move(succ));
}

BoxRelation compose(const BoxRelation& outer, const BoxRelation& inner) {
    require_same_grid(outer.grid(), inner.grid());
    std::vector<std::vector<BoxIndex>> succ(inner.grid()->box_count());
    parallel_for(succ.size(), [&](std::size_t a) {
        auto& out = succ[a];
        for (BoxIndex b : inner.targets(static_cast<BoxIndex>(a))) {
            const auto& next = outer.targets(b);
            out.insert(out.end(), next.begin(), next.end());
        }
        canonicalize(out);
    });
    return BoxRelation(inner.grid(), std::move(succ));
}

BoxRelation iterate(const BoxRelation& rel, int n) {
    if (n < 0) throw DomainError("relations are iterated only for n >= 0");
    if (n == 0) return identity_raster(rel.grid());
    BoxRelation out = rel;
    for (int i = 1; i < n; ++i) out = compose(rel, out);
    return out;
}

BoxRelation bloat(const BoxRelation& rel, double epsilon) {
    if (!(epsilon >= 0.0)) throw DomainError("bloat radius must be nonnegative");
    const GridPtr& grid = rel.grid();
    const int n = grid->dimension();
    // box gap (|i - j| - 1) * h <= eps  <=>  |i - j| <= floor(eps / h) + 1
    Eigen::VectorXi radius(n);
    for (int k = 0; k < n; ++k)
        radius[k] = static_cast<int>(std::floor(epsilon / grid->width()[k] + 1e-9)) + 1;

    std::vector<std::vector<BoxIndex>> grown(grid->box_count());
    parallel_for(grid->box_count(), [&](std::size_t s) {
        const auto& targets = rel.targets(static_cast<BoxIndex>(s));
        if (targets.empty()) return;
        auto& out = grown[s];
        for (BoxIndex t : targets)
            for_each_in_range(*grid, ball_range(*grid, t, radius), [&](BoxIndex u) { out.push_back(u); });
        canonicalize(out);
    });

    std::vector<std::vector<BoxIndex>> succ(grid->box_count());
    for (std::size_t s = 0; s < grown.size(); ++s) {
        if (grown[s].empty()) continue;
        for_each_in_range(*grid, ball_range(*grid, static_cast<BoxIndex>(s), radius), [&](BoxIndex p) {
            succ[p].insert(succ[p].end(), grown[s].begin(), grown[s].end());
        });
    }
    return BoxRelation(grid, std::move(succ));
}

}  // namespace relkit
