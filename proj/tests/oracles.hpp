// Brute-force reference computations. Everything here works from box
// coordinates and plain loops, never from the library's set algebra.
#ifndef RELKIT_TESTS_ORACLES_HPP
#define RELKIT_TESTS_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "relkit/grid.hpp"
#include "relkit/relation.hpp"

namespace oracle_ref {

using relkit::BoxIndex;
using relkit::BoxSet;
using relkit::Grid;
using relkit::GridPtr;

inline std::vector<double> lower(const Grid& g, BoxIndex b) {
    std::vector<double> out;
    for (int k = 0; k < g.dimension(); ++k) out.push_back(g.lower()[k] + g.coordinate(b, k) * g.width()[k]);
    return out;
}

inline std::vector<double> upper(const Grid& g, BoxIndex b) {
    std::vector<double> out;
    for (int k = 0; k < g.dimension(); ++k) out.push_back(g.lower()[k] + (g.coordinate(b, k) + 1) * g.width()[k]);
    return out;
}

/// Boxes whose closed extent meets the closed rectangle (with a relative slack
/// for rounding in the box edges).
inline BoxSet brute_cover(const GridPtr& g, const std::vector<relkit::ClosedInterval>& rect) {
    BoxSet out(g);
    for (BoxIndex b = 0; b < g->box_count(); ++b) {
        const auto lo = lower(*g, b), hi = upper(*g, b);
        bool meets = true;
        for (int k = 0; k < g->dimension(); ++k) {
            const double slack = 1e-9 * g->width()[k];
            meets = meets && lo[static_cast<std::size_t>(k)] <= rect[static_cast<std::size_t>(k)].hi + slack &&
                    hi[static_cast<std::size_t>(k)] >= rect[static_cast<std::size_t>(k)].lo - slack;
        }
        if (meets) out.insert(b);
    }
    return out;
}

inline bool moore_adjacent(const Grid& g, BoxIndex a, BoxIndex b) {
    for (int k = 0; k < g.dimension(); ++k)
        if (std::abs(g.coordinate(a, k) - g.coordinate(b, k)) > 1) return false;
    return true;
}

inline BoxSet brute_interior(const BoxSet& s) {
    const Grid& g = *s.grid();
    BoxSet out(s.grid());
    for (BoxIndex b = 0; b < g.box_count(); ++b) {
        if (!s.contains(b)) continue;
        bool all = true;
        for (BoxIndex c = 0; c < g.box_count() && all; ++c)
            if (moore_adjacent(g, b, c) && !s.contains(c)) all = false;
        if (all) out.insert(b);
    }
    return out;
}

/// Sup-metric distance between two closed boxes from their real coordinates.
inline double brute_box_distance(const Grid& g, BoxIndex a, BoxIndex b) {
    const auto la = lower(g, a), ua = upper(g, a), lb = lower(g, b), ub = upper(g, b);
    double d = 0.0;
    for (std::size_t k = 0; k < la.size(); ++k) d = std::max(d, std::max({0.0, lb[k] - ua[k], la[k] - ub[k]}));
    return d;
}

inline double brute_set_distance(const BoxSet& s, const BoxSet& t) {
    double best = std::numeric_limits<double>::infinity();
    for (BoxIndex a : s.indices())
        for (BoxIndex b : t.indices()) best = std::min(best, brute_box_distance(*s.grid(), a, b));
    return best;
}

/// Separation radius straight from its definition: min over pairs (P, Q) of
/// max(d(P, B), d(Q, C)) with C given explicitly.
inline double brute_radius(const relkit::BoxRelation& rel, const BoxSet& block, const BoxSet& forbidden) {
    double best = std::numeric_limits<double>::infinity();
    const Grid& g = *block.grid();
    auto dist_to = [&](BoxIndex p, const BoxSet& s) {
        double d = std::numeric_limits<double>::infinity();
        for (BoxIndex q : s.indices()) d = std::min(d, brute_box_distance(g, p, q));
        return d;
    };
    std::vector<double> to_forbidden(g.box_count());
    for (BoxIndex q = 0; q < g.box_count(); ++q) to_forbidden[q] = dist_to(q, forbidden);
    for (BoxIndex p = 0; p < g.box_count(); ++p) {
        if (rel.targets(p).empty()) continue;
        const double dp = dist_to(p, block);
        for (BoxIndex q : rel.targets(p)) best = std::min(best, std::max(dp, to_forbidden[q]));
    }
    return best;
}

/// Dense minimisation of max(d(x, B), d(F(x), C)) over sample points of a 1-D
/// map, where B and C are given as unions of real intervals.
inline double dense_radius_1d(const std::function<double(double)>& f, double lo, double hi, int samples,
                              const std::vector<relkit::ClosedInterval>& block,
                              const std::vector<relkit::ClosedInterval>& forbidden) {
    auto dist = [](double x, const std::vector<relkit::ClosedInterval>& set) {
        double d = std::numeric_limits<double>::infinity();
        for (const auto& iv : set) d = std::min(d, std::max({0.0, iv.lo - x, x - iv.hi}));
        return d;
    };
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < samples; ++i) {
        const double x = lo + (hi - lo) * i / (samples - 1);
        const double y = f(x);
        if (y < lo || y > hi) continue;
        best = std::min(best, std::max(dist(x, block), dist(y, forbidden)));
    }
    return best;
}

/// True when the point lies in some box-product (P, Q) of the relation.
inline bool pair_covered(const relkit::BoxRelation& rel, const std::vector<double>& x, const std::vector<double>& y) {
    const Grid& g = *rel.grid();
    auto boxes_of = [&](const std::vector<double>& p) {
        // every box whose closed extent contains p
        std::vector<std::vector<int>> per_axis(p.size());
        for (std::size_t k = 0; k < p.size(); ++k) {
            const double h = g.width()[static_cast<Eigen::Index>(k)];
            const double u = (p[k] - g.lower()[static_cast<Eigen::Index>(k)]) / h;
            const int div = g.divisions()[static_cast<Eigen::Index>(k)];
            for (int i = static_cast<int>(std::floor(u)) - 1; i <= static_cast<int>(std::floor(u)) + 1; ++i)
                if (i >= 0 && i < div && u >= i - 1e-9 && u <= i + 1 + 1e-9) per_axis[k].push_back(i);
        }
        std::vector<BoxIndex> out;
        std::vector<std::size_t> pos(p.size(), 0);
        for (;;) {
            relkit::MultiIndex idx(static_cast<Eigen::Index>(p.size()));
            for (std::size_t k = 0; k < p.size(); ++k) {
                if (per_axis[k].empty()) return out;
                idx[static_cast<Eigen::Index>(k)] = per_axis[k][pos[k]];
            }
            out.push_back(g.ravel(idx));
            std::size_t k = 0;
            while (k < p.size() && ++pos[k] == per_axis[k].size()) pos[k++] = 0;
            if (k == p.size()) return out;
        }
    };
    for (BoxIndex s : boxes_of(x))
        for (BoxIndex t : boxes_of(y))
            if (rel.contains(s, t)) return true;
    return false;
}

}  // namespace oracle_ref

#endif  // RELKIT_TESTS_ORACLES_HPP
