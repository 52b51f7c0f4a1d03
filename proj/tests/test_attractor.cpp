#include <doctest.h>

#include <random>

#include "relkit/attractor.hpp"
#include "relkit/finite_oracle.hpp"

using namespace relkit;

namespace {

GridPtr line(double lo, double hi, int div) {
    const ClosedInterval b[] = {{lo, hi}};
    const int d[] = {div};
    return build_grid(b, d);
}

BoxSet cover1(const GridPtr& g, double lo, double hi) {
    const ClosedInterval r[] = {{lo, hi}};
    return cover(g, r);
}

RectSpec rect(double lo, double hi) { return RectSpec{{{Expr::literal(lo), Expr::literal(hi)}}}; }

BoxRelation l_shape(const GridPtr& g, double alpha) {
    std::vector<std::pair<RectSpec, RectSpec>> products;
    products.emplace_back(rect(0.8, 2 + alpha), rect(1.5, 1.5));
    products.emplace_back(rect(2 + alpha, 2 + alpha), rect(1.5, 3));
    return rasterize(g, *RelationSpec::box_union(std::move(products)));
}

}  // namespace

TEST_CASE("affine block certification") {
    auto g = line(-5, 5, 400);
    const BoxRelation f = rasterize(g, *RelationSpec::map("(x - 1)/2"));
    const BoxSet b = cover1(g, -1.2, -0.8);
    const BlockVerdict v = is_attractor_block(f, b);
    CHECK(v.is_block);
    CHECK(v.witnesses.empty());

    const OmegaResult om = omega_limit(f, b);
    CHECK(om.stabilized);
    CHECK(cover1(g, -1, -1).is_subset_of(om.limit));
    CHECK(diameter(om.limit) <= 4 * 0.025 + 1e-12);
    CHECK(is_invariant(f, om.limit));
    CHECK(attractor_from_block(f, b) == om.limit);
    CHECK(omega_limit(f, om.limit).limit == om.limit);
    CHECK(om.limit.is_subset_of(combinatorial_interior(b)));

    // a block that misses the fixed point is not certified
    const BlockVerdict off = is_attractor_block(f, cover1(g, -0.7, -0.3));
    CHECK(!off.is_block);
    CHECK(!off.witnesses.empty());
    CHECK_THROWS_AS(attractor_from_block(f, cover1(g, -0.7, -0.3)), PreconditionError);
}

TEST_CASE("witnesses for the bloated L-shape sit near (2.1, 3)") {
    auto g = line(0, 3, 300);
    const BoxRelation f = l_shape(g, 0.1);
    const BoxSet b = cover1(g, 1, 2);
    CHECK(is_attractor_block(f, b).is_block);
    const BlockVerdict v = is_attractor_block(bloat(f, 0.15), b);
    REQUIRE(!v.is_block);
    bool near_corner = false;
    for (auto [s, t] : v.witnesses) {
        CHECK(b.contains(s));
        CHECK(closure_of_complement(b).contains(t));
        if (std::abs(g->edge(0, static_cast<int>(s)) - 2.0) < 0.05 && g->edge(0, static_cast<int>(t)) > 2.0)
            near_corner = true;
    }
    CHECK(near_corner);
}

TEST_CASE("L-shape attractor matches direct iteration on a finer grid") {
    auto g = line(0, 3, 300);
    const BoxSet a = attractor_from_block(l_shape(g, 0.1), cover1(g, 1, 2));
    CHECK(a.is_subset_of(cover1(g, 1, 2)));
    CHECK(cover1(g, 1.5, 1.5).is_subset_of(a));

    // oracle: a 3000-box raster iterated from B until it stops changing
    auto fine = line(0, 3, 3000);
    const BoxRelation ff = l_shape(fine, 0.1);
    BoxSet s = cover1(fine, 1, 2);
    for (int k = 0; k < 50; ++k) s = image(ff, s);
    const auto box = summarize(s);
    CHECK(box.lower[0] >= summarize(a).lower[0] - 1e-12);
    CHECK(box.upper[0] <= summarize(a).upper[0] + 1e-12);
}

TEST_CASE("degenerate relations") {
    auto g = line(0, 1, 30);
    const BoxRelation none(g);
    const BoxSet b = cover1(g, 0.2, 0.6);
    CHECK(omega_limit(none, b).limit.empty());
    CHECK(is_attractor_block(none, b).is_block);
    CHECK(attractor_from_block(none, b).empty());
    CHECK(is_invariant(none, BoxSet(g)));

    const BoxRelation id = identity_raster(g);
    CHECK(omega_limit(id, BoxSet::full(g)).limit == BoxSet::full(g));
    CHECK(is_invariant(id, BoxSet::full(g)));

    const BlockSearch empty_search = find_attractor_block(none, b);
    REQUIRE(empty_search.block.has_value());
    CHECK(empty_search.block->empty());
    CHECK(!find_attractor_block(id, cover1(g, 0.2, 0.6)).block.has_value());
}

TEST_CASE("find_attractor_block inside a neighbourhood") {
    auto g = line(-5, 5, 400);
    const BoxRelation f = rasterize(g, *RelationSpec::map("(x - 1)/2"));
    const BoxSet n = cover1(g, -1.3, -0.7);
    const BlockSearch r = find_attractor_block(f, n);
    REQUIRE(r.block.has_value());
    CHECK(r.block->is_subset_of(n));
    CHECK(is_attractor_block(f, *r.block).is_block);
    const BoxSet omega_n = omega_limit(f, n).limit;
    CHECK(omega_n.is_subset_of(*r.block));
    CHECK(omega_limit(f, *r.block).limit == omega_n);
    CHECK(cover1(g, -1, -1).is_subset_of(combinatorial_interior(*r.block)));
}

TEST_CASE("non-monotone omega uses the periodic part") {
    auto g = line(0, 6, 6);
    // 0 -> 1 -> 2 -> 1, 3 -> 4 -> 3
    const std::vector<BoxPair> pairs = {{0, 1}, {1, 2}, {2, 1}, {3, 4}, {4, 3}};
    const BoxRelation r = BoxRelation::from_pairs(g, pairs);
    const OmegaResult om = omega_limit(r, BoxSet::from_indices(g, std::vector<BoxIndex>{0, 3}));
    CHECK(om.limit == BoxSet::from_indices(g, std::vector<BoxIndex>{1, 2, 3, 4}));
    CHECK(om.period == 2);
    CHECK(om.transient == 1);

    OmegaOptions tight;
    tight.cap = 1;
    CHECK_THROWS_AS(omega_limit(r, BoxSet::from_indices(g, std::vector<BoxIndex>{0, 3}), tight), IterationCapError);
}

TEST_CASE("box verdicts agree with the finite engine on embedded digraphs") {
    for (std::uint64_t seed = 1; seed <= 60; ++seed) {
        const int n = 2 + static_cast<int>(seed % 7);
        const oracle::FiniteRelation f = oracle::fo_random(n, 0.15 + 0.01 * static_cast<double>(seed % 30), seed);
        const oracle::Embedding e = oracle::embed(f);
        for (oracle::StateSet b = 0; b <= f.all(); ++b) {
            const BoxSet thick = e.thick(b);
            CHECK(is_attractor_block(e.relation, thick).is_block == oracle::fo_is_attractor_block(f, b));
            CHECK(e.states(omega_limit(e.relation, thick).limit) == oracle::fo_omega(f, b));
        }
    }
}
