#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "relkit/relation.hpp"

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

RelationSpecPtr l_shape(double alpha) {
    std::vector<std::pair<RectSpec, RectSpec>> products;
    products.emplace_back(rect(0.8, 2 + alpha), rect(1.5, 1.5));
    products.emplace_back(rect(2 + alpha, 2 + alpha), rect(1.5, 3));
    return RelationSpec::box_union(std::move(products));
}

BoxRelation random_relation(const GridPtr& g, std::mt19937_64& rng, int per_box) {
    std::vector<BoxPair> pairs;
    for (BoxIndex s = 0; s < g->box_count(); ++s)
        for (int k = 0; k < per_box; ++k)
            if (rng() % 3 == 0) pairs.push_back({s, static_cast<BoxIndex>(rng() % g->box_count())});
    return BoxRelation::from_pairs(g, pairs);
}

}  // namespace

TEST_CASE("rasterize the affine map") {
    auto g = line(-5, 5, 400);
    const BoxRelation f = rasterize(g, *RelationSpec::map("(x - 1)/2"));
    CHECK(oracle_ref::pair_covered(f, {-1.0}, {-1.0}));
    const BoxSet img = image(f, cover1(g, -1.2, -0.8));
    const auto s = summarize(img);
    CHECK(s.lower[0] <= -1.1);
    CHECK(s.upper[0] >= -0.9);
    CHECK(s.lower[0] >= -1.1 - 0.025 - 1e-12);
    CHECK(s.upper[0] <= -0.9 + 0.025 + 1e-12);
}

TEST_CASE("rasterize the L-shaped union") {
    auto g = line(0, 3, 300);
    const BoxRelation f = rasterize(g, *l_shape(0.1));
    CHECK(!f.empty());
    CHECK(f.contains(150, 150));
    CHECK(f.contains(210, 299));
    CHECK(!f.contains(150, 299));
    CHECK(oracle_ref::pair_covered(f, {2.1}, {2.7}));
    CHECK(oracle_ref::pair_covered(f, {0.8}, {1.5}));
    CHECK(rasterize(g, *RelationSpec::empty()).pair_count() == 0);
}

TEST_CASE("rasterize errors") {
    auto g = line(0, 1, 10);
    CHECK_THROWS_AS(rasterize(g, *RelationSpec::map("x + a")), SpecError);
    CHECK_THROWS_AS(rasterize(g, *RelationSpec::map("x; x")), ArityError);
    CHECK_THROWS_AS(rasterize(g, *RelationSpec::map("x2")), SpecError);
    CHECK_THROWS_AS(rasterize(g, *RelationSpec::bloat_of(RelationSpec::identity(), -0.1)), SpecError);
    CHECK_NOTHROW(rasterize(g, *RelationSpec::map("x + a"), {{"a", 0.1}}));
    CHECK(free_parameters(*RelationSpec::union_of({RelationSpec::map("x + a"), l_shape(0.1)})) ==
          std::set<std::string>{"a"});
    CHECK(free_parameters(*RelationSpec::map("x + a", {{"a", 1.0}})).empty());
}

TEST_CASE("square root through the transpose") {
    auto g = line(-3, 3, 120);
    const auto square = RelationSpec::map("x^2");
    const BoxRelation root = rasterize(g, *RelationSpec::transpose_of(square));
    CHECK(root == transpose(rasterize(g, *square)));
    const BoxSet img = image(root, cover1(g, 1, 1));
    CHECK(cover1(g, 1, 1).is_subset_of(img));
    CHECK(cover1(g, -1, -1).is_subset_of(img));
    CHECK(!img.contains(60));  // nothing near 0
}

TEST_CASE("identity raster") {
    auto g = line(0, 1, 20);
    const BoxRelation id = identity_raster(g);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0, 1);
    for (int i = 0; i < 1000; ++i) {
        const double x = u(rng);
        CHECK(oracle_ref::pair_covered(id, {x}, {x}));
    }
    CHECK(id.contains(3, 4));
    CHECK(!id.contains(3, 5));
    CHECK(iterate(rasterize(g, *RelationSpec::map("x/2")), 0) == id);
    CHECK(rasterize(g, *RelationSpec::identity()) == id);
}

TEST_CASE("compose and iterate") {
    auto g = line(-5, 5, 400);
    const BoxRelation f = rasterize(g, *RelationSpec::map("(x - 1)/2"));
    const BoxRelation id = identity_raster(g);
    CHECK(f.is_subset_of(compose(f, id)));
    CHECK(f.is_subset_of(compose(id, f)));
    CHECK(compose(f, BoxRelation(g)).empty());
    CHECK(compose(BoxRelation(g), f).empty());

    const BoxSet twice = image(compose(f, f), cover1(g, 1, 1));
    CHECK(cover1(g, -0.5, -0.5).is_subset_of(twice));
    CHECK(diameter(twice) <= 0.1);

    CHECK(iterate(f, 2) == compose(f, f));
    CHECK(iterate(f, 1) == f);
    CHECK(iterate(BoxRelation(g), 3).empty());
    CHECK_THROWS_AS(iterate(f, -1), DomainError);
}

TEST_CASE("bloat") {
    auto g = line(0, 3, 300);
    const BoxRelation f = rasterize(g, *l_shape(0.1));
    CHECK(f.is_subset_of(bloat(f, 0)));
    CHECK(bloat(BoxRelation(g), 1).empty());

    const BoxSet b = cover1(g, 1, 2);
    const BoxSet clc = closure_of_complement(b);
    auto hits_forbidden = [&](const BoxRelation& r) {
        for (BoxIndex s : b.indices())
            for (BoxIndex t : r.targets(s))
                if (clc.contains(t)) return true;
        return false;
    };
    CHECK(!hits_forbidden(f));
    CHECK(hits_forbidden(bloat(f, 0.15)));
    CHECK(!hits_forbidden(bloat(f, 0.05)));

    // the bloat covers the true closed neighbourhood: sample pairs at distance <= eps
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-1, 1), along(0.8, 2.1);
    const BoxRelation wide = bloat(f, 0.15);
    for (int i = 0; i < 2000; ++i) {
        const double x = along(rng) + 0.15 * u(rng), y = 1.5 + 0.15 * u(rng);
        if (x < 0 || x > 3) continue;
        CHECK(oracle_ref::pair_covered(wide, {x}, {y}));
    }
}

TEST_CASE("algebraic laws on random relations") {
    auto g = line(0, 1, 40);
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 20; ++trial) {
        const BoxRelation f = random_relation(g, rng, 3);
        const BoxRelation h = random_relation(g, rng, 2);
        BoxSet s(g);
        for (BoxIndex b = 0; b < g->box_count(); ++b)
            if (rng() % 4 == 0) s.insert(b);

        CHECK(transpose(transpose(f)) == f);
        CHECK(image(compose(h, f), s) == image(h, image(f, s)));
        CHECK(transpose(compose(h, f)) == compose(transpose(f), transpose(h)));

        BoxRelation both = f;
        both |= h;
        BoxSet bigger = s;
        bigger.insert(static_cast<BoxIndex>(rng() % g->box_count()));
        CHECK(image(f, s).is_subset_of(image(both, bigger)));
        CHECK(intersect(f, h).is_subset_of(f));

        CHECK(bloat(f, 0.03).is_subset_of(bloat(f, 0.07)));
        CHECK(bloat(bloat(f, 0.03), 0.04).is_subset_of(bloat(f, 0.07 + 0.025)));
        CHECK(image(f, BoxSet(g)).empty());
    }
}

TEST_CASE("subdivided maps are sound and tighter") {
    auto g = line(-5, 5, 800);
    const std::string cubic = "-x^3 + 3*x^2 + x - 4";
    const BoxRelation plain = rasterize(g, *RelationSpec::map(cubic));
    const BoxRelation fine = rasterize(g, *RelationSpec::subdivided_map({Expr::parse(cubic)}, 8));
    CHECK(fine.is_subset_of(plain));
    CHECK(fine.pair_count() < plain.pair_count());
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-5, 5);
    for (int i = 0; i < 5000; ++i) {
        const double x = u(rng);
        const double y = -x * x * x + 3 * x * x + x - 4;
        if (y < -5 || y > 5) continue;
        CHECK(oracle_ref::pair_covered(fine, {x}, {y}));
    }
    CHECK_THROWS_AS(RelationSpec::subdivided_map({Expr::parse("x")}, 0), SpecError);
}

TEST_CASE("intersection of specs restricts a map") {
    auto g = line(-5, 5, 100);
    std::vector<std::pair<RectSpec, RectSpec>> square;
    square.emplace_back(rect(-1, 1), rect(-1, 1));
    const auto restricted =
        RelationSpec::intersection_of({RelationSpec::map("x/2 + a"), RelationSpec::box_union(std::move(square))});
    CHECK(free_parameters(*restricted) == std::set<std::string>{"a"});
    const BoxRelation r = rasterize(g, *restricted, {{"a", 0.0}});
    CHECK(r.domain().is_subset_of(cover1(g, -1, 1)));
    CHECK(r.contains(50, 50));
    CHECK_THROWS_AS(RelationSpec::intersection_of({}), SpecError);
}

TEST_CASE("two-dimensional rasterization is sound") {
    const ClosedInterval b[] = {{-2, 2}, {-2, 2}};
    const int d[] = {30, 30};
    auto g = build_grid(b, d);
    const BoxRelation f = rasterize(g, *RelationSpec::map("0.5*x1 - x2^2/4; x1*x2 + 0.3"));
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(-2, 2);
    for (int i = 0; i < 3000; ++i) {
        const double x1 = u(rng), x2 = u(rng);
        const double y1 = 0.5 * x1 - x2 * x2 / 4, y2 = x1 * x2 + 0.3;
        if (std::abs(y1) > 2 || std::abs(y2) > 2) continue;
        CHECK(oracle_ref::pair_covered(f, {x1, x2}, {y1, y2}));
    }
}
