#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "relkit/attractor.hpp"
#include "relkit/semicontinuity.hpp"

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

RectSpec rect(const Expr& lo, const Expr& hi) { return RectSpec{{{lo, hi}}}; }

/// The L-shaped family with alpha left free.
RelationSpecPtr l_family() {
    const Expr a = Expr::parameter("alpha");
    const Expr corner = Expr::literal(2) + a;
    std::vector<std::pair<RectSpec, RectSpec>> products;
    products.emplace_back(rect(Expr::literal(0.8), corner), rect(Expr::literal(1.5), Expr::literal(1.5)));
    products.emplace_back(rect(corner, corner), rect(Expr::literal(1.5), Expr::literal(3)));
    return RelationSpec::box_union(std::move(products));
}

}  // namespace

TEST_CASE("separation radius of the L-shape is min(0.5, alpha)") {
    auto g = line(0, 3, 300);
    const double h = 0.01;
    const BoxSet b = cover1(g, 1, 2);
    for (double alpha : {0.1, 0.3, 0.5, 0.7}) {
        const BoxRelation f = rasterize(g, *l_family(), {{"alpha", alpha}});
        const double r = separation_radius(f, b);
        const double expected = std::min(0.5, alpha);
        CHECK(r >= expected - 2 * h - 1e-9);
        CHECK(r <= expected + 2 * h + 1e-9);
        CHECK(r == doctest::Approx(oracle_ref::brute_radius(f, b, closure_of_complement(b))));
    }
}

TEST_CASE("separation radius of the affine block against a dense oracle") {
    auto g = line(-5, 5, 400);
    const double h = 0.025;
    const BoxSet b = cover1(g, -1.2, -0.8);
    const BoxRelation f = rasterize(g, *RelationSpec::map("(x - 1)/2"));
    const double r = separation_radius(f, b);
    // dense minimisation of max(d(x, B), d((x-1)/2, cl(X \ B))) over [-5, 5]
    const double dense = oracle_ref::dense_radius_1d([](double x) { return (x - 1) / 2; }, -5, 5, 100001,
                                                     {{-1.2, -0.8}}, {{-5, -1.2}, {-0.8, 5}});
    CHECK(dense == doctest::Approx(1.0 / 15).epsilon(1e-3));
    CHECK(r <= dense + 1e-12);
    CHECK(r >= dense - 2 * h);
    CHECK(r > 0);
    CHECK(r == doctest::Approx(oracle_ref::brute_radius(f, b, closure_of_complement(b))));
}

TEST_CASE("radius edge cases") {
    auto g = line(0, 1, 20);
    const BoxRelation id = identity_raster(g);
    CHECK(std::isinf(separation_radius(BoxRelation(g), cover1(g, 0.2, 0.4))));
    CHECK(std::isinf(separation_radius(id, BoxSet(g))));
    CHECK(std::isinf(separation_radius(id, BoxSet::full(g))));
}

TEST_CASE("radius soundness through bloat") {
    auto g = line(0, 3, 300);
    const double h = 0.01;
    const BoxSet b = cover1(g, 1, 2);
    for (double alpha : {0.1, 0.2, 0.3}) {
        const BoxRelation f = rasterize(g, *l_family(), {{"alpha", alpha}});
        const double r = separation_radius(f, b);
        for (double eps = 0; eps < r - 2 * h; eps += h) CHECK(admits(bloat(f, eps), b).is_block);
    }
}

TEST_CASE("perturbation reports") {
    auto g = line(0, 3, 300);
    const BoxSet b = cover1(g, 1, 2);
    const BoxRelation f = rasterize(g, *l_family(), {{"alpha", 0.1}});

    const PersistenceReport wide = perturbation_report(f, b, bloat(f, 0.15));
    CHECK(!wide.admitted);
    CHECK(!wide.witnesses.empty());
    CHECK(!wide.perturbed_attractor.has_value());

    const PersistenceReport narrow = perturbation_report(f, b, bloat(f, 0.05));
    CHECK(narrow.admitted);
    REQUIRE(narrow.perturbed_attractor.has_value());
    CHECK(narrow.perturbed_attractor->is_subset_of(b));
    CHECK(narrow.contained);

    const PersistenceReport none = perturbation_report(f, b, BoxRelation(g));
    CHECK(none.admitted);
    CHECK(none.perturbed_attractor->empty());
    CHECK(none.contained);

    CHECK_THROWS_AS(perturbation_report(bloat(f, 0.15), b, f), PreconditionError);
}

TEST_CASE("empty perturbation is admitted by every certified block") {
    auto g = line(-2, 2, 60);
    const BoxRelation f = rasterize(g, *RelationSpec::map("x/3 + 0.2"));
    std::mt19937_64 rng(31);
    int certified = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const int a = static_cast<int>(rng() % 60), c = static_cast<int>(rng() % 60);
        const BoxSet b = cover1(g, g->edge(0, std::min(a, c)), g->edge(0, std::max(a, c)));
        if (b == BoxSet::full(g) || !is_attractor_block(f, b).is_block) continue;
        ++certified;
        const PersistenceReport r = perturbation_report(f, b, BoxRelation(g));
        CHECK(r.admitted);
        CHECK(r.perturbed_attractor->empty());
    }
    CHECK(certified > 5);
}

TEST_CASE("affine parameter sweep") {
    auto g = line(-5, 5, 400);
    const double h = 0.025;
    const BoxSet b = cover1(g, -1.2, -0.8);
    const auto family = RelationSpec::map("(x + alpha)/2");
    CHECK(sweep_parameter(*family) == "alpha");
    const std::vector<double> values = {-1.19, -1.1, -1.0, -0.9, -0.81, -0.7, -0.5};
    const auto rows = parameter_sweep(g, *family, b, values);
    REQUIRE(rows.size() == values.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].value == values[i]);
        const double a = values[i];
        if (a > -1.2 + 2 * h && a < -0.8 - 2 * h) CHECK(rows[i].admitted);
        if (a < -1.2 - 2 * h || a > -0.8 + 2 * h) CHECK(!rows[i].admitted);
        if (rows[i].admitted) {
            CHECK(rows[i].attractor.lower[0] <= a);
            CHECK(rows[i].attractor.upper[0] >= a);
            CHECK(rows[i].attractor.upper[0] - rows[i].attractor.lower[0] <= 4 * h + 1e-12);
        }
    }
    CHECK(parameter_sweep(g, *family, b, {}).empty());
    CHECK_THROWS_AS(parameter_sweep(g, *RelationSpec::map("x/2"), b, values), SpecError);
    CHECK_THROWS_AS(parameter_sweep(g, *RelationSpec::map("x*a + c"), b, values), SpecError);
}
