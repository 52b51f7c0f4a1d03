#include <doctest.h>

#include "relkit/finite_oracle.hpp"

using namespace relkit::oracle;

namespace {

StateSet states(std::initializer_list<int> s) {
    StateSet out = 0;
    for (int i : s) out |= StateSet{1} << i;
    return out;
}

}  // namespace

TEST_CASE("SplitMix64 reference values") {
    // published test vector for seed 1234567
    SplitMix64 rng(1234567);
    CHECK(rng.next() == 6457827717110365317ULL);
    CHECK(rng.next() == 3203168211198807973ULL);
    SplitMix64 a(9), b(9);
    for (int i = 0; i < 10; ++i) CHECK(a.uniform() == b.uniform());
    SplitMix64 c(3);
    for (int i = 0; i < 1000; ++i) {
        const double u = c.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        CHECK(c.below(7) < 7);
    }
}

TEST_CASE("image") {
    const FiniteRelation f(2, {{0, 1}, {1, 1}});
    CHECK(fo_image(f, states({0})) == states({1}));
    CHECK(fo_image(f, 0) == 0);
    const FiniteRelation swap(2, {{0, 1}, {1, 0}});
    CHECK(fo_image(swap, states({0, 1})) == states({0, 1}));
    CHECK_THROWS_AS(fo_image(f, states({3})), std::out_of_range);
    FiniteRelation g(3);
    CHECK_THROWS_AS(g.add_edge(0, 3), std::out_of_range);
    CHECK_THROWS_AS(FiniteRelation(65), CapacityError);
}

TEST_CASE("omega") {
    const FiniteRelation f(2, {{0, 1}, {1, 1}});
    CHECK(fo_omega(f, states({0, 1})) == states({1}));
    CHECK(fo_omega(FiniteRelation(4), states({0, 2})) == 0);
    const FiniteRelation id(4, {{0, 0}, {1, 1}, {2, 2}, {3, 3}});
    CHECK(fo_omega(id, states({1, 3})) == states({1, 3}));
    // 0 -> 1 -> 2 -> 1 : periodic part {1, 2}
    const FiniteRelation cyc(3, {{0, 1}, {1, 2}, {2, 1}});
    CHECK(fo_omega(cyc, states({0})) == states({1, 2}));
}

TEST_CASE("attractor blocks") {
    const FiniteRelation f(2, {{0, 1}, {1, 1}});
    CHECK(fo_is_attractor_block(f, states({1})));
    CHECK(!fo_is_attractor_block(f, states({0})));
    CHECK(fo_is_attractor_block(f, f.all()));
    const BlockForms forms = fo_block_forms(f, states({0}));
    CHECK(forms.image_form == forms.disjointness_form);
}

TEST_CASE("attractors") {
    const FiniteRelation f(2, {{0, 1}, {1, 1}});
    CHECK(fo_is_attractor(f, states({1})));
    CHECK(fo_is_attractor(FiniteRelation(3), 0));
    const FiniteRelation swap(2, {{0, 1}, {1, 0}});
    CHECK(!fo_is_attractor(swap, states({0})));
    CHECK_THROWS_AS(fo_is_attractor(FiniteRelation(15), 0), CapacityError);
}

TEST_CASE("omega of a block is the decreasing intersection") {
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        const FiniteRelation f = fo_random(7, 0.3, seed);
        for (StateSet b = 0; b <= f.all(); ++b) {
            if (!fo_is_attractor_block(f, b)) continue;
            StateSet s = b;
            for (int k = 0; k < 10; ++k) s = fo_image(f, s);
            CHECK(fo_omega(f, b) == s);
        }
    }
}

TEST_CASE("random generation") {
    CHECK(fo_random(5, 0.0, 1).edge_count() == 0);
    CHECK(fo_random(5, 1.0, 1).edge_count() == 25);
    CHECK(fo_random(8, 0.2, 42) == fo_random(8, 0.2, 42));
    CHECK(!(fo_random(8, 0.5, 42) == fo_random(8, 0.5, 43)));
}

TEST_CASE("theorem suite") {
    const SuiteReport r = fo_theorem_suite(6, 500, 7);
    CHECK(r.trials == 500);
    CHECK(r.failures() == 0);
    CHECK(r.block_forms_agree.passed > 0);
    CHECK(r.block_yields_attractor.passed > 0);
    CHECK(r.attractor_has_block.passed > 0);
    CHECK(r.perturbation_persists.passed > 0);
    CHECK(r.first_counterexample.empty());

    const SuiteReport none = fo_theorem_suite(6, 0, 7);
    CHECK(none.checks() == 0);

    const SuiteReport mutated = fo_theorem_suite(6, 200, 7, Mutation::DropInvariance);
    CHECK(mutated.failures() > 0);
    CHECK(!mutated.first_counterexample.empty());

    CHECK(fo_theorem_suite(10, 20, 3).failures() == 0);
    CHECK_THROWS_AS(fo_theorem_suite(15, 1, 1), CapacityError);
}

TEST_CASE("embedding layout") {
    const FiniteRelation f(3, {{0, 2}, {2, 2}});
    const Embedding e = embed(f);
    CHECK(e.grid->box_count() == 9);
    CHECK(e.thick(states({1})).count() == 3);
    CHECK(e.centers(states({0, 2})).indices() == std::vector<relkit::BoxIndex>{1, 7});
    CHECK(e.relation.contains(0, 7));
    CHECK(e.relation.contains(2, 7));
    CHECK(!e.relation.contains(3, 7));
    CHECK(e.states(e.thick(states({0, 1}))) == states({0, 1}));
}
