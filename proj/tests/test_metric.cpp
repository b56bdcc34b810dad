#include <doctest.h>

#include "pbisim/bisim.hpp"
#include "pbisim/lifting.hpp"
#include "pbisim/metric.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace pbisim;

namespace {

const char* kE1 =
    "states: s t t2 u v\n"
    "s a -> 1/2 u, 1/2 v\n"
    "t a -> 1/2 u, 1/2 v\n"
    "t2 a -> 2/3 u, 1/3 v\n"
    "u b -> 1 u\n";

// Random 1-bounded pseudometric: random symmetric values closed under
// shortest paths (min-plus), which restores the triangle inequality.
PseudoMetric random_metric(testgen::Rng& rng, std::size_t n) {
    PseudoMetric m(n);
    for (StateId s = 0; s < n; ++s)
        for (StateId t = s + 1; t < n; ++t)
            m.set(s, t, make_rat(testgen::pick(rng, 0, 8), 8));
    for (StateId u = 0; u < n; ++u)
        for (StateId s = 0; s < n; ++s)
            for (StateId t = 0; t < n; ++t) {
                Rat via = m.at(s, u) + m.at(u, t);
                if (via < m.at(s, t)) m.set(s, t, via);
            }
    return m;
}

}  // namespace

TEST_CASE("kantorovich base cases") {
    testgen::Rng rng(3001);
    PseudoMetric m = random_metric(rng, 4);
    Dist d = testgen::random_dist(rng, 4);
    CHECK(kantorovich(m, d, d) == 0);

    PseudoMetric discrete = PseudoMetric::bottom(4);
    CHECK(kantorovich(discrete, point_dist(0), point_dist(1)) == 1);

    Dist d1 = Dist::from_entries({{0, make_rat(1, 2)}, {1, make_rat(1, 2)}});
    Dist d2 = Dist::from_entries({{0, make_rat(2, 3)}, {1, make_rat(1, 3)}});
    CHECK(kantorovich(discrete, d1, d2) == make_rat(1, 6));
    CHECK(kantorovich(discrete, d1, d2) == testoracle::total_variation(d1, d2));
}

TEST_CASE("kantorovich_dual produces a feasible one-variable witness") {
    testgen::Rng rng(3002);
    for (int round = 0; round < 150; ++round) {
        std::size_t n = testgen::pick(rng, 1, 6);
        PseudoMetric m = random_metric(rng, n);
        Dist d1 = testgen::random_dist(rng, n);
        Dist d2 = testgen::random_dist(rng, n);
        KantorovichDual dual = kantorovich_dual(m, d1, d2);
        CHECK(dual.value == kantorovich(m, d1, d2));

        Rat objective(0);
        for (const auto& [s, x] : dual.potentials) {
            CHECK(x >= 0);
            CHECK(x <= 1);
            objective += (d1.at(s) - d2.at(s)) * x;
        }
        CHECK(objective == dual.value);
        for (const auto& [s, xs] : dual.potentials)
            for (const auto& [t, xt] : dual.potentials) CHECK(xs - xt <= m.at(s, t));
    }
}

TEST_CASE("metric_from_relation") {
    CHECK(metric_from_relation(StateRelation::identity(3)) == PseudoMetric::bottom(3));
    CHECK(metric_from_relation(StateRelation::full(3)) == PseudoMetric::top(3));

    StateRelation two_classes(3);
    for (StateId s : {0, 1})
        for (StateId t : {0, 1}) two_classes.add(s, t);
    two_classes.add(2, 2);
    PseudoMetric m = metric_from_relation(two_classes);
    CHECK(m.at(0, 1) == 0);
    CHECK(m.at(0, 2) == 1);
    CHECK(m.check_invariants());

    StateRelation not_equiv(2);
    not_equiv.add(0, 1);
    CHECK_THROWS_AS(metric_from_relation(not_equiv), ModelError);
}

TEST_CASE("hausdorff conventions for empty sets") {
    PseudoMetric m = PseudoMetric::bottom(3);
    Dist d = point_dist(0);
    CHECK(hausdorff(m, {}, {}) == 0);
    CHECK(hausdorff(m, {d}, {}) == 1);
    CHECK(hausdorff(m, {}, {d}) == 1);
    CHECK(hausdorff(m, {d}, {point_dist(1)}) == kantorovich(m, d, point_dist(1)));
}

TEST_CASE("metric_step on the running example") {
    Plts p = parse_plts(kE1);
    PseudoMetric top = PseudoMetric::top(p.num_states());

    PseudoMetric f1 = metric_step(p, top);
    CHECK(f1.at(p.state("u"), p.state("v")) == 1);  // v has no b-derivative
    CHECK(f1.at(p.state("s"), p.state("t")) == 0);
    CHECK(f1.at(p.state("s"), p.state("t2")) == 0);

    PseudoMetric f2 = metric_step(p, f1);
    CHECK(f2.at(p.state("s"), p.state("t2")) == make_rat(1, 6));
    CHECK(f2.at(p.state("s"), p.state("t")) == 0);

    // Deadlocked-everywhere model: F collapses everything to distance 0.
    Plts dead = parse_plts("states: x y\n");
    CHECK(metric_step(dead, PseudoMetric::bottom(2)) == PseudoMetric::top(2));
}

TEST_CASE("metric_step preserves the pseudometric invariants") {
    testgen::Rng rng(3003);
    for (int round = 0; round < 60; ++round) {
        Plts p = testgen::random_plts(rng);
        PseudoMetric m = random_metric(rng, p.num_states());
        CHECK(metric_step(p, m).check_invariants());
    }
}

TEST_CASE("is_state_metric") {
    Plts dead = parse_plts("states: x y\n");
    CHECK(is_state_metric(dead, PseudoMetric::bottom(2)));

    Plts p = parse_plts(kE1);
    PseudoMetric bisim_metric = metric_from_relation(bisimilarity(p).to_relation());
    CHECK(is_state_metric(p, bisim_metric));

    // The full relation is not a bisimulation on E1: u and v fall apart.
    CHECK_FALSE(is_state_metric(p, metric_from_relation(StateRelation::full(p.num_states()))));
}

TEST_CASE("iterate_metric and kernel on the running example") {
    Plts p = parse_plts(kE1);
    CHECK(iterate_metric(p, 0) == PseudoMetric::top(p.num_states()));

    PseudoMetric m1 = iterate_metric(p, 1);
    CHECK(m1.at(p.state("u"), p.state("v")) == 1);

    PseudoMetric m2 = iterate_metric(p, 2);
    CHECK(m2.at(p.state("s"), p.state("t2")) == make_rat(1, 6));
    CHECK(m2.at(p.state("s"), p.state("t")) == 0);

    CHECK(kernel(PseudoMetric::top(4)) == StateRelation::full(4));
    CHECK(kernel(PseudoMetric::bottom(4)) == StateRelation::identity(4));

    Partition expected = bisimilarity(p);
    for (std::size_t k = 2; k <= 4; ++k)
        CHECK(kernel(iterate_metric(p, k)) == expected.to_relation());
}

TEST_CASE("stabilise_metric reports the first stable kernel") {
    Plts p = parse_plts(kE1);
    StabilisedMetric result = stabilise_metric(p);
    CHECK(result.index == 2);
    CHECK(kernel(result.metric) == bisimilarity(p).to_relation());
    CHECK(result.metric.at(p.state("s"), p.state("t")) == 0);
}

TEST_CASE("F is monotone") {
    testgen::Rng rng(3004);
    for (int round = 0; round < 40; ++round) {
        Plts p = testgen::random_plts(rng);
        std::size_t n = p.num_states();
        // m_low has pointwise larger values, so m_low is lattice-below m_high.
        PseudoMetric m_low = random_metric(rng, n);
        PseudoMetric m_high = m_low;
        for (StateId s = 0; s < n; ++s)
            for (StateId t = s + 1; t < n; ++t)
                if (testgen::pick(rng, 0, 1))
                    m_high.set(s, t, m_high.at(s, t) * make_rat(testgen::pick(rng, 0, 3), 4));
        for (StateId u = 0; u < n; ++u)
            for (StateId s = 0; s < n; ++s)
                for (StateId t = 0; t < n; ++t) {
                    Rat via = m_high.at(s, u) + m_high.at(u, t);
                    if (via < m_high.at(s, t)) m_high.set(s, t, via);
                }
        REQUIRE(metric_leq(m_low, m_high));
        CHECK(metric_leq(metric_step(p, m_low), metric_step(p, m_high)));
    }
}

TEST_CASE("kernel of the k-th iterate is the k-th approximant") {
    testgen::Rng rng(3005);
    for (int round = 0; round < 40; ++round) {
        Plts p = testgen::random_plts(rng);
        for (std::size_t k = 0; k <= 5; ++k)
            CHECK(kernel(iterate_metric(p, k)) == approximant(p, k));
    }
}

TEST_CASE("lifted relation iff zero Kantorovich distance over the relation metric") {
    testgen::Rng rng(3006);
    for (int round = 0; round < 300; ++round) {
        std::size_t n = testgen::pick(rng, 1, 6);
        StateRelation r = testgen::random_equivalence(rng, n);
        Dist d1 = testgen::random_dist(rng, n);
        Dist d2 = testgen::random_dist(rng, n);
        bool lifted = lifting::check(d1, d2, r);
        bool zero = kantorovich(metric_from_relation(r), d1, d2) == 0;
        CHECK(lifted == zero);
    }
}

TEST_CASE("equivalences are bisimulations iff their metric is a state-metric") {
    testgen::Rng rng(3007);
    for (int round = 0; round < 60; ++round) {
        Plts p = testgen::random_plts(rng);
        StateRelation r = testgen::random_equivalence(rng, p.num_states());
        CHECK(is_bisimulation(p, r) == is_state_metric(p, metric_from_relation(r)));
    }
}

TEST_CASE("stable kernel equals the bisimilarity partition") {
    testgen::Rng rng(3008);
    for (int round = 0; round < 30; ++round) {
        Plts p = testgen::random_plts(rng);
        StabilisedMetric result = stabilise_metric(p);
        CHECK(kernel(result.metric) == bisimilarity(p).to_relation());
    }
}

TEST_CASE("metric csv table") {
    Plts p = parse_plts("states: x y\n");
    std::string csv = metric_to_csv(p, PseudoMetric::bottom(2));
    CHECK(csv == "state,x,y\nx,0,1\ny,1,0\n");
}
