#include <doctest.h>

#include "pbisim/bisim.hpp"
#include "pbisim/logic.hpp"
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

FormulaPtr hml(const std::string& text) {
    return parse_formula(text, LogicMode::Hml);
}

// Random formula of the adequate logic, biased towards modalities.
FormulaPtr random_hml(testgen::Rng& rng, const Plts& p, int depth) {
    if (depth <= 0) return f_top();
    int choice = testgen::pick(rng, 0, 5);
    switch (choice) {
        case 0:
            return f_top();
        case 1:
        case 2:
            return f_neg(random_hml(rng, p, depth - 1));
        case 3:
            return f_and(random_hml(rng, p, depth - 1), random_hml(rng, p, depth - 1));
        default: {
            ActionId a = static_cast<ActionId>(
                testgen::pick(rng, 0, static_cast<int>(p.num_actions()) - 1));
            int parts = testgen::pick(rng, 1, 2);
            DistFormula::Group group;
            if (parts == 1) {
                group.push_back({Rat(1), random_hml(rng, p, depth - 1)});
            } else {
                int num = testgen::pick(rng, 1, 3);
                group.push_back({make_rat(num, 4), random_hml(rng, p, depth - 1)});
                group.push_back({make_rat(4 - num, 4), random_hml(rng, p, depth - 1)});
            }
            return f_diamond(p.action_name(a), DistFormula{{group}});
        }
    }
}

}  // namespace

TEST_CASE("parse_formula on the documented examples") {
    FormulaPtr f = hml("<a>(1/2*<b>(1*tt) (+) 1/2*tt)");
    REQUIRE(f->kind == FormulaKind::Diamond);
    CHECK(f->name == "a");
    REQUIRE(f->dist.groups.size() == 1);
    REQUIRE(f->dist.groups[0].size() == 2);
    CHECK(f->dist.groups[0][0].p == make_rat(1, 2));
    CHECK(f->dist.groups[0][0].phi->kind == FormulaKind::Diamond);
    CHECK(f->dist.groups[0][1].phi->kind == FormulaKind::Top);

    FormulaPtr g = hml("~tt");
    CHECK(g->kind == FormulaKind::Neg);
    CHECK(g->lhs->kind == FormulaKind::Top);

    CHECK_THROWS_AS(hml("<a>(1/3*tt (+) 1/3*tt)"), FormulaParseError);
}

TEST_CASE("parser rejects mu-calculus connectives in adequate-logic mode") {
    CHECK_THROWS_AS(hml("tt | tt"), FormulaParseError);
    CHECK_THROWS_AS(hml("ff"), FormulaParseError);
    CHECK_THROWS_AS(hml("[a](1*tt)"), FormulaParseError);
    CHECK_THROWS_AS(hml("mu X.X"), FormulaParseError);
    CHECK_THROWS_AS(hml("nu X.X"), FormulaParseError);
    CHECK_THROWS_AS(hml("X"), FormulaParseError);
    CHECK_THROWS_AS(parse_formula("~tt", LogicMode::Mu), FormulaParseError);
}

TEST_CASE("parser error positions and junk") {
    CHECK_THROWS_AS(hml("<a>"), FormulaParseError);
    CHECK_THROWS_AS(hml("tt tt"), FormulaParseError);
    CHECK_THROWS_AS(hml("<a>(1/2*tt (+)"), FormulaParseError);
    CHECK_THROWS_AS(hml(""), FormulaParseError);
}

TEST_CASE("threshold macro expands to a probabilistic choice") {
    FormulaPtr f = hml("<a>([tt]_3/4)");
    REQUIRE(f->dist.groups.size() == 1);
    REQUIRE(f->dist.groups[0].size() == 2);
    CHECK(f->dist.groups[0][0].p == make_rat(3, 4));
    CHECK(f->dist.groups[0][1].p == make_rat(1, 4));
    CHECK(f->dist.groups[0][1].phi->kind == FormulaKind::Top);

    FormulaPtr g = hml("<a>([<b>(1*tt)]_1)");
    CHECK(g->dist.groups[0].size() == 1);
}

TEST_CASE("printing round-trips through the parser") {
    testgen::Rng rng(4001);
    Plts p = parse_plts(kE1);
    for (int round = 0; round < 100; ++round) {
        FormulaPtr f = random_hml(rng, p, 3);
        FormulaPtr g = hml(to_string(f));
        CHECK(to_string(g) == to_string(f));
    }
}

TEST_CASE("sat_state on the running example") {
    Plts p = parse_plts(kE1);
    for (StateId s = 0; s < p.num_states(); ++s) CHECK(sat_state(p, s, f_top()));

    FormulaPtr can_b = hml("<b>(1*tt)");
    CHECK(sat_state(p, p.state("u"), can_b));
    CHECK_FALSE(sat_state(p, p.state("v"), can_b));

    FormulaPtr split = hml("<a>(1/2*<b>(1*tt) (+) 1/2*tt)");
    CHECK(sat_state(p, p.state("s"), split));
}

TEST_CASE("diamond over an unknown action is false") {
    Plts p = parse_plts(kE1);
    CHECK_FALSE(sat_state(p, p.state("s"), hml("<zap>(1*tt)")));
    CHECK(sat_state(p, p.state("s"), hml("~<zap>(1*tt)")));
}

TEST_CASE("sat_dist on the running example") {
    Plts p = parse_plts(kE1);
    Dist d = p.der(p.state("s"), p.action("a"))[0];

    DistFormula trivial{{{{Rat(1), f_top()}}}};
    CHECK(sat_dist(p, d, trivial));

    FormulaPtr can_b = hml("<b>(1*tt)");
    DistFormula half{{{{make_rat(1, 2), can_b}, {make_rat(1, 2), f_top()}}}};
    CHECK(sat_dist(p, d, half));

    DistFormula three_quarters{{{{make_rat(3, 4), can_b}, {make_rat(1, 4), f_top()}}}};
    CHECK_FALSE(sat_dist(p, d, three_quarters));
}

TEST_CASE("sat_dist agrees with the cut-condition oracle") {
    testgen::Rng rng(4002);
    Plts p = parse_plts(kE1);
    FormulaPtr can_b = hml("<b>(1*tt)");
    FormulaPtr can_a = hml("<a>(1*tt)");
    std::vector<FormulaPtr> atoms = {f_top(), can_b, can_a, f_neg(can_b)};
    for (int round = 0; round < 200; ++round) {
        Dist d = testgen::random_dist(rng, p.num_states());
        int parts = testgen::pick(rng, 1, 3);
        std::vector<int> weights(parts, 1);
        for (int extra = parts; extra < 4; ++extra) ++weights[testgen::pick(rng, 0, parts - 1)];
        DistFormula::Group group;
        for (int i = 0; i < parts; ++i)
            group.push_back({make_rat(weights[i], 4), atoms[testgen::pick(rng, 0, 3)]});

        std::vector<Rat> supply, demand;
        for (const auto& [s, q] : d.entries()) supply.push_back(q);
        for (const auto& part : group) demand.push_back(part.p);
        std::vector<std::vector<bool>> allowed(d.support_size(), std::vector<bool>(group.size()));
        for (std::size_t i = 0; i < d.support_size(); ++i)
            for (std::size_t j = 0; j < group.size(); ++j)
                allowed[i][j] = sat_state(p, d.entries()[i].first, group[j].phi);

        CHECK(sat_dist(p, d, DistFormula{{group}}) ==
              testoracle::allocation_feasible_cut(supply, demand, allowed));
    }
}

TEST_CASE("satisfaction of a choice formula is convex") {
    testgen::Rng rng(4003);
    Plts p = parse_plts(kE1);
    FormulaPtr can_a = hml("<a>(1*tt)");
    DistFormula half{{{{make_rat(1, 2), can_a}, {make_rat(1, 2), f_top()}}}};
    int both = 0;
    for (int round = 0; round < 200; ++round) {
        Dist d1 = testgen::random_dist(rng, p.num_states());
        Dist d2 = testgen::random_dist(rng, p.num_states());
        if (sat_dist(p, d1, half) && sat_dist(p, d2, half)) {
            ++both;
            Dist mix = convex_sum({{make_rat(1, 2), d1}, {make_rat(1, 2), d2}});
            CHECK(sat_dist(p, mix, half));
        }
    }
    CHECK(both > 10);
}

TEST_CASE("negation duality") {
    testgen::Rng rng(4004);
    for (int round = 0; round < 30; ++round) {
        Plts p = testgen::random_plts(rng);
        for (int i = 0; i < 5; ++i) {
            FormulaPtr f = random_hml(rng, p, 3);
            for (StateId s = 0; s < p.num_states(); ++s)
                CHECK(sat_state(p, s, f_neg(f)) == !sat_state(p, s, f));
        }
    }
}

TEST_CASE("distinguish on the running example") {
    Plts p = parse_plts(kE1);
    CHECK_FALSE(distinguish(p, p.state("s"), p.state("t")).has_value());

    auto uv = distinguish(p, p.state("u"), p.state("v"));
    REQUIRE(uv.has_value());
    CHECK(to_string(*uv) == "<b>(1*tt)");

    auto st2 = distinguish(p, p.state("s"), p.state("t2"));
    REQUIRE(st2.has_value());
    CHECK(sat_state(p, p.state("s"), *st2));
    CHECK_FALSE(sat_state(p, p.state("t2"), *st2));
    // Shape: a diamond on a over the 1/2-1/2 choice.
    FormulaPtr phi = *st2;
    if (phi->kind == FormulaKind::Neg) phi = phi->lhs;
    REQUIRE(phi->kind == FormulaKind::Diamond);
    CHECK(phi->name == "a");
}

TEST_CASE("distinguishing formulas are sound and complete on random models") {
    testgen::Rng rng(4005);
    for (int round = 0; round < 40; ++round) {
        Plts p = testgen::random_plts(rng);
        Partition classes = bisimilarity(p);
        for (StateId s = 0; s < p.num_states(); ++s)
            for (StateId t = 0; t < p.num_states(); ++t) {
                auto phi = distinguish(p, s, t);
                CHECK(phi.has_value() == !classes.same_block(s, t));
                if (phi) {
                    CHECK(sat_state(p, s, *phi));
                    CHECK_FALSE(sat_state(p, t, *phi));
                    // The emitted formula is valid concrete syntax.
                    CHECK(to_string(hml(to_string(*phi))) == to_string(*phi));
                }
            }
    }
}

TEST_CASE("logically_equivalent matches bisimilarity") {
    testgen::Rng rng(4006);
    for (int round = 0; round < 20; ++round) {
        Plts p = testgen::random_plts(rng);
        Partition classes = bisimilarity(p);
        for (StateId s = 0; s < p.num_states(); ++s)
            for (StateId t = 0; t < p.num_states(); ++t)
                CHECK(logically_equivalent(p, s, t) == classes.same_block(s, t));
    }
}
