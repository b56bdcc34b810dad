#pragma once

// Deterministic random instances shared by the property tests and the
// acceptance suite.

#include <random>
#include <vector>

#include "pbisim/plts.hpp"
#include "pbisim/relation.hpp"

namespace pbisim::testgen {

using Rng = std::mt19937_64;

inline int pick(Rng& rng, int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(rng() % static_cast<unsigned>(hi - lo + 1));
}

// Random distribution over `universe` states: a denominator d <= max_den is
// split into a random composition over a random support.
inline Dist random_dist(Rng& rng, std::size_t universe, int max_den = 8) {
    int d = pick(rng, 1, max_den);
    int support = pick(rng, 1, std::min<int>(d, static_cast<int>(universe)));
    std::vector<StateId> states(universe);
    for (std::size_t i = 0; i < universe; ++i) states[i] = static_cast<StateId>(i);
    std::shuffle(states.begin(), states.end(), rng);

    // Composition of d into `support` positive parts.
    std::vector<int> parts(support, 1);
    for (int rest = d - support; rest > 0; --rest) ++parts[pick(rng, 0, support - 1)];

    std::vector<Dist::Entry> entries;
    for (int i = 0; i < support; ++i) entries.emplace_back(states[i], make_rat(parts[i], d));
    return Dist::from_entries(std::move(entries));
}

struct PltsParams {
    int max_states = 8;
    int max_actions = 3;
    int max_trans_per_state_action = 3;
    int max_den = 8;
    bool point_dists_only = false;
};

inline Plts random_plts(Rng& rng, const PltsParams& params = {}) {
    Plts p;
    int n = pick(rng, 1, params.max_states);
    int na = pick(rng, 1, params.max_actions);
    for (int i = 0; i < n; ++i) p.add_state("s" + std::to_string(i));
    for (int a = 0; a < na; ++a) p.add_action("a" + std::to_string(a));
    for (StateId s = 0; s < static_cast<StateId>(n); ++s)
        for (ActionId a = 0; a < static_cast<ActionId>(na); ++a) {
            int k = pick(rng, 0, params.max_trans_per_state_action);
            for (int i = 0; i < k; ++i) {
                Dist d = params.point_dists_only
                             ? point_dist(static_cast<StateId>(pick(rng, 0, n - 1)))
                             : random_dist(rng, n, params.max_den);
                try {
                    p.add_transition(s, a, std::move(d));
                } catch (const ModelError&) {
                    // duplicate draw; skip
                }
            }
        }
    return p;
}

inline StateRelation random_relation(Rng& rng, std::size_t n, int density_percent = 50) {
    StateRelation r(n);
    for (StateId s = 0; s < n; ++s)
        for (StateId t = 0; t < n; ++t)
            if (pick(rng, 1, 100) <= density_percent) r.add(s, t);
    return r;
}

inline StateRelation random_equivalence(Rng& rng, std::size_t n) {
    int classes = pick(rng, 1, static_cast<int>(n));
    std::vector<int> class_of(n);
    for (std::size_t i = 0; i < n; ++i) class_of[i] = pick(rng, 0, classes - 1);
    StateRelation r(n);
    for (StateId s = 0; s < n; ++s)
        for (StateId t = 0; t < n; ++t)
            if (class_of[s] == class_of[t]) r.add(s, t);
    return r;
}

}  // namespace pbisim::testgen
