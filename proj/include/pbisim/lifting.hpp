#pragma once

#include <optional>
#include <tuple>
#include <vector>

#include "pbisim/flow.hpp"
#include "pbisim/plts.hpp"
#include "pbisim/relation.hpp"

namespace pbisim {

// Joint mass assignment whose row sums are d1, column sums d2, and whose
// support lies inside the relation it was computed for. Certifies the
// lifted relation.
struct WeightFunction {
    struct Entry {
        StateId s;
        StateId t;
        Rat weight;  // strictly positive
    };
    std::vector<Entry> entries;

    Rat at(StateId s, StateId t) const;
};

// Decomposition of a lifted pair into matched point distributions:
// d1 = sum p_i * point(s_i), d2 = sum p_i * point(t_i), each (s_i, t_i)
// related.
struct LiftWitness {
    struct Triple {
        Rat p;
        StateId s;
        StateId t;
    };
    std::vector<Triple> decomposition;
};

namespace lifting {

// Whether d1 R^ d2, decided by a maximum-flow computation on the lifting
// network: the lifted relation holds exactly when the flow value is 1.
bool check(const Dist& d1, const Dist& d2, const StateRelation& r);

// As check, additionally extracting the weight function from the middle
// edges of a maximum flow. nullopt exactly when the lifting fails.
std::optional<WeightFunction> weight_function(const Dist& d1, const Dist& d2,
                                              const StateRelation& r);

// One decomposition triple per positive weight entry.
LiftWitness decompose(const WeightFunction& w);

// Class-mass characterisation, valid only for equivalence relations:
// d1 R^ d2 iff d1(C) == d2(C) for every equivalence class C. Throws
// ModelError when r is not an equivalence (membership is recomputed, not
// trusted from the caller).
bool check_equiv_classes(const Dist& d1, const Dist& d2, const StateRelation& r);

// Given (sum p_i * parts_i) R^ theta, splits theta into components
// theta_i with parts_i R^ theta_i and theta == sum p_i * theta_i.
// nullopt when the combined lifting does not hold. Part weights must be
// strictly positive (a zero-weight part is unconstrained by the premise).
std::optional<std::vector<Dist>> left_decompose(const std::vector<std::pair<Rat, Dist>>& parts,
                                                const Dist& theta, const StateRelation& r);

}  // namespace lifting
}  // namespace pbisim
