#pragma once

#include <optional>

#include "pbisim/formula.hpp"
#include "pbisim/plts.hpp"

namespace pbisim {

// Satisfaction for the adequate logic (Top, conjunction, negation, diamond
// with one probabilistic-choice group). Throws ModelError on formulas
// outside that fragment. Modalities over actions the model does not know
// evaluate to false.
bool sat_state(const Plts& p, StateId s, const FormulaPtr& f);

// Distribution satisfaction: d satisfies a choice group when d splits into
// the prescribed convex combination with every component supported on
// states satisfying its formula. Decided as a transportation feasibility
// problem (never by enumerating decompositions).
bool sat_dist(const Plts& p, const Dist& d, const DistFormula& psi);

// A formula satisfied by s but not by t, when the two states are not
// bisimilar; nullopt when they are. The construction follows the level of
// the first separating approximant: pick the lowest level, prefer the
// unmatched transition on s's side (wrapping the symmetric case in a
// negation), and conjoin recursive distinguishing formulas for the
// successor states.
std::optional<FormulaPtr> distinguish(const Plts& p, StateId s, StateId t);

// Adequacy: two states satisfy the same formulas exactly when bisimilar.
bool logically_equivalent(const Plts& p, StateId s, StateId t);

}  // namespace pbisim
