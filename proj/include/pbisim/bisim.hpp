#pragma once

#include <cstdint>
#include <optional>
#include <unordered_set>

#include "pbisim/lifting.hpp"
#include "pbisim/plts.hpp"
#include "pbisim/relation.hpp"

namespace pbisim {

// On-the-fly checker for probabilistic bisimilarity and similarity. A
// checker instance accumulates resolved verdicts (refuted pairs and pairs
// proven inside completed runs) and reuses them across queries; distinct
// instances are fully independent.
//
// The search explores the pairs reachable from the query, assumes pairs
// closing a loop to be related, and restarts when an assumption is refuted.
// Refuted pairs persist across restarts, so the number of restarts is
// bounded by the number of state pairs.
class BisimChecker {
  public:
    enum class Mode { Bisimulation, Simulation };

    BisimChecker(const Plts& p, Mode mode);

    bool check(StateId s, StateId t);

    // The witness relation of the last successful Bisimulation-mode check:
    // the visited pairs minus the refuted ones, closed under symmetry. It
    // is a bisimulation containing the query pair.
    std::optional<StateRelation> last_witness() const;

    // How many times the last check restarted on a refuted assumption.
    std::size_t last_restarts() const { return last_restarts_; }

  private:
    std::uint64_t key(StateId s, StateId t) const;
    bool match(StateId s, StateId t);
    bool match_action(StateId s, StateId t, ActionId a);
    bool match_distribution(const Dist& d1, const Dist& d2);
    bool close(StateId s, StateId t);

    const Plts& plts_;
    Mode mode_;
    std::unordered_set<std::uint64_t> not_bisim_;  // persistent across runs
    std::unordered_set<std::uint64_t> proven_;     // persistent across runs
    std::unordered_set<std::uint64_t> visited_;    // per run
    std::unordered_set<std::uint64_t> assumed_;    // per run
    bool have_witness_ = false;
    std::size_t last_restarts_ = 0;
};

// One-shot queries (fresh checker per call).
std::pair<bool, std::optional<StateRelation>> bisim(const Plts& p, StateId s, StateId t);
bool similar(const Plts& p, StateId s, StateId t);

// The approximant relation: n rounds of refinement starting from the full
// relation. Every approximant is an equivalence, so the lifted-relation
// test uses class masses, independent of the flow solver.
StateRelation approximant(const Plts& p, std::size_t n);
Partition approximant_partition(const Plts& p, std::size_t n);

// Fixpoint of the approximant refinement; the result is the bisimilarity
// quotient. Also reports how many rounds were needed to stabilise.
Partition bisimilarity(const Plts& p);
Partition bisimilarity(const Plts& p, std::size_t& rounds);

// Transfer-condition replay: true iff r (together with its inverse) is a
// probabilistic bisimulation on p.
bool is_bisimulation(const Plts& p, const StateRelation& r);

}  // namespace pbisim
