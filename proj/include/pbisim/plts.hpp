#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pbisim/rational.hpp"

namespace pbisim {

// Dense indices into the owning Plts's state/action tables.
using StateId = std::uint32_t;
using ActionId = std::uint32_t;

class ModelError : public std::runtime_error {
  public:
    explicit ModelError(const std::string& what) : std::runtime_error(what) {}
};

// Finite-support probability distribution over states. Canonical form:
// support sorted by state index, every stored weight strictly positive,
// weights summing exactly to 1. Structural equality therefore coincides
// with mathematical equality.
class Dist {
  public:
    using Entry = std::pair<StateId, Rat>;

    Dist() = default;

    // Validates, drops zero entries, sorts, and checks the sum is exactly 1.
    static Dist from_entries(std::vector<Entry> entries);

    const std::vector<Entry>& entries() const { return entries_; }
    std::size_t support_size() const { return entries_.size(); }

    // Probability of s (0 when s is outside the support).
    Rat at(StateId s) const;
    bool in_support(StateId s) const;

    bool operator==(const Dist& other) const { return entries_ == other.entries_; }
    bool operator!=(const Dist& other) const { return !(*this == other); }
    bool operator<(const Dist& other) const { return entries_ < other.entries_; }

  private:
    std::vector<Entry> entries_;
};

// Distribution over pairs of states, canonical like Dist. Only used by the
// product construction.
class PairDist {
  public:
    using Key = std::pair<StateId, StateId>;
    using Entry = std::pair<Key, Rat>;

    static PairDist from_entries(std::vector<Entry> entries);

    const std::vector<Entry>& entries() const { return entries_; }
    Rat at(StateId s, StateId t) const;

    Dist left_marginal() const;
    Dist right_marginal() const;

  private:
    std::vector<Entry> entries_;
};

struct Transition {
    ActionId action;
    Dist target;
};

// Finitary probabilistic labelled transition system: finite states and
// actions, finitely many transitions per state. Immutable after
// construction; all query methods are const and safe to share.
class Plts {
  public:
    std::size_t num_states() const { return state_names_.size(); }
    std::size_t num_actions() const { return action_names_.size(); }

    const std::string& state_name(StateId s) const { return state_names_.at(s); }
    const std::string& action_name(ActionId a) const { return action_names_.at(a); }

    std::optional<StateId> find_state(const std::string& name) const;
    std::optional<ActionId> find_action(const std::string& name) const;

    // Throws ModelError with the offending name on lookup failure.
    StateId state(const std::string& name) const;
    ActionId action(const std::string& name) const;

    // Transitions of s in model (file) order.
    const std::vector<Transition>& transitions(StateId s) const { return trans_.at(s); }

    // der(s, a): the successor distributions of s under a, in model order.
    std::vector<Dist> der(StateId s, ActionId a) const;
    bool enables(StateId s, ActionId a) const;

    // Builder interface used by the parser and by tests.
    StateId add_state(const std::string& name);
    ActionId add_action(const std::string& name);
    // Rejects duplicate (source, action, distribution) triples.
    void add_transition(StateId source, ActionId action, Dist target);

  private:
    std::vector<std::string> state_names_;
    std::vector<std::string> action_names_;
    std::vector<std::vector<Transition>> trans_;
};

// --- core distribution operations -----------------------------------------

// The point distribution on s.
Dist point_dist(StateId s);

// Pointwise weighted sum of distributions; the weights must be nonnegative
// and sum exactly to 1. Throws ModelError otherwise.
Dist convex_sum(const std::vector<std::pair<Rat, Dist>>& parts);

// Product distribution: (d1 x d2)(s, t) = d1(s) * d2(t).
PairDist dist_product(const Dist& d1, const Dist& d2);

std::string dist_to_string(const Plts& p, const Dist& d);

// --- text format -----------------------------------------------------------

class ParseError : public std::runtime_error {
  public:
    ParseError(std::size_t line, std::size_t column, const std::string& message);
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

  private:
    std::size_t line_;
    std::size_t column_;
};

// Parses the line-oriented pLTS text format:
//
//   # comment
//   states: s t u v
//   <state> <action> -> <p1> <state1>, <p2> <state2>, ...
//
// Probabilities are p/q fractions or finite decimals; states mentioned only
// as targets are registered automatically. Each distribution must sum
// exactly to 1.
Plts parse_plts(const std::string& text);

// Prints a model that parse_plts maps back to a structurally identical Plts.
std::string print_plts(const Plts& p);

}  // namespace pbisim
