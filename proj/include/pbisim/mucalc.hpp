#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "pbisim/formula.hpp"
#include "pbisim/plts.hpp"
#include "pbisim/relation.hpp"

namespace pbisim {

// Subset of the dense state indices of one Plts, packed into 64-bit words.
class StateSet {
  public:
    StateSet() = default;
    explicit StateSet(std::size_t n) : n_(n), bits_((n + 63) / 64, 0) {}
    static StateSet full(std::size_t n);

    std::size_t universe_size() const { return n_; }
    bool test(StateId s) const { return (bits_[s >> 6] >> (s & 63)) & 1; }
    void set(StateId s) { bits_[s >> 6] |= std::uint64_t(1) << (s & 63); }
    void reset(StateId s) { bits_[s >> 6] &= ~(std::uint64_t(1) << (s & 63)); }

    std::size_t count() const;
    std::vector<StateId> elements() const;

    StateSet operator&(const StateSet& o) const;
    StateSet operator|(const StateSet& o) const;
    bool is_subset_of(const StateSet& o) const;
    bool operator==(const StateSet& o) const { return n_ == o.n_ && bits_ == o.bits_; }
    bool operator!=(const StateSet& o) const { return !(*this == o); }
    bool operator<(const StateSet& o) const { return bits_ < o.bits_; }

    std::size_t hash() const;
    const std::vector<std::uint64_t>& words() const { return bits_; }

  private:
    std::size_t n_ = 0;
    std::vector<std::uint64_t> bits_;
};

// Environments bind variables to state sets.
using Environment = std::map<std::string, StateSet>;

class BudgetError : public std::runtime_error {
  public:
    explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

// Evaluator for positive-normal-form formulas over a fixed finitary pLTS.
// Fixed points iterate from the appropriate lattice extreme. Three layers
// of memoisation keep repeated inner iterations under nested fixed points
// cheap: state sets per (subformula, bindings of its free variables),
// free-variable sets per shared node, and transportation feasibility per
// (choice group, distribution, permitted-cell mask); the environment only
// reaches the flow problem through that mask. Memo keys hold node
// addresses, so the evaluator retains every root it is given.
class MuEvaluator {
  public:
    explicit MuEvaluator(const Plts& p);

    StateSet eval(const FormulaPtr& f, const Environment& env);
    bool eval_dist(const Dist& d, const DistFormula& psi, const Environment& env);

  private:
    StateSet eval_node(const FormulaPtr& f, const Environment& env);
    bool eval_dist_node(const Dist& d, const DistFormula& psi, const Environment& env);
    bool group_feasible(const Dist& d, const DistFormula::Group& group, const Environment& env);

    // Binding of the node's free variables, flattened to set words.
    struct Key {
        const void* node;
        std::vector<std::uint64_t> binding;
        bool operator==(const Key& o) const = default;
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const;
    };

    const std::vector<std::string>& free_vars_of(const Formula* f);
    Key key_for(const void* node, const std::vector<std::string>& fvs,
                const Environment& env) const;

    const Plts& plts_;
    std::vector<std::vector<const Dist*>> der_ptrs_;  // [s * num_actions + a]
    std::unordered_map<std::string, std::optional<ActionId>> action_cache_;
    std::unordered_map<const Formula*, std::vector<std::string>> fv_cache_;
    std::unordered_map<const DistFormula*, std::vector<std::string>> dist_fv_cache_;
    std::unordered_map<Key, StateSet, KeyHash> memo_;

    struct FlowKey {
        const void* group;
        const void* dist;
        std::vector<std::uint64_t> allowed;  // m*k bit matrix
        bool operator==(const FlowKey& o) const = default;
    };
    struct FlowKeyHash {
        std::size_t operator()(const FlowKey& k) const;
    };
    std::unordered_map<FlowKey, bool, FlowKeyHash> flow_memo_;

    std::vector<FormulaPtr> roots_;
    std::vector<std::unique_ptr<DistFormula>> dist_roots_;
    std::vector<std::unique_ptr<Dist>> dist_copies_;
};

// One-shot evaluation (fresh evaluator).
StateSet mu_eval(const Plts& p, const FormulaPtr& f, const Environment& env);
bool mu_eval_dist(const Plts& p, const Dist& d, const DistFormula& psi, const Environment& env);

// --- equation systems -------------------------------------------------------

struct Equation {
    std::string var;
    FormulaPtr rhs;
};
using EquationSystem = std::vector<Equation>;

// The equation variable standing for a state.
std::string char_var(const Plts& p, StateId s);

// One equation per state: a diamond conjunct per transition plus a box
// conjunct per action over the distribution variables
// X_Delta = (+)-combination of Delta-weighted state variables.
EquationSystem characteristic_system(const Plts& p);

// Largest solution of a closed system, by descending simultaneous
// iteration from the all-states environment.
Environment greatest_solution(const Plts& p, const EquationSystem& e);

// Folds a closed system into a single closed formula whose meaning is the
// greatest solution's value for `var`: wrap the last equation in a greatest
// fixed point, substitute it upwards, drop it, repeat. Substitution applies
// the trivial rewrites (Top & phi, Bot | phi, vacuous nu). Throws
// BudgetError when intermediate formulas exceed `node_budget` tree nodes.
FormulaPtr char_formula(const EquationSystem& e, const std::string& var,
                        unsigned long long node_budget = 1000000);

// Membership of t in the characteristic formula of s; equals bisimilarity
// of s and t.
bool characteristic_check(const Plts& p, StateId s, StateId t,
                          unsigned long long node_budget = 1000000);

std::string system_to_string(const EquationSystem& e);

}  // namespace pbisim
