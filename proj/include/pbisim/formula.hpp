#pragma once

#include <memory>
#include <set>
#include <string>
#include <vector>

#include "pbisim/rational.hpp"

namespace pbisim {

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

// Distribution formula: one or more probabilistic-choice groups joined by
// distribution-level disjunction. A group (+)-combines positive weights
// summing to 1. Plain formulas have a single group; the disjunction form
// only arises in mu-calculus mode (it is what box modalities of
// characteristic equations need).
struct DistFormula {
    struct Part {
        Rat p;  // > 0
        FormulaPtr phi;
    };
    using Group = std::vector<Part>;
    std::vector<Group> groups;  // nonempty
};

enum class FormulaKind { Top, Bot, Neg, And, Or, Diamond, Box, Var, Mu, Nu };

// Immutable formula node; trees share subterms freely.
struct Formula {
    FormulaKind kind;
    FormulaPtr lhs;      // Neg/And/Or child, Mu/Nu body
    FormulaPtr rhs;      // And/Or
    std::string name;    // Var/Mu/Nu variable, Diamond/Box action
    DistFormula dist;    // Diamond/Box
};

FormulaPtr f_top();
FormulaPtr f_bot();
FormulaPtr f_neg(FormulaPtr f);
FormulaPtr f_and(FormulaPtr a, FormulaPtr b);
FormulaPtr f_or(FormulaPtr a, FormulaPtr b);
FormulaPtr f_var(std::string name);
FormulaPtr f_mu(std::string var, FormulaPtr body);
FormulaPtr f_nu(std::string var, FormulaPtr body);
// Validates each group: positive weights, exact unit sum.
FormulaPtr f_diamond(std::string action, DistFormula dist);
FormulaPtr f_box(std::string action, DistFormula dist);

// Conjunction of a list, empty list read as Top (Top operands dropped).
FormulaPtr f_conj(const std::vector<FormulaPtr>& fs);

// Which grammar fragment the parser accepts.
//   Hml: tt, &, ~, <a>(...), single-group distribution formulas.
//   Mu:  everything except negation (positive normal form).
enum class LogicMode { Hml, Mu };

class FormulaParseError : public std::runtime_error {
  public:
    FormulaParseError(std::size_t column, const std::string& message)
        : std::runtime_error("column " + std::to_string(column) + ": " + message),
          column_(column) {}
    std::size_t column() const { return column_; }

  private:
    std::size_t column_;
};

// Parses the shared concrete grammar. In Mu mode, bound variables are
// alpha-renamed apart afterwards.
FormulaPtr parse_formula(const std::string& text, LogicMode mode);

// Re-parseable rendering (round-trips through parse_formula).
std::string to_string(const FormulaPtr& f);
std::string to_string(const DistFormula& d);

// Free variables, sorted.
std::vector<std::string> free_vars(const FormulaPtr& f);

// Capture-avoiding substitution of `replacement` for free occurrences of
// `var`. Applies the standard trivial rewrites on rebuilt nodes:
// Top & phi -> phi, Bot | phi -> phi, and nu X.phi -> phi when X is not
// free in phi.
FormulaPtr substitute(const FormulaPtr& f, const std::string& var, const FormulaPtr& replacement);

// Tree size (shared subterms counted once per occurrence), saturating at
// `cap`.
unsigned long long node_count(const FormulaPtr& f, unsigned long long cap);

// Action names mentioned by modalities anywhere in the formula.
std::set<std::string> collect_actions(const FormulaPtr& f);

}  // namespace pbisim
