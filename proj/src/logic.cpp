#include "pbisim/logic.hpp"

#include <map>
#include <set>
#include <unordered_map>

#include "pbisim/bisim.hpp"
#include "pbisim/flow.hpp"

namespace pbisim {

namespace {

class HmlChecker {
  public:
    explicit HmlChecker(const Plts& p) : plts_(p) {}

    bool sat(StateId s, const FormulaPtr& f) {
        auto key = std::make_pair(f.get(), s);
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
        bool result;
        switch (f->kind) {
            case FormulaKind::Top:
                result = true;
                break;
            case FormulaKind::And:
                result = sat(s, f->lhs) && sat(s, f->rhs);
                break;
            case FormulaKind::Neg:
                result = !sat(s, f->lhs);
                break;
            case FormulaKind::Diamond: {
                result = false;
                if (auto a = plts_.find_action(f->name)) {
                    for (const Dist& d : plts_.der(s, *a))
                        if (dist_sat(d, f->dist)) {
                            result = true;
                            break;
                        }
                }
                break;
            }
            default:
                throw ModelError("formula uses a connective outside the adequate logic");
        }
        memo_.emplace(key, result);
        return result;
    }

    bool dist_sat(const Dist& d, const DistFormula& psi) {
        if (psi.groups.size() != 1)
            throw ModelError("distribution disjunction is outside the adequate logic");
        const auto& group = psi.groups[0];
        std::vector<Rat> supply, demand;
        for (const auto& [s, p] : d.entries()) supply.push_back(p);
        for (const auto& part : group) demand.push_back(part.p);
        std::vector<std::vector<bool>> allowed(d.support_size(),
                                               std::vector<bool>(group.size()));
        for (std::size_t i = 0; i < d.support_size(); ++i)
            for (std::size_t j = 0; j < group.size(); ++j)
                allowed[i][j] = sat(d.entries()[i].first, group[j].phi);
        return allocation_feasible(supply, demand, allowed);
    }

  private:
    const Plts& plts_;
    std::map<std::pair<const Formula*, StateId>, bool> memo_;
};

}  // namespace

bool sat_state(const Plts& p, StateId s, const FormulaPtr& f) {
    if (s >= p.num_states()) throw ModelError("state index out of range");
    return HmlChecker(p).sat(s, f);
}

bool sat_dist(const Plts& p, const Dist& d, const DistFormula& psi) {
    return HmlChecker(p).dist_sat(d, psi);
}

namespace {

// Builds distinguishing formulas from the approximant levels: levels_[k]
// is the k-th approximant partition, with the last one stable.
class Distinguisher {
  public:
    explicit Distinguisher(const Plts& p) : plts_(p) {
        levels_.push_back(approximant_partition(p, 0));
        while (true) {
            Partition next = approximant_partition(p, levels_.size());
            if (next == levels_.back()) break;
            levels_.push_back(std::move(next));
        }
    }

    bool separated(StateId s, StateId t) const { return !levels_.back().same_block(s, t); }

    // Least level at which s and t fall apart (>= 1; only called on
    // separated pairs).
    std::size_t least_level(StateId s, StateId t) const {
        for (std::size_t k = 0; k < levels_.size(); ++k)
            if (!levels_[k].same_block(s, t)) return k;
        throw ModelError("states are not separated by any approximant");
    }

    FormulaPtr build(StateId s, StateId t) {
        std::size_t n = least_level(s, t);
        if (auto f = build_positive(s, t, n)) return *f;
        // The unmatched transition lives on t's side; negate its witness.
        auto g = build_positive(t, s, n);
        if (!g) throw ModelError("no separating transition found at the separating level");
        return f_neg(*g);
    }

  private:
    // Lifted-relation test against an approximant level via class masses.
    bool lifts_at(const Dist& d1, const Dist& d2, std::size_t level) const {
        const Partition& part = levels_[std::min(level, levels_.size() - 1)];
        std::vector<Rat> mass(part.blocks().size(), Rat(0));
        for (const auto& [u, q] : d1.entries()) mass[part.block_of(u)] += q;
        for (const auto& [u, q] : d2.entries()) mass[part.block_of(u)] -= q;
        for (const Rat& v : mass)
            if (v != 0) return false;
        return true;
    }

    // A formula satisfied by s, refuted by t, of modal depth n, built from
    // a transition of s that no transition of t matches at level n-1.
    std::optional<FormulaPtr> build_positive(StateId s, StateId t, std::size_t n) {
        for (ActionId a = 0; a < plts_.num_actions(); ++a) {
            for (const Dist& delta : plts_.der(s, a)) {
                bool unmatched = true;
                for (const Dist& theta : plts_.der(t, a))
                    if (lifts_at(delta, theta, n - 1)) {
                        unmatched = false;
                        break;
                    }
                if (!unmatched) continue;

                // Successor states of t reachable under a; conjuncts peel
                // away the ones the approximant separates from each s'.
                std::set<StateId> successors;
                for (const Dist& theta : plts_.der(t, a))
                    for (const auto& [u, q] : theta.entries()) successors.insert(u);

                DistFormula::Group group;
                for (const auto& [sprime, weight] : delta.entries()) {
                    std::vector<FormulaPtr> conjuncts;
                    std::set<std::string> seen;
                    for (StateId u : successors) {
                        std::size_t level = std::min(n - 1, levels_.size() - 1);
                        if (levels_[level].same_block(sprime, u)) continue;
                        FormulaPtr sep = build(sprime, u);
                        if (seen.insert(to_string(sep)).second) conjuncts.push_back(sep);
                    }
                    group.push_back({weight, f_conj(conjuncts)});
                }
                return f_diamond(plts_.action_name(a), DistFormula{{group}});
            }
        }
        return std::nullopt;
    }

    const Plts& plts_;
    std::vector<Partition> levels_;
};

}  // namespace

std::optional<FormulaPtr> distinguish(const Plts& p, StateId s, StateId t) {
    if (s >= p.num_states() || t >= p.num_states()) throw ModelError("state index out of range");
    Distinguisher d(p);
    if (!d.separated(s, t)) return std::nullopt;
    return d.build(s, t);
}

bool logically_equivalent(const Plts& p, StateId s, StateId t) {
    return bisim(p, s, t).first;
}

}  // namespace pbisim
