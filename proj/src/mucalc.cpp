#include "pbisim/mucalc.hpp"

#include <algorithm>
#include <bit>

#include "pbisim/flow.hpp"

namespace pbisim {

StateSet StateSet::full(std::size_t n) {
    StateSet s(n);
    for (std::size_t i = 0; i < s.bits_.size(); ++i) s.bits_[i] = ~std::uint64_t(0);
    if (n % 64) s.bits_.back() = (std::uint64_t(1) << (n % 64)) - 1;
    return s;
}

std::size_t StateSet::count() const {
    std::size_t c = 0;
    for (std::uint64_t w : bits_) c += std::popcount(w);
    return c;
}

std::vector<StateId> StateSet::elements() const {
    std::vector<StateId> out;
    for (StateId s = 0; s < n_; ++s)
        if (test(s)) out.push_back(s);
    return out;
}

StateSet StateSet::operator&(const StateSet& o) const {
    StateSet r(n_);
    for (std::size_t i = 0; i < bits_.size(); ++i) r.bits_[i] = bits_[i] & o.bits_[i];
    return r;
}

StateSet StateSet::operator|(const StateSet& o) const {
    StateSet r(n_);
    for (std::size_t i = 0; i < bits_.size(); ++i) r.bits_[i] = bits_[i] | o.bits_[i];
    return r;
}

bool StateSet::is_subset_of(const StateSet& o) const {
    for (std::size_t i = 0; i < bits_.size(); ++i)
        if (bits_[i] & ~o.bits_[i]) return false;
    return true;
}

std::size_t StateSet::hash() const {
    std::size_t h = n_;
    for (std::uint64_t w : bits_) h = h * 1000003u ^ static_cast<std::size_t>(w);
    return h;
}

MuEvaluator::MuEvaluator(const Plts& p) : plts_(p) {
    der_ptrs_.resize(p.num_states() * p.num_actions());
    for (StateId s = 0; s < p.num_states(); ++s)
        for (const Transition& t : p.transitions(s))
            der_ptrs_[s * p.num_actions() + t.action].push_back(&t.target);
}

std::size_t MuEvaluator::KeyHash::operator()(const Key& k) const {
    std::size_t h = std::hash<const void*>()(k.node);
    for (std::uint64_t w : k.binding) h = h * 2654435761u ^ static_cast<std::size_t>(w);
    return h;
}

std::size_t MuEvaluator::FlowKeyHash::operator()(const FlowKey& k) const {
    std::size_t h = std::hash<const void*>()(k.group) * 31 ^ std::hash<const void*>()(k.dist);
    for (std::uint64_t w : k.allowed) h = h * 2654435761u ^ static_cast<std::size_t>(w);
    return h;
}

const std::vector<std::string>& MuEvaluator::free_vars_of(const Formula* f) {
    auto it = fv_cache_.find(f);
    if (it != fv_cache_.end()) return it->second;

    std::set<std::string> acc;
    auto merge = [&](const std::vector<std::string>& sub) { acc.insert(sub.begin(), sub.end()); };
    switch (f->kind) {
        case FormulaKind::Top:
        case FormulaKind::Bot:
            break;
        case FormulaKind::Var:
            acc.insert(f->name);
            break;
        case FormulaKind::Neg:
            merge(free_vars_of(f->lhs.get()));
            break;
        case FormulaKind::And:
        case FormulaKind::Or:
            merge(free_vars_of(f->lhs.get()));
            merge(free_vars_of(f->rhs.get()));
            break;
        case FormulaKind::Diamond:
        case FormulaKind::Box:
            for (const auto& group : f->dist.groups)
                for (const auto& part : group) merge(free_vars_of(part.phi.get()));
            break;
        case FormulaKind::Mu:
        case FormulaKind::Nu:
            merge(free_vars_of(f->lhs.get()));
            acc.erase(f->name);
            break;
    }
    return fv_cache_.emplace(f, std::vector<std::string>(acc.begin(), acc.end())).first->second;
}

MuEvaluator::Key MuEvaluator::key_for(const void* node, const std::vector<std::string>& fvs,
                                      const Environment& env) const {
    Key key{node, {}};
    for (const auto& v : fvs) {
        auto it = env.find(v);
        if (it == env.end()) throw ModelError("unbound variable '" + v + "'");
        const auto& words = it->second.words();
        key.binding.insert(key.binding.end(), words.begin(), words.end());
    }
    return key;
}

StateSet MuEvaluator::eval(const FormulaPtr& f, const Environment& env) {
    roots_.push_back(f);  // pin node addresses used as memo keys
    return eval_node(f, env);
}

bool MuEvaluator::eval_dist(const Dist& d, const DistFormula& psi, const Environment& env) {
    dist_roots_.push_back(std::make_unique<DistFormula>(psi));
    dist_copies_.push_back(std::make_unique<Dist>(d));
    return eval_dist_node(*dist_copies_.back(), *dist_roots_.back(), env);
}

StateSet MuEvaluator::eval_node(const FormulaPtr& f, const Environment& env) {
    std::size_t n = plts_.num_states();
    Key key = key_for(f.get(), free_vars_of(f.get()), env);
    auto cached = memo_.find(key);
    if (cached != memo_.end()) return cached->second;

    StateSet result(n);
    switch (f->kind) {
        case FormulaKind::Top:
            result = StateSet::full(n);
            break;
        case FormulaKind::Bot:
            break;
        case FormulaKind::Neg:
            throw ModelError("negation is outside the positive-normal-form mu-calculus");
        case FormulaKind::Var:
            result = env.at(f->name);
            break;
        case FormulaKind::And:
            result = eval_node(f->lhs, env) & eval_node(f->rhs, env);
            break;
        case FormulaKind::Or:
            result = eval_node(f->lhs, env) | eval_node(f->rhs, env);
            break;
        case FormulaKind::Diamond: {
            auto cached_action = action_cache_.find(f->name);
            if (cached_action == action_cache_.end())
                cached_action = action_cache_.emplace(f->name, plts_.find_action(f->name)).first;
            if (auto a = cached_action->second) {
                for (StateId s = 0; s < n; ++s)
                    for (const Dist* d : der_ptrs_[s * plts_.num_actions() + *a])
                        if (eval_dist_node(*d, f->dist, env)) {
                            result.set(s);
                            break;
                        }
            }
            break;
        }
        case FormulaKind::Box: {
            auto cached_action = action_cache_.find(f->name);
            if (cached_action == action_cache_.end())
                cached_action = action_cache_.emplace(f->name, plts_.find_action(f->name)).first;
            if (auto a = cached_action->second) {
                for (StateId s = 0; s < n; ++s) {
                    bool all = true;
                    for (const Dist* d : der_ptrs_[s * plts_.num_actions() + *a])
                        if (!eval_dist_node(*d, f->dist, env)) {
                            all = false;
                            break;
                        }
                    if (all) result.set(s);
                }
            } else {
                result = StateSet::full(n);  // vacuous: no transitions to match
            }
            break;
        }
        case FormulaKind::Mu:
        case FormulaKind::Nu: {
            // Knaster-Tarski by iteration from the matching extreme.
            StateSet current = f->kind == FormulaKind::Mu ? StateSet(n) : StateSet::full(n);
            Environment inner = env;
            while (true) {
                inner[f->name] = current;
                StateSet next = eval_node(f->lhs, inner);
                if (next == current) break;
                current = std::move(next);
            }
            result = current;
            break;
        }
    }
    memo_.emplace(std::move(key), result);
    return result;
}

bool MuEvaluator::eval_dist_node(const Dist& d, const DistFormula& psi, const Environment& env) {
    for (const auto& group : psi.groups)
        if (group_feasible(d, group, env)) return true;
    return false;
}

bool MuEvaluator::group_feasible(const Dist& d, const DistFormula::Group& group,
                                 const Environment& env) {
    std::size_t m = d.support_size(), k = group.size();
    FlowKey key{&group, &d, std::vector<std::uint64_t>((m * k + 63) / 64, 0)};
    for (std::size_t j = 0; j < k; ++j) {
        StateSet sat = eval_node(group[j].phi, env);
        for (std::size_t i = 0; i < m; ++i)
            if (sat.test(d.entries()[i].first)) {
                std::size_t bit = i * k + j;
                key.allowed[bit >> 6] |= std::uint64_t(1) << (bit & 63);
            }
    }
    auto cached = flow_memo_.find(key);
    if (cached != flow_memo_.end()) return cached->second;

    std::vector<Rat> supply, demand;
    for (const auto& [s, p] : d.entries()) supply.push_back(p);
    for (const auto& part : group) demand.push_back(part.p);
    std::vector<std::vector<bool>> allowed(m, std::vector<bool>(k));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            std::size_t bit = i * k + j;
            allowed[i][j] = (key.allowed[bit >> 6] >> (bit & 63)) & 1;
        }
    bool result = allocation_feasible(supply, demand, allowed);
    flow_memo_.emplace(std::move(key), result);
    return result;
}

StateSet mu_eval(const Plts& p, const FormulaPtr& f, const Environment& env) {
    return MuEvaluator(p).eval(f, env);
}

bool mu_eval_dist(const Plts& p, const Dist& d, const DistFormula& psi, const Environment& env) {
    return MuEvaluator(p).eval_dist(d, psi, env);
}

// --- equation systems -------------------------------------------------------

std::string char_var(const Plts& p, StateId s) {
    return "X_" + p.state_name(s);
}

EquationSystem characteristic_system(const Plts& p) {
    auto dist_var = [&](const Dist& d) {
        DistFormula::Group group;
        for (const auto& [t, q] : d.entries()) group.push_back({q, f_var(char_var(p, t))});
        return group;
    };

    EquationSystem system;
    for (StateId s = 0; s < p.num_states(); ++s) {
        std::vector<FormulaPtr> conjuncts;
        for (const auto& tr : p.transitions(s))
            conjuncts.push_back(
                f_diamond(p.action_name(tr.action), DistFormula{{dist_var(tr.target)}}));
        for (ActionId a = 0; a < p.num_actions(); ++a) {
            DistFormula alternatives;
            for (const Dist& d : p.der(s, a)) alternatives.groups.push_back(dist_var(d));
            if (alternatives.groups.empty())
                alternatives.groups.push_back({{Rat(1), f_bot()}});  // empty disjunction
            conjuncts.push_back(f_box(p.action_name(a), std::move(alternatives)));
        }
        system.push_back({char_var(p, s), f_conj(conjuncts)});
    }
    return system;
}

namespace {

void require_closed(const EquationSystem& e) {
    std::set<std::string> vars;
    for (const auto& eq : e)
        if (!vars.insert(eq.var).second)
            throw ModelError("duplicate equation variable '" + eq.var + "'");
    for (const auto& eq : e)
        for (const auto& v : free_vars(eq.rhs))
            if (!vars.count(v))
                throw ModelError("equation system is not closed: free variable '" + v + "'");
}

}  // namespace

Environment greatest_solution(const Plts& p, const EquationSystem& e) {
    require_closed(e);
    Environment env;
    for (const auto& eq : e) env[eq.var] = StateSet::full(p.num_states());
    MuEvaluator evaluator(p);
    while (true) {
        Environment next;
        for (const auto& eq : e) next[eq.var] = evaluator.eval(eq.rhs, env);
        if (next == env) return env;
        env = std::move(next);
    }
}

FormulaPtr char_formula(const EquationSystem& e, const std::string& var,
                        unsigned long long node_budget) {
    require_closed(e);
    auto target = std::find_if(e.begin(), e.end(), [&](const Equation& eq) { return eq.var == var; });
    if (target == e.end()) throw ModelError("no equation for variable '" + var + "'");

    // The queried variable moves to the front so it is eliminated last.
    std::vector<Equation> eqs;
    eqs.push_back(*target);
    for (const auto& eq : e)
        if (eq.var != var) eqs.push_back(eq);

    auto check_budget = [&](const FormulaPtr& f) {
        if (node_budget == ~0ull) return;  // unlimited
        if (node_count(f, node_budget + 1) > node_budget)
            throw BudgetError("characteristic formula exceeds the node budget of " +
                              std::to_string(node_budget));
    };

    auto wrap = [](const Equation& eq) {
        auto fv = free_vars(eq.rhs);
        bool self = std::find(fv.begin(), fv.end(), eq.var) != fv.end();
        return self ? f_nu(eq.var, eq.rhs) : eq.rhs;
    };

    while (eqs.size() > 1) {
        FormulaPtr wrapped = wrap(eqs.back());
        std::string name = eqs.back().var;
        eqs.pop_back();
        for (auto& eq : eqs) {
            eq.rhs = substitute(eq.rhs, name, wrapped);
            check_budget(eq.rhs);
        }
    }
    FormulaPtr result = wrap(eqs.front());
    check_budget(result);
    return result;
}

bool characteristic_check(const Plts& p, StateId s, StateId t, unsigned long long node_budget) {
    if (s >= p.num_states() || t >= p.num_states()) throw ModelError("state index out of range");
    FormulaPtr phi = char_formula(characteristic_system(p), char_var(p, s), node_budget);
    return mu_eval(p, phi, {}).test(t);
}

std::string system_to_string(const EquationSystem& e) {
    std::string out;
    for (const auto& eq : e) out += eq.var + " = " + to_string(eq.rhs) + "\n";
    return out;
}

}  // namespace pbisim
