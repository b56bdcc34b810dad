#include "pbisim/metric.hpp"

#include <algorithm>

namespace pbisim {

PseudoMetric PseudoMetric::bottom(std::size_t n) {
    PseudoMetric m(n);
    for (StateId s = 0; s < n; ++s)
        for (StateId t = 0; t < n; ++t)
            if (s != t) m.d_[std::size_t(s) * n + t] = Rat(1);
    return m;
}

void PseudoMetric::set(StateId s, StateId t, Rat v) {
    d_[std::size_t(s) * n_ + t] = v;
    d_[std::size_t(t) * n_ + s] = std::move(v);
}

bool PseudoMetric::check_invariants() const {
    for (StateId s = 0; s < n_; ++s)
        if (at(s, s) != 0) return false;
    for (StateId s = 0; s < n_; ++s)
        for (StateId t = 0; t < n_; ++t) {
            if (at(s, t) != at(t, s)) return false;
            if (at(s, t) < 0 || at(s, t) > 1) return false;
        }
    for (StateId s = 0; s < n_; ++s)
        for (StateId t = 0; t < n_; ++t)
            for (StateId u = 0; u < n_; ++u)
                if (at(s, t) > at(s, u) + at(u, t)) return false;
    return true;
}

bool metric_leq(const PseudoMetric& m1, const PseudoMetric& m2) {
    if (m1.universe_size() != m2.universe_size()) return false;
    for (StateId s = 0; s < m1.universe_size(); ++s)
        for (StateId t = 0; t < m1.universe_size(); ++t)
            if (m1.at(s, t) < m2.at(s, t)) return false;
    return true;
}

namespace {

std::vector<StateId> support_union(const Dist& d1, const Dist& d2) {
    std::vector<StateId> states;
    for (const auto& [s, p] : d1.entries()) states.push_back(s);
    for (const auto& [t, p] : d2.entries()) states.push_back(t);
    std::sort(states.begin(), states.end());
    states.erase(std::unique(states.begin(), states.end()), states.end());
    return states;
}

TransportPlan solve_transport(const PseudoMetric& m, const Dist& d1, const Dist& d2,
                              const std::vector<StateId>& states) {
    std::vector<Rat> mu, nu;
    for (StateId s : states) {
        mu.push_back(d1.at(s));
        nu.push_back(d2.at(s));
    }
    std::vector<std::vector<Rat>> cost(states.size(), std::vector<Rat>(states.size()));
    for (std::size_t i = 0; i < states.size(); ++i)
        for (std::size_t j = 0; j < states.size(); ++j) cost[i][j] = m.at(states[i], states[j]);
    return min_cost_transport(mu, nu, cost);
}

}  // namespace

Rat kantorovich(const PseudoMetric& m, const Dist& d1, const Dist& d2) {
    if (d1 == d2) return Rat(0);  // identity plan, zero diagonal
    auto states = support_union(d1, d2);
    return solve_transport(m, d1, d2, states).cost;
}

KantorovichDual kantorovich_dual(const PseudoMetric& m, const Dist& d1, const Dist& d2) {
    auto states = support_union(d1, d2);
    TransportPlan plan = solve_transport(m, d1, d2, states);

    // Lipschitz regularisation of the bipartite duals: f(s) = min over t of
    // m(s,t) - beta(t) is feasible for the one-variable form and attains the
    // same objective; shifting by its minimum lands every value in [0,1].
    std::size_t k = states.size();
    std::vector<Rat> f(k);
    for (std::size_t i = 0; i < k; ++i) {
        f[i] = m.at(states[i], states[0]) - plan.dual_right[0];
        for (std::size_t j = 1; j < k; ++j) {
            Rat candidate = m.at(states[i], states[j]) - plan.dual_right[j];
            if (candidate < f[i]) f[i] = std::move(candidate);
        }
    }
    Rat shift = *std::min_element(f.begin(), f.end());

    KantorovichDual result;
    result.value = plan.cost;
    for (std::size_t i = 0; i < k; ++i) result.potentials.emplace_back(states[i], f[i] - shift);
    return result;
}

PseudoMetric metric_from_relation(const StateRelation& r) {
    if (!r.is_equivalence()) throw ModelError("metric_from_relation requires an equivalence");
    std::size_t n = r.universe_size();
    PseudoMetric m(n);
    for (StateId s = 0; s < n; ++s)
        for (StateId t = 0; t < n; ++t)
            if (!r.contains(s, t)) m.set(s, t, Rat(1));
    return m;
}

Rat hausdorff(const PseudoMetric& m, const std::vector<Dist>& xs, const std::vector<Dist>& ys) {
    auto directed = [&](const std::vector<Dist>& from, const std::vector<Dist>& to) {
        Rat sup(0);  // sup of an empty set is 0
        for (const Dist& x : from) {
            Rat inf(1);  // inf of an empty set is 1
            bool first = true;
            for (const Dist& y : to) {
                Rat d = kantorovich(m, x, y);
                if (first || d < inf) inf = d;
                first = false;
            }
            sup = std::max(sup, inf);
        }
        return sup;
    };
    return std::max(directed(xs, ys), directed(ys, xs));
}

PseudoMetric metric_step(const Plts& p, const PseudoMetric& m) {
    std::size_t n = p.num_states();
    PseudoMetric next(n);
    for (StateId s = 0; s < n; ++s)
        for (StateId t = s + 1; t < n; ++t) {
            Rat worst(0);
            for (ActionId a = 0; a < p.num_actions(); ++a)
                worst = std::max(worst, hausdorff(m, p.der(s, a), p.der(t, a)));
            next.set(s, t, worst);
        }
    return next;
}

bool is_state_metric(const Plts& p, const PseudoMetric& m) {
    return metric_leq(m, metric_step(p, m));
}

PseudoMetric iterate_metric(const Plts& p, std::size_t k) {
    PseudoMetric m = PseudoMetric::top(p.num_states());
    for (std::size_t i = 0; i < k; ++i) m = metric_step(p, m);
    return m;
}

StateRelation kernel(const PseudoMetric& m) {
    std::size_t n = m.universe_size();
    StateRelation r(n);
    for (StateId s = 0; s < n; ++s)
        for (StateId t = 0; t < n; ++t)
            if (m.at(s, t) == 0) r.add(s, t);
    return r;
}

StabilisedMetric stabilise_metric(const Plts& p) {
    PseudoMetric m = PseudoMetric::top(p.num_states());
    StateRelation ker = kernel(m);
    std::size_t index = 0;
    while (true) {
        PseudoMetric next = metric_step(p, m);
        StateRelation next_ker = kernel(next);
        if (next_ker == ker) return {std::move(next), index};
        m = std::move(next);
        ker = std::move(next_ker);
        ++index;
    }
}

std::string metric_to_csv(const Plts& p, const PseudoMetric& m) {
    std::string out = "state";
    for (StateId t = 0; t < p.num_states(); ++t) out += "," + p.state_name(t);
    out += "\n";
    for (StateId s = 0; s < p.num_states(); ++s) {
        out += p.state_name(s);
        for (StateId t = 0; t < p.num_states(); ++t) out += "," + rat_to_string(m.at(s, t));
        out += "\n";
    }
    return out;
}

}  // namespace pbisim
