#include "pbisim/lifting.hpp"

#include <map>

namespace pbisim {

Rat WeightFunction::at(StateId s, StateId t) const {
    for (const auto& e : entries)
        if (e.s == s && e.t == t) return e.weight;
    return Rat(0);
}

namespace lifting {

bool check(const Dist& d1, const Dist& d2, const StateRelation& r) {
    LiftingNetwork net = build_network(d1, d2, r);
    return max_flow(net.graph, net.source, net.sink) == 1;
}

std::optional<WeightFunction> weight_function(const Dist& d1, const Dist& d2,
                                              const StateRelation& r) {
    LiftingNetwork net = build_network(d1, d2, r);
    FlowResult result = max_flow(net);
    if (result.value != 1) return std::nullopt;
    WeightFunction w;
    for (const auto& [pair, f] : result.middle_flow) w.entries.push_back({pair.first, pair.second, f});
    return w;
}

LiftWitness decompose(const WeightFunction& w) {
    LiftWitness witness;
    for (const auto& e : w.entries) witness.decomposition.push_back({e.weight, e.s, e.t});
    return witness;
}

bool check_equiv_classes(const Dist& d1, const Dist& d2, const StateRelation& r) {
    auto classes = r.equivalence_classes();  // throws when not an equivalence
    for (const auto& cls : classes) {
        Rat mass1(0), mass2(0);
        for (StateId s : cls) {
            mass1 += d1.at(s);
            mass2 += d2.at(s);
        }
        if (mass1 != mass2) return false;
    }
    return true;
}

std::optional<std::vector<Dist>> left_decompose(const std::vector<std::pair<Rat, Dist>>& parts,
                                                const Dist& theta, const StateRelation& r) {
    Dist combined = convex_sum(parts);
    auto w = weight_function(combined, theta, r);
    if (!w) return std::nullopt;

    // Each part takes the share parts_i(s)/combined(s) of the mass that s
    // sends to t; exact arithmetic keeps the split unambiguous.
    std::vector<Dist> components;
    components.reserve(parts.size());
    for (const auto& [p, delta_i] : parts) {
        if (p == 0) throw ModelError("left_decompose requires strictly positive part weights");
        std::map<StateId, Rat> weights;
        for (const auto& e : w->entries) {
            Rat share = e.weight * delta_i.at(e.s) / combined.at(e.s);
            if (share > 0) weights[e.t] += share;
        }
        std::vector<Dist::Entry> entries(weights.begin(), weights.end());
        components.push_back(Dist::from_entries(std::move(entries)));
    }
    return components;
}

}  // namespace lifting
}  // namespace pbisim
