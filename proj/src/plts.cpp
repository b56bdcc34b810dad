#include "pbisim/plts.hpp"

#include <algorithm>
#include <map>

namespace pbisim {

Dist Dist::from_entries(std::vector<Entry> entries) {
    std::map<StateId, Rat> acc;
    for (auto& [s, p] : entries) {
        if (p < 0) throw ModelError("negative probability in distribution");
        if (p == 0) continue;
        acc[s] += p;
    }
    Rat sum = 0;
    Dist d;
    d.entries_.reserve(acc.size());
    for (auto& [s, p] : acc) {
        sum += p;
        d.entries_.emplace_back(s, p);
    }
    if (sum != 1)
        throw ModelError("distribution weights sum to " + rat_to_string(sum) + ", expected 1");
    return d;
}

Rat Dist::at(StateId s) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), s,
                               [](const Entry& e, StateId v) { return e.first < v; });
    if (it != entries_.end() && it->first == s) return it->second;
    return Rat(0);
}

bool Dist::in_support(StateId s) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), s,
                               [](const Entry& e, StateId v) { return e.first < v; });
    return it != entries_.end() && it->first == s;
}

PairDist PairDist::from_entries(std::vector<Entry> entries) {
    std::map<Key, Rat> acc;
    for (auto& [k, p] : entries) {
        if (p < 0) throw ModelError("negative probability in pair distribution");
        if (p == 0) continue;
        acc[k] += p;
    }
    Rat sum = 0;
    PairDist d;
    for (auto& [k, p] : acc) {
        sum += p;
        d.entries_.emplace_back(k, p);
    }
    if (sum != 1) throw ModelError("pair distribution sums to " + rat_to_string(sum));
    return d;
}

Rat PairDist::at(StateId s, StateId t) const {
    for (const auto& [k, p] : entries_)
        if (k.first == s && k.second == t) return p;
    return Rat(0);
}

Dist PairDist::left_marginal() const {
    std::vector<Dist::Entry> out;
    for (const auto& [k, p] : entries_) out.emplace_back(k.first, p);
    return Dist::from_entries(std::move(out));
}

Dist PairDist::right_marginal() const {
    std::vector<Dist::Entry> out;
    for (const auto& [k, p] : entries_) out.emplace_back(k.second, p);
    return Dist::from_entries(std::move(out));
}

std::optional<StateId> Plts::find_state(const std::string& name) const {
    for (StateId i = 0; i < state_names_.size(); ++i)
        if (state_names_[i] == name) return i;
    return std::nullopt;
}

std::optional<ActionId> Plts::find_action(const std::string& name) const {
    for (ActionId i = 0; i < action_names_.size(); ++i)
        if (action_names_[i] == name) return i;
    return std::nullopt;
}

StateId Plts::state(const std::string& name) const {
    if (auto s = find_state(name)) return *s;
    throw ModelError("unknown state '" + name + "'");
}

ActionId Plts::action(const std::string& name) const {
    if (auto a = find_action(name)) return *a;
    throw ModelError("unknown action '" + name + "'");
}

std::vector<Dist> Plts::der(StateId s, ActionId a) const {
    std::vector<Dist> out;
    for (const auto& t : trans_.at(s))
        if (t.action == a) out.push_back(t.target);
    return out;
}

bool Plts::enables(StateId s, ActionId a) const {
    for (const auto& t : trans_.at(s))
        if (t.action == a) return true;
    return false;
}

StateId Plts::add_state(const std::string& name) {
    if (auto s = find_state(name)) return *s;
    state_names_.push_back(name);
    trans_.emplace_back();
    return static_cast<StateId>(state_names_.size() - 1);
}

ActionId Plts::add_action(const std::string& name) {
    if (auto a = find_action(name)) return *a;
    action_names_.push_back(name);
    return static_cast<ActionId>(action_names_.size() - 1);
}

void Plts::add_transition(StateId source, ActionId action, Dist target) {
    for (const auto& t : trans_.at(source))
        if (t.action == action && t.target == target)
            throw ModelError("duplicate transition from '" + state_name(source) + "' on '" +
                             action_name(action) + "'");
    trans_[source].push_back(Transition{action, std::move(target)});
}

Dist point_dist(StateId s) {
    return Dist::from_entries({{s, Rat(1)}});
}

Dist convex_sum(const std::vector<std::pair<Rat, Dist>>& parts) {
    Rat wsum = 0;
    for (const auto& [p, d] : parts) {
        if (p < 0) throw ModelError("negative weight in convex sum");
        wsum += p;
    }
    if (wsum != 1)
        throw ModelError("convex sum weights total " + rat_to_string(wsum) + ", expected 1");
    std::vector<Dist::Entry> out;
    for (const auto& [p, d] : parts)
        for (const auto& [s, q] : d.entries()) out.emplace_back(s, p * q);
    return Dist::from_entries(std::move(out));
}

PairDist dist_product(const Dist& d1, const Dist& d2) {
    std::vector<PairDist::Entry> out;
    for (const auto& [s, p] : d1.entries())
        for (const auto& [t, q] : d2.entries()) out.push_back({{s, t}, p * q});
    return PairDist::from_entries(std::move(out));
}

std::string dist_to_string(const Plts& p, const Dist& d) {
    std::string out;
    for (std::size_t i = 0; i < d.entries().size(); ++i) {
        if (i > 0) out += ", ";
        out += rat_to_string(d.entries()[i].second) + " " + p.state_name(d.entries()[i].first);
    }
    return out;
}

}  // namespace pbisim
