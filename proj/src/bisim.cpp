#include "pbisim/bisim.hpp"

#include <algorithm>
#include <cassert>
#include <map>

namespace pbisim {

namespace {

// Restart signal of the on-the-fly search; never escapes BisimChecker.
struct WrongAssumption {};

}  // namespace

BisimChecker::BisimChecker(const Plts& p, Mode mode) : plts_(p), mode_(mode) {}

std::uint64_t BisimChecker::key(StateId s, StateId t) const {
    // Bisimilarity is symmetric, so its caches store unordered pairs;
    // similarity is not, so order is kept.
    if (mode_ == Mode::Bisimulation && s > t) std::swap(s, t);
    return (static_cast<std::uint64_t>(s) << 32) | t;
}

bool BisimChecker::check(StateId s, StateId t) {
    if (s >= plts_.num_states() || t >= plts_.num_states())
        throw ModelError("state index out of range");
    have_witness_ = false;
    std::uint64_t k = key(s, t);
    if (not_bisim_.count(k)) return false;
    if (proven_.count(k)) {
        have_witness_ = mode_ == Mode::Bisimulation;
        return true;
    }

    std::size_t n = plts_.num_states();
    last_restarts_ = 0;
    while (true) {
        visited_ = proven_;  // completed verdicts are never reopened
        assumed_.clear();
        try {
            bool result = match(s, t);
            if (result) {
                for (std::uint64_t v : visited_)
                    if (!not_bisim_.count(v)) proven_.insert(v);
                have_witness_ = mode_ == Mode::Bisimulation;
            }
            return result;
        } catch (const WrongAssumption&) {
            // Each restart has refuted at least one new pair.
            ++last_restarts_;
            if (last_restarts_ > n * n + 1)
                throw std::logic_error("restart bound exceeded: refuted set failed to grow");
        }
    }
}

std::optional<StateRelation> BisimChecker::last_witness() const {
    if (!have_witness_) return std::nullopt;
    StateRelation r(plts_.num_states());
    for (std::uint64_t k : proven_) {
        auto s = static_cast<StateId>(k >> 32);
        auto t = static_cast<StateId>(k & 0xffffffffu);
        r.add(s, t);
        r.add(t, s);
    }
    return r;
}

bool BisimChecker::match(StateId s, StateId t) {
    visited_.insert(key(s, t));
    bool b = true;
    for (ActionId a = 0; a < plts_.num_actions() && b; ++a) b = match_action(s, t, a);
    if (!b) {
        std::uint64_t k = key(s, t);
        not_bisim_.insert(k);
        if (assumed_.count(k)) throw WrongAssumption{};
    }
    return b;
}

bool BisimChecker::match_action(StateId s, StateId t, ActionId a) {
    std::vector<Dist> left = plts_.der(s, a);
    std::vector<Dist> right = plts_.der(t, a);
    std::vector<std::vector<bool>> b(left.size(), std::vector<bool>(right.size()));
    for (std::size_t i = 0; i < left.size(); ++i)
        for (std::size_t j = 0; j < right.size(); ++j)
            b[i][j] = match_distribution(left[i], right[j]);

    for (std::size_t i = 0; i < left.size(); ++i) {
        bool any = false;
        for (std::size_t j = 0; j < right.size() && !any; ++j) any = b[i][j];
        if (!any) return false;
    }
    if (mode_ == Mode::Bisimulation) {
        for (std::size_t j = 0; j < right.size(); ++j) {
            bool any = false;
            for (std::size_t i = 0; i < left.size() && !any; ++i) any = b[i][j];
            if (!any) return false;
        }
    }
    return true;
}

bool BisimChecker::match_distribution(const Dist& d1, const Dist& d2) {
    StateRelation r(plts_.num_states());
    for (const auto& [si, p] : d1.entries())
        for (const auto& [tj, q] : d2.entries())
            if (close(si, tj)) r.add(si, tj);
    return lifting::check(d1, d2, r);
}

bool BisimChecker::close(StateId s, StateId t) {
    std::uint64_t k = key(s, t);
    if (not_bisim_.count(k)) return false;
    if (visited_.count(k)) {
        assumed_.insert(k);
        return true;
    }
    return match(s, t);
}

std::pair<bool, std::optional<StateRelation>> bisim(const Plts& p, StateId s, StateId t) {
    BisimChecker checker(p, BisimChecker::Mode::Bisimulation);
    bool verdict = checker.check(s, t);
    return {verdict, verdict ? checker.last_witness() : std::nullopt};
}

bool similar(const Plts& p, StateId s, StateId t) {
    BisimChecker checker(p, BisimChecker::Mode::Simulation);
    return checker.check(s, t);
}

namespace {

// Class-mass fingerprint of a distribution under a partition.
std::vector<Rat> block_masses(const Dist& d, const Partition& part) {
    std::vector<Rat> mass(part.blocks().size(), Rat(0));
    for (const auto& [s, p] : d.entries()) mass[part.block_of(s)] += p;
    return mass;
}

// One approximant refinement round: states stay together exactly when, for
// every action, their successor distributions induce the same set of
// class-mass fingerprints.
Partition refine_step(const Plts& p, const Partition& part) {
    using Signature = std::vector<std::pair<ActionId, std::vector<std::vector<Rat>>>>;
    std::map<Signature, std::size_t> groups;
    std::vector<std::size_t> class_of(p.num_states());
    for (StateId s = 0; s < p.num_states(); ++s) {
        Signature sig;
        for (ActionId a = 0; a < p.num_actions(); ++a) {
            std::vector<std::vector<Rat>> fingerprints;
            for (const Dist& d : p.der(s, a)) fingerprints.push_back(block_masses(d, part));
            std::sort(fingerprints.begin(), fingerprints.end());
            fingerprints.erase(std::unique(fingerprints.begin(), fingerprints.end()),
                               fingerprints.end());
            if (!fingerprints.empty()) sig.emplace_back(a, std::move(fingerprints));
        }
        auto [it, inserted] = groups.try_emplace(std::move(sig), groups.size());
        class_of[s] = it->second;
    }
    return Partition::from_class_ids(class_of);
}

Partition full_partition(const Plts& p) {
    std::vector<std::size_t> class_of(p.num_states(), 0);
    return Partition::from_class_ids(class_of);
}

}  // namespace

Partition approximant_partition(const Plts& p, std::size_t n) {
    Partition part = full_partition(p);
    for (std::size_t round = 0; round < n; ++round) {
        Partition next = refine_step(p, part);
        if (next == part) break;  // already stable, later rounds are identity
        part = std::move(next);
    }
    return part;
}

StateRelation approximant(const Plts& p, std::size_t n) {
    return approximant_partition(p, n).to_relation();
}

Partition bisimilarity(const Plts& p, std::size_t& rounds) {
    Partition part = full_partition(p);
    rounds = 0;
    while (true) {
        Partition next = refine_step(p, part);
        if (next == part) return part;
        part = std::move(next);
        ++rounds;
    }
}

Partition bisimilarity(const Plts& p) {
    std::size_t rounds = 0;
    return bisimilarity(p, rounds);
}

bool is_bisimulation(const Plts& p, const StateRelation& r) {
    auto matched = [&](StateId x, StateId y) {
        for (ActionId a = 0; a < p.num_actions(); ++a) {
            for (const Dist& d : p.der(x, a)) {
                bool found = false;
                for (const Dist& e : p.der(y, a))
                    if (lifting::check(d, e, r)) {
                        found = true;
                        break;
                    }
                if (!found) return false;
            }
        }
        return true;
    };
    for (const auto& [x, y] : r.pairs())
        if (!matched(x, y) || !matched(y, x)) return false;
    return true;
}

}  // namespace pbisim
