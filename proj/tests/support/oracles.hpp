#pragma once

// Independent oracles the tests check the implementation against. These
// deliberately avoid the library's flow/transport solvers.

#include <algorithm>
#include <map>
#include <set>
#include <vector>

#include "pbisim/plts.hpp"
#include "pbisim/relation.hpp"

namespace pbisim::testoracle {

// Total variation distance: the exact optimum of a transportation problem
// with 0/1 ground cost.
inline Rat total_variation(const Dist& d1, const Dist& d2) {
    Rat sum(0);
    for (const auto& [s, p] : d1.entries()) {
        Rat diff = p - d2.at(s);
        if (diff > 0) sum += diff;
    }
    return sum;
}

// Feasibility of routing supplies to demands through permitted cells, by
// the cut condition: every subset of demands must be coverable by its
// compatible supplies. Exponential in the number of demands; fine for the
// small instances the tests use.
inline bool allocation_feasible_cut(const std::vector<Rat>& supply,
                                    const std::vector<Rat>& demand,
                                    const std::vector<std::vector<bool>>& allowed) {
    Rat total_supply(0), total_demand(0);
    for (const Rat& p : supply) total_supply += p;
    for (const Rat& p : demand) total_demand += p;
    if (total_supply != total_demand) return false;

    std::size_t m = supply.size(), n = demand.size();
    for (std::size_t mask = 0; mask < (std::size_t(1) << n); ++mask) {
        Rat need(0), avail(0);
        for (std::size_t j = 0; j < n; ++j)
            if (mask & (std::size_t(1) << j)) need += demand[j];
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if ((mask & (std::size_t(1) << j)) && allowed[i][j]) {
                    avail += supply[i];
                    break;
                }
        if (need > avail) return false;
    }
    return true;
}

// Classic strong-bisimilarity partition refinement on a point-distribution
// pLTS, treating it as an ordinary LTS. Successor sets per action replace
// distribution fingerprints.
inline Partition lts_strong_bisimilarity(const Plts& p) {
    std::size_t n = p.num_states();
    std::vector<std::size_t> class_of(n, 0);
    while (true) {
        using Signature = std::vector<std::pair<ActionId, std::set<std::size_t>>>;
        std::map<std::pair<std::size_t, Signature>, std::size_t> groups;
        std::vector<std::size_t> next(n);
        for (StateId s = 0; s < n; ++s) {
            Signature sig;
            for (ActionId a = 0; a < p.num_actions(); ++a) {
                std::set<std::size_t> succ;
                for (const Dist& d : p.der(s, a)) {
                    if (d.support_size() != 1)
                        throw ModelError("oracle expects point distributions");
                    succ.insert(class_of[d.entries()[0].first]);
                }
                if (!succ.empty()) sig.emplace_back(a, std::move(succ));
            }
            auto key = std::make_pair(class_of[s], std::move(sig));
            auto [it, inserted] = groups.try_emplace(std::move(key), groups.size());
            next[s] = it->second;
        }
        if (next == class_of) break;
        class_of = std::move(next);
    }
    return Partition::from_class_ids(class_of);
}

}  // namespace pbisim::testoracle
