#include "pbisim/relation.hpp"

#include <algorithm>
#include <numeric>

namespace pbisim {

StateRelation StateRelation::identity(std::size_t n) {
    StateRelation r(n);
    for (StateId s = 0; s < n; ++s) r.add(s, s);
    return r;
}

StateRelation StateRelation::full(std::size_t n) {
    StateRelation r(n);
    r.bits_.assign(n * n, true);
    return r;
}

void StateRelation::add(StateId s, StateId t) {
    bits_[index(s, t)] = true;
    equiv_cache_ = -1;
}

void StateRelation::remove(StateId s, StateId t) {
    bits_[index(s, t)] = false;
    equiv_cache_ = -1;
}

std::vector<std::pair<StateId, StateId>> StateRelation::pairs() const {
    std::vector<std::pair<StateId, StateId>> out;
    for (StateId s = 0; s < n_; ++s)
        for (StateId t = 0; t < n_; ++t)
            if (contains(s, t)) out.emplace_back(s, t);
    return out;
}

std::size_t StateRelation::pair_count() const {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), true));
}

bool StateRelation::is_equivalence() const {
    if (equiv_cache_ != -1) return equiv_cache_ == 1;
    bool ok = true;
    for (StateId s = 0; s < n_ && ok; ++s) ok = contains(s, s);
    for (StateId s = 0; s < n_ && ok; ++s)
        for (StateId t = s + 1; t < n_ && ok; ++t)
            if (contains(s, t) != contains(t, s)) ok = false;
    for (StateId s = 0; s < n_ && ok; ++s)
        for (StateId t = 0; t < n_ && ok; ++t) {
            if (!contains(s, t)) continue;
            for (StateId u = 0; u < n_ && ok; ++u)
                if (contains(t, u) && !contains(s, u)) ok = false;
        }
    equiv_cache_ = ok ? 1 : 0;
    return ok;
}

std::vector<std::vector<StateId>> StateRelation::equivalence_classes() const {
    if (!is_equivalence()) throw ModelError("relation is not an equivalence");
    std::vector<std::vector<StateId>> classes;
    std::vector<bool> seen(n_, false);
    for (StateId s = 0; s < n_; ++s) {
        if (seen[s]) continue;
        std::vector<StateId> cls;
        for (StateId t = s; t < n_; ++t)
            if (contains(s, t)) {
                cls.push_back(t);
                seen[t] = true;
            }
        classes.push_back(std::move(cls));
    }
    return classes;
}

bool StateRelation::is_subset_of(const StateRelation& other) const {
    if (n_ != other.n_) return false;
    for (std::size_t i = 0; i < bits_.size(); ++i)
        if (bits_[i] && !other.bits_[i]) return false;
    return true;
}

Partition::Partition(std::size_t n, std::vector<std::vector<StateId>> blocks)
    : n_(n), blocks_(std::move(blocks)), block_of_(n) {
    for (std::size_t b = 0; b < blocks_.size(); ++b)
        for (StateId s : blocks_[b]) block_of_[s] = b;
}

Partition Partition::from_class_ids(const std::vector<std::size_t>& class_of) {
    std::size_t n = class_of.size();
    // Renumber classes by least member so block order is canonical.
    std::vector<long> renumber(n, -1);
    std::vector<std::vector<StateId>> blocks;
    for (StateId s = 0; s < n; ++s) {
        if (renumber[class_of[s]] < 0) {
            renumber[class_of[s]] = static_cast<long>(blocks.size());
            blocks.emplace_back();
        }
        blocks[renumber[class_of[s]]].push_back(s);
    }
    return Partition(n, std::move(blocks));
}

StateRelation Partition::to_relation() const {
    StateRelation r(n_);
    for (const auto& block : blocks_)
        for (StateId s : block)
            for (StateId t : block) r.add(s, t);
    return r;
}

}  // namespace pbisim
