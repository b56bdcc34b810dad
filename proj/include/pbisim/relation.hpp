#pragma once

#include <cstddef>
#include <vector>

#include "pbisim/plts.hpp"

namespace pbisim {

// Binary relation over the dense state indices 0..n-1 of one Plts.
// Mutation invalidates the cached equivalence flag; queries recompute it
// on demand.
class StateRelation {
  public:
    StateRelation() = default;
    explicit StateRelation(std::size_t universe_size)
        : n_(universe_size), bits_(universe_size * universe_size, false) {}

    static StateRelation identity(std::size_t n);
    static StateRelation full(std::size_t n);

    std::size_t universe_size() const { return n_; }

    bool contains(StateId s, StateId t) const { return bits_[index(s, t)]; }
    void add(StateId s, StateId t);
    void remove(StateId s, StateId t);

    std::vector<std::pair<StateId, StateId>> pairs() const;
    std::size_t pair_count() const;

    // Reflexive over the whole universe, symmetric, and transitive.
    bool is_equivalence() const;

    // Equivalence classes in order of their least member. Throws ModelError
    // when the relation is not an equivalence.
    std::vector<std::vector<StateId>> equivalence_classes() const;

    bool is_subset_of(const StateRelation& other) const;
    bool operator==(const StateRelation& other) const {
        return n_ == other.n_ && bits_ == other.bits_;
    }

  private:
    std::size_t index(StateId s, StateId t) const { return std::size_t(s) * n_ + t; }

    std::size_t n_ = 0;
    std::vector<bool> bits_;
    mutable int equiv_cache_ = -1;  // -1 unknown, 0 no, 1 yes
};

// Disjoint blocks covering 0..n-1.
class Partition {
  public:
    Partition() = default;
    Partition(std::size_t n, std::vector<std::vector<StateId>> blocks);

    // Builds the partition induced by a class-id labelling; blocks are
    // ordered by least member.
    static Partition from_class_ids(const std::vector<std::size_t>& class_of);

    std::size_t universe_size() const { return n_; }
    const std::vector<std::vector<StateId>>& blocks() const { return blocks_; }
    std::size_t block_of(StateId s) const { return block_of_.at(s); }
    bool same_block(StateId s, StateId t) const { return block_of_[s] == block_of_[t]; }

    StateRelation to_relation() const;

    bool operator==(const Partition& other) const { return block_of_ == other.block_of_; }
    bool operator!=(const Partition& other) const { return !(*this == other); }

  private:
    std::size_t n_ = 0;
    std::vector<std::vector<StateId>> blocks_;
    std::vector<std::size_t> block_of_;
};

}  // namespace pbisim
