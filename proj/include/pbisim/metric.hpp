#pragma once

#include <vector>

#include "pbisim/flow.hpp"
#include "pbisim/plts.hpp"
#include "pbisim/relation.hpp"

namespace pbisim {

// Symmetric 1-bounded rational distance table with zero diagonal, over the
// dense state indices of one Plts.
class PseudoMetric {
  public:
    PseudoMetric() = default;
    explicit PseudoMetric(std::size_t n) : n_(n), d_(n * n, Rat(0)) {}

    // Top of the (reversed) lattice order: the constant-0 metric.
    static PseudoMetric top(std::size_t n) { return PseudoMetric(n); }
    // Bottom: the discrete 0/1 metric.
    static PseudoMetric bottom(std::size_t n);

    std::size_t universe_size() const { return n_; }
    const Rat& at(StateId s, StateId t) const { return d_[std::size_t(s) * n_ + t]; }
    void set(StateId s, StateId t, Rat v);

    bool operator==(const PseudoMetric& other) const { return n_ == other.n_ && d_ == other.d_; }

    // Symmetry, zero diagonal, 1-boundedness, and the triangle inequality;
    // quadratic/cubic checks used by tests.
    bool check_invariants() const;

  private:
    std::size_t n_ = 0;
    std::vector<Rat> d_;
};

// The lattice order on metrics: m1 is below m2 when it is pointwise
// *larger* (the order is reversed so bisimilarity comes out as a greatest
// fixed point).
bool metric_leq(const PseudoMetric& m1, const PseudoMetric& m2);

// Kantorovich-lifted distance between two distributions: the optimal value
// of the transportation problem with ground cost m, solved exactly over the
// union of the two supports.
Rat kantorovich(const PseudoMetric& m, const Dist& d1, const Dist& d2);

// Kantorovich value together with a dual witness in the one-variable-per-
// state form: potentials x over the union of supports with
// x(s) - x(t) <= m(s,t), all values in [0,1], and
// sum_s (d1(s) - d2(s)) * x(s) equal to the optimal value.
struct KantorovichDual {
    Rat value;
    std::vector<std::pair<StateId, Rat>> potentials;
};
KantorovichDual kantorovich_dual(const PseudoMetric& m, const Dist& d1, const Dist& d2);

// The 0/1 metric of an equivalence relation: 0 inside a class, 1 across.
// Throws ModelError when r is not an equivalence.
PseudoMetric metric_from_relation(const StateRelation& r);

// Hausdorff distance between two sets of distributions under the lifted
// metric, with inf of an empty set read as 1 and sup as 0.
Rat hausdorff(const PseudoMetric& m, const std::vector<Dist>& xs, const std::vector<Dist>& ys);

// One application of the transition functional:
//   F(m)(s, t) = max over actions of the Hausdorff distance between the
//   two derivative sets under the lifted metric.
// The maximum ranges over the full declared action alphabet.
PseudoMetric metric_step(const Plts& p, const PseudoMetric& m);

// Whether m is below F(m) in the lattice order, i.e. F(m) <= m pointwise.
// Such metrics are the metric analogue of bisimulations.
bool is_state_metric(const Plts& p, const PseudoMetric& m);

// F^k applied to the constant-0 metric: the descending approximation of
// the greatest fixed point from above.
PseudoMetric iterate_metric(const Plts& p, std::size_t k);

// The exact-zero kernel of a metric.
StateRelation kernel(const PseudoMetric& m);

// Iterates F from the top until the kernel stops changing. `index` is the
// smallest k with kernel(F^k) == kernel(F^(k+1)); the returned metric is
// F^(k+1) applied to top. The kernel then equals the bisimilarity relation.
struct StabilisedMetric {
    PseudoMetric metric;
    std::size_t index;
};
StabilisedMetric stabilise_metric(const Plts& p);

std::string metric_to_csv(const Plts& p, const PseudoMetric& m);

}  // namespace pbisim
