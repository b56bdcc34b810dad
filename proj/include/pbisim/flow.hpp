#pragma once

#include <string>
#include <vector>

#include "pbisim/plts.hpp"
#include "pbisim/relation.hpp"

namespace pbisim {

// Directed flow graph over exact rationals. Edges are stored in pairs:
// the reverse of edge i lives at index i^1, so residual updates are a
// single XOR away.
class FlowGraph {
  public:
    struct Edge {
        int to;
        Rat cap;
        Rat flow;
    };

    explicit FlowGraph(int num_nodes) : adj_(num_nodes) {}

    // Adds (from -> to) with the given capacity plus its zero-capacity
    // reverse edge; returns the forward edge index.
    int add_edge(int from, int to, Rat cap);

    int num_nodes() const { return static_cast<int>(adj_.size()); }
    const std::vector<int>& out_edges(int v) const { return adj_[v]; }
    const Edge& edge(int idx) const { return edges_[idx]; }

    Rat residual(int idx) const { return edges_[idx].cap - edges_[idx].flow; }
    void push(int idx, const Rat& amount);

  private:
    std::vector<Edge> edges_;
    std::vector<std::vector<int>> adj_;
};

// Maximum flow via BFS augmenting paths (Edmonds-Karp). The graph retains
// the final flow assignment. Exact; in debug builds the result is checked
// against a residual-reachability min cut.
Rat max_flow(FlowGraph& g, int source, int sink);

// Independent preflow-push (FIFO) solver used as a cross-check. Takes a
// copy; returns the flow value only.
Rat max_flow_preflow(FlowGraph g, int source, int sink);

// Capacity of the cut induced by residual reachability from source. Equals
// the max-flow value after a completed solve.
Rat residual_cut_capacity(const FlowGraph& g, int source);

// --- the lifting network N(Delta, Theta, R) --------------------------------

// Whether the network materialises only the supports of the two
// distributions or the whole state universe of the relation.
enum class NetworkScope { Supports, FullUniverse };

// The bipartite network of the lifting construction: source feeds left
// copies with capacity Delta(s), right copies drain into the sink with
// capacity Theta(t), and a unit-capacity middle edge (s, t') exists exactly
// when (s, t) is in R.
struct LiftingNetwork {
    FlowGraph graph;
    int source;
    int sink;
    std::vector<StateId> left;   // graph node 2 + i
    std::vector<StateId> right;  // graph node 2 + left.size() + j

    struct MiddleEdge {
        StateId s;
        StateId t;
        int edge_index;
    };
    std::vector<MiddleEdge> middle;
    std::vector<int> source_edges;  // parallel to left
    std::vector<int> sink_edges;    // parallel to right
};

LiftingNetwork build_network(const Dist& d1, const Dist& d2, const StateRelation& r,
                             NetworkScope scope = NetworkScope::Supports);

// Flow value plus the flow carried by each middle edge, reported as
// ((s, t), amount) with zero entries dropped.
struct FlowResult {
    Rat value;
    std::vector<std::pair<std::pair<StateId, StateId>, Rat>> middle_flow;
};

FlowResult max_flow(LiftingNetwork& net);

// Graphviz dump for debugging; state names resolved through the Plts.
std::string to_dot(const LiftingNetwork& net, const Plts& p);

// --- minimum-cost transportation --------------------------------------------

// Optimal transport between two equal-mass rational marginals. The dual
// potentials certify optimality: alpha[i] + beta[j] <= cost[i][j] on every
// cell, with equality on the support of the plan, and
//   sum_i mu[i]*alpha[i] + sum_j nu[j]*beta[j] == cost.
struct TransportPlan {
    std::vector<std::vector<Rat>> plan;  // plan[i][j]
    Rat cost;
    std::vector<Rat> dual_left;   // alpha
    std::vector<Rat> dual_right;  // beta
};

// Successive shortest augmenting paths with node potentials. Requires
// nonnegative costs and sum(mu) == sum(nu); ties between equal-cost paths
// are broken towards lower node indices.
TransportPlan min_cost_transport(const std::vector<Rat>& mu, const std::vector<Rat>& nu,
                                 const std::vector<std::vector<Rat>>& cost);

// The potentials of an optimal plan (see TransportPlan).
std::pair<std::vector<Rat>, std::vector<Rat>> dual_potentials(const TransportPlan& plan);

// Whether the supplies can be routed entirely to the demands using only
// permitted cells (equal total mass required). Decided by maximum flow.
bool allocation_feasible(const std::vector<Rat>& supply, const std::vector<Rat>& demand,
                         const std::vector<std::vector<bool>>& allowed);

}  // namespace pbisim
