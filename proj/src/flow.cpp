#include "pbisim/flow.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <queue>

namespace pbisim {

int FlowGraph::add_edge(int from, int to, Rat cap) {
    int idx = static_cast<int>(edges_.size());
    edges_.push_back(Edge{to, std::move(cap), Rat(0)});
    adj_[from].push_back(idx);
    edges_.push_back(Edge{from, Rat(0), Rat(0)});
    adj_[to].push_back(idx + 1);
    return idx;
}

void FlowGraph::push(int idx, const Rat& amount) {
    edges_[idx].flow += amount;
    edges_[idx ^ 1].flow -= amount;
}

namespace {

// BFS in the residual graph; fills parent_edge, returns true when the sink
// was reached. Adjacency lists are scanned in insertion order, which keeps
// augmenting paths deterministic.
bool residual_bfs(const FlowGraph& g, int source, int sink, std::vector<int>& parent_edge) {
    parent_edge.assign(g.num_nodes(), -1);
    parent_edge[source] = -2;
    std::deque<int> queue{source};
    while (!queue.empty()) {
        int v = queue.front();
        queue.pop_front();
        for (int idx : g.out_edges(v)) {
            int to = g.edge(idx).to;
            if (parent_edge[to] == -1 && g.residual(idx) > 0) {
                parent_edge[to] = idx;
                if (to == sink) return true;
                queue.push_back(to);
            }
        }
    }
    return false;
}

}  // namespace

Rat max_flow(FlowGraph& g, int source, int sink) {
    Rat value(0);
    std::vector<int> parent_edge;
    while (residual_bfs(g, source, sink, parent_edge)) {
        Rat bottleneck = g.residual(parent_edge[sink]);
        for (int v = sink; v != source;) {
            int idx = parent_edge[v];
            bottleneck = std::min(bottleneck, g.residual(idx));
            v = g.edge(idx ^ 1).to;
        }
        for (int v = sink; v != source;) {
            int idx = parent_edge[v];
            g.push(idx, bottleneck);
            v = g.edge(idx ^ 1).to;
        }
        value += bottleneck;
    }
#ifndef NDEBUG
    assert(value == residual_cut_capacity(g, source));
#endif
    return value;
}

Rat residual_cut_capacity(const FlowGraph& g, int source) {
    std::vector<bool> reach(g.num_nodes(), false);
    reach[source] = true;
    std::deque<int> queue{source};
    while (!queue.empty()) {
        int v = queue.front();
        queue.pop_front();
        for (int idx : g.out_edges(v)) {
            int to = g.edge(idx).to;
            if (!reach[to] && g.residual(idx) > 0) {
                reach[to] = true;
                queue.push_back(to);
            }
        }
    }
    Rat cap(0);
    for (int v = 0; v < g.num_nodes(); ++v) {
        if (!reach[v]) continue;
        for (int idx : g.out_edges(v)) {
            const auto& e = g.edge(idx);
            if (e.cap > 0 && !reach[e.to]) cap += e.cap;
        }
    }
    return cap;
}

Rat max_flow_preflow(FlowGraph g, int source, int sink) {
    int n = g.num_nodes();
    if (source == sink) return Rat(0);
    std::vector<int> height(n, 0);
    std::vector<Rat> excess(n, Rat(0));
    std::deque<int> active;
    height[source] = n;

    // `amount` is taken by value: callers pass min(excess[v], ...) and the
    // excess updates below must not alias it.
    auto push_edge = [&](int idx, Rat amount, int from) {
        g.push(idx, amount);
        int to = g.edge(idx).to;
        excess[from] -= amount;
        if (excess[to] == 0 && to != source && to != sink) active.push_back(to);
        excess[to] += amount;
    };

    for (int idx : g.out_edges(source)) {
        Rat r = g.residual(idx);
        if (r > 0) {
            excess[source] += r;  // net zero after the push
            push_edge(idx, r, source);
        }
    }

    while (!active.empty()) {
        int v = active.front();
        active.pop_front();
        while (excess[v] > 0) {
            int min_height = 2 * n;
            bool pushed = false;
            for (int idx : g.out_edges(v)) {
                if (g.residual(idx) <= 0) continue;
                int to = g.edge(idx).to;
                if (height[v] == height[to] + 1) {
                    push_edge(idx, std::min(excess[v], g.residual(idx)), v);
                    pushed = true;
                    if (excess[v] == 0) break;
                } else {
                    min_height = std::min(min_height, height[to]);
                }
            }
            if (excess[v] == 0) break;
            if (!pushed) {
                if (min_height >= 2 * n) break;  // disconnected leftover excess
                height[v] = min_height + 1;      // relabel
            }
        }
    }
    return excess[sink];
}

LiftingNetwork build_network(const Dist& d1, const Dist& d2, const StateRelation& r,
                             NetworkScope scope) {
    std::vector<StateId> left, right;
    if (scope == NetworkScope::Supports) {
        for (const auto& [s, p] : d1.entries()) left.push_back(s);
        for (const auto& [t, p] : d2.entries()) right.push_back(t);
    } else {
        for (StateId s = 0; s < r.universe_size(); ++s) {
            left.push_back(s);
            right.push_back(s);
        }
    }

    int n_left = static_cast<int>(left.size());
    int n_right = static_cast<int>(right.size());
    LiftingNetwork net{FlowGraph(2 + n_left + n_right), 0, 1, left, right, {}, {}, {}};
    auto left_node = [&](int i) { return 2 + i; };
    auto right_node = [&](int j) { return 2 + n_left + j; };

    for (int i = 0; i < n_left; ++i)
        net.source_edges.push_back(net.graph.add_edge(net.source, left_node(i), d1.at(left[i])));
    for (int i = 0; i < n_left; ++i)
        for (int j = 0; j < n_right; ++j)
            if (r.contains(left[i], right[j])) {
                int idx = net.graph.add_edge(left_node(i), right_node(j), Rat(1));
                net.middle.push_back({left[i], right[j], idx});
            }
    for (int j = 0; j < n_right; ++j)
        net.sink_edges.push_back(net.graph.add_edge(right_node(j), net.sink, d2.at(right[j])));
    return net;
}

FlowResult max_flow(LiftingNetwork& net) {
    FlowResult result;
    result.value = max_flow(net.graph, net.source, net.sink);
    for (const auto& m : net.middle) {
        const Rat& f = net.graph.edge(m.edge_index).flow;
        if (f > 0) result.middle_flow.push_back({{m.s, m.t}, f});
    }
    return result;
}

std::string to_dot(const LiftingNetwork& net, const Plts& p) {
    std::string out = "digraph lifting {\n  rankdir=LR;\n";
    out += "  src [label=\"bot\"];\n  snk [label=\"top\"];\n";
    auto lname = [&](std::size_t i) { return "L" + std::to_string(i); };
    auto rname = [&](std::size_t j) { return "R" + std::to_string(j); };
    for (std::size_t i = 0; i < net.left.size(); ++i) {
        out += "  " + lname(i) + " [label=\"" + p.state_name(net.left[i]) + "\"];\n";
        const auto& e = net.graph.edge(net.source_edges[i]);
        out += "  src -> " + lname(i) + " [label=\"" + rat_to_string(e.cap) + "\"];\n";
    }
    for (const auto& m : net.middle) {
        std::size_t i = std::find(net.left.begin(), net.left.end(), m.s) - net.left.begin();
        std::size_t j = std::find(net.right.begin(), net.right.end(), m.t) - net.right.begin();
        out += "  " + lname(i) + " -> " + rname(j) + " [label=\"1\"];\n";
    }
    for (std::size_t j = 0; j < net.right.size(); ++j) {
        out += "  " + rname(j) + " [label=\"" + p.state_name(net.right[j]) + "'\"];\n";
        const auto& e = net.graph.edge(net.sink_edges[j]);
        out += "  " + rname(j) + " -> snk [label=\"" + rat_to_string(e.cap) + "\"];\n";
    }
    out += "}\n";
    return out;
}

TransportPlan min_cost_transport(const std::vector<Rat>& mu, const std::vector<Rat>& nu,
                                 const std::vector<std::vector<Rat>>& cost) {
    int m = static_cast<int>(mu.size());
    int n = static_cast<int>(nu.size());
    if (m == 0 || n == 0) throw ModelError("transportation marginals must be nonempty");
    Rat total_mu(0), total_nu(0);
    for (const Rat& p : mu) {
        if (p < 0) throw ModelError("negative supply");
        total_mu += p;
    }
    for (const Rat& p : nu) {
        if (p < 0) throw ModelError("negative demand");
        total_nu += p;
    }
    if (total_mu != total_nu) throw ModelError("transportation marginals have unequal mass");
    for (const auto& row : cost)
        for (const Rat& c : row)
            if (c < 0) throw ModelError("negative transportation cost");

    // Nodes: 0 = source, 1..m lefts, m+1..m+n rights, m+n+1 = sink.
    int source = 0, sink = m + n + 1, num_nodes = m + n + 2;
    FlowGraph g(num_nodes);
    std::vector<Rat> edge_cost;
    auto add = [&](int from, int to, Rat cap, Rat c) {
        g.add_edge(from, to, std::move(cap));
        edge_cost.push_back(c);        // forward
        edge_cost.push_back(-c);       // reverse
    };
    std::vector<std::vector<int>> middle_edge(m, std::vector<int>(n));
    for (int i = 0; i < m; ++i) add(source, 1 + i, mu[i], Rat(0));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) {
            middle_edge[i][j] = static_cast<int>(2 * (m + std::size_t(i) * n + j));
            // Capacity 2 exceeds the total mass, so middle edges never
            // saturate and the dual feasibility argument covers every cell.
            add(1 + i, 1 + m + j, Rat(2), cost[i][j]);
        }
    for (int j = 0; j < n; ++j) add(1 + m + j, sink, nu[j], Rat(0));

    std::vector<Rat> potential(num_nodes, Rat(0));
    std::vector<Rat> dist(num_nodes, Rat(0));
    std::vector<bool> reached(num_nodes), done(num_nodes);
    std::vector<int> parent_edge(num_nodes);

    while (true) {
        // Dijkstra over reduced costs; O(V^2) selection picks the lowest
        // node index among equal distances for deterministic plans.
        std::fill(reached.begin(), reached.end(), false);
        std::fill(done.begin(), done.end(), false);
        reached[source] = true;
        dist[source] = 0;
        while (true) {
            int best = -1;
            for (int v = 0; v < num_nodes; ++v)
                if (reached[v] && !done[v] && (best == -1 || dist[v] < dist[best])) best = v;
            if (best == -1) break;
            done[best] = true;
            for (int idx : g.out_edges(best)) {
                if (g.residual(idx) <= 0) continue;
                int to = g.edge(idx).to;
                Rat nd = dist[best] + edge_cost[idx] + potential[best] - potential[to];
                if (!reached[to] || nd < dist[to]) {
                    reached[to] = true;
                    dist[to] = nd;
                    parent_edge[to] = idx;
                }
            }
        }
        if (!reached[sink]) break;
        // Unreached nodes shift by dist[sink] so reduced costs stay
        // nonnegative on residual edges leaving them.
        for (int v = 0; v < num_nodes; ++v)
            potential[v] += reached[v] ? std::min(dist[v], dist[sink]) : dist[sink];

        Rat bottleneck = g.residual(parent_edge[sink]);
        for (int v = sink; v != source;) {
            int idx = parent_edge[v];
            bottleneck = std::min(bottleneck, g.residual(idx));
            v = g.edge(idx ^ 1).to;
        }
        if (bottleneck == 0) break;  // all mass shipped
        for (int v = sink; v != source;) {
            int idx = parent_edge[v];
            g.push(idx, bottleneck);
            v = g.edge(idx ^ 1).to;
        }
    }

    TransportPlan result;
    result.plan.assign(m, std::vector<Rat>(n, Rat(0)));
    result.cost = 0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) {
            const Rat& f = g.edge(middle_edge[i][j]).flow;
            result.plan[i][j] = f;
            result.cost += f * cost[i][j];
        }
    result.dual_left.resize(m);
    result.dual_right.resize(n);
    for (int i = 0; i < m; ++i) result.dual_left[i] = -potential[1 + i];
    for (int j = 0; j < n; ++j) result.dual_right[j] = potential[1 + m + j];
    return result;
}

std::pair<std::vector<Rat>, std::vector<Rat>> dual_potentials(const TransportPlan& plan) {
    return {plan.dual_left, plan.dual_right};
}

bool allocation_feasible(const std::vector<Rat>& supply, const std::vector<Rat>& demand,
                         const std::vector<std::vector<bool>>& allowed) {
    int m = static_cast<int>(supply.size());
    int n = static_cast<int>(demand.size());
    Rat total(0), total_demand(0);
    for (const Rat& p : supply) total += p;
    for (const Rat& p : demand) total_demand += p;
    if (total != total_demand) return false;

    FlowGraph g(m + n + 2);
    int source = 0, sink = m + n + 1;
    for (int i = 0; i < m; ++i) g.add_edge(source, 1 + i, supply[i]);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j)
            if (allowed[i][j]) g.add_edge(1 + i, 1 + m + j, Rat(1));
    for (int j = 0; j < n; ++j) g.add_edge(1 + m + j, sink, demand[j]);
    return max_flow(g, source, sink) == total;
}

}  // namespace pbisim
