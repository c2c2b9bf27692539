#include "normclust/flow.hpp"

#include <deque>
#include <limits>
#include <stdexcept>

namespace normclust {

MinCostFlow::MinCostFlow(int node_count) : adj_(node_count) {}

int MinCostFlow::add_edge(int from, int to, long capacity, Rat cost) {
    if (capacity < 0) throw std::invalid_argument("flow: negative capacity");
    Arc fwd{to, capacity, cost, static_cast<int>(adj_[to].size())};
    Arc bwd{from, 0, -cost, static_cast<int>(adj_[from].size())};
    adj_[from].push_back(fwd);
    adj_[to].push_back(bwd);
    edge_refs_.push_back({from, static_cast<int>(adj_[from].size()) - 1});
    edge_caps_.push_back(capacity);
    return static_cast<int>(edge_refs_.size()) - 1;
}

std::pair<long, Rat> MinCostFlow::solve(int s, int t, long want) {
    const int n = static_cast<int>(adj_.size());
    long sent = 0;
    Rat total_cost = 0;
    while (sent < want) {
        // SPFA over residual arcs; reverse arcs carry negative costs.
        std::vector<bool> reached(n, false), in_queue(n, false);
        std::vector<Rat> dist(n, 0);
        std::vector<std::pair<int, int>> parent(n, {-1, -1});
        std::deque<int> queue;
        reached[s] = true;
        queue.push_back(s);
        in_queue[s] = true;
        while (!queue.empty()) {
            int u = queue.front();
            queue.pop_front();
            in_queue[u] = false;
            for (int a = 0; a < static_cast<int>(adj_[u].size()); ++a) {
                const Arc& arc = adj_[u][a];
                if (arc.cap <= 0) continue;
                Rat nd = dist[u] + arc.cost;
                if (!reached[arc.to] || nd < dist[arc.to]) {
                    reached[arc.to] = true;
                    dist[arc.to] = nd;
                    parent[arc.to] = {u, a};
                    if (!in_queue[arc.to]) {
                        queue.push_back(arc.to);
                        in_queue[arc.to] = true;
                    }
                }
            }
        }
        if (!reached[t]) break;
        long push = want - sent;
        for (int v = t; v != s;) {
            auto [u, a] = parent[v];
            push = std::min(push, adj_[u][a].cap);
            v = u;
        }
        for (int v = t; v != s;) {
            auto [u, a] = parent[v];
            Arc& arc = adj_[u][a];
            arc.cap -= push;
            adj_[arc.to][arc.rev].cap += push;
            v = u;
        }
        sent += push;
        total_cost += dist[t] * push;
    }
    return {sent, total_cost};
}

long MinCostFlow::flow_on(int edge_id) const {
    auto [node, idx] = edge_refs_[edge_id];
    return edge_caps_[edge_id] - adj_[node][idx].cap;
}

}  // namespace normclust
