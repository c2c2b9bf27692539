#pragma once

#include <utility>
#include <vector>

#include "normclust/rational.hpp"

namespace normclust {

/// Min-cost flow with integral capacities and exact rational costs.
/// Successive shortest augmenting paths; no floating point anywhere.
class MinCostFlow {
public:
    explicit MinCostFlow(int node_count);

    /// Adds a directed edge, returns its id for later flow queries.
    int add_edge(int from, int to, long capacity, Rat cost);

    /// Sends up to `want` units from s to t along successive cheapest paths.
    /// Returns (units actually sent, total cost of those units).
    std::pair<long, Rat> solve(int s, int t, long want);

    long flow_on(int edge_id) const;

private:
    struct Arc {
        int to;
        long cap;
        Rat cost;
        int rev;  // index of reverse arc in adj_[to]
    };
    std::vector<std::vector<Arc>> adj_;
    std::vector<std::pair<int, int>> edge_refs_;  // node, arc index
    std::vector<long> edge_caps_;
};

}  // namespace normclust
