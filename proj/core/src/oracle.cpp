#include "normclust/oracle.hpp"

#include <algorithm>
#include <stdexcept>

#include "normclust/flow.hpp"

namespace normclust {

namespace {

bool edge_usable(const Instance& inst, int i, int j, const std::optional<Rat>& max_edge) {
    const Dist& d = inst.fc_dist(i, j);
    if (!d.finite) return false;
    return !max_edge || d.value <= *max_edge;
}

// Nodes: 0 = source, 1 = sink, 2.. open facilities, then clients.
struct AssignFlow {
    MinCostFlow flow;
    std::vector<std::vector<int>> edge_ids;  // open index x client -> edge id or -1

    AssignFlow(const Instance& inst, const std::vector<int>& open,
               const std::optional<Rat>& max_edge,
               const std::function<Rat(const Rat&)>& edge_cost)
        : flow(2 + static_cast<int>(open.size()) + inst.n_clients),
          edge_ids(open.size(), std::vector<int>(inst.n_clients, -1)) {
        const int nf = static_cast<int>(open.size());
        for (int oi = 0; oi < nf; ++oi)
            flow.add_edge(2 + oi, 1, inst.capacities[open[oi]], Rat(0));
        for (int j = 0; j < inst.n_clients; ++j) {
            int cnode = 2 + nf + j;
            flow.add_edge(0, cnode, 1, Rat(0));
            for (int oi = 0; oi < nf; ++oi)
                if (edge_usable(inst, open[oi], j, max_edge))
                    edge_ids[oi][j] =
                        flow.add_edge(cnode, 2 + oi, 1, edge_cost(inst.fc_dist(open[oi], j).value));
        }
    }

    Assignment extract(const Instance& inst, const std::vector<int>& open) const {
        Assignment assign(inst.n_clients, -1);
        for (std::size_t oi = 0; oi < open.size(); ++oi)
            for (int j = 0; j < inst.n_clients; ++j)
                if (edge_ids[oi][j] >= 0 && flow.flow_on(edge_ids[oi][j]) > 0)
                    assign[j] = open[oi];
        return assign;
    }
};

std::vector<Rat> sorted_edge_values(const Instance& inst, const std::vector<int>& open,
                                    const std::optional<Rat>& max_edge) {
    std::vector<Rat> vals;
    for (int i : open)
        for (int j = 0; j < inst.n_clients; ++j)
            if (edge_usable(inst, i, j, max_edge)) vals.push_back(inst.fc_dist(i, j).value);
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    return vals;
}

AssignResult assignment_by_enumeration(const Instance& inst, const std::vector<int>& open,
                                       const NormSpec& norm,
                                       const std::optional<Rat>& max_edge) {
    AssignResult best;
    Assignment current(inst.n_clients, -1);
    std::vector<int> load(open.size(), 0);
    std::function<void(int)> rec = [&](int j) {
        if (j == inst.n_clients) {
            Rat value = eval_norm(norm, cost_vector(inst, current));
            if (best.status != AssignStatus::Ok || value < best.value) {
                best.status = AssignStatus::Ok;
                best.value = value;
                best.assign = current;
            }
            return;
        }
        for (std::size_t oi = 0; oi < open.size(); ++oi) {
            if (load[oi] >= inst.capacities[open[oi]]) continue;
            if (!edge_usable(inst, open[oi], j, max_edge)) continue;
            ++load[oi];
            current[j] = open[oi];
            rec(j + 1);
            --load[oi];
        }
        current[j] = -1;
    };
    rec(0);
    return best;
}

}  // namespace

bool feasibility(const Instance& inst, const std::vector<int>& open,
                 const std::optional<Rat>& max_edge) {
    long cap_total = 0;
    for (int i : open) cap_total += inst.capacities[i];
    if (cap_total < inst.n_clients) return false;
    AssignFlow net(inst, open, max_edge, [](const Rat&) { return Rat(0); });
    auto [sent, cost] = net.flow.solve(0, 1, inst.n_clients);
    (void)cost;
    return sent == inst.n_clients;
}

AssignResult optimal_assignment(const Instance& inst, const std::vector<int>& open,
                                const NormSpec& norm, const std::optional<Rat>& max_edge,
                                const OracleConfig& cfg) {
    AssignResult out;
    if (open.empty()) return out;
    if (!feasibility(inst, open, max_edge)) return out;

    switch (norm.kind) {
        case NormSpec::L1:
        case NormSpec::Lp: {
            auto cost = [&norm](const Rat& d) {
                return norm.kind == NormSpec::L1 ? d : rat_pow(d, norm.p);
            };
            AssignFlow net(inst, open, max_edge, cost);
            auto [sent, total] = net.flow.solve(0, 1, inst.n_clients);
            if (sent != inst.n_clients) return out;
            out.status = AssignStatus::Ok;
            out.assign = net.extract(inst, open);
            out.value = total;
            return out;
        }
        case NormSpec::LInf: {
            // Smallest threshold whose restricted bipartite graph still has a
            // perfect capacity-respecting matching.
            std::vector<Rat> vals = sorted_edge_values(inst, open, max_edge);
            int lo = 0, hi = static_cast<int>(vals.size()) - 1;
            if (hi < 0) return out;
            while (lo < hi) {
                int mid = (lo + hi) / 2;
                if (feasibility(inst, open, vals[mid]))
                    hi = mid;
                else
                    lo = mid + 1;
            }
            if (!feasibility(inst, open, vals[lo])) return out;
            AssignFlow net(inst, open, vals[lo], [](const Rat& d) { return d; });
            auto [sent, total] = net.flow.solve(0, 1, inst.n_clients);
            (void)total;
            if (sent != inst.n_clients) return out;
            out.status = AssignStatus::Ok;
            out.assign = net.extract(inst, open);
            out.value = eval_norm(norm, cost_vector(inst, out.assign));
            return out;
        }
        case NormSpec::TopL: {
            // top_l(v) = min_t sum (v_j - t)^+ + ell t; the inner minimum over
            // assignments is a flow, and exchanging the minima is valid.
            std::vector<Rat> thresholds = sorted_edge_values(inst, open, max_edge);
            thresholds.insert(thresholds.begin(), Rat(0));
            bool have = false;
            Rat best_value = 0;
            Assignment best_assign;
            for (const auto& t : thresholds) {
                AssignFlow net(inst, open, max_edge,
                               [&t](const Rat& d) { return d > t ? d - t : Rat(0); });
                auto [sent, total] = net.flow.solve(0, 1, inst.n_clients);
                if (sent != inst.n_clients) continue;
                Rat value = total + norm.ell * t;
                if (!have || value < best_value) {
                    have = true;
                    best_value = value;
                    best_assign = net.extract(inst, open);
                }
            }
            if (!have) return out;
            out.status = AssignStatus::Ok;
            out.assign = best_assign;
            out.value = eval_norm(norm, cost_vector(inst, out.assign));
            return out;
        }
        case NormSpec::Ordered: {
            if (inst.n_clients > cfg.ordered_enum_cap) {
                out.status = AssignStatus::UnsupportedExact;
                return out;
            }
            return assignment_by_enumeration(inst, open, norm, max_edge);
        }
    }
    return out;
}

ExactResult exact_solve(const Instance& inst, const OracleConfig& cfg,
                        const std::optional<Rat>& max_edge) {
    if (inst.n_facilities > cfg.max_facilities || inst.n_clients > cfg.max_clients ||
        inst.k > cfg.max_k)
        throw std::runtime_error("exact_solve: instance exceeds the configured budget");

    const NormSpec norm = norm_of_instance(inst);
    ExactResult res;

    std::vector<int> subset(inst.k);
    for (int i = 0; i < inst.k; ++i) subset[i] = i;
    for (;;) {
        ++res.subsets_examined;
        AssignResult ar = optimal_assignment(inst, subset, norm, max_edge, cfg);
        if (ar.status == AssignStatus::UnsupportedExact)
            throw std::runtime_error("exact_solve: ordered norm beyond enumeration cap");
        if (ar.status == AssignStatus::Ok &&
            (!res.feasible || ar.value < res.opt_value)) {
            res.feasible = true;
            res.opt_value = ar.value;
            res.opt_open_set = subset;
            res.opt_assignment = ar.assign;
        }
        // next lexicographic k-subset
        int i = inst.k - 1;
        while (i >= 0 && subset[i] == inst.n_facilities - inst.k + i) --i;
        if (i < 0) break;
        ++subset[i];
        for (int j = i + 1; j < inst.k; ++j) subset[j] = subset[j - 1] + 1;
    }
    return res;
}

ExactResult constrained_oracle(const Instance& inst, const Rat& linf_cap,
                               const OracleConfig& cfg) {
    return exact_solve(inst, cfg, linf_cap);
}

}  // namespace normclust
