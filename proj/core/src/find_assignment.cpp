#include "normclust/find_assignment.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

#include "normclust/flow.hpp"

namespace normclust {

namespace {

Rat fc(const Instance& inst, int facility, int client) {
    const Dist& d = inst.fc_dist(facility, client);
    if (!d.finite) throw std::invalid_argument("find_assignment: infinite distance");
    return d.value;
}

Rat ff(const Instance& inst, int f1, int f2) {
    const Dist& d = inst.space.at(f1, f2);
    if (!d.finite) throw std::invalid_argument("find_assignment: infinite distance");
    return d.value;
}

Rat dist_to_set(const Instance& inst, int client, const std::vector<int>& X) {
    Rat best = fc(inst, X[0], client);
    for (std::size_t s = 1; s < X.size(); ++s) best = std::min(best, fc(inst, X[s], client));
    return best;
}

Rat round_up_power(const Rat& v, const Rat& eps) {
    if (v == 0) return 0;
    Rat p = 1;
    while (p < v) p *= (1 + eps);
    while (p / (1 + eps) >= v) p /= (1 + eps);
    return p;
}

}  // namespace

ExclusiveStructure classify_clients(const Instance& inst, const std::vector<int>& open,
                                    const Rat& eps) {
    if (!(eps > 0 && eps < Rat(1, 10)))
        throw std::invalid_argument("classify_clients: eps must be in (0, 1/10)");
    if (open.empty() || open.size() > 16)
        throw std::invalid_argument("classify_clients: open set size unsupported");

    const int k = static_cast<int>(open.size());
    ExclusiveStructure out;
    out.class_of.assign(inst.n_clients, -1);
    std::map<std::vector<int>, int> class_index;

    for (int c = 0; c < inst.n_clients; ++c) {
        std::vector<int> match;
        for (unsigned mask = 1; mask < (1u << k); ++mask) {
            std::vector<int> X;
            for (int s = 0; s < k; ++s)
                if (mask & (1u << s)) X.push_back(open[s]);
            Rat dcx = dist_to_set(inst, c, X);
            bool ok = true;
            // (i) facilities of X mutually close relative to d(c, X)
            for (std::size_t a = 0; a < X.size() && ok; ++a)
                for (std::size_t b = a + 1; b < X.size() && ok; ++b)
                    if (ff(inst, X[a], X[b]) > eps * dcx) ok = false;
            // (ii) everything outside X much farther from c
            if (ok) {
                Rat inner_max = 0;
                for (int f : X) inner_max = std::max(inner_max, fc(inst, f, c));
                for (int f : open) {
                    if (std::find(X.begin(), X.end(), f) != X.end()) continue;
                    if (inner_max > eps * fc(inst, f, c)) {
                        ok = false;
                        break;
                    }
                }
            }
            if (ok) {
                if (!match.empty())
                    throw std::logic_error("classify_clients: client exclusive for two subsets");
                match = X;
            }
        }
        if (match.empty()) {
            out.inclusive.push_back(c);
        } else {
            auto [it, inserted] = class_index.insert({match, static_cast<int>(out.classes.size())});
            if (inserted) {
                ExclusiveStructure::Class cls;
                cls.facilities = match;
                out.classes.push_back(cls);
            }
            out.classes[it->second].clients.push_back(c);
            out.class_of[c] = it->second;
        }
    }

    // laminarity + parent links
    for (std::size_t a = 0; a < out.classes.size(); ++a) {
        for (std::size_t b = 0; b < out.classes.size(); ++b) {
            if (a == b) continue;
            const auto& A = out.classes[a].facilities;
            const auto& B = out.classes[b].facilities;
            std::vector<int> common;
            std::set_intersection(A.begin(), A.end(), B.begin(), B.end(),
                                  std::back_inserter(common));
            if (common.empty()) continue;
            bool a_in_b = std::includes(B.begin(), B.end(), A.begin(), A.end());
            bool b_in_a = std::includes(A.begin(), A.end(), B.begin(), B.end());
            if (!a_in_b && !b_in_a) out.laminar = false;
            if (a_in_b && !b_in_a && A.size() < B.size()) {
                int cur = out.classes[a].parent;
                if (cur < 0 || B.size() < out.classes[cur].facilities.size())
                    out.classes[a].parent = static_cast<int>(b);
            }
        }
    }
    std::size_t classified = out.inclusive.size();
    for (const auto& cls : out.classes) classified += cls.clients.size();
    out.partition = classified == static_cast<std::size_t>(inst.n_clients);
    return out;
}

std::vector<Rat> discretized_distances(const Instance& inst, int facility,
                                       const std::vector<int>& inclusive, const Rat& eps) {
    std::vector<Rat> out;
    for (int c : inclusive) out.push_back(round_up_power(fc(inst, facility, c), eps));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

namespace {

struct IncSlot {
    int oi;  // index into open
    Rat disc;
    std::vector<int> clients;
};

struct ClassSlot {
    int cls;
    int oi;  // allocation facility index into open, outside the class
};

// Candidate linkage-count table: integer caps per slot plus the class pin
// levels they induce.
struct Table {
    std::vector<int> inc_caps;
    std::vector<int> cls_caps;
    std::vector<int> pins;  // per class
};

struct Gadget {
    const Instance& inst;
    const std::vector<int>& open;
    const ExclusiveStructure& structure;
    const std::vector<IncSlot>& inc_slots;
    const std::vector<ClassSlot>& cls_slots;
    const std::vector<std::vector<int>>& class_order;  // clients by distance to X
};

// Solves one table as a min-cost matching. `threshold` shifts the linear
// proxy cost to (d - threshold)^+ so top-l shaped objectives can steer the
// tie-breaking; the returned value is always the true norm of the realized
// assignment.
AssignResult solve_table(const Gadget& g, const Table& table, const Rat& threshold) {
    AssignResult out;
    const int nf = static_cast<int>(g.open.size());
    const int nc = g.inst.n_clients;
    const int fac0 = 2, cli0 = 2 + nf;
    int next = cli0 + nc;
    std::vector<int> inc_node(g.inc_slots.size());
    for (std::size_t s = 0; s < g.inc_slots.size(); ++s) inc_node[s] = next++;
    std::vector<int> cls_node(g.cls_slots.size());
    for (std::size_t s = 0; s < g.cls_slots.size(); ++s) cls_node[s] = next++;

    MinCostFlow net(next);
    auto reduced = [&threshold](const Rat& d) { return d > threshold ? d - threshold : Rat(0); };
    for (int oi = 0; oi < nf; ++oi)
        net.add_edge(fac0 + oi, 1, g.inst.capacities[g.open[oi]], Rat(0));
    for (int c = 0; c < nc; ++c) net.add_edge(0, cli0 + c, 1, Rat(0));

    struct Entry {
        int client;
        int edge;
        int oi;  // direct assignment target (for inc/pinned routes)
    };
    std::vector<Entry> direct;                       // inc-slot and pinned routes
    std::vector<std::vector<Entry>> slot_in(g.cls_slots.size());
    std::vector<int> slot_alloc_edge(g.cls_slots.size(), -1);
    std::vector<std::vector<std::pair<int, int>>> slot_inside(g.cls_slots.size());  // (oi, edge)

    auto oi_of = [&](int f) {
        return static_cast<int>(std::find(g.open.begin(), g.open.end(), f) - g.open.begin());
    };

    for (std::size_t s = 0; s < g.inc_slots.size(); ++s) {
        net.add_edge(inc_node[s], fac0 + g.inc_slots[s].oi, table.inc_caps[s], Rat(0));
        for (int c : g.inc_slots[s].clients) {
            int e = net.add_edge(cli0 + c, inc_node[s], 1,
                                 reduced(fc(g.inst, g.open[g.inc_slots[s].oi], c)));
            direct.push_back({c, e, g.inc_slots[s].oi});
        }
    }
    for (std::size_t ci = 0; ci < g.structure.classes.size(); ++ci) {
        const auto& order = g.class_order[ci];
        int pins = table.pins[ci];
        for (int rank = 0; rank < pins; ++rank) {
            int c = order[rank];
            for (int f : g.structure.classes[ci].facilities) {
                int e = net.add_edge(cli0 + c, fac0 + oi_of(f), 1, reduced(fc(g.inst, f, c)));
                direct.push_back({c, e, oi_of(f)});
            }
        }
    }
    for (std::size_t s = 0; s < g.cls_slots.size(); ++s) {
        const auto& slot = g.cls_slots[s];
        const auto& order = g.class_order[slot.cls];
        int pins = table.pins[slot.cls];
        slot_alloc_edge[s] = net.add_edge(cls_node[s], fac0 + slot.oi, table.cls_caps[s], Rat(0));
        for (int f : g.structure.classes[slot.cls].facilities) {
            int e = net.add_edge(cls_node[s], fac0 + oi_of(f), nc, Rat(0));
            slot_inside[s].push_back({oi_of(f), e});
        }
        for (std::size_t rank = pins; rank < order.size(); ++rank) {
            int c = order[rank];
            int e =
                net.add_edge(cli0 + c, cls_node[s], 1, reduced(fc(g.inst, g.open[slot.oi], c)));
            slot_in[s].push_back({c, e, slot.oi});
        }
    }

    auto [sent, cost] = net.solve(0, 1, nc);
    (void)cost;
    if (sent != nc) return out;

    Assignment assign(nc, -1);
    for (const auto& entry : direct)
        if (net.flow_on(entry.edge) > 0) assign[entry.client] = g.open[entry.oi];
    // Class-slot nodes aggregate; distribute their outflow over the entering
    // clients in a fixed order (allocation facility first, then inside X).
    for (std::size_t s = 0; s < g.cls_slots.size(); ++s) {
        std::vector<int> entered;
        for (const auto& entry : slot_in[s])
            if (net.flow_on(entry.edge) > 0) entered.push_back(entry.client);
        std::size_t pos = 0;
        long to_alloc = net.flow_on(slot_alloc_edge[s]);
        for (long u = 0; u < to_alloc && pos < entered.size(); ++u, ++pos)
            assign[entered[pos]] = g.open[g.cls_slots[s].oi];
        for (const auto& [oi, edge] : slot_inside[s]) {
            long units = net.flow_on(edge);
            for (long u = 0; u < units && pos < entered.size(); ++u, ++pos)
                assign[entered[pos]] = g.open[oi];
        }
    }
    for (int c = 0; c < nc; ++c)
        if (assign[c] < 0) return out;  // should not happen when sent == nc

    out.status = AssignStatus::Ok;
    out.assign = assign;
    out.value = eval_norm(norm_of_instance(g.inst), cost_vector(g.inst, assign));
    return out;
}

std::vector<int> cap_grid(const Rat& eps, int slot_max, int n) {
    // {0} and the powers (1+eps)^r for r in [0, ceil(log_{1+eps} n)],
    // reduced to their distinct effective integer caps.
    std::set<int> caps{0};
    Rat p = 1;
    while (true) {
        int eff = std::min<long>(slot_max, rat_floor(p).get_si());
        caps.insert(eff);
        if (p >= n || eff >= slot_max) break;
        p *= (1 + eps);
    }
    return {caps.begin(), caps.end()};
}

}  // namespace

AssignResult find_assignment(const Instance& inst, const std::vector<int>& open, const Rat& eps,
                             const FindAssignConfig& cfg) {
    AssignResult best;
    if (open.empty()) return best;
    if (!feasibility(inst, open)) return best;

    const Rat eps_eff = std::min(eps, Rat(1, 12));
    ExclusiveStructure structure = classify_clients(inst, open, eps_eff);
    if (!structure.laminar || !structure.partition)
        throw std::logic_error("find_assignment: class structure invariant violated");

    // slots
    std::vector<IncSlot> inc_slots;
    for (std::size_t oi = 0; oi < open.size(); ++oi) {
        std::map<Rat, std::vector<int>> by_disc;
        for (int c : structure.inclusive)
            by_disc[round_up_power(fc(inst, open[oi], c), eps_eff)].push_back(c);
        for (auto& [disc, clients] : by_disc)
            inc_slots.push_back({static_cast<int>(oi), disc, clients});
    }
    std::vector<ClassSlot> cls_slots;
    for (std::size_t ci = 0; ci < structure.classes.size(); ++ci)
        for (std::size_t oi = 0; oi < open.size(); ++oi) {
            const auto& X = structure.classes[ci].facilities;
            if (std::find(X.begin(), X.end(), open[oi]) == X.end())
                cls_slots.push_back({static_cast<int>(ci), static_cast<int>(oi)});
        }
    // clients of each class by distance to X (ties by id)
    std::vector<std::vector<int>> class_order(structure.classes.size());
    for (std::size_t ci = 0; ci < structure.classes.size(); ++ci) {
        class_order[ci] = structure.classes[ci].clients;
        const auto& X = structure.classes[ci].facilities;
        std::stable_sort(class_order[ci].begin(), class_order[ci].end(), [&](int a, int b) {
            return dist_to_set(inst, a, X) < dist_to_set(inst, b, X);
        });
    }
    Gadget gadget{inst, open, structure, inc_slots, cls_slots, class_order};

    auto offer = [&](const Table& table, const Rat& threshold) {
        AssignResult cand = solve_table(gadget, table, threshold);
        if (cand.status != AssignStatus::Ok) return;
        if (best.status != AssignStatus::Ok || cand.value < best.value) best = cand;
    };

    // per-slot cap candidates
    std::vector<std::vector<int>> inc_caps, cls_caps;
    for (const auto& slot : inc_slots)
        inc_caps.push_back(cap_grid(eps_eff, static_cast<int>(slot.clients.size()), inst.n_clients));
    for (const auto& slot : cls_slots)
        cls_caps.push_back(cap_grid(
            eps_eff, static_cast<int>(structure.classes[slot.cls].clients.size()), inst.n_clients));

    double product = 1;
    for (const auto& c : inc_caps) product *= static_cast<double>(c.size());
    for (const auto& c : cls_caps) product *= static_cast<double>(c.size());

    auto pins_from_caps = [&](const std::vector<int>& caps) {
        std::vector<int> pins(structure.classes.size(), 0);
        for (std::size_t ci = 0; ci < structure.classes.size(); ++ci) {
            long outside = 0;
            for (std::size_t s = 0; s < cls_slots.size(); ++s)
                if (cls_slots[s].cls == static_cast<int>(ci)) outside += caps[s];
            pins[ci] = static_cast<int>(std::max<long>(
                0, static_cast<long>(structure.classes[ci].clients.size()) - outside));
        }
        return pins;
    };

    if (product <= static_cast<double>(cfg.table_budget)) {
        // exhaustive sweep of the table space
        std::vector<std::size_t> idx(inc_caps.size() + cls_caps.size(), 0);
        for (;;) {
            Table table;
            for (std::size_t s = 0; s < inc_caps.size(); ++s)
                table.inc_caps.push_back(inc_caps[s][idx[s]]);
            for (std::size_t s = 0; s < cls_caps.size(); ++s)
                table.cls_caps.push_back(cls_caps[s][idx[inc_caps.size() + s]]);
            table.pins = pins_from_caps(table.cls_caps);
            offer(table, Rat(0));
            std::size_t pos = 0;
            for (; pos < idx.size(); ++pos) {
                std::size_t limit =
                    pos < inc_caps.size() ? inc_caps[pos].size() : cls_caps[pos - inc_caps.size()].size();
                if (++idx[pos] < limit) break;
                idx[pos] = 0;
            }
            if (pos == idx.size()) break;
        }
    } else {
        // covering sweep: unconstrained caps, every class pin level, and the
        // threshold-shifted proxies on the unconstrained table
        Table vacuous;
        for (const auto& slot : inc_slots)
            vacuous.inc_caps.push_back(static_cast<int>(slot.clients.size()));
        for (const auto& slot : cls_slots)
            vacuous.cls_caps.push_back(
                static_cast<int>(structure.classes[slot.cls].clients.size()));
        vacuous.pins = pins_from_caps(vacuous.cls_caps);
        offer(vacuous, Rat(0));

        std::set<Rat> thresholds;
        for (std::size_t oi = 0; oi < open.size(); ++oi)
            for (int c = 0; c < inst.n_clients; ++c) thresholds.insert(fc(inst, open[oi], c));
        for (const auto& t : thresholds) offer(vacuous, t);

        for (std::size_t ci = 0; ci < structure.classes.size(); ++ci)
            for (int pin = 0; pin <= static_cast<int>(structure.classes[ci].clients.size());
                 ++pin) {
                Table t = vacuous;
                t.pins[ci] = pin;
                offer(t, Rat(0));
                // zeroed outside caps with this pin level
                Table tz = t;
                for (std::size_t s = 0; s < cls_slots.size(); ++s)
                    if (cls_slots[s].cls == static_cast<int>(ci)) tz.cls_caps[s] = 0;
                tz.pins = pins_from_caps(tz.cls_caps);
                tz.pins[ci] = static_cast<int>(structure.classes[ci].clients.size());
                offer(tz, Rat(0));
            }
    }
    return best;
}

}  // namespace normclust
