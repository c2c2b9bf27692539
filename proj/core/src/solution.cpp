#include "normclust/solution.hpp"

#include <algorithm>
#include <sstream>

#include "json.hpp"

namespace normclust {

CostVector cost_vector(const Instance& inst, const Assignment& assign) {
    if (static_cast<int>(assign.size()) != inst.n_clients)
        throw std::invalid_argument("cost_vector: assignment size mismatch");
    CostVector v;
    v.reserve(assign.size());
    for (int j = 0; j < inst.n_clients; ++j) {
        const Dist& d = inst.fc_dist(assign[j], j);
        if (!d.finite) throw std::invalid_argument("cost_vector: infinite connection");
        v.push_back(d.value);
    }
    return v;
}

VerifyReport verify_result(const Instance& inst, const Solution& sol) {
    VerifyReport rep;
    auto flag = [&rep](std::string msg) {
        rep.ok = false;
        rep.issues.push_back(std::move(msg));
    };
    if (!sol.feasible) {
        flag("solution marked infeasible");
        return rep;
    }
    if (static_cast<int>(sol.open.size()) > inst.k) flag("more than k open facilities");
    std::vector<bool> is_open(inst.n_facilities, false);
    for (int i : sol.open) {
        if (i < 0 || i >= inst.n_facilities) {
            flag("open facility id out of range");
            return rep;
        }
        is_open[i] = true;
    }
    if (static_cast<int>(sol.assign.size()) != inst.n_clients) {
        flag("assignment does not cover every client");
        return rep;
    }
    std::vector<int> load(inst.n_facilities, 0);
    for (int j = 0; j < inst.n_clients; ++j) {
        int i = sol.assign[j];
        if (i < 0 || i >= inst.n_facilities) {
            flag("client " + std::to_string(j) + " assigned to unknown facility");
            return rep;
        }
        if (!is_open[i])
            flag("client " + std::to_string(j) + " assigned to closed facility " +
                 std::to_string(i));
        if (!inst.fc_dist(i, j).finite)
            flag("client " + std::to_string(j) + " uses an infinite edge");
        ++load[i];
    }
    for (int i = 0; i < inst.n_facilities; ++i)
        if (load[i] > inst.capacities[i])
            flag("capacity exceeded at facility " + std::to_string(i) + " (" +
                 std::to_string(load[i]) + " > " + std::to_string(inst.capacities[i]) + ")");
    if (rep.ok) {
        Rat recomputed = eval_norm(norm_of_instance(inst), cost_vector(inst, sol.assign));
        if (recomputed != sol.value)
            flag("value mismatch: recomputed " + rat_to_string(recomputed) + " vs stored " +
                 rat_to_string(sol.value));
    }
    return rep;
}

using nlohmann::json;

std::string solution_to_json(const Instance& inst, const Solution& sol) {
    json j;
    j["feasible"] = sol.feasible;
    if (!sol.feasible) j["infeasible_reason"] = sol.infeasible_reason;
    j["open"] = sol.open;
    json assign = json::object();
    for (std::size_t c = 0; c < sol.assign.size(); ++c)
        assign[std::to_string(c)] = sol.assign[c];
    j["assignment"] = assign;
    j["norm"] = json::parse(instance_to_json(inst)).at("norm");
    j["value"] = rat_to_string(sol.value);
    json meta;
    meta["instance_hash"] = sol.record.instance_hash;
    meta["algorithm"] = sol.record.algorithm;
    meta["config"] = sol.record.config;
    meta["seed"] = sol.record.seed;
    meta["guesses_examined"] = sol.record.guesses_examined;
    meta["guesses_pruned"] = sol.record.guesses_pruned;
    meta["guesses_feasible"] = sol.record.guesses_feasible;
    meta["truncated"] = sol.record.truncated;
    meta["certified"] = sol.record.certified;
    j["meta"] = meta;
    return j.dump(2);
}

Solution solution_from_json(const std::string& text) {
    json j = json::parse(text);
    Solution sol;
    sol.feasible = j.at("feasible").get<bool>();
    sol.open = j.at("open").get<std::vector<int>>();
    const auto& assign = j.at("assignment");
    sol.assign.assign(assign.size(), -1);
    for (auto it = assign.begin(); it != assign.end(); ++it) {
        std::size_t c = std::stoul(it.key());
        if (c >= sol.assign.size()) sol.assign.resize(c + 1, -1);
        sol.assign[c] = it.value().get<int>();
    }
    sol.value = rat_from_string(j.at("value").get<std::string>());
    if (j.contains("meta")) {
        const auto& meta = j.at("meta");
        sol.record.instance_hash = meta.value("instance_hash", 0ULL);
        sol.record.algorithm = meta.value("algorithm", "");
        sol.record.config = meta.value("config", "");
        sol.record.seed = meta.value("seed", 0ULL);
        sol.record.guesses_examined = meta.value("guesses_examined", 0L);
        sol.record.guesses_pruned = meta.value("guesses_pruned", 0L);
        sol.record.guesses_feasible = meta.value("guesses_feasible", 0L);
        sol.record.truncated = meta.value("truncated", false);
        sol.record.certified = meta.value("certified", false);
    }
    return sol;
}

}  // namespace normclust
