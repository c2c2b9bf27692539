#include "normclust/lp_seed.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "normclust/simplex.hpp"
#include "json.hpp"

namespace normclust {

namespace {

struct CpLayout {
    // variable indices
    std::vector<std::vector<int>> x;  // facility x client, -1 when edge unusable
    int y0 = 0;                       // y_i = y0 + i
    int aux0 = 0;                     // first auxiliary variable (z / t / s blocks)
    int num_vars = 0;
    std::vector<LpRow> rows;
};

CpLayout cp_base(const Instance& inst) {
    CpLayout L;
    const int nf = inst.n_facilities, nc = inst.n_clients;
    L.x.assign(nf, std::vector<int>(nc, -1));
    int next = 0;
    for (int i = 0; i < nf; ++i)
        for (int j = 0; j < nc; ++j)
            if (inst.fc_dist(i, j).finite) L.x[i][j] = next++;
    L.y0 = next;
    next += nf;
    L.aux0 = next;
    L.num_vars = next;

    // every client fully connected
    for (int j = 0; j < nc; ++j) {
        LpRow row;
        row.rel = Rel::Eq;
        row.rhs = 1;
        for (int i = 0; i < nf; ++i)
            if (L.x[i][j] >= 0) row.coeffs.push_back({L.x[i][j], Rat(1)});
        L.rows.push_back(std::move(row));
    }
    // connect only to open facilities
    for (int i = 0; i < nf; ++i)
        for (int j = 0; j < nc; ++j)
            if (L.x[i][j] >= 0) {
                LpRow row;
                row.rel = Rel::Le;
                row.rhs = 0;
                row.coeffs = {{L.x[i][j], Rat(1)}, {L.y0 + i, Rat(-1)}};
                L.rows.push_back(std::move(row));
            }
    // capacities
    for (int i = 0; i < nf; ++i) {
        LpRow row;
        row.rel = Rel::Le;
        row.rhs = 0;
        for (int j = 0; j < nc; ++j)
            if (L.x[i][j] >= 0) row.coeffs.push_back({L.x[i][j], Rat(1)});
        row.coeffs.push_back({L.y0 + i, Rat(-inst.capacities[i])});
        L.rows.push_back(std::move(row));
    }
    // open exactly k (fractionally)
    {
        LpRow row;
        row.rel = Rel::Eq;
        row.rhs = inst.k;
        for (int i = 0; i < nf; ++i) row.coeffs.push_back({L.y0 + i, Rat(1)});
        L.rows.push_back(std::move(row));
    }
    // y <= 1
    for (int i = 0; i < nf; ++i) {
        LpRow row;
        row.rel = Rel::Le;
        row.rhs = 1;
        row.coeffs = {{L.y0 + i, Rat(1)}};
        L.rows.push_back(std::move(row));
    }
    return L;
}

FractionalSolution finish_cp(const Instance& inst, const CpLayout& L, const LpResult& res) {
    FractionalSolution sol;
    if (res.status != LpStatus::Optimal) return sol;
    const int nf = inst.n_facilities, nc = inst.n_clients;
    sol.feasible = true;
    sol.objective = res.value;
    sol.x.assign(nf, std::vector<Rat>(nc, Rat(0)));
    sol.y.assign(nf, Rat(0));
    sol.d_av.assign(nc, Rat(0));
    for (int i = 0; i < nf; ++i) {
        sol.y[i] = res.x[L.y0 + i];
        for (int j = 0; j < nc; ++j)
            if (L.x[i][j] >= 0) sol.x[i][j] = res.x[L.x[i][j]];
    }
    for (int j = 0; j < nc; ++j)
        for (int i = 0; i < nf; ++i)
            if (sol.x[i][j] != 0) sol.d_av[j] += inst.fc_dist(i, j).value * sol.x[i][j];
    return sol;
}

}  // namespace

FractionalSolution solve_cp(const Instance& inst, const Rat& t) {
    if (t < 0) throw std::invalid_argument("solve_cp: t must be nonnegative");
    CpLayout L = cp_base(inst);
    const int nc = inst.n_clients;
    int z0 = L.num_vars;
    L.num_vars += nc;
    // z_j >= d_av_j - t, in <= form with a nonnegative right side
    for (int j = 0; j < nc; ++j) {
        LpRow row;
        row.rel = Rel::Le;
        row.rhs = t;
        row.coeffs.push_back({z0 + j, Rat(-1)});
        for (int i = 0; i < inst.n_facilities; ++i)
            if (L.x[i][j] >= 0)
                row.coeffs.push_back({L.x[i][j], inst.fc_dist(i, j).value});
        L.rows.push_back(std::move(row));
    }
    std::vector<Rat> obj(L.num_vars, Rat(0));
    for (int j = 0; j < nc; ++j) obj[z0 + j] = 1;
    SimplexSolver solver(L.num_vars, L.rows);
    FractionalSolution sol = finish_cp(inst, L, solver.solve(obj));
    sol.t = t;
    return sol;
}

FractionalSolution solve_cp_norm(const Instance& inst, const NormSpec& norm) {
    // Express the norm of d_av through its threshold form: each top-l block
    // contributes variables (t_b, s_b,j) with s_b,j >= d_av_j - t_b and
    // objective coeff_b * (l_b t_b + sum_j s_b,j).
    std::vector<std::pair<Rat, Rat>> blocks;  // (coeff, ell)
    const int nc = inst.n_clients;
    switch (norm.kind) {
        case NormSpec::LInf: blocks.push_back({Rat(1), Rat(1)}); break;
        case NormSpec::L1: blocks.push_back({Rat(1), Rat(nc)}); break;
        case NormSpec::TopL: blocks.push_back({Rat(1), norm.ell}); break;
        case NormSpec::Ordered: {
            if (static_cast<int>(norm.weights.size()) != nc)
                throw std::invalid_argument("solve_cp_norm: ordered weight length mismatch");
            for (int l = 1; l <= nc; ++l) {
                Rat coeff = norm.weights[l - 1] - (l < nc ? norm.weights[l] : Rat(0));
                if (coeff > 0) blocks.push_back({coeff, Rat(l)});
            }
            if (blocks.empty()) blocks.push_back({Rat(0), Rat(1)});
            break;
        }
        case NormSpec::Lp:
            throw std::invalid_argument("solve_cp_norm: lp objective is not linear");
    }

    CpLayout L = cp_base(inst);
    std::vector<Rat> obj(L.num_vars, Rat(0));
    for (const auto& [coeff, ell] : blocks) {
        int t_var = L.num_vars++;
        int s0 = L.num_vars;
        L.num_vars += nc;
        obj.resize(L.num_vars, Rat(0));
        obj[t_var] = coeff * ell;
        for (int j = 0; j < nc; ++j) {
            obj[s0 + j] = coeff;
            LpRow row;  // s_j + t >= d_av_j, in <= form
            row.rel = Rel::Le;
            row.rhs = 0;
            row.coeffs.push_back({s0 + j, Rat(-1)});
            row.coeffs.push_back({t_var, Rat(-1)});
            for (int i = 0; i < inst.n_facilities; ++i)
                if (L.x[i][j] >= 0)
                    row.coeffs.push_back({L.x[i][j], inst.fc_dist(i, j).value});
            L.rows.push_back(std::move(row));
        }
    }
    SimplexSolver solver(L.num_vars, L.rows);
    return finish_cp(inst, L, solver.solve(obj));
}

std::vector<int> systematic_sample(const std::vector<Rat>& marginals, const Rat& u01) {
    std::vector<int> out;
    Rat prev = -u01;
    for (std::size_t j = 0; j < marginals.size(); ++j) {
        if (marginals[j] < 0 || marginals[j] > 1)
            throw std::invalid_argument("systematic_sample: marginal outside [0,1]");
        Rat cur = prev + marginals[j];
        if (rat_floor(cur) > rat_floor(prev)) out.push_back(static_cast<int>(j));
        prev = cur;
    }
    return out;
}

std::vector<std::pair<Rat, std::vector<int>>> systematic_sample_outcomes(
    const std::vector<Rat>& marginals) {
    // The selection pattern is piecewise constant in u01 with breakpoints at
    // the fractional parts of the prefix sums.
    std::vector<Rat> breaks{Rat(0), Rat(1)};
    Rat cum = 0;
    for (const auto& m : marginals) {
        cum += m;
        breaks.push_back(cum - Rat(rat_floor(cum)));
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    std::vector<std::pair<Rat, std::vector<int>>> out;
    for (std::size_t s = 0; s + 1 < breaks.size(); ++s) {
        Rat len = breaks[s + 1] - breaks[s];
        if (len == 0) continue;
        Rat mid = (breaks[s] + breaks[s + 1]) / 2;
        out.push_back({len, systematic_sample(marginals, mid)});
    }
    return out;
}

std::vector<int> dependent_round_star(const std::vector<Rat>& x_col, const Rat& y_i, int u_i,
                                      Rng& rng) {
    if (!(y_i > 0)) throw std::invalid_argument("dependent_round_star: y must be positive");
    std::vector<Rat> marginals(x_col.size());
    Rat total = 0;
    for (std::size_t j = 0; j < x_col.size(); ++j) {
        marginals[j] = x_col[j] / y_i;
        if (marginals[j] > 1)
            throw std::invalid_argument("dependent_round_star: marginal above 1");
        total += marginals[j];
    }
    if (total > u_i)
        throw std::invalid_argument("dependent_round_star: marginals exceed the capacity");
    return systematic_sample(marginals, rng.next_unit());
}

long star_iteration_count(int k, int n_clients, const Rat& eps, double c_prime) {
    double n = std::max(2, n_clients);
    return static_cast<long>(std::ceil(c_prime * k * std::log(n) / rat_to_double(eps)));
}

StarSet sample_stars(const Instance& inst, const FractionalSolution& frac, const Rat& eps,
                     const LpSeedConfig& cfg, Rng& rng) {
    if (!frac.feasible) throw std::invalid_argument("sample_stars: infeasible relaxation");
    const int nc = inst.n_clients;
    StarSet out;
    out.iterations = star_iteration_count(inst.k, nc, eps, cfg.c_prime);

    struct RawStar {
        int facility;
        std::vector<int> clients;
    };
    std::vector<RawStar> raw;
    Rat y_total = 0;
    for (const auto& y : frac.y) y_total += y;
    for (long it = 0; it < out.iterations; ++it) {
        int i = static_cast<int>(rng.next_weighted(frac.y, y_total));
        if (frac.y[i] == 0) continue;
        std::vector<int> joined =
            dependent_round_star(frac.x[i], frac.y[i], inst.capacities[i], rng);
        if (static_cast<int>(joined.size()) > inst.capacities[i])
            throw std::logic_error("sample_stars: invalid star");
        if (!joined.empty()) raw.push_back({i, std::move(joined)});
    }

    // Keep each client only in its closest star (ties: lower facility id,
    // then earlier star).
    out.star_of.assign(nc, -1);
    out.b.assign(nc, Rat(0));
    std::vector<int> best_raw(nc, -1);
    for (int r = 0; r < static_cast<int>(raw.size()); ++r)
        for (int j : raw[r].clients) {
            const Rat& d = inst.fc_dist(raw[r].facility, j).value;
            if (best_raw[j] < 0 || d < out.b[j] ||
                (d == out.b[j] && raw[r].facility < raw[best_raw[j]].facility)) {
                best_raw[j] = r;
                out.b[j] = d;
            }
        }
    std::map<int, int> raw_to_final;
    for (int j = 0; j < nc; ++j) {
        if (best_raw[j] < 0) {
            out.uncovered.push_back(j);
            continue;
        }
        auto [it, inserted] = raw_to_final.insert({best_raw[j], static_cast<int>(out.stars.size())});
        if (inserted) out.stars.push_back({raw[best_raw[j]].facility, {}});
        out.stars[it->second].clients.push_back(j);
        out.star_of[j] = it->second;
    }
    out.covered = out.uncovered.empty();
    return out;
}

StarSet sample_stars_retrying(const Instance& inst, const FractionalSolution& frac,
                              const Rat& eps, const LpSeedConfig& cfg, Rng& rng) {
    int retries = cfg.max_retries >= 0
                      ? cfg.max_retries
                      : static_cast<int>(std::ceil(std::log2(std::max(2, inst.n_clients)))) + 3;
    StarSet last;
    for (int attempt = 0; attempt <= retries; ++attempt) {
        Rng sub = rng.split("stars", attempt);
        last = sample_stars(inst, frac, eps, cfg, sub);
        if (last.covered) return last;
    }
    return last;
}

std::vector<bool> check_goodness(const StarSet& stars, const FractionalSolution& frac,
                                 const Rat& eps) {
    std::vector<bool> good(frac.d_av.size(), false);
    for (std::size_t j = 0; j < frac.d_av.size(); ++j)
        if (stars.star_of[j] >= 0 && stars.b[j] * (1 - eps) <= frac.d_av[j]) good[j] = true;
    return good;
}

bool all_good(const StarSet& stars, const FractionalSolution& frac, const Rat& eps) {
    auto flags = check_goodness(stars, frac, eps);
    return std::all_of(flags.begin(), flags.end(), [](bool g) { return g; });
}

bool threshold_certificate(const StarSet& stars, const FractionalSolution& frac, const Rat& eps) {
    if (!stars.covered) return false;
    Rat lhs = 0;
    for (std::size_t j = 0; j < stars.b.size(); ++j) {
        Rat v = (1 - eps) * stars.b[j] - frac.t;
        if (v > 0) lhs += v;
    }
    return lhs <= frac.objective;
}

namespace {

Solution best_k_subset_of(const Instance& inst, const std::vector<int>& pool) {
    // Nearest-facility assignment over every k-subset of the pool
    // (uncapacitated use only).
    const NormSpec norm = norm_of_instance(inst);
    Solution best;
    if (static_cast<int>(pool.size()) < inst.k) return best;
    std::vector<int> subset(inst.k);
    for (int i = 0; i < inst.k; ++i) subset[i] = i;
    for (;;) {
        std::vector<int> open;
        for (int s : subset) open.push_back(pool[s]);
        Assignment assign(inst.n_clients, -1);
        bool ok = true;
        for (int j = 0; j < inst.n_clients && ok; ++j) {
            for (int i : open) {
                const Dist& d = inst.fc_dist(i, j);
                if (!d.finite) continue;
                if (assign[j] < 0 || d.value < inst.fc_dist(assign[j], j).value) assign[j] = i;
            }
            if (assign[j] < 0) ok = false;
        }
        if (ok) {
            Rat value = eval_norm(norm, cost_vector(inst, assign));
            if (!best.feasible || value < best.value) {
                best.feasible = true;
                best.open = open;
                best.assign = assign;
                best.value = value;
            }
        }
        int i = inst.k - 1;
        while (i >= 0 && subset[i] == static_cast<int>(pool.size()) - inst.k + i) --i;
        if (i < 0) break;
        ++subset[i];
        for (int j = i + 1; j < inst.k; ++j) subset[j] = subset[j - 1] + 1;
    }
    return best;
}

}  // namespace

Solution simple_three_approx(const Instance& inst, const Rat& eps, Rng& rng,
                             const LpSeedConfig& cfg) {
    Instance uncap = inst;
    for (auto& u : uncap.capacities) u = uncap.n_clients;
    FractionalSolution frac = solve_cp_norm(uncap, norm_of_instance(inst));
    Solution out;
    if (!frac.feasible) {
        out.infeasible_reason = "relaxation infeasible";
        return out;
    }
    StarSet stars = sample_stars_retrying(uncap, frac, eps, cfg, rng);
    if (!stars.covered) {
        out.infeasible_reason = "star sampling failed to cover all clients";
        return out;
    }
    std::vector<int> pool;
    for (const auto& star : stars.stars) pool.push_back(star.facility);
    std::sort(pool.begin(), pool.end());
    pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
    if (static_cast<int>(pool.size()) < inst.k) {
        // fewer distinct star facilities than k: pad with the remaining ids
        for (int i = 0; i < inst.n_facilities && static_cast<int>(pool.size()) < inst.k; ++i)
            if (std::find(pool.begin(), pool.end(), i) == pool.end()) pool.push_back(i);
        std::sort(pool.begin(), pool.end());
    }
    out = best_k_subset_of(inst, pool);
    if (!out.feasible) out.infeasible_reason = "no finite nearest-facility assignment";
    out.record.algorithm = "seed3";
    return out;
}

std::string stars_to_json(const StarSet& s) {
    nlohmann::json j;
    nlohmann::json stars = nlohmann::json::array();
    for (const auto& star : s.stars) {
        nlohmann::json js;
        js["facility"] = star.facility;
        js["clients"] = star.clients;
        stars.push_back(js);
    }
    j["stars"] = stars;
    nlohmann::json b = nlohmann::json::object();
    for (std::size_t c = 0; c < s.b.size(); ++c)
        if (s.star_of[c] >= 0) b[std::to_string(c)] = rat_to_string(s.b[c]);
    j["b"] = b;
    return j.dump(2);
}

StarSet stars_from_json(const std::string& text, int n_clients) {
    nlohmann::json j = nlohmann::json::parse(text);
    StarSet s;
    s.star_of.assign(n_clients, -1);
    s.b.assign(n_clients, Rat(0));
    for (const auto& js : j.at("stars")) {
        Star star;
        star.facility = js.at("facility").get<int>();
        star.clients = js.at("clients").get<std::vector<int>>();
        for (int c : star.clients) s.star_of[c] = static_cast<int>(s.stars.size());
        s.stars.push_back(std::move(star));
    }
    const auto& b = j.at("b");
    for (auto it = b.begin(); it != b.end(); ++it)
        s.b[std::stoul(it.key())] = rat_from_string(it.value().get<std::string>());
    s.uncovered.clear();
    for (int c = 0; c < n_clients; ++c)
        if (s.star_of[c] < 0) s.uncovered.push_back(c);
    s.covered = s.uncovered.empty();
    return s;
}

}  // namespace normclust
