#include "normclust/metric.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "normclust/norms.hpp"
#include "json.hpp"

namespace normclust {

std::string MetricViolation::describe() const {
    std::ostringstream os;
    switch (kind) {
        case Diagonal: os << "dist[" << a << "][" << a << "] != 0"; break;
        case Symmetry: os << "dist[" << a << "][" << b << "] != dist[" << b << "][" << a << "]"; break;
        case Triangle:
            os << "dist[" << a << "][" << c << "] > dist[" << a << "][" << b << "] + dist[" << b
               << "][" << c << "]";
            break;
    }
    return os.str();
}

std::vector<MetricViolation> validate_metric(const MetricSpace& space) {
    std::vector<MetricViolation> out;
    const int n = space.point_count;
    for (int a = 0; a < n; ++a) {
        const Dist& da = space.at(a, a);
        if (!da.finite || da.value != 0) out.push_back({MetricViolation::Diagonal, a, a, -1});
    }
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            if (!(space.at(a, b) == space.at(b, a)))
                out.push_back({MetricViolation::Symmetry, a, b, -1});
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            if (b == a || !space.at(a, b).finite) continue;
            for (int c = 0; c < n; ++c) {
                if (c == a || c == b) continue;
                if (!space.at(b, c).finite || !space.at(a, c).finite) continue;
                if (space.at(a, c).value > space.at(a, b).value + space.at(b, c).value)
                    out.push_back({MetricViolation::Triangle, a, b, c});
            }
        }
    return out;
}

bool Instance::uncapacitated() const {
    for (int u : capacities)
        if (u < n_clients) return false;
    return true;
}

std::vector<int> ball(const MetricSpace& space, const std::vector<int>& domain, int center,
                      const Rat& radius) {
    if (center < 0 || center >= space.point_count)
        throw std::invalid_argument("ball: unknown point id");
    std::vector<int> out;
    for (int u : domain) {
        if (u < 0 || u >= space.point_count) throw std::invalid_argument("ball: unknown point id");
        const Dist& d = space.at(u, center);
        if (d.finite && d.value <= radius) out.push_back(u);
    }
    return out;
}

Instance round_and_scale(const Instance& inst, const Rat& l_guess, const Rat& eps) {
    if (!(eps > 0 && eps < 1)) throw std::invalid_argument("round_and_scale: eps must be in (0,1)");
    if (!(l_guess > 0)) throw std::invalid_argument("round_and_scale: l_guess must be positive");

    const int nf = inst.n_facilities, nc = inst.n_clients;
    const int n = nf + nc;
    const Rat grid = 2 * eps * l_guess / (3 * Rat(n) * Rat(n));

    // Surviving bipartite edges, floored to the grid and expressed in grid units.
    std::vector<Dist> edge(static_cast<std::size_t>(nf) * nc, Dist::inf());
    for (int i = 0; i < nf; ++i)
        for (int j = 0; j < nc; ++j) {
            const Dist& d = inst.fc_dist(i, j);
            if (d.finite && d.value <= l_guess)
                edge[static_cast<std::size_t>(i) * nc + j] = Dist{true, Rat(rat_floor(d.value / grid))};
        }

    // Metric completion over the bipartite graph (alternating shortest paths),
    // tracked in integer grid units. Floyd-Warshall on the small point set.
    Instance out = inst;
    out.space.point_count = n;
    out.space.d.assign(static_cast<std::size_t>(n) * n, Dist::inf());
    for (int a = 0; a < n; ++a) out.space.at(a, a) = Dist{true, 0};
    for (int i = 0; i < nf; ++i)
        for (int j = 0; j < nc; ++j) {
            const Dist& e = edge[static_cast<std::size_t>(i) * nc + j];
            out.space.at(i, nf + j) = e;
            out.space.at(nf + j, i) = e;
        }
    for (int m = 0; m < n; ++m)
        for (int a = 0; a < n; ++a) {
            if (!out.space.at(a, m).finite) continue;
            for (int b = 0; b < n; ++b) {
                Dist through = out.space.at(a, m) + out.space.at(m, b);
                if (through < out.space.at(a, b)) out.space.at(a, b) = through;
            }
        }
    return out;
}

namespace {

mpz_class isqrt_ceil(const mpz_class& v) {
    mpz_class r;
    mpz_sqrt(r.get_mpz_t(), v.get_mpz_t());
    if (r * r < v) r += 1;
    return r;
}

MetricSpace euclidean_like_metric(const std::vector<std::vector<long>>& coords) {
    // Euclidean distances rounded up to a fine grid. Rounding a metric up to
    // multiples of a fixed granule preserves the triangle inequality.
    const int n = static_cast<int>(coords.size());
    const long scale = 1 << 20;
    MetricSpace space;
    space.point_count = n;
    space.d.assign(static_cast<std::size_t>(n) * n, Dist{true, 0});
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) {
            mpz_class sq = 0;
            for (std::size_t t = 0; t < coords[a].size(); ++t) {
                mpz_class diff = coords[a][t] - coords[b][t];
                sq += diff * diff;
            }
            mpz_class scaled = isqrt_ceil(sq * scale * scale);
            Rat d(scaled, scale);
            d.canonicalize();
            space.at(a, b) = Dist{true, d};
            space.at(b, a) = Dist{true, d};
        }
    return space;
}

void assign_capacities(Instance& inst, const GenParams& p, Rng& rng) {
    inst.capacities.resize(inst.n_facilities);
    for (int i = 0; i < inst.n_facilities; ++i) {
        if (p.cap_min <= 0 || p.cap_max < p.cap_min)
            inst.capacities[i] = inst.n_clients;
        else
            inst.capacities[i] =
                p.cap_min + static_cast<int>(rng.next_below(p.cap_max - p.cap_min + 1));
    }
}

}  // namespace

Instance generate_instance(const GenParams& p, std::uint64_t seed) {
    const int n = p.n_facilities + p.n_clients;
    if (p.n_facilities < 1 || p.n_clients < 1 || n > 64)
        throw std::invalid_argument("generate_instance: sizes out of range (n <= 64)");
    if (p.k < 1 || p.k > p.n_facilities)
        throw std::invalid_argument("generate_instance: k out of range");

    Rng rng(seed);
    Instance inst;
    inst.n_facilities = p.n_facilities;
    inst.n_clients = p.n_clients;
    inst.k = p.k;
    inst.norm_kind = p.norm_kind;
    inst.norm_p = p.norm_p;
    inst.norm_ell = p.norm_ell;
    inst.norm_weights = p.norm_weights;
    inst.linf_budget = p.linf_budget;

    if (p.kind == "euclidean") {
        if (p.dim < 1 || p.dim > 8) throw std::invalid_argument("generate_instance: bad dim");
        std::vector<std::vector<long>> coords(n, std::vector<long>(p.dim));
        for (auto& pt : coords)
            for (long& x : pt) x = static_cast<long>(rng.next_below(1000));
        inst.space = euclidean_like_metric(coords);
    } else if (p.kind == "clustered") {
        if (p.centers < 1) throw std::invalid_argument("generate_instance: bad centers");
        if (!(p.spread > 0 && p.spread < 1))
            throw std::invalid_argument("generate_instance: spread must be in (0,1)");
        const long box = 1000;
        const long radius = std::max<long>(1, static_cast<long>(rat_to_double(p.spread * box)));
        std::vector<std::vector<long>> ctrs(p.centers, std::vector<long>(2));
        for (auto& c : ctrs)
            for (long& x : c) x = static_cast<long>(rng.next_below(box + 1));
        std::vector<std::vector<long>> coords(n, std::vector<long>(2));
        for (int a = 0; a < n; ++a) {
            const auto& c = ctrs[a % p.centers];
            for (int t = 0; t < 2; ++t)
                coords[a][t] = c[t] + static_cast<long>(rng.next_below(2 * radius + 1)) - radius;
        }
        inst.space = euclidean_like_metric(coords);
    } else if (p.kind == "random_metric") {
        // Random symmetric integer matrix, then min-plus closure.
        MetricSpace space;
        space.point_count = n;
        space.d.assign(static_cast<std::size_t>(n) * n, Dist{true, 0});
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b) {
                Rat v(1 + static_cast<long>(rng.next_below(100)));
                space.at(a, b) = Dist{true, v};
                space.at(b, a) = Dist{true, v};
            }
        for (int m = 0; m < n; ++m)
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) {
                    Dist through = space.at(a, m) + space.at(m, b);
                    if (through < space.at(a, b)) space.at(a, b) = through;
                }
        inst.space = space;
    } else {
        throw std::invalid_argument("generate_instance: unknown kind " + p.kind);
    }

    assign_capacities(inst, p, rng);
    return inst;
}

// --- JSON ---

namespace {

using nlohmann::json;

json rat_to_json(const Rat& r) {
    if (rat_is_integer(r) && r.get_num().fits_slong_p())
        return json(static_cast<long>(r.get_num().get_si()));
    return json(rat_to_string(r));
}

Rat rat_from_json(const json& j) {
    if (j.is_number_integer()) return Rat(static_cast<long>(j.get<long long>()));
    if (j.is_string()) return rat_from_string(j.get<std::string>());
    throw std::invalid_argument("expected rational (integer or \"num/den\" string)");
}

json norm_to_json(const Instance& inst) {
    json jn;
    switch (inst.norm_kind) {
        case NormSpec::LInf: jn["kind"] = "linf"; break;
        case NormSpec::L1: jn["kind"] = "l1"; break;
        case NormSpec::Lp:
            jn["kind"] = "lp";
            jn["p"] = inst.norm_p;
            break;
        case NormSpec::TopL:
            jn["kind"] = "topl";
            jn["ell"] = rat_to_json(inst.norm_ell);
            break;
        case NormSpec::Ordered: {
            jn["kind"] = "ordered";
            json w = json::array();
            for (const auto& x : inst.norm_weights) w.push_back(rat_to_json(x));
            jn["weights"] = w;
            break;
        }
        default: throw std::invalid_argument("bad norm kind");
    }
    return jn;
}

}  // namespace

std::string instance_to_json(const Instance& inst) {
    json j;
    j["n_facilities"] = inst.n_facilities;
    j["n_clients"] = inst.n_clients;
    json dist = json::array();
    const int n = inst.total_points();
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            const Dist& d = inst.space.at(a, b);
            dist.push_back(d.finite ? rat_to_json(d.value) : json("inf"));
        }
    j["dist"] = dist;
    j["capacities"] = inst.capacities;
    j["k"] = inst.k;
    j["norm"] = norm_to_json(inst);
    if (inst.linf_budget) j["linf_budget"] = rat_to_json(*inst.linf_budget);
    return j.dump(2);
}

Instance instance_from_json(const std::string& text) {
    json j = json::parse(text);
    Instance inst;
    inst.n_facilities = j.at("n_facilities").get<int>();
    inst.n_clients = j.at("n_clients").get<int>();
    const int n = inst.n_facilities + inst.n_clients;
    if (inst.n_facilities < 1 || inst.n_clients < 0)
        throw std::invalid_argument("instance: bad sizes");
    const auto& dist = j.at("dist");
    if (static_cast<int>(dist.size()) != n * n)
        throw std::invalid_argument("instance: dist must be row-major n x n");
    inst.space.point_count = n;
    inst.space.d.resize(static_cast<std::size_t>(n) * n);
    for (int idx = 0; idx < n * n; ++idx) {
        const auto& cell = dist[idx];
        if (cell.is_string() && cell.get<std::string>() == "inf")
            inst.space.d[idx] = Dist::inf();
        else {
            Rat v = rat_from_json(cell);
            if (v < 0) throw std::invalid_argument("instance: negative distance");
            inst.space.d[idx] = Dist{true, v};
        }
    }
    inst.capacities = j.at("capacities").get<std::vector<int>>();
    if (static_cast<int>(inst.capacities.size()) != inst.n_facilities)
        throw std::invalid_argument("instance: capacities size mismatch");
    for (int u : inst.capacities)
        if (u < 1) throw std::invalid_argument("instance: capacities must be positive");
    inst.k = j.at("k").get<int>();
    if (inst.k < 1 || inst.k > inst.n_facilities) throw std::invalid_argument("instance: bad k");

    const auto& jn = j.at("norm");
    std::string kind = jn.at("kind").get<std::string>();
    if (kind == "linf")
        inst.norm_kind = NormSpec::LInf;
    else if (kind == "l1")
        inst.norm_kind = NormSpec::L1;
    else if (kind == "lp") {
        inst.norm_kind = NormSpec::Lp;
        inst.norm_p = jn.at("p").get<int>();
        if (inst.norm_p < 1) throw std::invalid_argument("instance: lp needs p >= 1");
    } else if (kind == "topl") {
        inst.norm_kind = NormSpec::TopL;
        inst.norm_ell = rat_from_json(jn.at("ell"));
        if (inst.norm_ell < 0 || inst.norm_ell > inst.n_clients)
            throw std::invalid_argument("instance: topl ell out of [0, n]");
    } else if (kind == "ordered") {
        inst.norm_kind = NormSpec::Ordered;
        for (const auto& w : jn.at("weights")) inst.norm_weights.push_back(rat_from_json(w));
    } else {
        throw std::invalid_argument("instance: unknown norm kind " + kind);
    }
    if (j.contains("linf_budget")) inst.linf_budget = rat_from_json(j.at("linf_budget"));
    return inst;
}

std::uint64_t instance_hash(const Instance& inst) {
    std::string text = instance_to_json(inst);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace normclust
