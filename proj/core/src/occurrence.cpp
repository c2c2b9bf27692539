#include "normclust/occurrence.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "json.hpp"

namespace normclust {

OccurrenceVector OccurrenceVector::from_pairs(std::vector<std::pair<Rat, Rat>> pairs) {
    OccurrenceVector out;
    for (auto& [d, m] : pairs) out.add(d, m);
    return out;
}

OccurrenceVector OccurrenceVector::point_mass(const Rat& distance, const Rat& mass) {
    OccurrenceVector out;
    out.add(distance, mass);
    return out;
}

void OccurrenceVector::add(const Rat& distance, const Rat& mass) {
    if (mass < 0) throw std::invalid_argument("occurrence mass must be nonnegative");
    if (distance < 0) throw std::invalid_argument("occurrence distance must be nonnegative");
    if (mass == 0) return;
    auto it = std::lower_bound(entries_.begin(), entries_.end(), distance,
                               [](const auto& e, const Rat& d) { return e.first < d; });
    if (it != entries_.end() && it->first == distance)
        it->second += mass;
    else
        entries_.insert(it, {distance, mass});
}

Rat OccurrenceVector::total_mass() const {
    Rat sum = 0;
    for (const auto& [d, m] : entries_) sum += m;
    return sum;
}

OccurrenceVector OccurrenceVector::scale_distances(const Rat& factor) const {
    OccurrenceVector out;
    for (const auto& [d, m] : entries_) out.add(d * factor, m);
    return out;
}

OccurrenceVector operator+(const OccurrenceVector& a, const OccurrenceVector& b) {
    OccurrenceVector out = a;
    for (const auto& [d, m] : b.entries_) out.add(d, m);
    return out;
}

OccurrenceVector OccurrenceVector::operator*(const Rat& mass_factor) const {
    if (mass_factor < 0) throw std::invalid_argument("mass factor must be nonnegative");
    OccurrenceVector out;
    for (const auto& [d, m] : entries_) out.add(d, m * mass_factor);
    return out;
}

OccurrenceVector occ_from_vector(const CostVector& v) {
    OccurrenceVector out;
    for (const auto& x : v) out.add(x, 1);
    return out;
}

CostVector occ_expand_sorted(const OccurrenceVector& d) {
    CostVector out;
    for (const auto& [dist, m] : d.pairs()) {
        if (!rat_is_integer(m)) throw std::invalid_argument("occ_expand: fractional mass");
        long count = m.get_num().get_si();
        for (long i = 0; i < count; ++i) out.push_back(dist);
    }
    return out;
}

Rat occ_top_l(const OccurrenceVector& d, const Rat& ell) {
    if (ell < 0 || ell > d.total_mass())
        throw std::invalid_argument("occ_top_l: ell out of [0, total mass]");
    Rat remaining = ell;
    Rat sum = 0;
    const auto& entries = d.pairs();
    for (auto it = entries.rbegin(); it != entries.rend() && remaining > 0; ++it) {
        Rat take = std::min(remaining, it->second);
        sum += take * it->first;
        remaining -= take;
    }
    return sum;
}

Coupling monotone_coupling(const OccurrenceVector& a, const OccurrenceVector& b) {
    if (a.total_mass() != b.total_mass())
        throw std::invalid_argument("coupling: total masses differ");
    Coupling z;
    auto ia = a.pairs().begin(), ea = a.pairs().end();
    auto ib = b.pairs().begin(), eb = b.pairs().end();
    Rat ra = ia == ea ? Rat(0) : ia->second;
    Rat rb = ib == eb ? Rat(0) : ib->second;
    while (ia != ea && ib != eb) {
        Rat take = std::min(ra, rb);
        z.terms.push_back({ia->first, ib->first, take});
        ra -= take;
        rb -= take;
        if (ra == 0 && ++ia != ea) ra = ia->second;
        if (rb == 0 && ++ib != eb) rb = ib->second;
    }
    return z;
}

OccurrenceVector occ_add_by_matching(const OccurrenceVector& a, const OccurrenceVector& b,
                                     const Coupling& z) {
    std::map<Rat, Rat> row, col;
    OccurrenceVector out;
    for (const auto& term : z.terms) {
        if (term[2] < 0) throw std::invalid_argument("coupling: negative mass");
        row[term[0]] += term[2];
        col[term[1]] += term[2];
        out.add(term[0] + term[1], term[2]);
    }
    auto check = [](const std::map<Rat, Rat>& sums, const OccurrenceVector& v, const char* side) {
        std::size_t nonzero = 0;
        for (const auto& [d, m] : sums) {
            if (m == 0) continue;
            ++nonzero;
            bool found = false;
            for (const auto& [dd, mm] : v.pairs())
                if (dd == d && mm == m) found = true;
            if (!found)
                throw std::invalid_argument(std::string("coupling: ") + side +
                                            " marginal mismatch");
        }
        if (nonzero != v.pairs().size())
            throw std::invalid_argument(std::string("coupling: ") + side + " marginal mismatch");
    };
    check(row, a, "row");
    check(col, b, "column");
    return out;
}

OccurrenceVector occ_oplus(const OccurrenceVector& a, const OccurrenceVector& b) {
    Coupling z = monotone_coupling(a, b);
    OccurrenceVector out;
    for (const auto& term : z.terms) out.add(term[0] + term[1], term[2]);
    return out;
}

OccurrenceVector occ_double(const OccurrenceVector& d) { return d.scale_distances(2); }

namespace {

// occ_top_l is piecewise linear in ell with kinks at cumulative masses
// (largest distances first), so checking those suffices.
std::vector<Rat> topl_breakpoints(const OccurrenceVector& v) {
    std::vector<Rat> out{Rat(0)};
    Rat acc = 0;
    const auto& entries = v.pairs();
    for (auto it = entries.rbegin(); it != entries.rend(); ++it) {
        acc += it->second;
        out.push_back(acc);
    }
    return out;
}

}  // namespace

bool dominates(const OccurrenceVector& dominated, const OccurrenceVector& dominating,
               const Rat& gamma) {
    if (dominated.total_mass() != dominating.total_mass())
        throw std::invalid_argument("dominates: total masses differ");
    std::vector<Rat> points = topl_breakpoints(dominated);
    for (const auto& b : topl_breakpoints(dominating)) points.push_back(b);
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    for (const auto& ell : points)
        if (occ_top_l(dominated, ell) > gamma * occ_top_l(dominating, ell)) return false;
    return true;
}

MixBoundResult mix_bound_check(const OccurrenceVector& d, const OccurrenceVector& dprime,
                               const Rat& c, const Rat& alpha, const Rat& gamma) {
    static const Rat inv_e_upper = rat_from_string("36787944117144233/100000000000000000");
    if (!(c > inv_e_upper && c <= 1))
        throw std::invalid_argument("mix_bound_check: c must be in (1/e, 1]");
    if (alpha < 0 || alpha > c)
        throw std::invalid_argument("mix_bound_check: alpha must be in [0, c]");
    if (!dominates(dprime, d, gamma))
        throw std::invalid_argument("mix_bound_check: domination precondition not established");
    Rat n = d.total_mass();
    OccurrenceVector mixed = d * (1 - alpha) + occ_oplus(d, occ_double(dprime)) * alpha;
    Rat lhs = occ_top_l(mixed, c * n);
    Rat rhs = (1 + 2 * alpha * gamma / c) * occ_top_l(d, c * n);
    return {lhs, rhs, lhs <= rhs};
}

std::string occ_to_json(const OccurrenceVector& d) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& [dist, m] : d.pairs()) {
        nlohmann::json pair = nlohmann::json::array();
        pair.push_back(rat_to_string(dist));
        pair.push_back(rat_to_string(m));
        arr.push_back(pair);
    }
    return arr.dump();
}

OccurrenceVector occ_from_json(const std::string& text) {
    nlohmann::json arr = nlohmann::json::parse(text);
    OccurrenceVector out;
    for (const auto& pair : arr)
        out.add(rat_from_string(pair.at(0).get<std::string>()),
                rat_from_string(pair.at(1).get<std::string>()));
    return out;
}

}  // namespace normclust
