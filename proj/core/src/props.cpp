#include "normclust/props.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "normclust/lp_seed.hpp"
#include "normclust/norms.hpp"
#include "normclust/occurrence.hpp"

namespace normclust {

namespace {

Rat random_rat(Rng& rng, long max_num = 20, long max_den = 6) {
    long num = static_cast<long>(rng.next_below(max_num + 1));
    long den = 1 + static_cast<long>(rng.next_below(max_den));
    return rat(num, den);
}

CostVector random_vector(Rng& rng, int len, long max_num = 20) {
    CostVector v(len);
    for (auto& x : v) x = random_rat(rng, max_num);
    return v;
}

OccurrenceVector random_occurrence(Rng& rng, const Rat& total_mass, int support = 4) {
    // random split of total_mass over `support` random distances
    std::vector<Rat> cuts{Rat(0), total_mass};
    for (int s = 1; s < support; ++s) cuts.push_back(total_mass * rng.next_unit());
    std::sort(cuts.begin(), cuts.end());
    OccurrenceVector out;
    for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
        Rat mass = cuts[s + 1] - cuts[s];
        if (mass > 0) out.add(Rat(rng.next_below(12)), mass);
    }
    if (out.total_mass() != total_mass)  // all cuts identical
        out.add(0, total_mass - out.total_mass());
    return out;
}

void record(PropReport& rep, bool violated, const std::string& detail) {
    ++rep.trials;
    if (violated) {
        ++rep.violations;
        if (rep.samples.size() < 3) rep.samples.push_back(detail);
    }
}

}  // namespace

PropReport prop_norm_axioms(long trials, Rng rng) {
    PropReport rep{"norm-axioms", 0, 0, {}};
    for (long t = 0; t < trials; ++t) {
        int len = 2 + static_cast<int>(rng.next_below(6));
        CostVector x = random_vector(rng, len), y = random_vector(rng, len);
        NormSpec specs[] = {NormSpec::linf(), NormSpec::l1(), NormSpec::lp(2),
                            NormSpec::top(rat(1 + static_cast<long>(rng.next_below(len)), 2)),
                            NormSpec::ordered([&] {
                                std::vector<Rat> w = random_vector(rng, len, 9);
                                std::sort(w.begin(), w.end(), std::greater<Rat>());
                                return w;
                            }())};
        for (const auto& spec : specs) {
            Rat lambda = random_rat(rng, 6) + Rat(1, 3);
            bool bad = false;
            // homogeneity
            CostVector lx = x;
            for (auto& v : lx) v *= lambda;
            if (spec.kind == NormSpec::Lp) {
                if (eval_norm(spec, lx) != rat_pow(lambda, spec.p) * eval_norm(spec, x)) bad = true;
            } else if (eval_norm(spec, lx) != lambda * eval_norm(spec, x)) {
                bad = true;
            }
            // subadditivity
            CostVector xy = x;
            for (int i = 0; i < len; ++i) xy[i] += y[i];
            if (spec.kind == NormSpec::Lp) {
                double lhs = lp_root(eval_norm(spec, xy), spec.p);
                double rhs = lp_root(eval_norm(spec, x), spec.p) +
                             lp_root(eval_norm(spec, y), spec.p);
                if (lhs > rhs + 1e-9) bad = true;
            } else if (eval_norm(spec, xy) > eval_norm(spec, x) + eval_norm(spec, y)) {
                bad = true;
            }
            // monotonicity (xy >= x pointwise)
            if (eval_norm(spec, xy) < eval_norm(spec, x)) bad = true;
            // symmetry under a random permutation
            CostVector perm = x;
            for (int i = len - 1; i > 0; --i)
                std::swap(perm[i], perm[rng.next_below(i + 1)]);
            if (eval_norm(spec, perm) != eval_norm(spec, x)) bad = true;
            record(rep, bad, spec.describe());
        }
    }
    return rep;
}

PropReport prop_topl_linearization(long trials, Rng rng) {
    PropReport rep{"topl-linearization", 0, 0, {}};
    for (long t = 0; t < trials; ++t) {
        int len = 1 + static_cast<int>(rng.next_below(8));
        CostVector v(len);
        for (auto& x : v) x = Rat(rng.next_below(30));
        Rat ell = rat(static_cast<long>(rng.next_below(2 * len + 1)), 2);
        Rat direct = top_l(v, ell);
        Rat best = top_l_via_threshold(v, ell, Rat(0));
        for (const auto& x : v) best = std::min(best, top_l_via_threshold(v, ell, x));
        record(rep, best != direct, "ell=" + rat_to_string(ell));
    }
    return rep;
}

PropReport prop_ordered_dual_formula(long trials, Rng rng) {
    PropReport rep{"ordered-dual-formula", 0, 0, {}};
    for (long t = 0; t < trials; ++t) {
        int len = 1 + static_cast<int>(rng.next_below(7));
        CostVector v = random_vector(rng, len);
        std::vector<Rat> w = random_vector(rng, len, 9);
        std::sort(w.begin(), w.end(), std::greater<Rat>());
        Rat direct = ordered_norm(w, v);
        Rat combo = 0;
        for (int l = 1; l <= len; ++l) {
            Rat coeff = w[l - 1] - (l < len ? w[l] : Rat(0));
            if (coeff != 0) combo += coeff * top_l(v, Rat(l));
        }
        record(rep, direct != combo, "len=" + std::to_string(len));
    }
    return rep;
}

PropReport prop_occurrence_concavity(long trials, Rng rng) {
    PropReport rep{"occurrence-concavity", 0, 0, {}};
    for (long t = 0; t < trials; ++t) {
        Rat n(4 + static_cast<long>(rng.next_below(6)));
        OccurrenceVector a = random_occurrence(rng, n), b = random_occurrence(rng, n);
        Rat beta = rng.next_unit();
        Rat ell = rng.next_unit() * n;
        OccurrenceVector mix = a * beta + b * (1 - beta);
        bool bad = occ_top_l(mix, ell) <
                   beta * occ_top_l(a, ell) + (1 - beta) * occ_top_l(b, ell);
        record(rep, bad, "ell=" + rat_to_string(ell));
    }
    return rep;
}

PropReport prop_domination_convex_combination(long trials, Rng rng) {
    PropReport rep{"domination-convex-combination", 0, 0, {}};
    for (long t = 0; t < trials; ++t) {
        Rat n(5);
        int H = 2 + static_cast<int>(rng.next_below(3));
        Rat gamma = 1 + random_rat(rng, 3);
        std::vector<OccurrenceVector> dom, sub;
        for (int h = 0; h < H; ++h) {
            OccurrenceVector d = random_occurrence(rng, n);
            // scaling all distances by a factor <= gamma keeps domination
            OccurrenceVector dprime = d.scale_distances(rng.next_unit() * gamma);
            dom.push_back(d);
            sub.push_back(std::move(dprime));
        }
        // random point of the simplex, exactly normalized
        std::vector<Rat> betas(H);
        Rat beta_total = 0;
        for (auto& b : betas) {
            b = rng.next_unit() + Rat(1, 1000);
            beta_total += b;
        }
        for (auto& b : betas) b /= beta_total;
        OccurrenceVector mix_dom, mix_sub;
        for (int h = 0; h < H; ++h) {
            mix_dom = mix_dom + dom[h] * betas[h];
            mix_sub = mix_sub + sub[h] * betas[h];
        }
        record(rep, !dominates(mix_sub, mix_dom, gamma), "H=" + std::to_string(H));
    }
    return rep;
}

PropReport prop_domination_averaging(long trials, Rng rng) {
    PropReport rep{"domination-averaging", 0, 0, {}};
    for (long t = 0; t < trials; ++t) {
        Rat n(6);
        OccurrenceVector delta = random_occurrence(rng, n, 5);
        Rat gamma = 1 + random_rat(rng, 2);
        // random split of delta into theta^0..theta^H by splitting each entry
        int H = 1 + static_cast<int>(rng.next_below(3));
        std::vector<OccurrenceVector> theta(H + 1);
        for (const auto& [d, m] : delta.pairs()) {
            Rat remaining = m;
            for (int h = 0; h < H; ++h) {
                Rat take = remaining * rng.next_unit();
                theta[h].add(d, take);
                remaining -= take;
            }
            theta[H].add(d, remaining);
        }
        // collapse theta^1..theta^H (theta^0 stays), with b_h <= gamma * mean
        OccurrenceVector collapsed = theta[0];
        bool usable = true;
        for (int h = 1; h <= H; ++h) {
            Rat mass = theta[h].total_mass();
            if (mass == 0) continue;
            Rat mean = 0;
            for (const auto& [d, m] : theta[h].pairs()) mean += d * m;
            mean /= mass;
            Rat b = Rat(rat_floor(gamma * mean));
            collapsed.add(b, mass);
        }
        if (!usable) continue;
        record(rep, !dominates(collapsed, delta, gamma), "H=" + std::to_string(H));
    }
    return rep;
}

PropReport prop_oplus_domination(long trials, Rng rng) {
    PropReport rep{"oplus-domination", 0, 0, {}};
    for (long t = 0; t < trials; ++t) {
        Rat n(4);
        OccurrenceVector a = random_occurrence(rng, n), b = random_occurrence(rng, n);
        OccurrenceVector best = occ_oplus(a, b);
        // a random valid coupling: co-sorted on a random interleaving
        Coupling z;
        {
            auto pa = a.pairs();
            auto pb = b.pairs();
            // random order of b's entries makes a non-monotone but valid coupling
            for (int s = static_cast<int>(pb.size()) - 1; s > 0; --s)
                std::swap(pb[s], pb[rng.next_below(s + 1)]);
            std::size_t ia = 0, ib = 0;
            Rat ra = pa.empty() ? Rat(0) : pa[0].second;
            Rat rb = pb.empty() ? Rat(0) : pb[0].second;
            while (ia < pa.size() && ib < pb.size()) {
                Rat take = std::min(ra, rb);
                z.terms.push_back({pa[ia].first, pb[ib].first, take});
                ra -= take;
                rb -= take;
                if (ra == 0 && ++ia < pa.size()) ra = pa[ia].second;
                if (rb == 0 && ++ib < pb.size()) rb = pb[ib].second;
            }
        }
        OccurrenceVector mixed = occ_add_by_matching(a, b, z);
        record(rep, !dominates(mixed, best, Rat(1)), "support");
    }
    return rep;
}

PropReport prop_mix_bound(long trials, Rng rng) {
    PropReport rep{"mix-bound", 0, 0, {}};
    for (long t = 0; t < trials; ++t) {
        Rat n(5);
        OccurrenceVector d = random_occurrence(rng, n);
        Rat gamma = 1 + random_rat(rng, 2, 4);
        OccurrenceVector dprime = d.scale_distances(rng.next_unit());
        if (!dominates(dprime, d, gamma)) {
            --t;
            continue;
        }
        // c in (1/e, 1], alpha in [0, c]
        Rat c = Rat(37, 100) + Rat(63, 100) * rng.next_unit();
        if (c > 1) c = 1;
        Rat alpha = c * rng.next_unit();
        MixBoundResult res = mix_bound_check(d, dprime, c, alpha, gamma);
        record(rep, !res.holds, "c=" + rat_to_string(c));
    }
    return rep;
}

PropReport prop_dependent_rounding_exact(long trials, Rng rng) {
    PropReport rep{"dependent-rounding-exact", 0, 0, {}};
    for (long t = 0; t < trials; ++t) {
        int len = 1 + static_cast<int>(rng.next_below(12));
        std::vector<Rat> marginals(len);
        for (auto& m : marginals) m = rng.next_unit();
        Rat total = 0;
        for (const auto& m : marginals) total += m;
        long cap = rat_ceil(total).get_si();

        auto outcomes = systematic_sample_outcomes(marginals);
        Rat prob_total = 0;
        std::vector<Rat> observed(len, Rat(0));
        bool bad = false;
        for (const auto& [prob, selection] : outcomes) {
            prob_total += prob;
            if (static_cast<long>(selection.size()) > cap) bad = true;
            for (int j : selection) observed[j] += prob;
        }
        if (prob_total != 1) bad = true;
        for (int j = 0; j < len; ++j)
            if (observed[j] != marginals[j]) bad = true;
        record(rep, bad, "len=" + std::to_string(len));
    }
    return rep;
}

PropReport prop_dependent_rounding_frequency(long draws, Rng rng) {
    PropReport rep{"dependent-rounding-frequency", 0, 0, {}};
    std::vector<Rat> marginals{Rat(1, 3), Rat(1, 2), Rat(1, 4), Rat(3, 4), Rat(1, 6)};
    std::vector<long> hits(marginals.size(), 0);
    for (long d = 0; d < draws; ++d) {
        auto sel = systematic_sample(marginals, rng.next_unit());
        for (int j : sel) ++hits[j];
    }
    for (std::size_t j = 0; j < marginals.size(); ++j) {
        double p = rat_to_double(marginals[j]);
        double sigma = std::sqrt(p * (1 - p) * draws);
        bool bad = std::abs(hits[j] - p * draws) > 4 * sigma;
        record(rep, bad, "marginal " + std::to_string(j));
    }
    return rep;
}

std::vector<PropReport> run_all_props(long trials, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<PropReport> out;
    out.push_back(prop_norm_axioms(trials, rng.split("norm-axioms")));
    out.push_back(prop_topl_linearization(trials, rng.split("topl-linearization")));
    out.push_back(prop_ordered_dual_formula(trials, rng.split("ordered-dual")));
    out.push_back(prop_occurrence_concavity(trials, rng.split("concavity")));
    out.push_back(prop_domination_convex_combination(trials, rng.split("convex-domination")));
    out.push_back(prop_domination_averaging(trials, rng.split("averaging")));
    out.push_back(prop_oplus_domination(trials, rng.split("oplus")));
    out.push_back(prop_mix_bound(trials, rng.split("mix")));
    out.push_back(prop_dependent_rounding_exact(std::min(trials, 200L), rng.split("rounding-exact")));
    out.push_back(prop_dependent_rounding_frequency(10000, rng.split("rounding-frequency")));
    return out;
}

}  // namespace normclust
