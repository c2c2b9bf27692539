#include "doctest.h"

#include <algorithm>

#include "normclust/norms.hpp"
#include "normclust/props.hpp"
#include "normclust/rng.hpp"

using namespace normclust;

TEST_CASE("eval_norm on the worked examples") {
    CostVector v{Rat(3), Rat(1), Rat(2)};
    CHECK(eval_norm(NormSpec::linf(), v) == Rat(3));
    CHECK(eval_norm(NormSpec::l1(), v) == Rat(6));
    CHECK(eval_norm(NormSpec::top(Rat(2)), v) == Rat(5));
    CHECK(eval_norm(NormSpec::ordered({Rat(2), Rat(1), Rat(0)}), v) == Rat(8));
    CHECK(eval_norm(NormSpec::lp(2), v) == Rat(14));  // power sum
    CHECK(lp_root(Rat(14), 2) == doctest::Approx(3.7416573868));
}

TEST_CASE("eval_norm rejects length mismatches where applicable") {
    CostVector v{Rat(1), Rat(2)};
    CHECK_THROWS(eval_norm(NormSpec::ordered({Rat(1)}), v));
    CHECK_THROWS(NormSpec::ordered({Rat(1), Rat(2)}));  // increasing weights
}

TEST_CASE("top_l interpolates fractionally") {
    CostVector v{Rat(4), Rat(2), Rat(0)};
    CHECK(top_l(v, Rat(0)) == Rat(0));
    CHECK(top_l(v, Rat(3, 2)) == Rat(5));  // 4 + 0.5*2
    CHECK(top_l(v, Rat(3)) == Rat(6));     // top-n is L1
    CHECK_THROWS(top_l(v, Rat(4)));
    CHECK_THROWS(top_l(v, Rat(-1)));
}

TEST_CASE("threshold form touches top_l at the right threshold") {
    CostVector v{Rat(4), Rat(2), Rat(0)};
    Rat ell(2);
    CHECK(top_l_via_threshold(v, ell, Rat(2)) == top_l(v, ell));  // 2nd largest
    CHECK(top_l_via_threshold(v, ell, Rat(0)) == Rat(6));         // L1 upper bound
    CHECK(top_l_via_threshold(v, ell, Rat(0)) >= top_l(v, ell));
}

TEST_CASE("min over thresholds equals sort-based top_l on random vectors") {
    Rng rng(13);
    for (int t = 0; t < 300; ++t) {
        CostVector v(6);
        for (auto& x : v) x = Rat(static_cast<long>(rng.next_below(40)));
        Rat ell = rat(static_cast<long>(rng.next_below(13)), 2);
        Rat direct = top_l(v, ell);
        Rat best = top_l_via_threshold(v, ell, Rat(0));
        for (const auto& x : v) best = std::min(best, top_l_via_threshold(v, ell, x));
        CHECK(best == direct);
    }
}

TEST_CASE("ordered norm special cases") {
    CostVector v{Rat(5), Rat(1), Rat(3)};
    CHECK(ordered_norm({Rat(1), Rat(1), Rat(1)}, v) == eval_norm(NormSpec::l1(), v));
    CHECK(ordered_norm({Rat(1), Rat(0), Rat(0)}, v) == eval_norm(NormSpec::linf(), v));
}

TEST_CASE("both ordered-norm formulas agree on random pairs") {
    Rng rng(29);
    for (int t = 0; t < 500; ++t) {
        int len = 1 + static_cast<int>(rng.next_below(7));
        CostVector v(len);
        for (auto& x : v) x = rat(static_cast<long>(rng.next_below(30)), 1 + rng.next_below(4));
        std::vector<Rat> w(len);
        for (auto& x : w) x = Rat(static_cast<long>(rng.next_below(9)));
        std::sort(w.begin(), w.end(), std::greater<Rat>());
        Rat direct = ordered_norm(w, v);
        Rat combo = 0;
        for (int l = 1; l <= len; ++l) {
            Rat coeff = w[l - 1] - (l < len ? w[l] : Rat(0));
            if (coeff != 0) combo += coeff * top_l(v, Rat(l));
        }
        CHECK(direct == combo);
    }
}

TEST_CASE("integer top-l equals the 0/1-prefix ordered norm") {
    Rng rng(31);
    for (int t = 0; t < 100; ++t) {
        int len = 1 + static_cast<int>(rng.next_below(6));
        int ell = 1 + static_cast<int>(rng.next_below(len));
        CostVector v(len);
        for (auto& x : v) x = Rat(static_cast<long>(rng.next_below(25)));
        std::vector<Rat> w(len, Rat(0));
        for (int i = 0; i < ell; ++i) w[i] = 1;
        CHECK(top_l(v, Rat(ell)) == ordered_norm(w, v));
    }
}

TEST_CASE("norm axiom property suite") {
    PropReport rep = prop_norm_axioms(150, Rng(77));
    CHECK(rep.violations == 0);
}

TEST_CASE("a sampled max of ordered norms is monotone, symmetric and subadditive") {
    // finite family W of nonincreasing weight vectors; the pointwise max
    // behaves like a norm on sampled vectors
    Rng rng(41);
    const int len = 5;
    std::vector<std::vector<Rat>> W;
    for (int s = 0; s < 6; ++s) {
        std::vector<Rat> w(len);
        for (auto& x : w) x = Rat(static_cast<long>(rng.next_below(8)));
        std::sort(w.begin(), w.end(), std::greater<Rat>());
        W.push_back(w);
    }
    auto sampled_max = [&W](const CostVector& v) {
        Rat best = 0;
        for (const auto& w : W) best = std::max(best, ordered_norm(w, v));
        return best;
    };
    for (int t = 0; t < 200; ++t) {
        CostVector x(len), y(len);
        for (auto& e : x) e = Rat(static_cast<long>(rng.next_below(20)));
        for (auto& e : y) e = Rat(static_cast<long>(rng.next_below(20)));
        CostVector xy(len), bigger(len);
        for (int i = 0; i < len; ++i) {
            xy[i] = x[i] + y[i];
            bigger[i] = x[i] + Rat(static_cast<long>(rng.next_below(5)));
        }
        CHECK(sampled_max(xy) <= sampled_max(x) + sampled_max(y));
        CHECK(sampled_max(bigger) >= sampled_max(x));
        CostVector perm = x;
        for (int i = len - 1; i > 0; --i) std::swap(perm[i], perm[rng.next_below(i + 1)]);
        CHECK(sampled_max(perm) == sampled_max(x));
    }
}

TEST_CASE("norm spec parsing round trips") {
    CHECK(norm_spec_from_string("linf").kind == NormSpec::LInf);
    CHECK(norm_spec_from_string("topl:5/2").ell == Rat(5, 2));
    CHECK(norm_spec_from_string("lp:3").p == 3);
    CHECK(norm_spec_from_string("ordered:3,2,1").weights.size() == 3);
    CHECK_THROWS(norm_spec_from_string("nope"));
}
