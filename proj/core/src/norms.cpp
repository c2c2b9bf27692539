#include "normclust/norms.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "normclust/metric.hpp"

namespace normclust {

NormSpec NormSpec::lp(int p) {
    if (p < 1) throw std::invalid_argument("lp norm needs integer p >= 1");
    return NormSpec{Lp, p, 1, {}};
}

NormSpec NormSpec::top(Rat ell) {
    if (ell < 0) throw std::invalid_argument("top-l norm needs ell >= 0");
    return NormSpec{TopL, 2, std::move(ell), {}};
}

NormSpec NormSpec::ordered(std::vector<Rat> w) {
    for (std::size_t i = 0; i + 1 < w.size(); ++i)
        if (w[i] < w[i + 1]) throw std::invalid_argument("ordered weights must be nonincreasing");
    for (const auto& x : w)
        if (x < 0) throw std::invalid_argument("ordered weights must be nonnegative");
    return NormSpec{Ordered, 2, 1, std::move(w)};
}

std::string NormSpec::describe() const {
    std::ostringstream os;
    switch (kind) {
        case LInf: os << "linf"; break;
        case L1: os << "l1"; break;
        case Lp: os << "lp:" << p; break;
        case TopL: os << "topl:" << rat_to_string(ell); break;
        case Ordered: {
            os << "ordered:";
            for (std::size_t i = 0; i < weights.size(); ++i)
                os << (i ? "," : "") << rat_to_string(weights[i]);
            break;
        }
    }
    return os.str();
}

NormSpec norm_of_instance(const Instance& inst) {
    NormSpec spec;
    spec.kind = static_cast<NormSpec::Kind>(inst.norm_kind);
    spec.p = inst.norm_p;
    spec.ell = inst.norm_ell;
    spec.weights = inst.norm_weights;
    return spec;
}

void set_instance_norm(Instance& inst, const NormSpec& spec) {
    inst.norm_kind = spec.kind;
    inst.norm_p = spec.p;
    inst.norm_ell = spec.ell;
    inst.norm_weights = spec.weights;
}

NormSpec norm_spec_from_string(const std::string& text) {
    if (text == "linf") return NormSpec::linf();
    if (text == "l1") return NormSpec::l1();
    auto colon = text.find(':');
    std::string head = text.substr(0, colon);
    std::string tail = colon == std::string::npos ? "" : text.substr(colon + 1);
    if (head == "lp") return NormSpec::lp(std::stoi(tail));
    if (head == "topl") return NormSpec::top(rat_from_string(tail));
    if (head == "ordered") {
        std::vector<Rat> w;
        std::stringstream ss(tail);
        std::string item;
        while (std::getline(ss, item, ',')) w.push_back(rat_from_string(item));
        return NormSpec::ordered(std::move(w));
    }
    throw std::invalid_argument("unknown norm spec: " + text);
}

Rat top_l(const CostVector& v, const Rat& ell) {
    if (ell < 0 || ell > static_cast<long>(v.size()))
        throw std::invalid_argument("top_l: ell out of [0, n]");
    CostVector sorted = v;
    std::sort(sorted.begin(), sorted.end(), std::greater<Rat>());
    mpz_class whole = rat_floor(ell);
    Rat frac = ell - Rat(whole);
    Rat sum = 0;
    long w = whole.get_si();
    for (long i = 0; i < w; ++i) sum += sorted[i];
    if (frac > 0) sum += frac * sorted[w];
    return sum;
}

Rat top_l_via_threshold(const CostVector& v, const Rat& ell, const Rat& t) {
    Rat sum = ell * t;
    for (const auto& x : v)
        if (x > t) sum += x - t;
    return sum;
}

Rat ordered_norm(const std::vector<Rat>& weights, const CostVector& v) {
    for (std::size_t i = 0; i + 1 < weights.size(); ++i)
        if (weights[i] < weights[i + 1])
            throw std::invalid_argument("ordered_norm: weights must be nonincreasing");
    if (weights.size() != v.size())
        throw std::invalid_argument("ordered_norm: length mismatch");
    CostVector sorted = v;
    std::sort(sorted.begin(), sorted.end(), std::greater<Rat>());
    Rat sum = 0;
    for (std::size_t i = 0; i < sorted.size(); ++i) sum += weights[i] * sorted[i];
    return sum;
}

Rat eval_norm(const NormSpec& spec, const CostVector& v) {
    switch (spec.kind) {
        case NormSpec::LInf: {
            Rat best = 0;
            for (const auto& x : v) best = std::max(best, x);
            return best;
        }
        case NormSpec::L1: {
            Rat sum = 0;
            for (const auto& x : v) sum += x;
            return sum;
        }
        case NormSpec::Lp: {
            Rat sum = 0;
            for (const auto& x : v) sum += rat_pow(x, spec.p);
            return sum;  // p-th power sum; see lp_root
        }
        case NormSpec::TopL: return top_l(v, spec.ell);
        case NormSpec::Ordered: return ordered_norm(spec.weights, v);
    }
    throw std::logic_error("eval_norm: bad kind");
}

double lp_root(const Rat& power_sum, int p) {
    return std::pow(rat_to_double(power_sum), 1.0 / p);
}

}  // namespace normclust
