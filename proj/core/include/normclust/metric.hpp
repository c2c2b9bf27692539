#pragma once

#include <optional>
#include <string>
#include <vector>

#include "normclust/rational.hpp"
#include "normclust/rng.hpp"

namespace normclust {

/// Distance value: a nonnegative rational or the INFINITE sentinel.
/// Arithmetic saturates at infinity; infinity never compares <= a finite value.
struct Dist {
    bool finite = true;
    Rat value = 0;

    static Dist inf() { return Dist{false, 0}; }

    friend Dist operator+(const Dist& a, const Dist& b) {
        if (!a.finite || !b.finite) return inf();
        return Dist{true, a.value + b.value};
    }
    friend bool operator==(const Dist& a, const Dist& b) {
        if (a.finite != b.finite) return false;
        return !a.finite || a.value == b.value;
    }
    friend bool operator<(const Dist& a, const Dist& b) {
        if (!a.finite) return false;
        if (!b.finite) return true;
        return a.value < b.value;
    }
    friend bool operator<=(const Dist& a, const Dist& b) { return a < b || a == b; }
};

/// Finite metric given by an explicit symmetric matrix.
/// Point ids are 0..point_count-1; entries may be INFINITE.
struct MetricSpace {
    int point_count = 0;
    std::vector<Dist> d;  // row-major point_count x point_count

    const Dist& at(int a, int b) const { return d[static_cast<std::size_t>(a) * point_count + b]; }
    Dist& at(int a, int b) { return d[static_cast<std::size_t>(a) * point_count + b]; }
};

struct MetricViolation {
    enum Kind { Diagonal, Symmetry, Triangle } kind;
    int a = -1, b = -1, c = -1;
    std::string describe() const;
};

/// Empty result iff zero diagonal, symmetry and the triangle inequality
/// (over finite entries) all hold.
std::vector<MetricViolation> validate_metric(const MetricSpace& space);

struct NormSpec;  // norms.hpp

/// A capacitated k-clustering instance. Facilities are point ids
/// [0, n_facilities); clients are [n_facilities, n_facilities + n_clients).
struct Instance {
    MetricSpace space;
    int n_facilities = 0;
    int n_clients = 0;
    int k = 1;
    std::vector<int> capacities;  // per facility; uncapacitated = n_clients
    std::optional<Rat> linf_budget;
    // The norm lives in norms.hpp; stored here serialized-agnostic.
    int norm_kind = 1;            // NormSpec::Kind as int to avoid a cycle
    int norm_p = 2;
    Rat norm_ell = 1;
    std::vector<Rat> norm_weights;

    int client_point(int j) const { return n_facilities + j; }
    const Dist& fc_dist(int i, int j) const { return space.at(i, client_point(j)); }
    bool uncapacitated() const;
    int total_points() const { return n_facilities + n_clients; }
};

/// { u in domain : d(u, center) <= radius }. INFINITE is never inside a ball.
std::vector<int> ball(const MetricSpace& space, const std::vector<int>& domain, int center,
                      const Rat& radius);

/// Removes bipartite facility-client edges longer than l_guess, rounds the
/// survivors down to the grid 2*eps*L/(3 n^2), completes the metric by
/// shortest paths over the surviving bipartite graph, and rescales by
/// 3 n^2 / (2 eps L) so every finite distance is an integer.
Instance round_and_scale(const Instance& inst, const Rat& l_guess, const Rat& eps);

struct GenParams {
    std::string kind = "random_metric";  // euclidean | random_metric | clustered
    int n_facilities = 4;
    int n_clients = 8;
    int k = 2;
    int dim = 2;              // euclidean
    int centers = 3;          // clustered
    Rat spread = Rat(1, 10);  // clustered: cluster radius as fraction of box
    int cap_min = 0;          // 0,0 = uncapacitated
    int cap_max = 0;
    int norm_kind = 1;
    int norm_p = 2;
    Rat norm_ell = 1;
    std::vector<Rat> norm_weights;
    std::optional<Rat> linf_budget;
};

/// Deterministic given (params, seed); output always passes validate_metric.
Instance generate_instance(const GenParams& params, std::uint64_t seed);

// --- JSON (nlohmann) ---
std::string instance_to_json(const Instance& inst);
Instance instance_from_json(const std::string& text);
std::uint64_t instance_hash(const Instance& inst);

}  // namespace normclust
