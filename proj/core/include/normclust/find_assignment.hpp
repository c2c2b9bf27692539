#pragma once

#include <vector>

#include "normclust/metric.hpp"
#include "normclust/norms.hpp"
#include "normclust/oracle.hpp"
#include "normclust/solution.hpp"

namespace normclust {

/// Partition of the clients into facility-subset exclusivity classes and the
/// inclusive remainder. Classes with clients form a laminar family.
struct ExclusiveStructure {
    struct Class {
        std::vector<int> facilities;  // X, sorted facility ids
        std::vector<int> clients;     // C_X, sorted client ids
        int parent = -1;              // laminar tree link (index into classes)
    };
    std::vector<Class> classes;
    std::vector<int> inclusive;  // C_I
    std::vector<int> class_of;   // client -> class index, -1 for inclusive
    bool laminar = true;
    bool partition = true;
};

/// Classification by direct testing of the two distance-ratio conditions over
/// all facility subsets (|open| is small). Requires eps < 1/10.
ExclusiveStructure classify_clients(const Instance& inst, const std::vector<int>& open,
                                    const Rat& eps);

/// {(1+eps)^ceil(log_{1+eps} d(c,f)) : c inclusive}, sorted, deduplicated.
std::vector<Rat> discretized_distances(const Instance& inst, int facility,
                                       const std::vector<int>& inclusive, const Rat& eps);

struct FindAssignConfig {
    long table_budget = 20000;  // full table enumeration cap; past it a
                                // covering subset of tables is swept instead
    OracleConfig oracle;
};

/// FPT (1+eps)-approximate assignment for a fixed open set under the
/// instance norm: guesses per-slot linkage counts on a (1+eps) grid, pins
/// class prefixes, solves each guess by min-cost matching, and returns the
/// best feasible assignment by its true norm value.
AssignResult find_assignment(const Instance& inst, const std::vector<int>& open, const Rat& eps,
                             const FindAssignConfig& cfg = {});

}  // namespace normclust
