#pragma once

#include <optional>
#include <vector>

#include "slac/model.hpp"

namespace slac::oracle {

// Backtracking enumeration over the potatoes, variables in declaration order,
// values ascending; no propagation of any kind. Ground truth at desk scale.
// Guard: at most 24 variables and |A|^vars <= 1e9; throws past it.
std::optional<Assignment> brute_solve(const Template& tpl, const Instance& inst);

// All solutions in lexicographic order, up to cap.
std::vector<Assignment> enumerate_solutions(const Template& tpl, const Instance& inst, size_t cap);

// A k-ary operation given by its full table; index = sum of args in base |A|,
// first argument most significant.
struct PolymorphismCandidate {
    int arity = 0;
    std::vector<int> table;  // size |A|^arity

    int apply(const Template& tpl, const std::vector<int>& args) const;
};

PolymorphismCandidate projection_operation(const Template& tpl, int arity, int coordinate);
PolymorphismCandidate majority_operation(const Template& tpl);  // |A| == 2
PolymorphismCandidate minority_operation(const Template& tpl);  // |A| == 2

// Every relation is closed under coordinatewise application of f.
bool is_polymorphism(const Template& tpl, const PolymorphismCandidate& f);

struct PolySearchResult {
    std::vector<PolymorphismCandidate> found;
    bool truncated = false;
};

// Backtracking over the table with tuple-closure propagation as the only
// pruning; deterministic lexicographic output order.
PolySearchResult find_polymorphisms(const Template& tpl, int arity, bool idempotent_only,
                                    size_t cap);

}  // namespace slac::oracle
