#pragma once

#include <optional>
#include <vector>

#include "slac/patterns.hpp"
#include "slac/propagate.hpp"

namespace slac {

enum class SweepMode : uint8_t {
    sequential,  // removals take effect immediately within the sweep (reference semantics)
    frozen,      // probes run against the sweep-start potatoes; removals applied at sweep end
};

struct Removal {
    int variable;
    int value;
    std::optional<Witness> witness;  // probe trace distilled; kept only for removed values
};

struct SingletonReport {
    PotatoMap final_potatoes;
    bool contradiction = false;
    std::vector<Removal> removals;
    int sweeps = 0;
    SweepMode mode = SweepMode::sequential;
};

struct SingletonOptions {
    SweepMode mode = SweepMode::sequential;
    int threads = 1;  // > 1 requires frozen mode
    std::optional<uint32_t> shuffle_seed;
    bool keep_witnesses = true;
};

// Round-robin sweeps over (variable, value) pairs; a value is removed when
// fixing it and running the inner engine on the restricted instance derives a
// contradiction. Sweeps repeat until one removes nothing.
SingletonReport sac_fixpoint(const Template& tpl, const Instance& inst,
                             const SingletonOptions& opts = {});
SingletonReport slac_fixpoint(const Template& tpl, const Instance& inst,
                              const SingletonOptions& opts = {});

// One-consistent and a full SLAC sweep removes nothing.
bool is_slac_stable(const Template& tpl, const Instance& inst);

struct SolveResult {
    std::optional<Assignment> solution;  // nullopt = unsatisfiable
    long decisions = 0;
};

// Complete search: slac_fixpoint, then branch on the first wide variable with
// the fixpoint re-run under every decision.
SolveResult solve_with_slac(const Template& tpl, const Instance& inst);

}  // namespace slac
