#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "slac/model.hpp"

namespace slac {

// A derived piece of information: "variable is evaluated inside set".
struct Fact {
    int variable;
    DomainSet set;

    bool operator==(const Fact&) const = default;
};

// Derivation log shared by the AC and LAC engines. Every derived fact gets one
// node carrying its first-found justification; the first empty-set node is
// remembered for witness extraction.
struct Trace {
    enum class Kind : uint8_t {
        seed,        // probe seed fact
        potato,      // initial unary fact (x, A_x)
        projection,  // zero-premise projection of a constraint: constraint, to_pos
        step,        // single-premise step: constraint, from_pos, to_pos, premise
        ac_update,   // AC potato shrink: prev + contribs
    };
    struct Contribution {
        int constraint;
        int position;               // coordinate whose support was scanned
        std::vector<int> premises;  // trace node per scope position (-1 at `position`)
    };
    struct Node {
        int variable = -1;
        DomainSet set;
        Kind kind = Kind::seed;
        int constraint = -1;
        int from_pos = -1;
        int to_pos = -1;
        int premise = -1;
        int prev = -1;
        std::vector<Contribution> contribs;
    };
    std::vector<Node> nodes;
    int first_empty = -1;

    int add(Node n) {
        if (n.set.empty() && first_empty < 0) first_empty = static_cast<int>(nodes.size());
        nodes.push_back(std::move(n));
        return static_cast<int>(nodes.size()) - 1;
    }
};

// Projection to `to_pos` of the effective relation (filtered by potatoes)
// further filtered by from-entry in b. The elementary propagation move.
DomainSet step_image(const Template& tpl, const Instance& inst, const PotatoMap& potatoes,
                     int constraint, int from_pos, int to_pos, DomainSet b);
DomainSet step_image(const Template& tpl, const Instance& inst, int constraint, int from_pos,
                     int to_pos, DomainSet b);

// step_image with one potato overridden (probe restriction without copying the
// whole potato map).
DomainSet step_image_probe(const Template& tpl, const Instance& inst, const PotatoMap& potatoes,
                           int override_var, DomainSet override_set, int constraint, int from_pos,
                           int to_pos, DomainSet b);

struct EngineOptions {
    // When set, deterministically shuffles processing orders; fixpoints must
    // not depend on it (confluence is part of the contract).
    std::optional<uint32_t> shuffle_seed;
    bool keep_trace = true;
};

struct AcResult {
    PotatoMap potatoes;
    bool contradiction = false;
    Trace trace;
};

// Greatest potato map closed under the support-removal rule. Runs to the true
// fixpoint even past the first emptied potato so results are order-free.
AcResult ac_fixpoint(const Template& tpl, const Instance& inst);
AcResult ac_fixpoint(const Template& tpl, const Instance& inst, const PotatoMap& start,
                     const EngineOptions& opts = {});

// Subset-minimal derived facts per variable, in derivation order.
struct LacFacts {
    struct Entry {
        DomainSet set;
        int trace_node;  // -1 when the trace was not kept
    };
    std::vector<std::vector<Entry>> by_var;

    // Intersection of all facts about var; fallback when none were derived.
    DomainSet strongest(int var, DomainSet fallback) const {
        DomainSet out = fallback;
        for (const Entry& e : by_var[var]) out &= e.set;
        return out;
    }
    bool dominated(int var, DomainSet s) const {
        for (const Entry& e : by_var[var])
            if (e.set.subset_of(s)) return true;
        return false;
    }
};

struct LacResult {
    LacFacts facts;
    bool contradiction = false;
    Trace trace;
};

// Least fact set containing the seeds, the potato facts and the zero-premise
// projection facts, closed under single-fact steps. Only subset-minimal facts
// are stored; supersets carry no new information.
LacResult lac_closure(const Template& tpl, const Instance& inst, std::span<const Fact> seeds);
LacResult lac_closure(const Template& tpl, const Instance& inst, const PotatoMap& potatoes,
                      std::span<const Fact> seeds, const EngineOptions& opts = {});

// Every effective relation projects onto each of its potatoes exactly.
bool is_one_consistent(const Template& tpl, const Instance& inst);
bool is_one_consistent(const Template& tpl, const Instance& inst, const PotatoMap& potatoes);

// AC fixpoint followed by restriction; nullopt when AC empties a potato.
std::optional<Instance> one_consistent_subinstance(const Template& tpl, const Instance& inst);

}  // namespace slac
