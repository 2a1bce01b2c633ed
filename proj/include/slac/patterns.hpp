#pragma once

#include <cstddef>
#include <vector>

#include "slac/propagate.hpp"

namespace slac {

// One constraint of the target instance traversed from one occurrence to
// another. Pattern variables are implicit: begin, end and one fresh variable
// per remaining scope position, mapped onto the constraint's scope by the
// pattern homomorphism.
struct Step {
    int constraint;
    int begin_pos;
    int end_pos;

    bool operator==(const Step&) const = default;
};

// A chain of steps; step k's end occurrence and step k+1's begin occurrence
// map to the same instance variable. The empty pattern is a single variable.
struct PathPattern {
    int begin_var = -1;
    std::vector<Step> steps;

    int length() const { return static_cast<int>(steps.size()); }
    int end_var(const Instance& inst) const;

    bool operator==(const PathPattern&) const = default;
};

PathPattern empty_path(int at_var);
// Validates the chain against the instance; throws on a broken link.
PathPattern make_path(const Instance& inst, int begin_var, std::vector<Step> steps);
PathPattern concat(const Instance& inst, const PathPattern& p, const PathPattern& q);
PathPattern reverse_path(const Instance& inst, const PathPattern& p);

// B + p: end values over solutions of the pattern (filtered by the target
// potatoes along the homomorphism) whose begin value lies in b.
DomainSet propagate_path(const Template& tpl, const Instance& inst, const PotatoMap& potatoes,
                         DomainSet b, const PathPattern& p);
DomainSet propagate_path(const Template& tpl, const Instance& inst, DomainSet b,
                         const PathPattern& p);
// B - p = B + (-p).
DomainSet propagate_back(const Template& tpl, const Instance& inst, const PotatoMap& potatoes,
                         DomainSet b, const PathPattern& p);

// All path patterns of 1..max_steps steps starting at var (cycles: also ending
// at var), in deterministic depth-first order. max_steps <= 10 enforced.
std::vector<PathPattern> enumerate_paths(const Instance& inst, int var, int max_steps);
std::vector<PathPattern> enumerate_cycles(const Instance& inst, int var, int max_steps);

// A tree of constraint nodes hanging off variable nodes; node 0 is the root
// and children always have larger ids than their parents.
struct TreePattern {
    struct VarNode {
        int image;  // instance variable
    };
    struct ConsNode {
        int constraint;
        int parent_node;  // variable node the parent_pos occurrence maps to
        int parent_pos;
        std::vector<std::pair<int, int>> children;  // (scope position, variable node)
    };
    std::vector<VarNode> nodes;
    std::vector<ConsNode> cons;
    std::vector<int> leaves;  // selected degree-one variable nodes
    bool truncated = false;

    int root_image() const { return nodes.empty() ? -1 : nodes[0].image; }
};

// B + t for tree patterns: root values over solutions sending every selected
// leaf into b; computed bottom-up, exact on trees.
DomainSet propagate_tree(const Template& tpl, const Instance& inst, const PotatoMap& potatoes,
                         DomainSet b, const TreePattern& t);

// The path viewed as a tree: end variable becomes the root, begin the sole
// selected leaf.
TreePattern path_as_tree(const Instance& inst, const PathPattern& p);

// Depth-bounded truncation of the universal covering tree: breadth-first
// unrolling alternating variable and constraint layers, never re-crossing the
// occurrence edge just used. Stops early (truncated = true) at node_budget.
TreePattern uct_unroll(const Template& tpl, const Instance& inst, int root_var, int depth,
                       size_t node_budget = 100000);
// AC converges within this many rounds, so deeper trees carry no new
// propagation information.
int default_uct_depth(const Template& tpl, const Instance& inst);

struct PqResult {
    bool passes = false;
    int j = -1;              // smallest index with a in A_j + p; -1 when none
    DomainSet stabilized;    // first repeated set of the iteration
    int sequence_length = 0; // distinct sets seen before repetition
};

// Iterates A_0 = {a}, A_{k+1} = A_k + (p+q) until a set repeats (the sequence
// enters a limit cycle within 2^|A| iterations), then evaluates the
// pq condition "a in a + j(p+q) + p for some j" over the covered indices.
PqResult pq_check(const Template& tpl, const Instance& inst, const PotatoMap& potatoes, int var,
                  int value, const PathPattern& p, const PathPattern& q);

// An independently re-checkable contradiction certificate: a pattern whose
// propagation from the recorded source is empty under the recorded context.
struct Witness {
    enum class Kind : uint8_t { path, tree };
    enum class PathSource : uint8_t { seed, potato, projection };

    Kind kind = Kind::path;
    bool has_seed = false;
    int seed_var = -1;
    int seed_value = -1;      // -1 when the seed set is not a singleton
    DomainSet source_set;     // initial set of a path witness (seed/potato source)
    PotatoMap context;        // potatoes the derivation ran under

    PathSource path_source = PathSource::seed;
    int origin_constraint = -1;  // projection source
    int origin_pos = -1;
    PathPattern path;

    TreePattern tree;
    bool truncated = false;
};

// Replays the justification chain of the trace's empty fact into a pattern:
// a path for single-premise (LAC) derivations, a tree for AC derivations.
Witness extract_witness(const Template& tpl, const Instance& inst, const PotatoMap& context,
                        const Trace& trace, int failing_node = -1,
                        size_t node_budget = 10000);

bool revalidate_witness(const Template& tpl, const Instance& inst, const Witness& w);

}  // namespace slac
