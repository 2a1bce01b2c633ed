#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "slac/model.hpp"
#include "slac/propagate.hpp"

namespace slac::datalog {

struct Predicate {
    enum class Kind : uint8_t { edb, idb };
    Kind kind;
    int arity;
    std::string name;
    DomainSet subset;  // idb only; the goal predicate is the empty subset
};

// EDBs are the template relations; one unary IDB per subset of the domain.
std::vector<Predicate> predicates(const Template& tpl);

// head(x_i) :- R(x_1..x_n) /\ premise_j(x_j)...  with at most one subset
// premise per body position (multiple IDBs on one variable intersect into a
// single subset IDB) and none on the head position. relation == -1 encodes the
// contradiction family empty(x) :- S(x) /\ T(x) for disjoint S, T.
struct Rule {
    int relation = -1;
    int head_pos = 0;
    std::vector<std::optional<DomainSet>> premises;  // size = arity
    DomainSet template_head;  // head computed against the unrestricted relation
    int idb_count = 0;
    DomainSet isect_s, isect_t;  // relation == -1 only

    bool operator==(const Rule&) const = default;
};

struct Program {
    enum class Kind : uint8_t { ac, lac };
    Kind kind = Kind::ac;
    int domain_size = 0;
    std::vector<Rule> rules;
};

// Requires |A| <= 8 (one IDB per subset). Heads are projections of the
// relation intersected with the premise product; trivially derivable
// full-domain heads on premise-free bodies are pruned, as are rules with an
// empty premise.
Program generate_ac_program(const Template& tpl);
// The AC program with every rule of more than one body IDB removed.
Program generate_lac_program(const Template& tpl);

// One rule per line in ":-" syntax, e.g. "x=0 :- neq(x,y), y=1".
std::string emit_program(const Template& tpl, const Program& prog);

// Ground IDB facts per (variable, subset), with the insertion log driving
// semi-naive deltas. AC evaluation closes each variable's facts under pairwise
// intersection; LAC evaluation must not.
struct FactBase {
    int domain_size = 0;
    bool auto_intersect = false;
    std::vector<std::vector<char>> present;  // [var][subset bits]
    std::vector<std::pair<int, DomainSet>> log;
    bool goal = false;

    void init(int n_vars, int domain, bool intersect);
    bool contains(int var, DomainSet s) const { return present[var][s.bits()] != 0; }
    void add(int var, DomainSet s);
    DomainSet strongest(int var, DomainSet fallback) const;
    std::vector<DomainSet> minimal_antichain(int var) const;
};

struct EvalOptions {
    bool naive = false;         // re-fire every rule each round (cross-check mode)
    bool stop_at_goal = true;   // stop as soon as the goal predicate is reached
};

struct EvalResult {
    FactBase facts;
    bool goal_reached = false;
    int rounds = 0;
};

// Bottom-up fixpoint of the program over the instance. The EDB content of a
// constraint is its effective relation (filtered by the instance potatoes);
// potato facts are seeded as the dummy unary constraints they are, and seeds
// enter as extra unary EDBs.
EvalResult evaluate(const Template& tpl, const Program& prog, const Instance& inst,
                    std::span<const Fact> seeds = {}, const EvalOptions& opts = {});

}  // namespace slac::datalog
