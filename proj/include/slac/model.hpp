#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "slac/domain_set.hpp"

namespace slac {

struct Relation {
    int arity = 0;
    std::vector<std::vector<int>> tuples;  // unique, each of length arity

    bool operator==(const Relation&) const = default;
};

// The fixed finite structure every instance is built over. Values are dense
// integers 0..domain_size-1; names live only in the file format.
struct Template {
    int domain_size = 0;
    std::vector<std::string> value_names;  // size() == domain_size
    std::vector<std::string> relation_names;
    std::vector<Relation> relations;  // parallel to relation_names
    std::unordered_map<std::string, int> relation_index;

    DomainSet full_domain() const { return DomainSet::full(domain_size); }
    int relation_id(const std::string& name) const {
        auto it = relation_index.find(name);
        return it == relation_index.end() ? -1 : it->second;
    }
    int value_id(const std::string& name) const;
    const std::string& value_name(int v) const { return value_names[v]; }

    // Builds indexes and default value names; throws std::invalid_argument on
    // malformed data (domain too large, tuple out of range, duplicate names).
    void finalize();
};

struct Constraint {
    std::vector<int> scope;  // variable ids; repeats permitted
    int relation = -1;

    bool operator==(const Constraint&) const = default;
};

struct Occurrence {
    int constraint;
    int position;
};

struct Instance {
    std::vector<std::string> variable_names;
    std::unordered_map<std::string, int> variable_index;
    std::vector<Constraint> constraints;
    std::vector<DomainSet> potatoes;                 // one per variable
    std::vector<std::vector<Occurrence>> incidence;  // per variable; built by finalize()

    int n_vars() const { return static_cast<int>(variable_names.size()); }
    int var_id(const std::string& name) const {
        auto it = variable_index.find(name);
        return it == variable_index.end() ? -1 : it->second;
    }

    // Fills missing potatoes with the full domain (the dummy unary constraint
    // every variable implicitly carries) and builds the occurrence index.
    void finalize(const Template& tpl);
};

// Potato overlays: engines restrict instances by swapping this vector, never
// by copying constraints.
using PotatoMap = std::vector<DomainSet>;

// Total map variable -> value; size must equal n_vars().
using Assignment = std::vector<int>;

// Structural checks; empty result iff the instance is well-formed over tpl.
std::vector<std::string> validate(const Template& tpl, const Instance& inst);

// New instance with the given potatoes; requires new_potatoes[x] subseteq old.
// Effective relations are never materialized, they are always computed on
// demand from potatoes.
Instance restrict_instance(const Template& tpl, const Instance& inst, const PotatoMap& new_potatoes);

bool check_solution(const Template& tpl, const Instance& inst, const Assignment& asg);

// Tuples of the constraint's relation with every entry inside the potato of
// the variable at that position.
std::vector<std::vector<int>> effective_tuples(const Template& tpl, const Instance& inst,
                                               const PotatoMap& potatoes, int constraint);

// Projection of the effective relation to one coordinate.
DomainSet project_effective(const Template& tpl, const Instance& inst, const PotatoMap& potatoes,
                            int constraint, int position);

bool structurally_equal(const Instance& a, const Instance& b);

}  // namespace slac
