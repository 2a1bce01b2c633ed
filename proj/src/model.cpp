#include "slac/model.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace slac {

int Template::value_id(const std::string& name) const {
    for (int v = 0; v < domain_size; ++v)
        if (value_names[v] == name) return v;
    return -1;
}

void Template::finalize() {
    if (domain_size <= 0) throw std::invalid_argument("template: domain must be non-empty");
    if (domain_size > 64)
        throw std::invalid_argument("template: domain size " + std::to_string(domain_size) +
                                    " exceeds the 64-value limit");
    if (value_names.empty()) {
        for (int v = 0; v < domain_size; ++v) value_names.push_back(std::to_string(v));
    }
    if (static_cast<int>(value_names.size()) != domain_size)
        throw std::invalid_argument("template: value name count does not match domain size");

    relation_index.clear();
    for (size_t r = 0; r < relations.size(); ++r) {
        const Relation& rel = relations[r];
        const std::string& name = relation_names[r];
        if (!relation_index.emplace(name, static_cast<int>(r)).second)
            throw std::invalid_argument("template: duplicate relation name '" + name + "'");
        if (rel.arity < 1)
            throw std::invalid_argument("template: relation '" + name + "' has arity < 1");
        std::set<std::vector<int>> seen;
        for (const auto& t : rel.tuples) {
            if (static_cast<int>(t.size()) != rel.arity)
                throw std::invalid_argument("template: relation '" + name +
                                            "' has a tuple of wrong length");
            for (int v : t)
                if (v < 0 || v >= domain_size)
                    throw std::invalid_argument("template: relation '" + name +
                                                "' has a tuple entry outside the domain");
            if (!seen.insert(t).second)
                throw std::invalid_argument("template: relation '" + name +
                                            "' contains a duplicate tuple");
        }
    }
}

void Instance::finalize(const Template& tpl) {
    variable_index.clear();
    for (size_t i = 0; i < variable_names.size(); ++i) {
        if (!variable_index.emplace(variable_names[i], static_cast<int>(i)).second)
            throw std::invalid_argument("instance: duplicate variable '" + variable_names[i] + "'");
    }
    potatoes.resize(variable_names.size(), tpl.full_domain());

    incidence.assign(variable_names.size(), {});
    for (size_t c = 0; c < constraints.size(); ++c) {
        const auto& scope = constraints[c].scope;
        for (size_t p = 0; p < scope.size(); ++p) {
            int v = scope[p];
            if (v >= 0 && v < n_vars())
                incidence[v].push_back({static_cast<int>(c), static_cast<int>(p)});
        }
    }
}

std::vector<std::string> validate(const Template& tpl, const Instance& inst) {
    std::vector<std::string> diags;
    for (int x = 0; x < inst.n_vars(); ++x) {
        if (!inst.potatoes[x].subset_of(tpl.full_domain()))
            diags.push_back("variable '" + inst.variable_names[x] +
                            "': potato contains values outside the domain");
    }
    if (static_cast<int>(inst.potatoes.size()) != inst.n_vars())
        diags.push_back("instance: potato map does not cover every variable");
    for (size_t c = 0; c < inst.constraints.size(); ++c) {
        const Constraint& con = inst.constraints[c];
        std::string where = "constraint #" + std::to_string(c);
        if (con.relation < 0 || con.relation >= static_cast<int>(tpl.relations.size())) {
            diags.push_back(where + ": unknown relation");
            continue;
        }
        where += " (" + tpl.relation_names[con.relation] + ")";
        if (static_cast<int>(con.scope.size()) != tpl.relations[con.relation].arity)
            diags.push_back(where + ": scope length " + std::to_string(con.scope.size()) +
                            " does not match relation arity " +
                            std::to_string(tpl.relations[con.relation].arity));
        for (int v : con.scope)
            if (v < 0 || v >= inst.n_vars())
                diags.push_back(where + ": scope references an undeclared variable");
    }
    return diags;
}

Instance restrict_instance(const Template& tpl, const Instance& inst, const PotatoMap& new_potatoes) {
    if (static_cast<int>(new_potatoes.size()) != inst.n_vars())
        throw std::invalid_argument("restrict: potato map must cover every variable");
    for (int x = 0; x < inst.n_vars(); ++x) {
        if (!new_potatoes[x].subset_of(inst.potatoes[x]))
            throw std::invalid_argument("restrict: potato of '" + inst.variable_names[x] +
                                        "' is not contained in the current potato");
    }
    Instance out = inst;
    out.potatoes = new_potatoes;
    out.finalize(tpl);
    return out;
}

bool check_solution(const Template& tpl, const Instance& inst, const Assignment& asg) {
    if (static_cast<int>(asg.size()) != inst.n_vars())
        throw std::invalid_argument("check_solution: assignment must be total");
    for (int x = 0; x < inst.n_vars(); ++x) {
        if (asg[x] < 0 || asg[x] >= tpl.domain_size)
            throw std::invalid_argument("check_solution: assignment must be total");
        if (!inst.potatoes[x].contains(asg[x])) return false;
    }
    for (const Constraint& con : inst.constraints) {
        const Relation& rel = tpl.relations[con.relation];
        bool found = false;
        for (const auto& t : rel.tuples) {
            bool match = true;
            for (int p = 0; p < rel.arity && match; ++p) match = (t[p] == asg[con.scope[p]]);
            if (match) {
                found = true;
                break;
            }
        }
        if (!found) return false;
    }
    return true;
}

std::vector<std::vector<int>> effective_tuples(const Template& tpl, const Instance& inst,
                                               const PotatoMap& potatoes, int constraint) {
    const Constraint& con = inst.constraints[constraint];
    const Relation& rel = tpl.relations[con.relation];
    std::vector<std::vector<int>> out;
    for (const auto& t : rel.tuples) {
        bool ok = true;
        for (int p = 0; p < rel.arity && ok; ++p) ok = potatoes[con.scope[p]].contains(t[p]);
        if (ok) out.push_back(t);
    }
    return out;
}

DomainSet project_effective(const Template& tpl, const Instance& inst, const PotatoMap& potatoes,
                            int constraint, int position) {
    const Constraint& con = inst.constraints[constraint];
    const Relation& rel = tpl.relations[con.relation];
    if (position < 0 || position >= rel.arity)
        throw std::out_of_range("project_effective: bad position");
    DomainSet out;
    for (const auto& t : rel.tuples) {
        bool ok = true;
        for (int p = 0; p < rel.arity && ok; ++p) ok = potatoes[con.scope[p]].contains(t[p]);
        if (ok) out.add(t[position]);
    }
    return out;
}

bool structurally_equal(const Instance& a, const Instance& b) {
    return a.variable_names == b.variable_names && a.constraints == b.constraints &&
           a.potatoes == b.potatoes;
}

}  // namespace slac
