#include "slac/oracle.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace slac::oracle {

namespace {

void check_guard(const Template& tpl, const Instance& inst) {
    if (inst.n_vars() > 24)
        throw std::invalid_argument("oracle: more than 24 variables");
    double space = std::pow(static_cast<double>(tpl.domain_size), inst.n_vars());
    if (space > 1e9) throw std::invalid_argument("oracle: search space exceeds 1e9");
}

bool tuple_in_relation(const Relation& rel, const std::vector<int>& t) {
    for (const auto& rt : rel.tuples)
        if (rt == t) return true;
    return false;
}

// Constraints become checkable once their last scope variable is assigned.
std::vector<std::vector<int>> constraints_completed_at(const Instance& inst) {
    std::vector<std::vector<int>> out(inst.n_vars());
    for (size_t c = 0; c < inst.constraints.size(); ++c) {
        int last = -1;
        for (int v : inst.constraints[c].scope) last = std::max(last, v);
        if (last >= 0) out[last].push_back(static_cast<int>(c));
    }
    return out;
}

// Sink returns false to stop the search.
template <typename Sink>
bool search(const Template& tpl, const Instance& inst,
            const std::vector<std::vector<int>>& completed, Assignment& asg, int var, Sink&& sink) {
    if (var == inst.n_vars()) return sink(asg);
    for (int a = 0; a < tpl.domain_size; ++a) {
        if (!inst.potatoes[var].contains(a)) continue;
        asg[var] = a;
        bool ok = true;
        for (int c : completed[var]) {
            const Constraint& con = inst.constraints[c];
            const Relation& rel = tpl.relations[con.relation];
            std::vector<int> t(rel.arity);
            for (int p = 0; p < rel.arity; ++p) t[p] = asg[con.scope[p]];
            if (!tuple_in_relation(rel, t)) {
                ok = false;
                break;
            }
        }
        if (ok && !search(tpl, inst, completed, asg, var + 1, sink)) return false;
        asg[var] = -1;
    }
    return true;
}

}  // namespace

std::optional<Assignment> brute_solve(const Template& tpl, const Instance& inst) {
    check_guard(tpl, inst);
    auto completed = constraints_completed_at(inst);
    Assignment asg(inst.n_vars(), -1);
    std::optional<Assignment> found;
    search(tpl, inst, completed, asg, 0, [&](const Assignment& sol) {
        found = sol;  // first solution in lexicographic order
        return false;
    });
    return found;
}

std::vector<Assignment> enumerate_solutions(const Template& tpl, const Instance& inst, size_t cap) {
    check_guard(tpl, inst);
    auto completed = constraints_completed_at(inst);
    Assignment asg(inst.n_vars(), -1);
    std::vector<Assignment> out;
    search(tpl, inst, completed, asg, 0, [&](const Assignment& sol) {
        out.push_back(sol);
        return out.size() < cap;
    });
    return out;
}

int PolymorphismCandidate::apply(const Template& tpl, const std::vector<int>& args) const {
    size_t idx = 0;
    for (int a : args) idx = idx * tpl.domain_size + a;
    return table[idx];
}

namespace {

// Odometer over arity-length argument tuples, values 0..|A|-1, first argument
// most significant; matches PolymorphismCandidate::apply indexing.
template <typename F>
void for_each_arg_tuple(int domain, int arity, F&& f) {
    std::vector<int> args(arity, 0);
    for (;;) {
        f(args);
        int k = arity - 1;
        while (k >= 0 && ++args[k] == domain) args[k--] = 0;
        if (k < 0) break;
    }
}

}  // namespace

PolymorphismCandidate projection_operation(const Template& tpl, int arity, int coordinate) {
    PolymorphismCandidate f;
    f.arity = arity;
    f.table.reserve(static_cast<size_t>(std::pow(tpl.domain_size, arity)));
    for_each_arg_tuple(tpl.domain_size, arity,
                       [&](const std::vector<int>& args) { f.table.push_back(args[coordinate]); });
    return f;
}

PolymorphismCandidate majority_operation(const Template& tpl) {
    if (tpl.domain_size != 2) throw std::invalid_argument("majority_operation: domain must be {0,1}");
    PolymorphismCandidate f;
    f.arity = 3;
    for_each_arg_tuple(2, 3, [&](const std::vector<int>& a) {
        f.table.push_back((a[0] & a[1]) | (a[1] & a[2]) | (a[0] & a[2]));
    });
    return f;
}

PolymorphismCandidate minority_operation(const Template& tpl) {
    if (tpl.domain_size != 2) throw std::invalid_argument("minority_operation: domain must be {0,1}");
    PolymorphismCandidate f;
    f.arity = 3;
    for_each_arg_tuple(2, 3,
                       [&](const std::vector<int>& a) { f.table.push_back(a[0] ^ a[1] ^ a[2]); });
    return f;
}

namespace {

// Visits every k-tuple of rows of rel; reports the coordinatewise image given
// a partial table (-1 entries undecided). Returns false iff some fully
// decided image falls outside the relation.
bool closure_holds(const Template& tpl, const Relation& rel, int arity,
                   const std::vector<int>& table) {
    size_t n_rows = rel.tuples.size();
    if (n_rows == 0) return true;
    std::vector<size_t> pick(arity, 0);
    std::vector<int> image(rel.arity);
    for (;;) {
        bool decided = true;
        for (int p = 0; p < rel.arity && decided; ++p) {
            size_t idx = 0;
            for (int k = 0; k < arity; ++k) idx = idx * tpl.domain_size + rel.tuples[pick[k]][p];
            int v = table[idx];
            if (v < 0) decided = false;
            else image[p] = v;
        }
        if (decided && !tuple_in_relation(rel, image)) return false;
        int k = arity - 1;
        while (k >= 0 && ++pick[k] == n_rows) pick[k--] = 0;
        if (k < 0) return true;
    }
}

bool closure_holds_all(const Template& tpl, int arity, const std::vector<int>& table) {
    for (const Relation& rel : tpl.relations)
        if (!closure_holds(tpl, rel, arity, table)) return false;
    return true;
}

}  // namespace

bool is_polymorphism(const Template& tpl, const PolymorphismCandidate& f) {
    return closure_holds_all(tpl, f.arity, f.table);
}

PolySearchResult find_polymorphisms(const Template& tpl, int arity, bool idempotent_only,
                                    size_t cap) {
    size_t table_size = 1;
    for (int k = 0; k < arity; ++k) table_size *= tpl.domain_size;

    std::vector<int> forced(table_size, -1);
    if (idempotent_only) {
        for (int a = 0; a < tpl.domain_size; ++a) {
            size_t idx = 0;
            for (int k = 0; k < arity; ++k) idx = idx * tpl.domain_size + a;
            forced[idx] = a;
        }
    }

    PolySearchResult res;
    std::vector<int> table(table_size, -1);
    auto rec = [&](auto&& self, size_t pos) -> bool {  // false = cap reached
        if (pos == table_size) {
            res.found.push_back({arity, table});
            return res.found.size() < cap;
        }
        for (int v = 0; v < tpl.domain_size; ++v) {
            if (forced[pos] >= 0 && v != forced[pos]) continue;
            table[pos] = v;
            if (closure_holds_all(tpl, arity, table)) {
                if (!self(self, pos + 1)) {
                    table[pos] = -1;
                    return false;
                }
            }
            table[pos] = -1;
        }
        return true;
    };
    res.truncated = !rec(rec, 0);
    return res;
}

}  // namespace slac::oracle
