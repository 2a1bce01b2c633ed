#include "slac/propagate.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <random>
#include <stdexcept>

namespace slac {

namespace {

DomainSet step_image_impl(const Template& tpl, const Instance& inst, const PotatoMap& potatoes,
                          int override_var, DomainSet override_set, int constraint, int from_pos,
                          int to_pos, DomainSet b) {
    if (constraint < 0 || constraint >= static_cast<int>(inst.constraints.size()))
        throw std::out_of_range("step_image: bad constraint index");
    const Constraint& con = inst.constraints[constraint];
    const Relation& rel = tpl.relations[con.relation];
    if (from_pos < 0 || from_pos >= rel.arity || to_pos < 0 || to_pos >= rel.arity)
        throw std::out_of_range("step_image: occurrence outside the constraint scope");
    if (from_pos == to_pos) throw std::invalid_argument("step_image: occurrences must differ");

    auto potato_at = [&](int var) {
        return var == override_var ? override_set : potatoes[var];
    };
    DomainSet out;
    for (const auto& t : rel.tuples) {
        if (!b.contains(t[from_pos])) continue;
        bool ok = true;
        for (int p = 0; p < rel.arity && ok; ++p) ok = potato_at(con.scope[p]).contains(t[p]);
        if (ok) out.add(t[to_pos]);
    }
    return out;
}

}  // namespace

DomainSet step_image(const Template& tpl, const Instance& inst, const PotatoMap& potatoes,
                     int constraint, int from_pos, int to_pos, DomainSet b) {
    return step_image_impl(tpl, inst, potatoes, -1, DomainSet{}, constraint, from_pos, to_pos, b);
}

DomainSet step_image(const Template& tpl, const Instance& inst, int constraint, int from_pos,
                     int to_pos, DomainSet b) {
    return step_image_impl(tpl, inst, inst.potatoes, -1, DomainSet{}, constraint, from_pos, to_pos, b);
}

DomainSet step_image_probe(const Template& tpl, const Instance& inst, const PotatoMap& potatoes,
                           int override_var, DomainSet override_set, int constraint, int from_pos,
                           int to_pos, DomainSet b) {
    return step_image_impl(tpl, inst, potatoes, override_var, override_set, constraint, from_pos,
                           to_pos, b);
}

AcResult ac_fixpoint(const Template& tpl, const Instance& inst) {
    return ac_fixpoint(tpl, inst, inst.potatoes, {});
}

AcResult ac_fixpoint(const Template& tpl, const Instance& inst, const PotatoMap& start,
                     const EngineOptions& opts) {
    const int n = inst.n_vars();
    AcResult res;
    res.potatoes = start;

    std::vector<int> var_order(n);
    std::iota(var_order.begin(), var_order.end(), 0);
    const std::vector<std::vector<Occurrence>>* inc = &inst.incidence;
    std::vector<std::vector<Occurrence>> shuffled_inc;
    if (opts.shuffle_seed) {
        std::mt19937 rng(*opts.shuffle_seed);
        std::shuffle(var_order.begin(), var_order.end(), rng);
        shuffled_inc = inst.incidence;
        for (auto& occs : shuffled_inc) std::shuffle(occs.begin(), occs.end(), rng);
        inc = &shuffled_inc;
    }

    std::vector<int> var_fact(n, -1);
    if (opts.keep_trace) {
        for (int x = 0; x < n; ++x) {
            var_fact[x] = res.trace.add(
                {x, res.potatoes[x], Trace::Kind::potato, -1, -1, -1, -1, -1, {}});
        }
    }

    std::deque<int> queue(var_order.begin(), var_order.end());
    std::vector<char> queued(n, 1);
    while (!queue.empty()) {
        int x = queue.front();
        queue.pop_front();
        queued[x] = 0;
        DomainSet cur = res.potatoes[x];
        DomainSet next = cur;
        for (const Occurrence& occ : (*inc)[x]) {
            next &= project_effective(tpl, inst, res.potatoes, occ.constraint, occ.position);
            if (next.empty()) break;
        }
        if (next == cur) continue;

        if (opts.keep_trace) {
            Trace::Node node;
            node.variable = x;
            node.set = next;
            node.kind = Trace::Kind::ac_update;
            node.prev = var_fact[x];
            DomainSet acc = cur;
            for (const Occurrence& occ : (*inc)[x]) {
                if (acc == next) break;
                DomainSet proj = project_effective(tpl, inst, res.potatoes, occ.constraint, occ.position);
                if ((acc & proj) == acc) continue;
                Trace::Contribution contrib;
                contrib.constraint = occ.constraint;
                contrib.position = occ.position;
                const auto& scope = inst.constraints[occ.constraint].scope;
                for (size_t p = 0; p < scope.size(); ++p)
                    contrib.premises.push_back(static_cast<int>(p) == occ.position
                                                   ? -1
                                                   : var_fact[scope[p]]);
                node.contribs.push_back(std::move(contrib));
                acc &= proj;
            }
            var_fact[x] = res.trace.add(std::move(node));
        }

        res.potatoes[x] = next;
        for (const Occurrence& occ : (*inc)[x]) {
            for (int y : inst.constraints[occ.constraint].scope) {
                if (!queued[y]) {
                    queued[y] = 1;
                    queue.push_back(y);
                }
            }
        }
    }

    for (int x = 0; x < n && !res.contradiction; ++x)
        if (res.potatoes[x].empty()) res.contradiction = true;
    return res;
}

LacResult lac_closure(const Template& tpl, const Instance& inst, std::span<const Fact> seeds) {
    return lac_closure(tpl, inst, inst.potatoes, seeds, {});
}

LacResult lac_closure(const Template& tpl, const Instance& inst, const PotatoMap& potatoes,
                      std::span<const Fact> seeds, const EngineOptions& opts) {
    const int n = inst.n_vars();
    LacResult res;
    res.facts.by_var.assign(n, {});

    struct Pending {
        int variable;
        DomainSet set;
    };
    std::deque<Pending> queue;

    auto submit = [&](int var, DomainSet s, Trace::Node node) {
        if (res.facts.dominated(var, s)) return;
        auto& entries = res.facts.by_var[var];
        entries.erase(std::remove_if(entries.begin(), entries.end(),
                                     [&](const LacFacts::Entry& e) { return s.subset_of(e.set); }),
                      entries.end());
        int tn = -1;
        if (opts.keep_trace) tn = res.trace.add(std::move(node));
        entries.push_back({s, tn});
        if (s.empty()) res.contradiction = true;
        queue.push_back({var, s});
    };

    for (const Fact& f : seeds) {
        if (f.variable < 0 || f.variable >= n)
            throw std::invalid_argument("lac_closure: seed on an undeclared variable");
        if (!f.set.subset_of(potatoes[f.variable]))
            throw std::invalid_argument("lac_closure: seed set exceeds the potato");
        submit(f.variable, f.set,
               {f.variable, f.set, Trace::Kind::seed, -1, -1, -1, -1, -1, {}});
    }

    std::vector<int> var_order(n);
    std::iota(var_order.begin(), var_order.end(), 0);
    std::vector<int> con_order(inst.constraints.size());
    std::iota(con_order.begin(), con_order.end(), 0);
    const std::vector<std::vector<Occurrence>>* inc = &inst.incidence;
    std::vector<std::vector<Occurrence>> shuffled_inc;
    if (opts.shuffle_seed) {
        std::mt19937 rng(*opts.shuffle_seed + 1);
        std::shuffle(var_order.begin(), var_order.end(), rng);
        std::shuffle(con_order.begin(), con_order.end(), rng);
        shuffled_inc = inst.incidence;
        for (auto& occs : shuffled_inc) std::shuffle(occs.begin(), occs.end(), rng);
        inc = &shuffled_inc;
    }

    for (int x : var_order)
        submit(x, potatoes[x], {x, potatoes[x], Trace::Kind::potato, -1, -1, -1, -1, -1, {}});
    // Zero-premise projection facts. Only unary constraints need explicit
    // roots: for arity >= 2 the projection equals a step image of a potato
    // fact, so the closure derives it (or something below it) on its own, and
    // witness chains stay rooted at seeds and potatoes.
    for (int c : con_order) {
        const Relation& rel = tpl.relations[inst.constraints[c].relation];
        if (rel.arity != 1) continue;
        DomainSet proj = project_effective(tpl, inst, potatoes, c, 0);
        submit(inst.constraints[c].scope[0], proj,
               {inst.constraints[c].scope[0], proj, Trace::Kind::projection, c, -1, 0, -1, -1, {}});
    }

    while (!queue.empty()) {
        Pending cur = queue.front();
        queue.pop_front();
        // Superseded facts propagate only dominated images; skip them.
        bool live = false;
        int premise_node = -1;
        for (const LacFacts::Entry& e : res.facts.by_var[cur.variable]) {
            if (e.set == cur.set) {
                live = true;
                premise_node = e.trace_node;
                break;
            }
        }
        if (!live) continue;

        for (const Occurrence& occ : (*inc)[cur.variable]) {
            const Relation& rel = tpl.relations[inst.constraints[occ.constraint].relation];
            for (int to = 0; to < rel.arity; ++to) {
                if (to == occ.position) continue;
                DomainSet img =
                    step_image(tpl, inst, potatoes, occ.constraint, occ.position, to, cur.set);
                submit(inst.constraints[occ.constraint].scope[to], img,
                       {inst.constraints[occ.constraint].scope[to], img, Trace::Kind::step,
                        occ.constraint, occ.position, to, premise_node, -1, {}});
            }
        }
    }
    return res;
}

bool is_one_consistent(const Template& tpl, const Instance& inst) {
    return is_one_consistent(tpl, inst, inst.potatoes);
}

bool is_one_consistent(const Template& tpl, const Instance& inst, const PotatoMap& potatoes) {
    for (size_t c = 0; c < inst.constraints.size(); ++c) {
        const Constraint& con = inst.constraints[c];
        const Relation& rel = tpl.relations[con.relation];
        for (int pos = 0; pos < rel.arity; ++pos) {
            if (project_effective(tpl, inst, potatoes, static_cast<int>(c), pos) !=
                potatoes[con.scope[pos]])
                return false;
        }
    }
    return true;
}

std::optional<Instance> one_consistent_subinstance(const Template& tpl, const Instance& inst) {
    AcResult ac = ac_fixpoint(tpl, inst);
    if (ac.contradiction) return std::nullopt;
    return restrict_instance(tpl, inst, ac.potatoes);
}

}  // namespace slac
