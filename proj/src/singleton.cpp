#include "slac/singleton.hpp"

#include <algorithm>
#include <atomic>
#include <deque>
#include <numeric>
#include <random>
#include <stdexcept>
#include <thread>
#include <unordered_map>

namespace slac {

namespace {

// Seed-local continuation of a no-seed LAC closure. close'(base + seed) equals
// the closure of the fully restricted instance: base facts only need
// re-stepping through constraints incident to the overridden variable, since
// everywhere else the effective relations are unchanged.
class LacProbe {
public:
    LacProbe(const Template& tpl, const Instance& inst, const PotatoMap& pots,
             const LacResult& base)
        : tpl_(tpl), inst_(inst), pots_(pots), base_(base) {}

    bool contradicts(int var, int value) {
        if (base_.contradiction) return true;
        var_ = var;
        set_ = DomainSet::single(value);
        local_.clear();
        queue_.clear();
        contradiction_ = false;

        submit(var_, set_);
        std::vector<int> incident;
        for (const Occurrence& occ : inst_.incidence[var_]) incident.push_back(occ.constraint);
        std::sort(incident.begin(), incident.end());
        incident.erase(std::unique(incident.begin(), incident.end()), incident.end());
        for (int c : incident) {
            const auto& scope = inst_.constraints[c].scope;
            int arity = static_cast<int>(scope.size());
            if (arity == 1) {
                // unary constraints have no steps; their projection root
                // changes under the restriction
                DomainSet proj;
                for (const auto& t : tpl_.relations[inst_.constraints[c].relation].tuples)
                    if (set_.contains(t[0])) proj.add(t[0]);
                submit(scope[0], proj);
                if (contradiction_) return true;
                continue;
            }
            for (int from = 0; from < arity && !contradiction_; ++from) {
                for (int to = 0; to < arity && !contradiction_; ++to) {
                    if (from == to) continue;
                    for (const LacFacts::Entry& e : base_.facts.by_var[scope[from]]) {
                        submit(scope[to], step_image_probe(tpl_, inst_, pots_, var_, set_, c, from,
                                                           to, e.set));
                        if (contradiction_) break;
                    }
                }
            }
        }

        while (!queue_.empty() && !contradiction_) {
            auto [v, s] = queue_.front();
            queue_.pop_front();
            for (const Occurrence& occ : inst_.incidence[v]) {
                const auto& scope = inst_.constraints[occ.constraint].scope;
                for (int to = 0; to < static_cast<int>(scope.size()); ++to) {
                    if (to == occ.position) continue;
                    submit(scope[to], step_image_probe(tpl_, inst_, pots_, var_, set_,
                                                       occ.constraint, occ.position, to, s));
                    if (contradiction_) return true;
                }
            }
        }
        return contradiction_;
    }

private:
    void submit(int v, DomainSet s) {
        if (s.empty()) {
            contradiction_ = true;
            return;
        }
        if (base_.facts.dominated(v, s)) return;
        auto& entries = local_[v];
        for (DomainSet e : entries)
            if (e.subset_of(s)) return;
        entries.push_back(s);
        queue_.push_back({v, s});
    }

    const Template& tpl_;
    const Instance& inst_;
    const PotatoMap& pots_;
    const LacResult& base_;
    int var_ = -1;
    DomainSet set_;
    std::unordered_map<int, std::vector<DomainSet>> local_;
    std::deque<std::pair<int, DomainSet>> queue_;
    bool contradiction_ = false;
};

PotatoMap with_override(const PotatoMap& pots, int var, DomainSet set) {
    PotatoMap out = pots;
    out[var] = set;
    return out;
}

struct SweepOrders {
    std::vector<int> vars;
    std::vector<int> values;
};

SweepOrders make_orders(const Template& tpl, const Instance& inst,
                        const std::optional<uint32_t>& shuffle_seed) {
    SweepOrders o;
    o.vars.resize(inst.n_vars());
    std::iota(o.vars.begin(), o.vars.end(), 0);
    o.values.resize(tpl.domain_size);
    std::iota(o.values.begin(), o.values.end(), 0);
    if (shuffle_seed) {
        std::mt19937 rng(*shuffle_seed + 7);
        std::shuffle(o.vars.begin(), o.vars.end(), rng);
        std::shuffle(o.values.begin(), o.values.end(), rng);
    }
    return o;
}

enum class Inner { ac, lac };

SingletonReport singleton_loop(const Template& tpl, const Instance& inst, Inner inner,
                               const SingletonOptions& opts) {
    if (opts.threads > 1 && opts.mode != SweepMode::frozen)
        throw std::invalid_argument("singleton: multi-threaded probing requires frozen mode");

    SingletonReport rep;
    rep.mode = opts.mode;
    rep.final_potatoes = inst.potatoes;
    SweepOrders orders = make_orders(tpl, inst, opts.shuffle_seed);

    LacResult base;
    auto rebuild_base = [&]() {
        if (inner == Inner::lac) {
            EngineOptions eo;
            eo.keep_trace = false;
            base = lac_closure(tpl, inst, rep.final_potatoes, {}, eo);
        }
    };
    auto probe = [&](const PotatoMap& pots, const LacResult& lac_base, int x, int a) {
        if (inner == Inner::lac) {
            LacProbe p(tpl, inst, pots, lac_base);
            return p.contradicts(x, a);
        }
        EngineOptions eo;
        eo.keep_trace = false;
        return ac_fixpoint(tpl, inst, with_override(pots, x, DomainSet::single(a)), eo)
            .contradiction;
    };
    auto record_removal = [&](const PotatoMap& pots, int x, int a) {
        Removal rem{x, a, std::nullopt};
        if (opts.keep_witnesses) {
            PotatoMap ctx = with_override(pots, x, DomainSet::single(a));
            if (inner == Inner::lac) {
                Fact seed{x, DomainSet::single(a)};
                LacResult lr = lac_closure(tpl, inst, ctx, std::span<const Fact>(&seed, 1), {});
                rem.witness = extract_witness(tpl, inst, ctx, lr.trace);
            } else {
                AcResult ar = ac_fixpoint(tpl, inst, ctx, {});
                Witness w = extract_witness(tpl, inst, ctx, ar.trace);
                w.has_seed = true;
                w.seed_var = x;
                w.seed_value = a;
                if (w.kind == Witness::Kind::tree) {
                    std::vector<char> has_children(w.tree.nodes.size(), 0);
                    for (const auto& cn : w.tree.cons) has_children[cn.parent_node] = 1;
                    w.tree.leaves.clear();
                    for (size_t v = 0; v < w.tree.nodes.size(); ++v)
                        if (!has_children[v] && w.tree.nodes[v].image == x)
                            w.tree.leaves.push_back(static_cast<int>(v));
                }
                rem.witness = std::move(w);
            }
        }
        rep.removals.push_back(std::move(rem));
        rep.final_potatoes[x].remove(a);
    };

    bool changed = true;
    while (changed) {
        changed = false;
        ++rep.sweeps;
        if (opts.mode == SweepMode::sequential) {
            rebuild_base();
            for (int x : orders.vars) {
                for (int a : orders.values) {
                    if (!rep.final_potatoes[x].contains(a)) continue;
                    if (probe(rep.final_potatoes, base, x, a)) {
                        record_removal(rep.final_potatoes, x, a);
                        changed = true;
                        rebuild_base();
                    }
                }
            }
        } else {
            PotatoMap frozen = rep.final_potatoes;
            rebuild_base();
            std::vector<std::pair<int, int>> probes;
            for (int x : orders.vars)
                for (int a : orders.values)
                    if (frozen[x].contains(a)) probes.emplace_back(x, a);
            std::vector<char> failed(probes.size(), 0);
            int n_threads = std::max(1, opts.threads);
            if (n_threads == 1) {
                for (size_t i = 0; i < probes.size(); ++i)
                    failed[i] = probe(frozen, base, probes[i].first, probes[i].second);
            } else {
                std::vector<std::thread> workers;
                std::atomic<size_t> next{0};
                for (int t = 0; t < n_threads; ++t) {
                    workers.emplace_back([&]() {
                        for (;;) {
                            size_t i = next.fetch_add(1);
                            if (i >= probes.size()) return;
                            failed[i] = probe(frozen, base, probes[i].first, probes[i].second);
                        }
                    });
                }
                for (auto& w : workers) w.join();
            }
            for (size_t i = 0; i < probes.size(); ++i) {
                if (failed[i]) {
                    record_removal(frozen, probes[i].first, probes[i].second);
                    changed = true;
                }
            }
        }
    }

    for (const DomainSet& p : rep.final_potatoes)
        if (p.empty()) rep.contradiction = true;
    return rep;
}

}  // namespace

SingletonReport sac_fixpoint(const Template& tpl, const Instance& inst,
                             const SingletonOptions& opts) {
    return singleton_loop(tpl, inst, Inner::ac, opts);
}

SingletonReport slac_fixpoint(const Template& tpl, const Instance& inst,
                              const SingletonOptions& opts) {
    return singleton_loop(tpl, inst, Inner::lac, opts);
}

namespace {

bool solve_rec(const Template& tpl, const Instance& inst, Assignment& out, long& decisions) {
    SingletonOptions opts;
    opts.keep_witnesses = false;
    SingletonReport rep = slac_fixpoint(tpl, inst, opts);
    if (rep.contradiction) return false;

    int branch_var = -1;
    for (int x = 0; x < inst.n_vars(); ++x) {
        if (rep.final_potatoes[x].count() > 1) {
            branch_var = x;
            break;
        }
    }
    if (branch_var < 0) {
        Assignment asg(inst.n_vars());
        for (int x = 0; x < inst.n_vars(); ++x) asg[x] = rep.final_potatoes[x].first();
        if (!check_solution(tpl, inst, asg)) return false;
        out = asg;
        return true;
    }
    Instance narrowed = restrict_instance(tpl, inst, rep.final_potatoes);
    bool found = false;
    rep.final_potatoes[branch_var].for_each([&](int a) {
        if (found) return;
        ++decisions;
        PotatoMap pots = narrowed.potatoes;
        pots[branch_var] = DomainSet::single(a);
        found = solve_rec(tpl, restrict_instance(tpl, narrowed, pots), out, decisions);
    });
    return found;
}

}  // namespace

SolveResult solve_with_slac(const Template& tpl, const Instance& inst) {
    SolveResult res;
    Assignment out;
    if (solve_rec(tpl, inst, out, res.decisions)) res.solution = out;
    return res;
}

bool is_slac_stable(const Template& tpl, const Instance& inst) {
    if (!is_one_consistent(tpl, inst)) return false;
    EngineOptions eo;
    eo.keep_trace = false;
    LacResult base = lac_closure(tpl, inst, inst.potatoes, {}, eo);
    if (base.contradiction) return false;
    LacProbe probe(tpl, inst, inst.potatoes, base);
    for (int x = 0; x < inst.n_vars(); ++x) {
        bool bad = false;
        inst.potatoes[x].for_each([&](int a) {
            if (!bad && probe.contradicts(x, a)) bad = true;
        });
        if (bad) return false;
    }
    return true;
}

}  // namespace slac
