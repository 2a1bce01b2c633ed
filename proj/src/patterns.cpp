#include "slac/patterns.hpp"

#include <algorithm>
#include <stdexcept>

namespace slac {

namespace {

void check_step(const Instance& inst, const Step& s) {
    if (s.constraint < 0 || s.constraint >= static_cast<int>(inst.constraints.size()))
        throw std::invalid_argument("pattern step: bad constraint index");
    int arity = static_cast<int>(inst.constraints[s.constraint].scope.size());
    if (s.begin_pos < 0 || s.begin_pos >= arity || s.end_pos < 0 || s.end_pos >= arity)
        throw std::invalid_argument("pattern step: occurrence outside the scope");
    if (s.begin_pos == s.end_pos)
        throw std::invalid_argument("pattern step: begin and end occurrences must differ");
}

}  // namespace

int PathPattern::end_var(const Instance& inst) const {
    if (steps.empty()) return begin_var;
    const Step& last = steps.back();
    return inst.constraints[last.constraint].scope[last.end_pos];
}

PathPattern empty_path(int at_var) { return PathPattern{at_var, {}}; }

PathPattern make_path(const Instance& inst, int begin_var, std::vector<Step> steps) {
    int cur = begin_var;
    for (const Step& s : steps) {
        check_step(inst, s);
        const auto& scope = inst.constraints[s.constraint].scope;
        if (scope[s.begin_pos] != cur)
            throw std::invalid_argument("pattern: step does not continue from the current variable");
        cur = scope[s.end_pos];
    }
    return PathPattern{begin_var, std::move(steps)};
}

PathPattern concat(const Instance& inst, const PathPattern& p, const PathPattern& q) {
    if (p.end_var(inst) != q.begin_var)
        throw std::invalid_argument("concat: end of p and begin of q map to different variables");
    PathPattern out = p;
    out.steps.insert(out.steps.end(), q.steps.begin(), q.steps.end());
    return out;
}

PathPattern reverse_path(const Instance& inst, const PathPattern& p) {
    PathPattern out;
    out.begin_var = p.end_var(inst);
    for (auto it = p.steps.rbegin(); it != p.steps.rend(); ++it)
        out.steps.push_back({it->constraint, it->end_pos, it->begin_pos});
    return out;
}

DomainSet propagate_path(const Template& tpl, const Instance& inst, const PotatoMap& potatoes,
                         DomainSet b, const PathPattern& p) {
    if (p.begin_var < 0 || p.begin_var >= inst.n_vars())
        throw std::invalid_argument("propagate_path: bad begin variable");
    DomainSet cur = b & potatoes[p.begin_var];
    for (const Step& s : p.steps) {
        if (cur.empty()) return cur;
        cur = step_image(tpl, inst, potatoes, s.constraint, s.begin_pos, s.end_pos, cur);
    }
    return cur;
}

DomainSet propagate_path(const Template& tpl, const Instance& inst, DomainSet b,
                         const PathPattern& p) {
    return propagate_path(tpl, inst, inst.potatoes, b, p);
}

DomainSet propagate_back(const Template& tpl, const Instance& inst, const PotatoMap& potatoes,
                         DomainSet b, const PathPattern& p) {
    return propagate_path(tpl, inst, potatoes, b, reverse_path(inst, p));
}

namespace {

void enumerate_dfs(const Instance& inst, int root, int cur, int max_steps, bool cycles_only,
                   PathPattern& acc, std::vector<PathPattern>& out) {
    if (acc.length() >= 1 && (!cycles_only || cur == root)) out.push_back(acc);
    if (acc.length() >= max_steps) return;
    for (const Occurrence& occ : inst.incidence[cur]) {
        const auto& scope = inst.constraints[occ.constraint].scope;
        for (int to = 0; to < static_cast<int>(scope.size()); ++to) {
            if (to == occ.position) continue;
            acc.steps.push_back({occ.constraint, occ.position, to});
            enumerate_dfs(inst, root, scope[to], max_steps, cycles_only, acc, out);
            acc.steps.pop_back();
        }
    }
}

std::vector<PathPattern> enumerate_impl(const Instance& inst, int var, int max_steps,
                                        bool cycles_only) {
    if (var < 0 || var >= inst.n_vars())
        throw std::invalid_argument("enumerate: bad variable");
    if (max_steps < 0 || max_steps > 10)
        throw std::invalid_argument("enumerate: max_steps must be between 0 and 10");
    std::vector<PathPattern> out;
    PathPattern acc = empty_path(var);
    enumerate_dfs(inst, var, var, max_steps, cycles_only, acc, out);
    return out;
}

}  // namespace

std::vector<PathPattern> enumerate_paths(const Instance& inst, int var, int max_steps) {
    return enumerate_impl(inst, var, max_steps, false);
}

std::vector<PathPattern> enumerate_cycles(const Instance& inst, int var, int max_steps) {
    return enumerate_impl(inst, var, max_steps, true);
}

DomainSet propagate_tree(const Template& tpl, const Instance& inst, const PotatoMap& potatoes,
                         DomainSet b, const TreePattern& t) {
    if (t.nodes.empty()) return DomainSet{};
    std::vector<std::vector<int>> cons_of(t.nodes.size());
    for (size_t c = 0; c < t.cons.size(); ++c) cons_of[t.cons[c].parent_node].push_back(static_cast<int>(c));
    std::vector<char> selected(t.nodes.size(), 0);
    for (int l : t.leaves) selected[l] = 1;

    std::vector<DomainSet> sets(t.nodes.size());
    for (int v = static_cast<int>(t.nodes.size()) - 1; v >= 0; --v) {
        DomainSet s = potatoes[t.nodes[v].image];
        if (selected[v]) s &= b;
        for (int ci : cons_of[v]) {
            const TreePattern::ConsNode& cn = t.cons[ci];
            const Relation& rel = tpl.relations[inst.constraints[cn.constraint].relation];
            DomainSet proj;
            for (const auto& tup : rel.tuples) {
                bool ok = true;
                for (const auto& [pos, child] : cn.children) {
                    if (!sets[child].contains(tup[pos])) {
                        ok = false;
                        break;
                    }
                }
                if (ok) proj.add(tup[cn.parent_pos]);
            }
            s &= proj;
        }
        sets[v] = s;
    }
    return sets[0];
}

TreePattern path_as_tree(const Instance& inst, const PathPattern& p) {
    TreePattern t;
    t.nodes.push_back({p.end_var(inst)});
    int chain = 0;
    for (int k = p.length() - 1; k >= 0; --k) {
        const Step& s = p.steps[k];
        const auto& scope = inst.constraints[s.constraint].scope;
        TreePattern::ConsNode cn;
        cn.constraint = s.constraint;
        cn.parent_node = chain;
        cn.parent_pos = s.end_pos;
        int next_chain = -1;
        for (int pos = 0; pos < static_cast<int>(scope.size()); ++pos) {
            if (pos == s.end_pos) continue;
            t.nodes.push_back({scope[pos]});
            int id = static_cast<int>(t.nodes.size()) - 1;
            cn.children.push_back({pos, id});
            if (pos == s.begin_pos) next_chain = id;
        }
        t.cons.push_back(std::move(cn));
        chain = next_chain;
    }
    t.leaves = {chain};
    return t;
}

TreePattern uct_unroll(const Template& tpl, const Instance& inst, int root_var, int depth,
                       size_t node_budget) {
    (void)tpl;
    if (root_var < 0 || root_var >= inst.n_vars())
        throw std::invalid_argument("uct_unroll: bad root variable");
    TreePattern t;
    t.nodes.push_back({root_var});

    struct FrontierEntry {
        int node;
        int via_constraint;
        int via_pos;
    };
    std::vector<FrontierEntry> frontier{{0, -1, -1}};
    for (int d = 0; d < depth && !frontier.empty() && !t.truncated; ++d) {
        std::vector<FrontierEntry> next;
        for (const FrontierEntry& f : frontier) {
            if (t.truncated) break;
            int x = t.nodes[f.node].image;
            for (const Occurrence& occ : inst.incidence[x]) {
                if (occ.constraint == f.via_constraint && occ.position == f.via_pos) continue;
                const auto& scope = inst.constraints[occ.constraint].scope;
                if (t.nodes.size() + scope.size() - 1 > node_budget) {
                    t.truncated = true;
                    break;
                }
                TreePattern::ConsNode cn;
                cn.constraint = occ.constraint;
                cn.parent_node = f.node;
                cn.parent_pos = occ.position;
                for (int pos = 0; pos < static_cast<int>(scope.size()); ++pos) {
                    if (pos == occ.position) continue;
                    t.nodes.push_back({scope[pos]});
                    int id = static_cast<int>(t.nodes.size()) - 1;
                    cn.children.push_back({pos, id});
                    next.push_back({id, occ.constraint, pos});
                }
                t.cons.push_back(std::move(cn));
            }
        }
        frontier = std::move(next);
    }

    std::vector<char> has_children(t.nodes.size(), 0);
    for (const auto& cn : t.cons) has_children[cn.parent_node] = 1;
    for (size_t v = 1; v < t.nodes.size(); ++v)
        if (!has_children[v]) t.leaves.push_back(static_cast<int>(v));
    return t;
}

int default_uct_depth(const Template& tpl, const Instance& inst) {
    long long d = 2LL * inst.n_vars() * tpl.domain_size;
    return static_cast<int>(std::min<long long>(d, 64));
}

PqResult pq_check(const Template& tpl, const Instance& inst, const PotatoMap& potatoes, int var,
                  int value, const PathPattern& p, const PathPattern& q) {
    if (p.begin_var != var || p.end_var(inst) != var || q.begin_var != var ||
        q.end_var(inst) != var)
        throw std::invalid_argument("pq_check: p and q must be cycles at the variable");
    if (value < 0 || value >= tpl.domain_size)
        throw std::invalid_argument("pq_check: value outside the domain");

    PathPattern pq = concat(inst, p, q);
    PqResult res;
    std::vector<DomainSet> seen{DomainSet::single(value)};
    for (;;) {
        DomainSet cur = seen.back();
        int k = static_cast<int>(seen.size()) - 1;
        if (res.j < 0 && propagate_path(tpl, inst, potatoes, cur, p).contains(value)) {
            res.passes = true;
            res.j = k;
        }
        DomainSet nxt = propagate_path(tpl, inst, potatoes, cur, pq);
        auto it = std::find(seen.begin(), seen.end(), nxt);
        if (it != seen.end()) {
            res.stabilized = *it;
            res.sequence_length = static_cast<int>(seen.size());
            return res;
        }
        seen.push_back(nxt);
    }
}

namespace {

int build_witness_tree(const Trace& trace, const Instance& inst, int fact_id, TreePattern& t,
                       size_t budget, bool& truncated) {
    t.nodes.push_back({trace.nodes[fact_id].variable});
    int node = static_cast<int>(t.nodes.size()) - 1;
    for (int cur = fact_id; cur >= 0; cur = trace.nodes[cur].prev) {
        for (const Trace::Contribution& contrib : trace.nodes[cur].contribs) {
            const auto& scope = inst.constraints[contrib.constraint].scope;
            if (t.nodes.size() + scope.size() > budget) {
                truncated = true;
                return node;
            }
            TreePattern::ConsNode cn;
            cn.constraint = contrib.constraint;
            cn.parent_node = node;
            cn.parent_pos = contrib.position;
            for (size_t pos = 0; pos < scope.size(); ++pos) {
                if (static_cast<int>(pos) == contrib.position) continue;
                int child = build_witness_tree(trace, inst, contrib.premises[pos], t, budget, truncated);
                cn.children.push_back({static_cast<int>(pos), child});
                if (truncated) break;
            }
            t.cons.push_back(std::move(cn));
            if (truncated) return node;
        }
    }
    return node;
}

}  // namespace

Witness extract_witness(const Template& tpl, const Instance& inst, const PotatoMap& context,
                        const Trace& trace, int failing_node, size_t node_budget) {
    (void)tpl;
    if (failing_node < 0) failing_node = trace.first_empty;
    if (failing_node < 0 || failing_node >= static_cast<int>(trace.nodes.size()) ||
        !trace.nodes[failing_node].set.empty())
        throw std::invalid_argument("extract_witness: trace does not end in an empty fact");

    Witness w;
    w.context = context;
    const Trace::Node& fail = trace.nodes[failing_node];

    if (fail.kind == Trace::Kind::ac_update) {
        w.kind = Witness::Kind::tree;
        bool truncated = false;
        // ConsNode indices must stay valid while children recurse, so the
        // builder appends nodes first and cons entries afterwards.
        build_witness_tree(trace, inst, failing_node, w.tree, node_budget, truncated);
        w.tree.truncated = truncated;
        w.truncated = truncated;
        return w;
    }

    w.kind = Witness::Kind::path;
    std::vector<Step> steps;
    int cur = failing_node;
    while (trace.nodes[cur].kind == Trace::Kind::step) {
        const Trace::Node& n = trace.nodes[cur];
        steps.push_back({n.constraint, n.from_pos, n.to_pos});
        cur = n.premise;
        if (cur < 0) throw std::invalid_argument("extract_witness: broken step chain");
    }
    std::reverse(steps.begin(), steps.end());
    const Trace::Node& root = trace.nodes[cur];
    w.path = make_path(inst, root.variable, std::move(steps));
    switch (root.kind) {
        case Trace::Kind::seed:
            w.path_source = Witness::PathSource::seed;
            w.has_seed = true;
            w.seed_var = root.variable;
            w.seed_value = root.set.count() == 1 ? root.set.first() : -1;
            w.source_set = root.set;
            break;
        case Trace::Kind::potato:
            w.path_source = Witness::PathSource::potato;
            w.source_set = root.set;
            break;
        case Trace::Kind::projection:
            w.path_source = Witness::PathSource::projection;
            w.origin_constraint = root.constraint;
            w.origin_pos = root.to_pos;
            break;
        default:
            throw std::invalid_argument("extract_witness: unsupported justification chain");
    }
    return w;
}

bool revalidate_witness(const Template& tpl, const Instance& inst, const Witness& w) {
    if (static_cast<int>(w.context.size()) != inst.n_vars()) return false;
    for (int x = 0; x < inst.n_vars(); ++x)
        if (!w.context[x].subset_of(inst.potatoes[x])) return false;

    if (w.kind == Witness::Kind::tree) {
        for (const auto& cn : w.tree.cons) {
            if (cn.constraint < 0 || cn.constraint >= static_cast<int>(inst.constraints.size()))
                return false;
        }
        DomainSet b = w.has_seed ? DomainSet::single(w.seed_value) : tpl.full_domain();
        return propagate_tree(tpl, inst, w.context, b, w.tree).empty();
    }

    DomainSet source;
    switch (w.path_source) {
        case Witness::PathSource::seed:
            if (w.seed_var != w.path.begin_var || w.source_set.empty()) return false;
            source = w.source_set;
            break;
        case Witness::PathSource::potato:
            source = w.context[w.path.begin_var];
            break;
        case Witness::PathSource::projection: {
            if (w.origin_constraint < 0 ||
                w.origin_constraint >= static_cast<int>(inst.constraints.size()))
                return false;
            const auto& scope = inst.constraints[w.origin_constraint].scope;
            if (w.origin_pos < 0 || w.origin_pos >= static_cast<int>(scope.size())) return false;
            if (scope[w.origin_pos] != w.path.begin_var) return false;
            source = project_effective(tpl, inst, w.context, w.origin_constraint, w.origin_pos);
            break;
        }
    }
    try {
        PathPattern checked = make_path(inst, w.path.begin_var, w.path.steps);
        return propagate_path(tpl, inst, w.context, source, checked).empty();
    } catch (const std::invalid_argument&) {
        return false;
    }
}

}  // namespace slac
