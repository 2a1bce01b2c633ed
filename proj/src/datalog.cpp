#include "slac/datalog.hpp"

#include <algorithm>
#include <stdexcept>

namespace slac::datalog {

namespace {

constexpr size_t kRuleCap = 2'000'000;

const char* position_letter(int pos) {
    static const char* letters[] = {"x", "y", "z", "w", "u", "v"};
    return pos < 6 ? letters[pos] : nullptr;
}

std::string var_name(int pos) {
    if (const char* l = position_letter(pos)) return l;
    return "v" + std::to_string(pos);
}

std::string idb_atom(const Template& tpl, DomainSet s, int pos) {
    std::string v = var_name(pos);
    if (s.empty()) return "empty(" + v + ")";
    if (s.count() == 1) return v + "=" + tpl.value_name(s.first());
    std::string out = v + " in {";
    bool first = true;
    s.for_each([&](int a) {
        if (!first) out += ",";
        out += tpl.value_name(a);
        first = false;
    });
    return out + "}";
}

DomainSet project_product(const Relation& rel, const std::vector<std::optional<DomainSet>>& premises,
                          int head_pos) {
    DomainSet out;
    for (const auto& t : rel.tuples) {
        bool ok = true;
        for (int p = 0; p < rel.arity && ok; ++p)
            if (premises[p] && !premises[p]->contains(t[p])) ok = false;
        if (ok) out.add(t[head_pos]);
    }
    return out;
}

}  // namespace

std::vector<Predicate> predicates(const Template& tpl) {
    std::vector<Predicate> out;
    for (size_t r = 0; r < tpl.relations.size(); ++r)
        out.push_back({Predicate::Kind::edb, tpl.relations[r].arity, tpl.relation_names[r], {}});
    for (uint64_t bits = 0; bits < (uint64_t{1} << tpl.domain_size); ++bits) {
        DomainSet s = DomainSet::from_bits(bits);
        out.push_back({Predicate::Kind::idb, 1, idb_atom(tpl, s, 0), s});
    }
    return out;
}

Program generate_ac_program(const Template& tpl) {
    if (tpl.domain_size > 8)
        throw std::invalid_argument("datalog: domain size > 8 (one IDB per subset would blow up)");
    const uint64_t n_subsets = uint64_t{1} << tpl.domain_size;

    size_t estimate = 0;
    for (const Relation& rel : tpl.relations) {
        size_t per_coord = 1;
        for (int p = 1; p < rel.arity; ++p) {
            per_coord *= n_subsets;  // a nonempty subset or no premise
            if (per_coord > kRuleCap) break;
        }
        estimate += per_coord * rel.arity;
        if (estimate > kRuleCap)
            throw std::invalid_argument("datalog: rule space exceeds the generation cap");
    }

    Program prog;
    prog.kind = Program::Kind::ac;
    prog.domain_size = tpl.domain_size;

    for (size_t r = 0; r < tpl.relations.size(); ++r) {
        const Relation& rel = tpl.relations[r];
        std::vector<int> body_positions;
        for (int head = 0; head < rel.arity; ++head) {
            body_positions.clear();
            for (int p = 0; p < rel.arity; ++p)
                if (p != head) body_positions.push_back(p);

            // premise choice per body position: none, or a nonempty subset
            std::vector<uint64_t> choice(body_positions.size(), 0);  // 0 = none, else bits
            for (;;) {
                Rule rule;
                rule.relation = static_cast<int>(r);
                rule.head_pos = head;
                rule.premises.assign(rel.arity, std::nullopt);
                rule.idb_count = 0;
                for (size_t k = 0; k < body_positions.size(); ++k) {
                    if (choice[k] != 0) {
                        rule.premises[body_positions[k]] = DomainSet::from_bits(choice[k]);
                        ++rule.idb_count;
                    }
                }
                rule.template_head = project_product(rel, rule.premises, head);
                if (!(rule.idb_count == 0 && rule.template_head == tpl.full_domain()))
                    prog.rules.push_back(std::move(rule));

                // next combination; subsets advance 0 (none), 1, ..., full
                size_t k = 0;
                while (k < choice.size()) {
                    if (++choice[k] < n_subsets) break;
                    choice[k] = 0;
                    ++k;
                }
                if (k == choice.size()) break;
            }
        }
    }

    // The per-variable contradiction family: empty(x) :- S(x), T(x) for
    // disjoint nonempty S, T. Redundant under intersection-closed evaluation,
    // retained in the program for fidelity.
    for (uint64_t s = 1; s < n_subsets; ++s) {
        for (uint64_t t = s + 1; t < n_subsets; ++t) {
            if ((s & t) != 0) continue;
            Rule rule;
            rule.relation = -1;
            rule.idb_count = 2;
            rule.isect_s = DomainSet::from_bits(s);
            rule.isect_t = DomainSet::from_bits(t);
            rule.template_head = DomainSet{};
            prog.rules.push_back(std::move(rule));
        }
    }
    return prog;
}

Program generate_lac_program(const Template& tpl) {
    Program prog = generate_ac_program(tpl);
    prog.kind = Program::Kind::lac;
    prog.rules.erase(std::remove_if(prog.rules.begin(), prog.rules.end(),
                                    [](const Rule& r) { return r.idb_count > 1; }),
                     prog.rules.end());
    return prog;
}

std::string emit_program(const Template& tpl, const Program& prog) {
    std::string out;
    out += prog.kind == Program::Kind::ac ? "% arc-consistency program\n"
                                          : "% linear arc-consistency program\n";
    out += "% goal: empty(_)\n";
    for (const Rule& rule : prog.rules) {
        if (rule.relation < 0) {
            out += "empty(x) :- " + idb_atom(tpl, rule.isect_s, 0) + ", " +
                   idb_atom(tpl, rule.isect_t, 0) + "\n";
            continue;
        }
        const Relation& rel = tpl.relations[rule.relation];
        std::string line = idb_atom(tpl, rule.template_head, rule.head_pos);
        line += " :- " + tpl.relation_names[rule.relation] + "(";
        for (int p = 0; p < rel.arity; ++p) {
            if (p) line += ",";
            line += var_name(p);
        }
        line += ")";
        for (int p = 0; p < rel.arity; ++p)
            if (rule.premises[p]) line += ", " + idb_atom(tpl, *rule.premises[p], p);
        out += line + "\n";
    }
    return out;
}

void FactBase::init(int n_vars, int domain, bool intersect) {
    domain_size = domain;
    auto_intersect = intersect;
    present.assign(n_vars, std::vector<char>(size_t{1} << domain, 0));
    log.clear();
    goal = false;
}

void FactBase::add(int var, DomainSet s) {
    if (present[var][s.bits()]) return;
    present[var][s.bits()] = 1;
    log.emplace_back(var, s);
    if (s.empty()) goal = true;
    if (auto_intersect) {
        // log may reallocate during recursion; snapshot the current facts
        std::vector<DomainSet> existing;
        for (uint64_t bits = 0; bits < (uint64_t{1} << domain_size); ++bits)
            if (present[var][bits] && bits != s.bits()) existing.push_back(DomainSet::from_bits(bits));
        for (DomainSet t : existing) add(var, s & t);
    }
}

DomainSet FactBase::strongest(int var, DomainSet fallback) const {
    DomainSet out = fallback;
    for (uint64_t bits = 0; bits < (uint64_t{1} << domain_size); ++bits)
        if (present[var][bits]) out &= DomainSet::from_bits(bits);
    return out;
}

std::vector<DomainSet> FactBase::minimal_antichain(int var) const {
    std::vector<DomainSet> out;
    for (uint64_t bits = 0; bits < (uint64_t{1} << domain_size); ++bits) {
        if (!present[var][bits]) continue;
        DomainSet s = DomainSet::from_bits(bits);
        bool minimal = true;
        for (uint64_t other = 0; other < (uint64_t{1} << domain_size) && minimal; ++other)
            if (other != bits && present[var][other] &&
                DomainSet::from_bits(other).subset_of(s))
                minimal = false;
        if (minimal) out.push_back(s);
    }
    return out;
}

EvalResult evaluate(const Template& tpl, const Program& prog, const Instance& inst,
                    std::span<const Fact> seeds, const EvalOptions& opts) {
    EvalResult res;
    res.facts.init(inst.n_vars(), tpl.domain_size, prog.kind == Program::Kind::ac);
    FactBase& fb = res.facts;

    std::vector<std::vector<int>> cons_by_rel(tpl.relations.size());
    for (size_t c = 0; c < inst.constraints.size(); ++c)
        cons_by_rel[inst.constraints[c].relation].push_back(static_cast<int>(c));

    auto fire_head = [&](const Rule& rule, int c) {
        const Constraint& con = inst.constraints[c];
        const Relation& rel = tpl.relations[con.relation];
        DomainSet out;
        for (const auto& t : rel.tuples) {
            bool ok = true;
            for (int p = 0; p < rel.arity && ok; ++p) {
                if (!inst.potatoes[con.scope[p]].contains(t[p])) ok = false;
                else if (rule.premises[p] && !rule.premises[p]->contains(t[p])) ok = false;
            }
            if (ok) out.add(t[rule.head_pos]);
        }
        return out;
    };

    // round 0: the dummy unary constraints (potatoes), seeds as extra unary
    // EDBs, and every premise-free rule
    for (int x = 0; x < inst.n_vars(); ++x) fb.add(x, inst.potatoes[x]);
    for (const Fact& f : seeds) fb.add(f.variable, f.set & inst.potatoes[f.variable]);
    for (const Rule& rule : prog.rules) {
        if (rule.relation < 0 || rule.idb_count != 0) continue;
        for (int c : cons_by_rel[rule.relation]) {
            fb.add(inst.constraints[c].scope[rule.head_pos], fire_head(rule, c));
            if (fb.goal && opts.stop_at_goal) break;
        }
        if (fb.goal && opts.stop_at_goal) break;
    }

    size_t round_start = 0;
    std::vector<std::vector<char>> delta(inst.n_vars(),
                                         std::vector<char>(size_t{1} << tpl.domain_size, 0));
    while (!(fb.goal && opts.stop_at_goal)) {
        size_t round_end = fb.log.size();
        if (round_start == round_end) break;
        ++res.rounds;
        if (!opts.naive) {
            for (auto& d : delta) std::fill(d.begin(), d.end(), 0);
            for (size_t i = round_start; i < round_end; ++i)
                delta[fb.log[i].first][fb.log[i].second.bits()] = 1;
        }
        round_start = round_end;

        for (const Rule& rule : prog.rules) {
            if (fb.goal && opts.stop_at_goal) break;
            if (rule.idb_count == 0) {
                if (!opts.naive) continue;  // premise-free rules cannot fire anew
                for (int c : cons_by_rel[rule.relation])
                    fb.add(inst.constraints[c].scope[rule.head_pos], fire_head(rule, c));
                continue;
            }
            if (rule.relation < 0) {
                for (int x = 0; x < inst.n_vars(); ++x) {
                    if (!fb.contains(x, rule.isect_s) || !fb.contains(x, rule.isect_t)) continue;
                    if (!opts.naive && !delta[x][rule.isect_s.bits()] &&
                        !delta[x][rule.isect_t.bits()])
                        continue;
                    fb.add(x, rule.isect_s & rule.isect_t);
                    if (fb.goal && opts.stop_at_goal) break;
                }
                continue;
            }
            for (int c : cons_by_rel[rule.relation]) {
                const Constraint& con = inst.constraints[c];
                bool all_present = true;
                bool any_delta = false;
                for (size_t p = 0; p < con.scope.size() && all_present; ++p) {
                    if (!rule.premises[p]) continue;
                    if (!fb.contains(con.scope[p], *rule.premises[p])) all_present = false;
                    else if (!opts.naive && delta[con.scope[p]][rule.premises[p]->bits()])
                        any_delta = true;
                }
                if (!all_present || (!opts.naive && !any_delta)) continue;
                fb.add(con.scope[rule.head_pos], fire_head(rule, c));
                if (fb.goal && opts.stop_at_goal) break;
            }
        }
    }
    res.goal_reached = fb.goal;
    return res;
}

}  // namespace slac::datalog
