// Acceptance suite: one criterion per run item, one pass/fail line each.
// Exits nonzero when any criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "slac/datalog.hpp"
#include "slac/json_io.hpp"
#include "slac/oracle.hpp"
#include "slac/patterns.hpp"
#include "slac/singleton.hpp"
#include "test_util.hpp"

using namespace slac;
using namespace slac::testutil;

namespace {

struct Criterion {
    std::string name;
    std::function<bool(std::string&)> run;
};

std::string template_path(const std::string& name) {
    return std::string(SLAC_TEMPLATE_DIR) + "/" + name + ".json";
}

Template load_template(const std::string& name) {
    return io::parse_template(io::load_json_file(template_path(name)));
}

Instance triangle(const Template& neq2) { return triangle_instance(neq2); }

std::vector<std::pair<int, int>> shrinkage(const Instance& inst, const PotatoMap& final_pots) {
    std::vector<std::pair<int, int>> out;
    for (int x = 0; x < inst.n_vars(); ++x)
        (inst.potatoes[x] - final_pots[x]).for_each([&](int a) { out.emplace_back(x, a); });
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::pair<int, int>> removed_pairs(const SingletonReport& rep) {
    std::vector<std::pair<int, int>> out;
    for (const Removal& r : rep.removals) out.emplace_back(r.variable, r.value);
    std::sort(out.begin(), out.end());
    return out;
}

bool subset_pairs(const std::vector<std::pair<int, int>>& a,
                  const std::vector<std::pair<int, int>>& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

// --- criterion 1: arc consistency accepts the unsolvable triangle ---------

bool criterion_example2(std::string& detail) {
    Template neq2 = load_template("neq2");
    Instance t3 = triangle(neq2);
    AcResult ac = ac_fixpoint(neq2, t3);
    bool full = true;
    for (const DomainSet& p : ac.potatoes) full = full && p == DomainSet::of({0, 1});
    bool unsat = !oracle::brute_solve(neq2, t3).has_value();
    detail = "AC potatoes full and no contradiction; oracle says UNSAT";
    return !ac.contradiction && full && unsat;
}

// --- criterion 2: slac refutes the triangle with a replayable witness -----

bool criterion_slac_triangle(std::string& detail) {
    Template neq2 = load_template("neq2");
    Instance t3 = triangle(neq2);
    SingletonReport rep = slac_fixpoint(neq2, t3);
    if (!rep.contradiction) {
        detail = "no contradiction reported";
        return false;
    }
    int verified = 0;
    for (const Removal& r : rep.removals) {
        if (!r.witness || r.witness->kind != Witness::Kind::path || r.witness->path.length() == 0)
            continue;
        nlohmann::json j = io::emit_witness(neq2, t3, *r.witness);
        Witness back = io::parse_witness(j, neq2, t3);
        if (revalidate_witness(neq2, t3, back)) ++verified;
    }
    detail = std::to_string(verified) + " path witnesses re-verified after a JSON round-trip";
    return verified >= 1;
}

// --- criterion 3: slac decides bounded width templates at desk scale ------

bool criterion_corollary1(std::string& detail) {
    int mismatches = 0, unsat_total = 0, total = 0;
    for (const char* name : {"neq2", "twosat", "hornsat"}) {
        Template tpl = load_template(name);
        std::mt19937 rng(777000);
        RandomSpec spec;
        spec.min_vars = 2;
        spec.max_vars = 8;
        spec.max_constraints = 14;
        for (int trial = 0; trial < 1000; ++trial) {
            Instance inst = random_instance(tpl, rng, spec);
            bool unsat = !oracle::brute_solve(tpl, inst).has_value();
            SingletonOptions opts;
            opts.keep_witnesses = false;
            bool contra = slac_fixpoint(tpl, inst, opts).contradiction;
            ++total;
            unsat_total += unsat;
            if (unsat != contra) ++mismatches;
        }
    }
    detail = std::to_string(total) + " instances (" + std::to_string(unsat_total) +
             " unsolvable), " + std::to_string(mismatches) + " mismatches";
    return mismatches == 0;
}

// --- criterion 4: the frozen linear-equations exhibit ----------------------

bool criterion_incompleteness(std::string& detail) {
    const std::string path = std::string(SLAC_FIXTURE_DIR) + "/z2_incompleteness.instance.json";
    const std::string frozen_digest = "3613a893acb2c699";
    if (io::file_digest(path) != frozen_digest) {
        detail = "fixture digest changed (expected " + frozen_digest + ")";
        return false;
    }
    Template z2 = load_template("z2lin");
    Instance inst = io::parse_instance(io::load_json_file(path), z2);
    bool unsat = !oracle::brute_solve(z2, inst).has_value();
    SingletonOptions opts;
    opts.keep_witnesses = false;
    bool ac_pass = !ac_fixpoint(z2, inst).contradiction;
    bool sac_pass = !sac_fixpoint(z2, inst, opts).contradiction;
    bool slac_pass = !slac_fixpoint(z2, inst, opts).contradiction;
    if (!(unsat && ac_pass && sac_pass && slac_pass)) {
        detail = "fixture no longer fools the engines";
        return false;
    }

    // the search that produced the fixture keeps finding such instances
    std::mt19937 rng(20150501);
    std::uniform_int_distribution<int> nv(3, 8), nc(3, 14);
    int found_at = -1;
    for (int attempt = 0; attempt < 5000 && found_at < 0; ++attempt) {
        Instance cand;
        int n = nv(rng);
        for (int i = 0; i < n; ++i) cand.variable_names.push_back("v" + std::to_string(i));
        int m = nc(rng);
        std::uniform_int_distribution<int> rel(0, 1), var(0, n - 1);
        for (int c = 0; c < m; ++c) {
            Constraint con;
            con.relation = rel(rng);
            while (static_cast<int>(con.scope.size()) < 3) {
                int v = var(rng);
                bool dup = false;
                for (int s : con.scope) dup = dup || s == v;
                if (!dup) con.scope.push_back(v);
            }
            cand.constraints.push_back(con);
        }
        cand.finalize(z2);
        if (oracle::brute_solve(z2, cand)) continue;
        if (ac_fixpoint(z2, cand).contradiction) continue;
        if (slac_fixpoint(z2, cand, opts).contradiction) continue;
        if (sac_fixpoint(z2, cand, opts).contradiction) continue;
        found_at = attempt;
    }
    detail = "fixture digest stable, all engines fooled, oracle refutes; fresh search hit at attempt " +
             std::to_string(found_at);
    return found_at >= 0;
}

// --- criterion 5: strength ordering across the hierarchy -------------------

bool criterion_strength_ordering(std::string& detail) {
    int violations = 0, total = 0;
    for (const char* name : {"neq2", "twosat", "hornsat", "z2lin"}) {
        Template tpl = load_template(name);
        std::mt19937 rng(424243);
        RandomSpec spec;
        spec.max_vars = 7;
        spec.max_constraints = 12;
        for (int trial = 0; trial < 150; ++trial) {
            Instance inst = random_instance(tpl, rng, spec);
            SingletonOptions opts;
            opts.keep_witnesses = false;
            auto ac_rm = shrinkage(inst, ac_fixpoint(tpl, inst).potatoes);
            auto sac_rm = removed_pairs(sac_fixpoint(tpl, inst, opts));
            auto slac_rm = removed_pairs(slac_fixpoint(tpl, inst, opts));
            ++total;
            if (!subset_pairs(slac_rm, sac_rm)) ++violations;
            if (!subset_pairs(ac_rm, sac_rm)) ++violations;
            if (!subset_pairs(ac_rm, slac_rm)) ++violations;  // the empirical direction
        }
    }
    detail = std::to_string(total) + " instances, " + std::to_string(violations) + " violations";
    return violations == 0;
}

// --- criterion 6: procedural engines match the generated programs ----------

bool criterion_datalog_equivalence(std::string& detail) {
    int ac_mismatch = 0, lac_mismatch = 0, total = 0;
    std::mt19937 seed_rng(5555);
    for (Template tpl : {load_template("neq2"), load_template("hornsat"), load_template("z2lin"),
                         mixed3_template()}) {
        datalog::Program ac_prog = datalog::generate_ac_program(tpl);
        datalog::Program lac_prog = datalog::generate_lac_program(tpl);
        std::mt19937 rng(31415);
        RandomSpec spec;
        spec.max_vars = 6;
        spec.max_constraints = 9;
        for (int trial = 0; trial < 125; ++trial) {
            Instance inst = random_instance(tpl, rng, spec);
            ++total;

            AcResult ac = ac_fixpoint(tpl, inst);
            auto ev = datalog::evaluate(tpl, ac_prog, inst);
            if (ev.goal_reached != ac.contradiction) ++ac_mismatch;
            else if (!ac.contradiction) {
                for (int x = 0; x < inst.n_vars(); ++x)
                    if (ev.facts.strongest(x, inst.potatoes[x]) != ac.potatoes[x]) ++ac_mismatch;
            }

            std::uniform_int_distribution<int> var(0, inst.n_vars() - 1);
            int x = var(seed_rng);
            if (inst.potatoes[x].empty()) continue;
            int a = inst.potatoes[x].first();
            PotatoMap pots = inst.potatoes;
            pots[x] = DomainSet::single(a);
            Instance restricted = restrict_instance(tpl, inst, pots);
            Fact seed{x, DomainSet::single(a)};
            LacResult lac = lac_closure(tpl, restricted, std::span<const Fact>(&seed, 1));
            auto lev = datalog::evaluate(tpl, lac_prog, restricted, std::span<const Fact>(&seed, 1));
            if (lev.goal_reached != lac.contradiction) ++lac_mismatch;
            else if (!lac.contradiction) {
                for (int v = 0; v < inst.n_vars(); ++v)
                    if (lev.facts.strongest(v, restricted.potatoes[v]) !=
                        lac.facts.strongest(v, restricted.potatoes[v]))
                        ++lac_mismatch;
            }
        }
    }
    detail = std::to_string(total) + " instances, " + std::to_string(ac_mismatch) +
             " AC and " + std::to_string(lac_mismatch) + " LAC mismatches";
    return ac_mismatch == 0 && lac_mismatch == 0;
}

// --- criterion 7: confluence across processing orders ----------------------

bool criterion_confluence(std::string& detail) {
    int mismatches = 0, total = 0;
    std::mt19937 rng(98765);
    RandomSpec spec;
    spec.max_vars = 6;
    spec.max_constraints = 9;
    for (Template tpl : {load_template("neq2"), load_template("twosat"), load_template("hornsat"),
                         load_template("z2lin"), mixed3_template()}) {
        for (int trial = 0; trial < 10; ++trial) {
            Instance inst = random_instance(tpl, rng, spec);
            ++total;
            AcResult ac_ref = ac_fixpoint(tpl, inst);
            SingletonOptions base;
            base.keep_witnesses = false;
            SingletonReport sac_ref = sac_fixpoint(tpl, inst, base);
            SingletonReport slac_ref = slac_fixpoint(tpl, inst, base);
            for (uint32_t seed = 1; seed <= 20; ++seed) {
                EngineOptions eo;
                eo.shuffle_seed = seed;
                eo.keep_trace = false;
                AcResult ac = ac_fixpoint(tpl, inst, inst.potatoes, eo);
                if (ac.contradiction != ac_ref.contradiction || ac.potatoes != ac_ref.potatoes)
                    ++mismatches;
                SingletonOptions so = base;
                so.shuffle_seed = seed;
                if (sac_fixpoint(tpl, inst, so).final_potatoes != sac_ref.final_potatoes)
                    ++mismatches;
                if (slac_fixpoint(tpl, inst, so).final_potatoes != slac_ref.final_potatoes)
                    ++mismatches;
            }
        }
    }
    detail = std::to_string(total) + " instances x 20 orders, " + std::to_string(mismatches) +
             " mismatches";
    return mismatches == 0;
}

// --- criterion 8: the pattern calculus ------------------------------------

bool criterion_pattern_calculus(std::string& detail) {
    int assoc_violations = 0, cycle_violations = 0, pq_failures = 0;
    long assoc_checked = 0, cycle_checked = 0, pq_checked = 0;

    // the corpus is guarded so that cycle enumeration stays exhaustive:
    // every included instance has at most 32 six-step cycles per variable
    auto admissible = [](const Instance& inst) {
        for (int x = 0; x < inst.n_vars(); ++x) {
            if (enumerate_cycles(inst, x, 6).size() > 32) return false;
            if (enumerate_paths(inst, x, 4).size() > 300) return false;
        }
        return true;
    };

    std::mt19937 rng(1618);
    std::vector<std::pair<Template, Instance>> corpus;
    Template neq2 = load_template("neq2");
    corpus.emplace_back(neq2, triangle_instance(neq2));
    corpus.emplace_back(neq2, cycle_instance(neq2, 4));
    corpus.emplace_back(neq2, cycle_instance(neq2, 6));
    for (Template tpl : {load_template("twosat"), load_template("hornsat"), mixed3_template()}) {
        RandomSpec spec;
        spec.max_vars = 4;
        spec.max_constraints = 4;
        int kept = 0;
        for (int draw = 0; draw < 80 && kept < 6; ++draw) {
            Instance inst = random_instance(tpl, rng, spec);
            if (!admissible(inst)) continue;
            corpus.emplace_back(tpl, inst);
            ++kept;
        }
    }

    for (const auto& [tpl, inst] : corpus) {
        // associativity of +: all pattern pairs with |p| + |q| <= 5
        for (int x = 0; x < inst.n_vars(); ++x) {
            for (const PathPattern& p : enumerate_paths(inst, x, 4)) {
                for (const PathPattern& q : enumerate_paths(inst, p.end_var(inst), 5 - p.length())) {
                    for (uint64_t bits = 0; bits < (uint64_t{1} << tpl.domain_size); ++bits) {
                        DomainSet b = DomainSet::from_bits(bits);
                        ++assoc_checked;
                        DomainSet joint =
                            propagate_path(tpl, inst, inst.potatoes, b, concat(inst, p, q));
                        DomainSet split = propagate_path(
                            tpl, inst, inst.potatoes,
                            propagate_path(tpl, inst, inst.potatoes, b, p), q);
                        if (joint != split) ++assoc_violations;
                    }
                }
            }
        }

        // slac-stable restrictions satisfy the cycle characterization
        SingletonOptions opts;
        opts.keep_witnesses = false;
        SingletonReport rep = slac_fixpoint(tpl, inst, opts);
        if (rep.contradiction) continue;
        auto stable = one_consistent_subinstance(tpl, restrict_instance(tpl, inst, rep.final_potatoes));
        if (!stable) return false;
        for (int x = 0; x < stable->n_vars(); ++x) {
            for (const PathPattern& p : enumerate_cycles(*stable, x, 8)) {
                stable->potatoes[x].for_each([&](int a) {
                    ++cycle_checked;
                    if (!propagate_path(tpl, *stable, DomainSet::single(a), p).contains(a))
                        ++cycle_violations;
                });
            }
            auto cycles6 = enumerate_cycles(*stable, x, 6);
            for (const PathPattern& p : cycles6) {
                for (const PathPattern& q : cycles6) {
                    stable->potatoes[x].for_each([&](int a) {
                        ++pq_checked;
                        PqResult pr = pq_check(tpl, *stable, stable->potatoes, x, a, p, q);
                        if (!pr.passes) ++pq_failures;
                    });
                }
            }
        }
    }
    detail = std::to_string(assoc_checked) + " associativity, " + std::to_string(cycle_checked) +
             " cycle and " + std::to_string(pq_checked) + " pq checks; " +
             std::to_string(assoc_violations + cycle_violations + pq_failures) + " violations";
    return assoc_violations == 0 && cycle_violations == 0 && pq_failures == 0;
}

// --- criterion 9: arc consistency is exact on trees ------------------------

bool criterion_tree_exactness(std::string& detail) {
    int mismatches = 0, total = 0, unsat_total = 0;
    std::mt19937 rng(246810);
    for (Template tpl : {load_template("neq2"), load_template("twosat"), load_template("hornsat"),
                         mixed3_template()}) {
        for (int trial = 0; trial < 50; ++trial) {
            std::uniform_int_distribution<int> nc(1, 8);
            Instance inst = random_tree_instance(tpl, rng, nc(rng));
            if (inst.n_vars() > 20) continue;
            ++total;
            bool unsat = !oracle::brute_solve(tpl, inst).has_value();
            unsat_total += unsat;
            if (ac_fixpoint(tpl, inst).contradiction != unsat) ++mismatches;
        }
    }
    detail = std::to_string(total) + " tree instances (" + std::to_string(unsat_total) +
             " unsolvable), " + std::to_string(mismatches) + " mismatches";
    return total >= 200 && mismatches == 0;
}

// --- criterion 10: performance smoke ---------------------------------------

bool criterion_performance(std::string& detail) {
    Template tpl = load_template("twosat");
    std::mt19937 rng(909090);
    Instance inst = planted_twosat(tpl, rng, 2000, 10000);
    SingletonOptions opts;
    opts.keep_witnesses = false;
    auto t0 = std::chrono::steady_clock::now();
    SingletonReport rep = slac_fixpoint(tpl, inst, opts);
    double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                    .count();
    detail = "2000 vars / 10000 constraints: " + std::to_string(static_cast<int>(ms)) + " ms, " +
             std::to_string(rep.sweeps) + " sweeps, " + std::to_string(rep.removals.size()) +
             " removals";
    return !rep.contradiction && ms < 30000.0;
}

}  // namespace

int main() {
    std::vector<Criterion> criteria = {
        {"example2-ac-accepts-unsolvable-triangle", criterion_example2},
        {"slac-refutes-triangle-with-witness", criterion_slac_triangle},
        {"slac-decides-bounded-width-corpus", criterion_corollary1},
        {"linear-equations-fool-all-engines", criterion_incompleteness},
        {"removal-strength-ordering", criterion_strength_ordering},
        {"engine-datalog-equivalence", criterion_datalog_equivalence},
        {"fixpoint-confluence", criterion_confluence},
        {"pattern-calculus", criterion_pattern_calculus},
        {"tree-exactness", criterion_tree_exactness},
        {"performance-smoke", criterion_performance},
    };

    // stated budgets: per-criterion where the contract names one
    const std::map<std::string, double> budget_ms = {
        {"example2-ac-accepts-unsolvable-triangle", 10.0},
        {"slac-refutes-triangle-with-witness", 10.0},
        {"slac-decides-bounded-width-corpus", 60000.0},
    };

    int failed = 0;
    for (const Criterion& c : criteria) {
        std::string detail;
        bool ok = false;
        auto t0 = std::chrono::steady_clock::now();
        try {
            ok = c.run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        double ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        auto it = budget_ms.find(c.name);
        if (it != budget_ms.end() && ms >= it->second) {
            ok = false;
            detail += " [over the " + std::to_string(static_cast<int>(it->second)) + " ms budget]";
        }
        std::printf("[%s] %-42s (%9.2f ms)  %s\n", ok ? "PASS" : "FAIL", c.name.c_str(), ms,
                    detail.c_str());
        std::fflush(stdout);
        if (!ok) ++failed;
    }
    if (failed) std::printf("%d criterion(s) failed\n", failed);
    else std::printf("all %zu criteria passed\n", criteria.size());
    return failed == 0 ? 0 : 1;
}
