#include "doctest.h"

#include <algorithm>
#include <random>
#include <stdexcept>

#include "slac/datalog.hpp"
#include "slac/singleton.hpp"
#include "test_util.hpp"

using namespace slac;
using namespace slac::testutil;
namespace dl = slac::datalog;

namespace {

bool same_rule(const dl::Rule& a, const dl::Rule& b) { return a == b; }

std::vector<std::pair<Template, std::vector<Instance>>> small_corpus(int per_template) {
    std::vector<std::pair<Template, std::vector<Instance>>> corpus;
    std::mt19937 rng(13579);
    RandomSpec spec;
    spec.max_vars = 6;
    spec.max_constraints = 8;
    for (Template tpl : {neq2_template(), hornsat_template(), z2lin_template(), mixed3_template()}) {
        std::vector<Instance> insts;
        for (int i = 0; i < per_template; ++i) insts.push_back(random_instance(tpl, rng, spec));
        corpus.emplace_back(std::move(tpl), std::move(insts));
    }
    return corpus;
}

}  // namespace

TEST_CASE("one IDB per subset of the domain") {
    Template tpl = neq2_template();
    auto preds = dl::predicates(tpl);
    int idbs = 0, edbs = 0;
    for (const auto& p : preds) {
        if (p.kind == dl::Predicate::Kind::idb) ++idbs;
        else ++edbs;
    }
    CHECK(idbs == 4);  // 2^2
    CHECK(edbs == 1);
    bool has_goal = false;
    for (const auto& p : preds)
        if (p.kind == dl::Predicate::Kind::idb && p.subset.empty()) has_goal = true;
    CHECK(has_goal);
}

TEST_CASE("the disequality program restricted to singleton IDBs is the classic five rules") {
    Template tpl = neq2_template();
    dl::Program prog = dl::generate_ac_program(tpl);

    auto singleton = [](DomainSet s) { return s.count() == 1; };
    std::vector<dl::Rule> filtered;
    for (const dl::Rule& r : prog.rules) {
        bool all_singletons = true;
        if (r.relation < 0) {
            all_singletons = singleton(r.isect_s) && singleton(r.isect_t);
        } else {
            if (r.idb_count == 0) all_singletons = false;
            for (const auto& p : r.premises)
                if (p && !singleton(*p)) all_singletons = false;
        }
        if (all_singletons) filtered.push_back(r);
    }
    CHECK(filtered.size() == 5);

    std::string text = dl::emit_program(tpl, prog);
    CHECK(text.find("empty(x) :- x=0, x=1") != std::string::npos);
    CHECK(text.find("x=0 :- neq(x,y), y=1") != std::string::npos);
    CHECK(text.find("y=0 :- neq(x,y), x=1") != std::string::npos);
    CHECK(text.find("x=1 :- neq(x,y), y=0") != std::string::npos);
    CHECK(text.find("y=1 :- neq(x,y), x=0") != std::string::npos);
}

TEST_CASE("the LAC program is the single-premise fragment") {
    Template tpl = neq2_template();
    dl::Program ac = dl::generate_ac_program(tpl);
    dl::Program lac = dl::generate_lac_program(tpl);

    CHECK(lac.rules.size() < ac.rules.size());
    for (const dl::Rule& r : lac.rules) {
        CHECK(r.idb_count <= 1);
        CHECK(std::any_of(ac.rules.begin(), ac.rules.end(),
                          [&](const dl::Rule& a) { return same_rule(a, r); }));
    }
    // the two-premise contradiction rule is gone
    for (const dl::Rule& r : lac.rules) CHECK(r.relation >= 0);
}

TEST_CASE("domain size guard") {
    Template tpl;
    tpl.domain_size = 9;
    tpl.finalize();
    CHECK_THROWS_AS(dl::generate_ac_program(tpl), std::invalid_argument);
}

TEST_CASE("evaluate on the triangle reaches no goal") {
    Template tpl = neq2_template();
    dl::Program prog = dl::generate_ac_program(tpl);
    auto res = dl::evaluate(tpl, prog, triangle_instance(tpl));
    CHECK_FALSE(res.goal_reached);
    for (int x = 0; x < 3; ++x)
        CHECK(res.facts.strongest(x, tpl.full_domain()) == DomainSet::of({0, 1}));
}

TEST_CASE("evaluate reaches the goal over an empty relation") {
    Template tpl;
    tpl.domain_size = 2;
    tpl.relation_names = {"never"};
    tpl.relations = {Relation{2, {}}};
    tpl.finalize();
    Instance inst;
    inst.variable_names = {"x", "y"};
    inst.constraints.push_back({{0, 1}, 0});
    inst.finalize(tpl);
    auto res = dl::evaluate(tpl, dl::generate_ac_program(tpl), inst);
    CHECK(res.goal_reached);
}

TEST_CASE("procedural AC and the evaluated AC program agree") {
    for (auto& [tpl, insts] : small_corpus(20)) {
        dl::Program prog = dl::generate_ac_program(tpl);
        for (const Instance& inst : insts) {
            AcResult ac = ac_fixpoint(tpl, inst);
            auto ev = dl::evaluate(tpl, prog, inst);
            CHECK(ev.goal_reached == ac.contradiction);
            if (!ac.contradiction) {
                for (int x = 0; x < inst.n_vars(); ++x)
                    CHECK(ev.facts.strongest(x, inst.potatoes[x]) == ac.potatoes[x]);
            }
        }
    }
}

TEST_CASE("lac_closure and the evaluated LAC program agree on seeded probes") {
    std::mt19937 rng(8642);
    for (auto& [tpl, insts] : small_corpus(15)) {
        dl::Program prog = dl::generate_lac_program(tpl);
        for (const Instance& inst : insts) {
            std::uniform_int_distribution<int> var(0, inst.n_vars() - 1);
            int x = var(rng);
            if (inst.potatoes[x].empty()) continue;
            int a = inst.potatoes[x].first();
            PotatoMap pots = inst.potatoes;
            pots[x] = DomainSet::single(a);
            Instance restricted = restrict_instance(tpl, inst, pots);
            Fact seed{x, DomainSet::single(a)};
            LacResult lac = lac_closure(tpl, restricted, std::span<const Fact>(&seed, 1));
            auto ev = dl::evaluate(tpl, prog, restricted, std::span<const Fact>(&seed, 1));
            CHECK(ev.goal_reached == lac.contradiction);
            if (!lac.contradiction) {
                for (int v = 0; v < inst.n_vars(); ++v) {
                    CHECK(ev.facts.strongest(v, restricted.potatoes[v]) ==
                          lac.facts.strongest(v, restricted.potatoes[v]));
                    CHECK(ev.facts.minimal_antichain(v).size() == lac.facts.by_var[v].size());
                }
            }
        }
    }
}

TEST_CASE("semi-naive and naive evaluation derive identical fact bases") {
    for (auto& [tpl, insts] : small_corpus(8)) {
        for (dl::Program prog : {dl::generate_ac_program(tpl), dl::generate_lac_program(tpl)}) {
            for (const Instance& inst : insts) {
                dl::EvalOptions semi;
                semi.stop_at_goal = false;
                dl::EvalOptions naive;
                naive.naive = true;
                naive.stop_at_goal = false;
                auto a = dl::evaluate(tpl, prog, inst, {}, semi);
                auto b = dl::evaluate(tpl, prog, inst, {}, naive);
                CHECK(a.goal_reached == b.goal_reached);
                CHECK(a.facts.present == b.facts.present);
            }
        }
    }
}

TEST_CASE("adding rules never removes derivable facts") {
    std::mt19937 rng(112233);
    Template tpl = hornsat_template();
    dl::Program full = dl::generate_ac_program(tpl);
    for (int trial = 0; trial < 6; ++trial) {
        Instance inst = random_instance(tpl, rng);
        dl::EvalOptions opts;
        opts.stop_at_goal = false;
        auto complete = dl::evaluate(tpl, full, inst, {}, opts);
        dl::Program pruned = full;
        std::uniform_int_distribution<size_t> pick(0, pruned.rules.size() - 1);
        for (int k = 0; k < 40; ++k)
            pruned.rules.erase(pruned.rules.begin() + static_cast<long>(pick(rng) % pruned.rules.size()));
        auto partial = dl::evaluate(tpl, pruned, inst, {}, opts);
        for (int x = 0; x < inst.n_vars(); ++x)
            for (uint64_t bits = 0; bits < 4; ++bits)
                if (partial.facts.present[x][bits]) CHECK(complete.facts.present[x][bits]);
    }
}

TEST_CASE("slac probing via the datalog program matches the engine verdict") {
    // cross-validation: a value survives slac_fixpoint iff no probe evaluated
    // through the generated LAC program reaches the goal at the fixpoint
    Template tpl = neq2_template();
    dl::Program prog = dl::generate_lac_program(tpl);
    Instance t3 = triangle_instance(tpl);
    SingletonReport rep = slac_fixpoint(tpl, t3);
    CHECK(rep.contradiction);

    Instance c4 = cycle_instance(tpl, 4);
    SingletonReport rep4 = slac_fixpoint(tpl, c4);
    REQUIRE_FALSE(rep4.contradiction);
    Instance stable = restrict_instance(tpl, c4, rep4.final_potatoes);
    for (int x = 0; x < stable.n_vars(); ++x) {
        stable.potatoes[x].for_each([&](int a) {
            PotatoMap pots = stable.potatoes;
            pots[x] = DomainSet::single(a);
            Instance probe = restrict_instance(tpl, stable, pots);
            Fact seed{x, DomainSet::single(a)};
            auto ev = dl::evaluate(tpl, prog, probe, std::span<const Fact>(&seed, 1));
            CHECK_FALSE(ev.goal_reached);
        });
    }
}
