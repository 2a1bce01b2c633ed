#include "doctest.h"

#include <random>
#include <stdexcept>

#include "slac/oracle.hpp"
#include "test_util.hpp"

using namespace slac;
using namespace slac::testutil;
using namespace slac::oracle;

TEST_CASE("brute_solve on the bundled shapes") {
    Template tpl = neq2_template();
    CHECK_FALSE(brute_solve(tpl, triangle_instance(tpl)).has_value());

    auto pair = brute_solve(tpl, single_neq_instance(tpl));
    REQUIRE(pair.has_value());
    CHECK(*pair == Assignment{0, 1});  // lexicographically first

    auto four = brute_solve(tpl, cycle_instance(tpl, 4));
    REQUIRE(four.has_value());
    CHECK(check_solution(tpl, cycle_instance(tpl, 4), *four));
    CHECK(*four == Assignment{0, 1, 0, 1});
}

TEST_CASE("brute_solve honors potatoes") {
    Template tpl = neq2_template();
    Instance pair = single_neq_instance(tpl);
    pair.potatoes[0] = DomainSet::single(1);
    auto sol = brute_solve(tpl, pair);
    REQUIRE(sol.has_value());
    CHECK(*sol == Assignment{1, 0});
}

TEST_CASE("oracle guard rejects oversized instances") {
    Template tpl = neq2_template();
    Instance big;
    for (int i = 0; i < 25; ++i) big.variable_names.push_back(var_name(i));
    big.finalize(tpl);
    CHECK_THROWS_AS(brute_solve(tpl, big), std::invalid_argument);
}

TEST_CASE("UNSAT agrees with exhaustive assignment checking") {
    Template tpl = twosat_template();
    std::mt19937 rng(101);
    RandomSpec spec;
    spec.max_vars = 4;
    spec.max_constraints = 7;
    for (int trial = 0; trial < 80; ++trial) {
        Instance inst = random_instance(tpl, rng, spec);
        bool unsat = !brute_solve(tpl, inst).has_value();
        // independent check: walk the full assignment space
        bool any = false;
        int n = inst.n_vars();
        std::vector<int> asg(n, 0);
        for (;;) {
            if (check_solution(tpl, inst, asg)) {
                any = true;
                break;
            }
            int k = n - 1;
            while (k >= 0 && ++asg[k] == tpl.domain_size) asg[k--] = 0;
            if (k < 0) break;
        }
        CHECK(unsat == !any);
    }
}

TEST_CASE("returned assignments satisfy check_solution") {
    Template tpl = hornsat_template();
    std::mt19937 rng(555);
    for (int trial = 0; trial < 60; ++trial) {
        Instance inst = random_instance(tpl, rng);
        auto sol = brute_solve(tpl, inst);
        if (sol) CHECK(check_solution(tpl, inst, *sol));
    }
}

TEST_CASE("majority and minority preserve the disequality") {
    Template tpl = neq2_template();
    CHECK(is_polymorphism(tpl, majority_operation(tpl)));
    CHECK(is_polymorphism(tpl, minority_operation(tpl)));
}

TEST_CASE("majority is not a polymorphism of linear equations") {
    Template tpl = z2lin_template();
    CHECK_FALSE(is_polymorphism(tpl, majority_operation(tpl)));
    CHECK(is_polymorphism(tpl, minority_operation(tpl)));
}

TEST_CASE("projections preserve everything") {
    for (const Template& tpl :
         {neq2_template(), twosat_template(), hornsat_template(), z2lin_template()}) {
        for (int arity = 1; arity <= 3; ++arity)
            for (int coord = 0; coord < arity; ++coord)
                CHECK(is_polymorphism(tpl, projection_operation(tpl, arity, coord)));
    }
}

TEST_CASE("polymorphism search") {
    Template tpl = neq2_template();

    SUBCASE("idempotent ternary search finds majority and minority") {
        auto res = find_polymorphisms(tpl, 3, true, 100);
        CHECK_FALSE(res.truncated);
        auto maj = majority_operation(tpl);
        auto min = minority_operation(tpl);
        bool saw_maj = false, saw_min = false;
        for (const auto& f : res.found) {
            if (f.table == maj.table) saw_maj = true;
            if (f.table == min.table) saw_min = true;
        }
        CHECK(saw_maj);
        CHECK(saw_min);
    }
    SUBCASE("unary search finds the identity") {
        auto res = find_polymorphisms(tpl, 1, false, 100);
        bool saw_id = false;
        for (const auto& f : res.found)
            if (f.table == std::vector<int>{0, 1}) saw_id = true;
        CHECK(saw_id);
    }
    SUBCASE("projections show up at every arity") {
        for (int arity = 1; arity <= 3; ++arity) {
            auto res = find_polymorphisms(tpl, arity, false, 1000);
            for (int coord = 0; coord < arity; ++coord) {
                auto proj = projection_operation(tpl, arity, coord);
                bool found = false;
                for (const auto& f : res.found)
                    if (f.table == proj.table) found = true;
                CHECK(found);
            }
        }
    }
    SUBCASE("cap truncates and reports it") {
        auto res = find_polymorphisms(tpl, 3, false, 2);
        CHECK(res.truncated);
        CHECK(res.found.size() == 2);
    }
}
