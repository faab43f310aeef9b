#include <gtest/gtest.h>

#include <cstdlib>

#include "fixtures.hpp"
#include "whydb/error.hpp"
#include "whydb/oracle.hpp"

using namespace whydb;
using whydb::testing::tids;

TEST(Oracle, NaiveHolds) {
    const Instance d = whydb::testing::running_instance();
    const UnionQuery q = whydb::testing::running_q();
    const auto& cq = q.disjuncts[0];
    std::vector<char> all(d.size(), 1);
    EXPECT_TRUE(oracle::naive_holds(d, all, cq));
    all[5] = 0; // S(a3)
    EXPECT_FALSE(oracle::naive_holds(d, all, cq));
}

TEST(Oracle, RunningExampleRepairsAndCauses) {
    const Instance d = whydb::testing::running_instance();
    const UnionQuery q = whydb::testing::running_q();
    const auto repairs = oracle::brute_repairs(d, negate_query(q));
    ASSERT_EQ(repairs.size(), 3u);
    EXPECT_EQ(repairs[0].repair.deleted, tids({6}));
    EXPECT_TRUE(repairs[0].is_c_repair);
    EXPECT_FALSE(repairs[1].is_c_repair);

    const auto causes = oracle::brute_causes(d, q);
    ASSERT_EQ(causes.size(), 4u);
    EXPECT_EQ(causes[0].tid, Tid{6});
    EXPECT_EQ(oracle::brute_responsibility(d, q, Tid{3}), Responsibility::inverse_of(2));
    EXPECT_EQ(oracle::brute_responsibility(d, q, Tid{2}), Responsibility::zero());
}

TEST(Oracle, Irreparable) {
    const Instance d = load_instance("@exo P(a). @exo Q(a,b).");
    const ConstraintSet cs = parse_constraints(":- P(x), Q(x,y).", d.schema());
    EXPECT_THROW(oracle::brute_repairs(d, cs), Error);
}

TEST(Oracle, GuardRejectsLargeInputs) {
    std::string facts;
    for (int i = 0; i < 8; ++i) facts += "S(c" + std::to_string(i) + ").";
    const Instance d = load_instance(facts);
    oracle::Options opts;
    opts.guard = 5;
    try {
        oracle::brute_causes(d, parse_query("q :- S(x)."), opts);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::size_guard);
    }
    opts.guard = 100; // clamped to max_guard, 8 still fits
    EXPECT_EQ(oracle::brute_causes(d, parse_query("q :- S(x)."), opts).size(), 8u);
}

TEST(Oracle, FilteredCauses) {
    const Instance d = whydb::testing::running_instance();
    const auto hard = parse_hard_constraints("R[1] <= S[1].");
    const auto causes = oracle::brute_causes_filtered(d, whydb::testing::running_q(), hard);
    ASSERT_EQ(causes.size(), 2u);
    EXPECT_EQ(causes[0].tid, Tid{1});
    EXPECT_EQ(causes[1].tid, Tid{3});
}
