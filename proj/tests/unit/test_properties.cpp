#include <gtest/gtest.h>

#include <iostream>

#include "random_instances.hpp"
#include "whydb/causality.hpp"
#include "whydb/oracle.hpp"

using namespace whydb;

// Causes, responsibilities and contingency sets agree with exhaustive search,
// and each reported contingency set meets the definition directly.
TEST(CausalityProperty, MatchesOracleAndDefinition) {
    whydb::testing::RandomCase gen(1);
    int with_causes = 0, with_sets = 0;
    for (int round = 0; round < 250; ++round) {
        const auto c = gen.next(9);
        const auto fast = actual_causes(c.inst, c.query);
        with_causes += !fast.empty();
        with_sets += std::any_of(fast.begin(), fast.end(), [](const CauseReport& r) { return !r.is_counterfactual; });
        ASSERT_EQ(fast, oracle::brute_causes(c.inst, c.query)) << c.facts_text << c.query_text;

        for (const auto& report : fast) {
            EXPECT_TRUE(c.inst.tuple(report.tid).is_endogenous());
            ASSERT_FALSE(report.minimal_contingency_sets.empty());
            std::size_t smallest = SIZE_MAX;
            for (const auto& gamma : report.minimal_contingency_sets) {
                EXPECT_FALSE(gamma.count(report.tid));
                EXPECT_TRUE(eval_bcq(c.inst.without(gamma), c.query));
                TidSet with_t = gamma;
                with_t.insert(report.tid);
                EXPECT_FALSE(eval_bcq(c.inst.without(with_t), c.query));
                for (Tid g : gamma) {
                    TidSet smaller = gamma;
                    smaller.erase(g);
                    TidSet smaller_t = smaller;
                    smaller_t.insert(report.tid);
                    const bool still = eval_bcq(c.inst.without(smaller), c.query) &&
                                       !eval_bcq(c.inst.without(smaller_t), c.query);
                    EXPECT_FALSE(still) << "not minimal";
                }
                smallest = std::min(smallest, gamma.size());
            }
            EXPECT_EQ(report.responsibility, Responsibility::inverse_of(static_cast<std::uint32_t>(smallest + 1)));
            EXPECT_EQ(report.is_counterfactual, smallest == 0);
            EXPECT_EQ(responsibility(c.inst, c.query, report.tid), report.responsibility);
        }

        // Most responsible causes are exactly those attaining the maximum.
        Responsibility best;
        for (const auto& r : fast) best = std::max(best, r.responsibility);
        for (const auto& r : fast) EXPECT_EQ(r.is_most_responsible, r.responsibility == best);

        // Non-causes have zero responsibility.
        for (Tid t : c.inst.endogenous_tids()) {
            const bool is_cause =
                std::any_of(fast.begin(), fast.end(), [&](const CauseReport& r) { return r.tid == t; });
            if (!is_cause) EXPECT_TRUE(responsibility(c.inst, c.query, t).is_zero());
        }

        // A false query has no causes.
        if (!eval_bcq(c.inst, c.query)) EXPECT_TRUE(fast.empty());
    }
    std::cout << "cases with causes: " << with_causes << ", with nonempty contingency: " << with_sets << "\n";
    EXPECT_GT(with_causes, 100);
    EXPECT_GT(with_sets, 30);
}

TEST(CausalityProperty, HardFilterMatchesOracle) {
    whydb::testing::RandomCase gen(17);
    int compared = 0;
    for (int round = 0; round < 200; ++round) {
        const auto c = gen.next(8);
        const auto hard = parse_hard_constraints(gen.constraints_text(), c.inst.schema());
        if (!satisfies_all(c.inst, hard)) continue;
        EXPECT_EQ(causes_under_ics(c.inst, c.query, hard), oracle::brute_causes_filtered(c.inst, c.query, hard))
            << c.facts_text << c.query_text;
        ++compared;
    }
    EXPECT_GT(compared, 30);
}
