#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "random_instances.hpp"
#include "whydb/error.hpp"
#include "whydb/oracle.hpp"
#include "whydb/repair.hpp"

using namespace whydb;
using whydb::testing::tids;

namespace {

ConstraintSet two_dc_cs(const Instance& d) { return parse_constraints(whydb::testing::two_dc_constraints, d.schema()); }

std::vector<TidSet> deleted_sets(const std::vector<Repair>& rs) {
    std::vector<TidSet> out;
    for (const auto& r : rs) out.push_back(r.deleted);
    return out;
}

// Every subset of the vertex set, kept if it hits all edges and no proper
// subset does.
std::set<TidSet> brute_mhs(const std::vector<TidSet>& edges) {
    TidSet universe;
    for (const auto& e : edges) universe.insert(e.begin(), e.end());
    const std::vector<Tid> v(universe.begin(), universe.end());
    std::vector<TidSet> hitting;
    for (std::uint32_t mask = 0; mask < (1u << v.size()); ++mask) {
        TidSet s;
        for (std::size_t i = 0; i < v.size(); ++i)
            if (mask >> i & 1u) s.insert(v[i]);
        bool hits = std::all_of(edges.begin(), edges.end(), [&](const TidSet& e) {
            return std::any_of(e.begin(), e.end(), [&](Tid t) { return s.count(t); });
        });
        if (hits) hitting.push_back(s);
    }
    std::set<TidSet> out;
    for (const auto& h : hitting) {
        bool minimal = std::none_of(hitting.begin(), hitting.end(),
                                    [&](const TidSet& o) { return o.size() < h.size() && is_subset(o, h); });
        if (minimal) out.insert(h);
    }
    return out;
}

} // namespace

TEST(Repair, TwoDenialExample) {
    const Instance d = whydb::testing::two_dc_instance();
    const auto s = s_repairs(d, two_dc_cs(d));
    ASSERT_EQ(s.size(), 2u);
    EXPECT_EQ(s[0].deleted, tids({1}));
    EXPECT_EQ(s[0].retained, tids({2, 3, 4}));
    EXPECT_EQ(s[1].deleted, tids({3, 4}));
    const auto c = c_repairs(d, two_dc_cs(d));
    ASSERT_EQ(c.size(), 1u);
    EXPECT_EQ(c[0].deleted, tids({1}));
}

TEST(Repair, RunningExampleNegatedQuery) {
    const Instance d = whydb::testing::running_instance();
    const ConstraintSet cs = negate_query(whydb::testing::running_q());
    EXPECT_EQ(deleted_sets(s_repairs(d, cs)), (std::vector<TidSet>{tids({6}), tids({1, 3}), tids({3, 4})}));
    EXPECT_EQ(deleted_sets(c_repairs(d, cs)), (std::vector<TidSet>{tids({6})}));
}

TEST(Repair, ConsistentInstanceHasItselfAsOnlyRepair) {
    const Instance d = whydb::testing::two_dc_instance().without(tids({1}));
    const auto s = s_repairs(d, two_dc_cs(whydb::testing::two_dc_instance()));
    ASSERT_EQ(s.size(), 1u);
    EXPECT_TRUE(s[0].deleted.empty());
    EXPECT_EQ(s[0].retained, d.tids());
}

TEST(Repair, AllExogenousViolationIsIrreparable) {
    const Instance d = load_instance("@exo P(a). @exo Q(a,b). R(a,c).");
    const ConstraintSet cs = parse_constraints(whydb::testing::two_dc_constraints, d.schema());
    try {
        s_repairs(d, cs);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::irreparable);
    }
}

TEST(Repair, ExogenousTuplesAreNeverDeleted) {
    const Instance d = load_instance("@exo P(a). Q(a,b). R(a,c).");
    const ConstraintSet cs = parse_constraints(whydb::testing::two_dc_constraints, d.schema());
    EXPECT_EQ(deleted_sets(s_repairs(d, cs)), (std::vector<TidSet>{tids({2, 3})}));
}

TEST(Repair, ClassifySubset) {
    const Instance d = whydb::testing::two_dc_instance();
    const ConstraintSet cs = two_dc_cs(d);
    EXPECT_EQ(classify_subset(d, cs, tids({2, 3, 4})), SubsetClass::c_repair);
    EXPECT_EQ(classify_subset(d, cs, tids({1, 2})), SubsetClass::s_repair);
    EXPECT_EQ(classify_subset(d, cs, tids({2})), SubsetClass::consistent_not_maximal);
    EXPECT_EQ(classify_subset(d, cs, tids({1, 3})), SubsetClass::inconsistent);
    EXPECT_STREQ(to_string(SubsetClass::s_repair), "s_repair");

    const Instance e = load_instance("@exo P(e). P(a). Q(a,b).");
    const ConstraintSet cs2 = parse_constraints(":- P(x), Q(x,y).", e.schema());
    EXPECT_EQ(classify_subset(e, cs2, tids({2})), SubsetClass::consistent_not_maximal);
}

TEST(Repair, HittingSetsBasic) {
    EXPECT_EQ(minimal_hitting_sets({}), (std::vector<TidSet>{TidSet{}}));
    EXPECT_EQ(minimal_hitting_sets({tids({1, 2}), tids({2, 3})}),
              (std::vector<TidSet>{tids({2}), tids({1, 3})}));
    EXPECT_THROW(minimal_hitting_sets({TidSet{}}), Error);
}

TEST(Repair, HardConstraintsFilterCandidates) {
    const Instance d = whydb::testing::running_instance();
    const ConstraintSet cs = negate_query(whydb::testing::running_q());
    const auto hard = parse_hard_constraints("R[1] <= S[1].");
    EXPECT_EQ(hard_constraint_text(hard[0]), "R[1] <= S[1]");
    EXPECT_EQ(deleted_sets(s_repairs(d, cs, hard)), (std::vector<TidSet>{tids({1, 3})}));
    EXPECT_TRUE(satisfies_all(d, hard));
    EXPECT_FALSE(satisfies_all(d.without(tids({4})), hard));

    const auto dc_hard = parse_hard_constraints(":- R(x,x).", d.schema());
    EXPECT_EQ(deleted_sets(s_repairs(d, cs, dc_hard)), (std::vector<TidSet>{tids({1, 3}), tids({3, 4})}));
    const auto unicode = parse_hard_constraints("R[1,2] ⊆ R[2,1].");
    EXPECT_EQ(hard_constraint_text(unicode[0]), "R[1,2] <= R[2,1]");
}

TEST(Repair, HardConstraintPositionOutOfRange) {
    const Instance d = whydb::testing::running_instance();
    EXPECT_THROW(satisfies(d, parse_hard_constraints("R[3] <= S[1].")[0]), Error);
}

// The deleted tuples of all S-repairs together are exactly the vertices of
// the inclusion-minimal (endogenous) violation edges. Edges that strictly
// contain another edge need not contribute.
TEST(Repair, UnionOfDeletionsIsUnionOfMinimalEdges) {
    const Instance d = load_instance("R(a,a). R(a,b).");
    const ConstraintSet cs = parse_constraints(":- R(x,y), R(y,z).", d.schema());
    const auto edges = violations(d, cs);
    ASSERT_EQ(edges.size(), 2u); // {1} and {1,2}
    TidSet deleted;
    for (const auto& r : s_repairs(d, cs)) deleted.insert(r.deleted.begin(), r.deleted.end());
    EXPECT_EQ(deleted, tids({1}));
}

TEST(RepairProperty, HittingSetsMatchBruteForce) {
    std::mt19937 rng(3);
    for (int round = 0; round < 400; ++round) {
        std::vector<TidSet> edges;
        const int n = std::uniform_int_distribution<int>(0, 6)(rng);
        for (int i = 0; i < n; ++i) {
            TidSet e;
            const int k = std::uniform_int_distribution<int>(1, 4)(rng);
            for (int j = 0; j < k; ++j) e.insert(Tid{std::uniform_int_distribution<std::uint32_t>(1, 9)(rng)});
            edges.push_back(e);
        }
        const auto got = minimal_hitting_sets(edges);
        const std::set<TidSet> as_set(got.begin(), got.end());
        ASSERT_EQ(as_set.size(), got.size()) << "duplicates";
        EXPECT_EQ(as_set, brute_mhs(edges));
        EXPECT_TRUE(std::is_sorted(got.begin(), got.end(), [](const TidSet& a, const TidSet& b) {
            return a.size() != b.size() ? a.size() < b.size() : a < b;
        }));
    }
}

TEST(RepairProperty, RepairsMatchOracle) {
    whydb::testing::RandomCase gen(5);
    int compared = 0;
    for (int round = 0; round < 300; ++round) {
        const auto c = gen.next(10);
        const ConstraintSet cs = parse_constraints(gen.constraints_text(), c.inst.schema());
        std::vector<oracle::BruteRepair> expected;
        bool irreparable = false;
        try {
            expected = oracle::brute_repairs(c.inst, cs);
        } catch (const Error& e) {
            ASSERT_EQ(e.kind(), ErrorKind::irreparable);
            irreparable = true;
        }
        if (irreparable) {
            EXPECT_THROW(s_repairs(c.inst, cs), Error);
            continue;
        }
        const auto s = s_repairs(c.inst, cs);
        const auto cr = c_repairs(c.inst, cs);
        std::vector<Repair> brute_s, brute_c;
        for (const auto& b : expected) {
            brute_s.push_back(b.repair);
            if (b.is_c_repair) brute_c.push_back(b.repair);
        }
        ASSERT_EQ(s, brute_s) << c.facts_text;
        ASSERT_EQ(cr, brute_c) << c.facts_text;

        // Every repair is consistent, maximal, and partitions the instance.
        TidSet deleted_union;
        for (const auto& r : s) {
            EXPECT_TRUE(satisfies(c.inst.restrict_to(r.retained), cs));
            for (Tid t : r.deleted) {
                EXPECT_TRUE(c.inst.tuple(t).is_endogenous());
                TidSet more = r.retained;
                more.insert(t);
                EXPECT_FALSE(satisfies(c.inst.restrict_to(more), cs));
            }
            EXPECT_EQ(r.retained.size() + r.deleted.size(), c.inst.size());
            deleted_union.insert(r.deleted.begin(), r.deleted.end());
        }
        // Union invariant, on the endogenous projections of the edges.
        std::set<TidSet> projected;
        for (const auto& e : violations(c.inst, cs)) {
            TidSet p;
            for (Tid t : e.tids)
                if (c.inst.tuple(t).is_endogenous()) p.insert(t);
            projected.insert(p);
        }
        TidSet minimal_union;
        for (const auto& e : projected) {
            bool minimal = std::none_of(projected.begin(), projected.end(), [&](const TidSet& o) {
                return o.size() < e.size() && is_subset(o, e);
            });
            if (minimal) minimal_union.insert(e.begin(), e.end());
        }
        EXPECT_EQ(deleted_union, minimal_union) << c.facts_text;
        ++compared;
    }
    EXPECT_GT(compared, 100);
}

TEST(RepairProperty, HardFilterYieldsSubset) {
    whydb::testing::RandomCase gen(9);
    for (int round = 0; round < 150; ++round) {
        const auto c = gen.next(8, false);
        const ConstraintSet cs = negate_query(c.query);
        std::vector<HardConstraint> hard = parse_hard_constraints(gen.constraints_text(), c.inst.schema());
        const auto all = s_repairs(c.inst, cs);
        const auto kept = s_repairs(c.inst, cs, hard);
        for (const auto& r : kept) {
            EXPECT_NE(std::find(all.begin(), all.end(), r), all.end());
            EXPECT_TRUE(satisfies_all(c.inst.restrict_to(r.retained), hard));
        }
        for (const auto& r : all)
            if (satisfies_all(c.inst.restrict_to(r.retained), hard))
                EXPECT_NE(std::find(kept.begin(), kept.end(), r), kept.end());
    }
}
