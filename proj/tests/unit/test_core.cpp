#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "whydb/core.hpp"
#include "whydb/error.hpp"

using namespace whydb;
using whydb::testing::tids;

namespace {

ErrorKind kind_of(const std::string& text) {
    try {
        load_instance(text);
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "expected an error for: " << text;
    return ErrorKind::parse;
}

} // namespace

TEST(Instance, LoadsRunningExampleInFileOrder) {
    const Instance d = whydb::testing::running_instance();
    ASSERT_EQ(d.size(), 6u);
    EXPECT_EQ(labelled_text(d.tuple(Tid{1})), "R(a4,a3)#1");
    EXPECT_EQ(labelled_text(d.tuple(Tid{6})), "S(a3)#6");
    EXPECT_EQ(d.arity("R"), 2u);
    EXPECT_EQ(d.arity("S"), 1u);
    EXPECT_FALSE(d.arity("T").has_value());
    EXPECT_EQ(d.endogenous_tids(), tids({1, 2, 3, 4, 5, 6}));
    EXPECT_TRUE(d.exogenous_tids().empty());
    EXPECT_EQ(d.of_predicate("S").size(), 3u);
    EXPECT_TRUE(d.of_predicate("T").empty());
}

TEST(Instance, ExogenousMarkerAndExplicitTids) {
    const Instance d = load_instance("R[10](a,b).\n@exo S[3](a). % note\n");
    EXPECT_EQ(d.tids(), tids({3, 10}));
    EXPECT_EQ(d.exogenous_tids(), tids({3}));
    EXPECT_FALSE(d.tuple(Tid{3}).is_endogenous());
    EXPECT_EQ(d.tuples().front().tid, Tid{3});
}

TEST(Instance, QuotedConstants) {
    const Instance d = load_instance("R(\"a\", 42). R(Rome, x-1).");
    EXPECT_EQ(d.tuple(Tid{1}).args, (std::vector<std::string>{"a", "42"}));
    EXPECT_EQ(d.tuple(Tid{2}).args, (std::vector<std::string>{"Rome", "x-1"}));
    EXPECT_THROW(load_instance("R(\"New York\")."), Error);
}

TEST(Instance, RejectsMalformedInput) {
    EXPECT_EQ(kind_of("R(a,b). R(a,b)."), ErrorKind::duplicate_fact);
    EXPECT_EQ(kind_of("R[1](a). S[1](b)."), ErrorKind::duplicate_tid);
    EXPECT_EQ(kind_of("R(a). R(a,b)."), ErrorKind::arity_clash);
    EXPECT_EQ(kind_of("R[1](a). S(b)."), ErrorKind::parse);
    EXPECT_EQ(kind_of("R(a,b)"), ErrorKind::parse);
    EXPECT_EQ(kind_of("R()."), ErrorKind::parse);
    EXPECT_EQ(kind_of("R[0](a)."), ErrorKind::parse);
}

TEST(Instance, ParseErrorsCarryPosition) {
    try {
        load_instance("R(a).\nS(b");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::parse);
        EXPECT_EQ(std::string(e.what()).substr(0, 2), "2:");
    }
}

TEST(Instance, UnknownTid) {
    const Instance d = whydb::testing::running_instance();
    try {
        tuple_by_tid(d, Tid{7});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::unknown_tid);
    }
}

TEST(Instance, EmptyInstance) {
    const Instance d = load_instance("% nothing\n");
    EXPECT_TRUE(d.empty());
    EXPECT_TRUE(d.tids().empty());
}

TEST(Instance, RestrictAndWithoutPartition) {
    const Instance d = whydb::testing::running_instance();
    const TidSet keep = tids({1, 4, 9});
    const Instance a = d.restrict_to(keep);
    const Instance b = d.without(keep);
    EXPECT_EQ(a.tids(), tids({1, 4}));
    EXPECT_EQ(b.tids(), tids({2, 3, 5, 6}));
    EXPECT_EQ(a.size() + b.size(), d.size());
}

TEST(Instance, TextHelpers) {
    const Instance d = whydb::testing::running_instance();
    EXPECT_EQ(tid_set_text(tids({1, 4})), "{1,4}");
    EXPECT_EQ(tuple_set_text(d, tids({1, 4})), "{R(a4,a3)#1, S(a4)#4}");
    EXPECT_TRUE(is_subset(tids({1}), tids({1, 2})));
    EXPECT_FALSE(is_subset(tids({3}), tids({1, 2})));
}

// Property: serialising and reloading yields the same instance.
TEST(InstanceProperty, FactTextRoundTrips) {
    std::mt19937 rng(7);
    for (int round = 0; round < 200; ++round) {
        std::vector<Tuple> tuples;
        std::set<std::pair<std::string, std::vector<std::string>>> facts;
        const int n = std::uniform_int_distribution<int>(0, 12)(rng);
        std::uint32_t next_tid = 1;
        for (int i = 0; i < n; ++i) {
            const int p = std::uniform_int_distribution<int>(0, 2)(rng);
            const std::string pred = std::string(1, char('A' + p));
            std::vector<std::string> args;
            for (int k = 0; k <= p; ++k) {
                const int c = std::uniform_int_distribution<int>(0, 3)(rng);
                args.push_back(c == 3 ? "N7" : std::string(1, char('a' + c)));
            }
            if (!facts.insert({pred, args}).second) continue;
            next_tid += std::uniform_int_distribution<std::uint32_t>(1, 3)(rng);
            const Genus g = std::uniform_int_distribution<int>(0, 3)(rng) == 0 ? Genus::exogenous : Genus::endogenous;
            tuples.push_back(Tuple{pred, args, Tid{next_tid}, g});
        }
        const Instance d(tuples);
        const Instance back = load_instance(to_fact_text(d));
        EXPECT_EQ(back, d) << to_fact_text(d);
    }
}
