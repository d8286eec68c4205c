// Copyright 2026 The t2s Authors
// SPDX-License-Identifier: Apache-2.0

#include "em_oracle.hpp"
#include "t2s/evaluation.hpp"

#include <gtest/gtest.h>

namespace t2s {
namespace {

using testing::kSinger;
using testing::kWyoming;
using testing::pairs;

TEST(EmOracle, AgreesWithHandLabelsAndImplementation) {
    ASSERT_GE(pairs().size(), 30u);
    for (const auto& p : pairs()) {
        const bool by_oracle = testing::oracle::em(p.pred, p.gold);
        EXPECT_EQ(by_oracle, p.expected) << "oracle disagrees with label\n  pred: " << p.pred << "\n  gold: " << p.gold;
        const auto r = exact_set_match(p.pred, p.gold);
        EXPECT_EQ(r.match, by_oracle) << "pred: " << p.pred << "\ngold: " << p.gold;
        EXPECT_EQ(r.match, r.diff.empty());
    }
}

TEST(EmOracle, Symmetric) {
    for (const auto& p : pairs()) EXPECT_EQ(exact_set_match(p.gold, p.pred).match, exact_set_match(p.pred, p.gold).match);
}

TEST(ExactSetMatch, DiffNamesSegments) {
    const auto r = exact_set_match("SELECT city_name FROM city WHERE state_name='wyoming' ORDER BY population DESC LIMIT 1",
                                   kWyoming);
    EXPECT_EQ(r.diff, (std::vector<std::string>{"where", "order_by", "limit"}));
    EXPECT_EQ(exact_set_match("SELECT FROM", kSinger).diff, std::vector<std::string>{"syntax"});
    EXPECT_EQ(exact_set_match(kSinger, "SELEC x").diff, std::vector<std::string>{"gold_syntax"});
}

TEST(ExactSetMatch, IgnoreLiterals) {
    EmOptions o;
    o.ignore_literals = true;
    EXPECT_TRUE(exact_set_match("SELECT a FROM t WHERE b = 'x'", "SELECT a FROM t WHERE b = 'y'", o).match);
    EXPECT_FALSE(exact_set_match("SELECT a FROM t WHERE b = 'x'", "SELECT a FROM t WHERE b = 'y'").match);
}

}  // namespace
}  // namespace t2s
