// Copyright 2026 The t2s Authors
// SPDX-License-Identifier: Apache-2.0

#include "t2s/validate.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <functional>

namespace t2s {
namespace {

const DatabaseSchema& employees() { return testing::catalog().at("employees"); }

TEST(Validate, CorrectQueryIsAligned) {
    const auto r = validate_sql("SELECT name FROM Employees WHERE salary > 50000;", employees());
    EXPECT_TRUE(r.syntax_ok);
    EXPECT_TRUE(r.aligned);
    EXPECT_TRUE(r.issues.empty());
}

TEST(Validate, PreliminaryQueryHasTwoIssues) {
    const auto r = validate_sql("SELECT SUM(salary) FROM Employee WHERE dept = 'Sales';", employees());
    EXPECT_TRUE(r.syntax_ok);
    EXPECT_FALSE(r.aligned);
    ASSERT_EQ(r.issues.size(), 2u);
    std::vector<std::pair<std::string, std::string>> got;
    for (const auto& i : r.issues) got.emplace_back(i.offending, i.suggestion.value_or("<none>"));
    std::sort(got.begin(), got.end());
    EXPECT_EQ(got, (std::vector<std::pair<std::string, std::string>>{{"Employee", "Employees"}, {"dept", "department"}}));
    EXPECT_TRUE(r.repairable());
}

TEST(Validate, RepairsReachTheCorrectedQuery) {
    const std::string bad = "SELECT SUM(salary) FROM Employee WHERE dept = 'Sales';";
    const auto plan = suggest_repairs(validate_sql(bad, employees()));
    const std::string fixed = apply_repairs(bad, plan.substitutions);
    EXPECT_EQ(fixed, "SELECT SUM(salary) FROM Employees WHERE department = 'Sales';");
    EXPECT_TRUE(validate_sql(fixed, employees()).aligned);
    EXPECT_EQ(plan.directive, "Use the exact table and field names from the schema: Employees, id, name, department, salary");
}

TEST(Validate, CaseMismatchIsReported) {
    const auto r = validate_sql("SELECT City_Name FROM city", testing::catalog().at("geo"));
    ASSERT_EQ(r.issues.size(), 1u);
    EXPECT_EQ(r.issues[0].kind, IssueKind::case_mismatch);
    EXPECT_EQ(r.issues[0].suggestion, "city_name");
}

TEST(Validate, AliasesAndAmbiguity) {
    const auto& scholar = testing::catalog().at("scholar");
    EXPECT_TRUE(validate_sql("SELECT w.paperid FROM writes AS w JOIN paper p ON p.paperid = w.paperid", scholar).aligned);
    const auto amb = validate_sql("SELECT paperid FROM writes JOIN paper ON paper.paperid = writes.paperid", scholar);
    ASSERT_EQ(amb.issues.size(), 1u);
    EXPECT_EQ(amb.issues[0].kind, IssueKind::ambiguous_column);
    const auto alias = validate_sql("SELECT z.paperid FROM writes AS w", scholar);
    ASSERT_EQ(alias.issues.size(), 1u);
    EXPECT_EQ(alias.issues[0].kind, IssueKind::alias_error);
}

TEST(Validate, SelectAliasesAndDerivedTables) {
    EXPECT_TRUE(validate_sql("SELECT salary AS s FROM Employees ORDER BY s", employees()).aligned);
    EXPECT_TRUE(validate_sql("SELECT d.n FROM (SELECT name AS n FROM Employees) AS d", employees()).aligned);
    EXPECT_TRUE(validate_sql("SELECT COUNT(*) FROM Employees", employees()).aligned);
}

TEST(Validate, SyntaxErrorShortCircuits) {
    const auto r = validate_sql("SELECT FROM", employees());
    EXPECT_FALSE(r.syntax_ok);
    EXPECT_FALSE(r.aligned);
    EXPECT_FALSE(r.syntax_error.empty());
    EXPECT_TRUE(r.issues.empty());
}

TEST(Validate, UnrepairableKeepsNoSuggestion) {
    const auto r = validate_sql("SELECT zzzz FROM Employees", employees());
    ASSERT_EQ(r.issues.size(), 1u);
    EXPECT_FALSE(r.issues[0].suggestion.has_value());
    EXPECT_FALSE(r.repairable());
}

TEST(NearMatch, Rules) {
    const std::vector<std::string> cands = {"Employees", "id", "name", "department", "salary"};
    EXPECT_EQ(near_match("Employee", cands), "Employees");
    EXPECT_EQ(near_match("dept", cands), "department");
    EXPECT_EQ(near_match("salry", cands), "salary");
    EXPECT_EQ(near_match("qqqqq", cands), std::nullopt);
    EXPECT_EQ(near_match("ab", {"abc", "abd"}), std::nullopt);  // tie
}

TEST(EditDistance, AgainstNaiveRecursion) {
    // exhaustive recursion as an independent oracle
    std::function<std::size_t(std::string_view, std::string_view)> naive = [&](std::string_view a,
                                                                                 std::string_view b) -> std::size_t {
        if (a.empty()) return b.size();
        if (b.empty()) return a.size();
        if (a[0] == b[0]) return naive(a.substr(1), b.substr(1));
        return 1 + std::min({naive(a.substr(1), b), naive(a, b.substr(1)), naive(a.substr(1), b.substr(1))});
    };
    const std::vector<std::string> words = {"", "a", "dept", "department", "salry", "salary", "name", "nmae", "ide"};
    for (const auto& a : words)
        for (const auto& b : words)
            if (a.size() + b.size() < 16) {
                EXPECT_EQ(edit_distance(a, b), naive(a, b)) << a << " " << b;
            }
}

TEST(ApplyRepairs, WholeTokensOutsideStrings) {
    const std::vector<Substitution> subs = {{"dept", "department"}};
    EXPECT_EQ(apply_repairs("SELECT dept, dept_id FROM t WHERE x = 'dept'", subs),
              "SELECT department, dept_id FROM t WHERE x = 'dept'");
}

}  // namespace
}  // namespace t2s
