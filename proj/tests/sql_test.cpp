// Copyright 2026 The t2s Authors
// SPDX-License-Identifier: Apache-2.0

#include "t2s/sql_ast.hpp"
#include "t2s/sql_lexer.hpp"
#include "sql_gen.hpp"

#include <gtest/gtest.h>

#include <algorithm>

namespace t2s::sql {
namespace {

TEST(Lexer, KindsAndOffsets) {
    const auto toks = lex("select `my col`, 'it''s' FROM t WHERE x <> 1.5;");
    ASSERT_GE(toks.size(), 12u);
    EXPECT_EQ(toks[0].kind, TokenKind::keyword);
    EXPECT_EQ(toks[0].value, "SELECT");
    EXPECT_EQ(toks[1].kind, TokenKind::quoted_identifier);
    EXPECT_EQ(toks[1].value, "my col");
    EXPECT_EQ(toks[3].kind, TokenKind::string);
    EXPECT_EQ(toks[3].value, "it's");
    EXPECT_EQ(toks[3].offset, 17u);
    EXPECT_EQ(toks.back().kind, TokenKind::end);
    EXPECT_THROW(lex("SELECT 'open"), SyntaxError);
}

TEST(Parser, ExampleQueriesParse) {
    for (const char* q : {
             "SELECT city_name FROM city WHERE population = ( SELECT MAX ( population ) FROM city WHERE state_name = "
             "\"wyoming\" ) AND state_name = \"wyoming\";",
             "SELECT DISTINCT t1.authorid, t3.paperid FROM paperkeyphrase AS t2 JOIN keyphrase AS t5 ON "
             "t2.keyphraseid = t5.keyphraseid JOIN paper AS t3 ON t3.paperid = t2.paperid",
             "SELECT p.date_of_birth FROM people p JOIN entrepreneur e ON p.people_id = e.people_id WHERE e.company "
             "!= 'Tillman Ernser';",
             "SELECT country FROM singer WHERE age > 20 GROUP BY country",
             "SELECT SUM(salary) FROM Employees WHERE department = 'Sales'",
             "SELECT name FROM a UNION SELECT name FROM b ORDER BY name LIMIT 3",
             "SELECT count(DISTINCT name), abs(x) FROM t WHERE NOT EXISTS (SELECT 1 FROM u)",
             "SELECT * FROM (SELECT a FROM t) AS d WHERE d.a IS NOT NULL",
             "SELECT a FROM t WHERE NOT ((SELECT MIN(b) FROM u) <= a AND c = 1)",
             "SELECT a FROM t WHERE a IN ((SELECT b FROM u) UNION SELECT c FROM v)",
         }) {
        EXPECT_NO_THROW(parse_sql(q)) << q;
    }
}

TEST(Parser, Structure) {
    const auto q = parse_sql("SELECT DISTINCT a AS x, COUNT(*) FROM t1 AS p LEFT JOIN t2 q ON p.id = q.id "
                             "WHERE a > 1 AND b = 'z' AND c < 3 GROUP BY a HAVING COUNT(*) > 1 ORDER BY x DESC LIMIT 5");
    EXPECT_TRUE(q.distinct);
    ASSERT_EQ(q.select.size(), 2u);
    EXPECT_EQ(q.select[0].alias, "x");
    ASSERT_EQ(q.from.size(), 2u);
    EXPECT_EQ(q.from[1].join, JoinKind::left);
    EXPECT_EQ(q.from[1].ref.alias, "q");
    ASSERT_TRUE(q.where.has_value());
    const auto* land = q.where->as<LogicalExpr>();
    ASSERT_NE(land, nullptr);
    EXPECT_EQ(land->operands.size(), 3u);  // flattened
    EXPECT_EQ(q.group_by.size(), 1u);
    EXPECT_TRUE(q.having.has_value());
    ASSERT_EQ(q.order_by.size(), 1u);
    EXPECT_TRUE(q.order_by[0].desc);
    EXPECT_EQ(q.limit, "5");
}

TEST(Parser, SyntaxErrorsCarryOffsetAndExpectation) {
    struct Case {
        const char* sql;
        std::size_t offset;
    };
    for (const auto& c : std::vector<Case>{{"SELECT FROM t", 7}, {"SELECT a FROM", 13}, {"SELECT a FROM t WHERE", 21},
                                           {"SELECT a FROM t; SELECT b", 17}, {"SELECT (a FROM t", 10}}) {
        try {
            parse_sql(c.sql);
            ADD_FAILURE() << c.sql;
        } catch (const SyntaxError& e) {
            EXPECT_EQ(e.offset(), c.offset) << c.sql << ": " << e.what();
            EXPECT_FALSE(e.expected().empty()) << c.sql;
        }
    }
}

TEST(Printer, SingleLineAndReparses) {
    const auto q = parse_sql("select a\n  from t\n where b = 'it''s'");
    const std::string s = to_sql(q);
    EXPECT_EQ(s.find('\n'), std::string::npos);
    EXPECT_EQ(parse_sql(s), q);
    EXPECT_NE(debug_dump(q).find('\n'), std::string::npos);
}

TEST(Printer, PrecedenceSurvives) {
    for (const char* src : {"SELECT a FROM t WHERE (a = 1 OR b = 2) AND c = 3", "SELECT (a + 1) * 2 FROM t",
                            "SELECT a - (b - c) FROM t", "SELECT a FROM t WHERE NOT (a = 1 AND b = 2)"}) {
        const auto q = parse_sql(src);
        EXPECT_EQ(parse_sql(to_sql(q)), q) << src << " -> " << to_sql(q);
    }
    const auto q = parse_sql("SELECT a FROM t WHERE (a = 1 OR b = 2) AND c = 3");
    const auto* land = q.where->as<LogicalExpr>();
    ASSERT_NE(land, nullptr);
    EXPECT_EQ(land->op, "AND");
}

TEST(RoundTripProperty, RandomQueries) {
    testing::SqlGen gen(4242);
    gen.set_mixed_case(true);
    int cases = 0;
    for (int i = 0; i < 400; ++i) {
        const std::string src = gen.select(2);
        Query q;
        try {
            q = parse_sql(src);
        } catch (const SyntaxError& e) {
            ADD_FAILURE() << src << "\n" << e.what();
            continue;
        }
        const std::string printed = to_sql(q);
        EXPECT_EQ(parse_sql(printed), q) << src << "\n" << printed;
        EXPECT_EQ(to_sql(parse_sql(printed)), printed);
        ++cases;
    }
    EXPECT_GE(cases, 200);
}

}  // namespace
}  // namespace t2s::sql
