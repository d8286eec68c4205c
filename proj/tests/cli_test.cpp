// Copyright 2026 The t2s Authors
// SPDX-License-Identifier: Apache-2.0

#include "t2s/cli.hpp"
#include "t2s/io.hpp"
#include "t2s/report.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

namespace t2s {
namespace {

namespace fs = std::filesystem;

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string data(const std::string& rel) { return testing::source_path("tests/data/" + rel).string(); }

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("t2s_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    std::string tmp(const std::string& name) const { return (dir_ / name).string(); }

    std::vector<std::string> generate_args(const std::string& out) const {
        return {"generate", "--schemas", data("schemas"), "--corpus", data("corpus.jsonl"), "--targets",
                data("targets.jsonl"), "--backend", "mock", "--script", data("mock_script.json"), "--out", out};
    }

    fs::path dir_;
};

TEST_F(CliTest, CostWorkedExample) {
    const auto r = cli({"cost", "--E", "1000", "--k", "5", "--Le", "300", "--Lq", "30", "--t", "3"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("L=1530\n"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("ops/layer=2340900 "), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("~2.3 million"), std::string::npos);
}

TEST_F(CliTest, ValidateReportsIssuesAndRepair) {
    const auto r = cli({"validate", "--schemas", data("schemas"), "--db", "employees", "--sql",
                        "SELECT SUM(salary) FROM Employee WHERE dept = 'Sales';"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out.rfind("2 issue(s)\n", 0), 0u) << r.out;
    EXPECT_NE(r.out.find("repaired: SELECT SUM(salary) FROM Employees WHERE department = 'Sales';"), std::string::npos);
    const auto ok = cli({"validate", "--schemas", data("schemas"), "--db", "employees", "--sql",
                         "SELECT name FROM Employees"});
    EXPECT_EQ(ok.out, "aligned\n");
    EXPECT_EQ(cli({"validate", "--schemas", data("schemas"), "--db", "nope", "--sql", "SELECT 1"}).code, kExitData);
}

TEST_F(CliTest, GenerateThenEvaluate) {
    const auto g = cli(generate_args(tmp("runs.jsonl")));
    ASSERT_EQ(g.code, 0) << g.err;
    const auto recs = parse_run_records(io::read_file(tmp("runs.jsonl")));
    ASSERT_EQ(recs.size(), 3u);
    EXPECT_EQ(recs[1].id, "t-sales-total");
    EXPECT_EQ(recs[1].attempts.size(), 3u);
    EXPECT_EQ(recs[1].status, RunStatus::accepted);

    const auto e = cli({"evaluate", "--records", tmp("runs.jsonl"), "--golds", data("target_golds.jsonl"), "--fixtures",
                        testing::fixtures_dir().string(), "--json", tmp("report.json"), "--csv", tmp("report.csv")});
    ASSERT_EQ(e.code, 0) << e.err;
    EXPECT_EQ(e.out.rfind("EM 66.7% / TS 100.0%\n", 0), 0u) << e.out;
    const auto rep = parse_report_json(io::read_file(tmp("report.json")));
    EXPECT_EQ(rep.n, 3u);
    EXPECT_EQ(rep.attempt_histogram.at(3), 1u);
    EXPECT_EQ(io::read_file(tmp("report.csv")).rfind("id,em,ts,attempts,detail\n", 0), 0u);
}

TEST_F(CliTest, MockRunsAreDeterministic) {
    ASSERT_EQ(cli(generate_args(tmp("a.jsonl"))).code, 0);
    ASSERT_EQ(cli(generate_args(tmp("b.jsonl"))).code, 0);
    auto par = generate_args(tmp("c.jsonl"));
    par.insert(par.end(), {"--parallelism", "3"});
    ASSERT_EQ(cli(par).code, 0);
    EXPECT_EQ(io::read_file(tmp("a.jsonl")), io::read_file(tmp("b.jsonl")));
    EXPECT_EQ(io::read_file(tmp("a.jsonl")), io::read_file(tmp("c.jsonl")));
}

TEST_F(CliTest, MaxAttemptsOne) {
    auto args = generate_args(tmp("runs.jsonl"));
    args.insert(args.end(), {"--max-attempts", "1"});
    ASSERT_EQ(cli(args).code, 0);
    const auto recs = parse_run_records(io::read_file(tmp("runs.jsonl")));
    EXPECT_EQ(recs[1].status, RunStatus::exhausted);
    EXPECT_EQ(recs[1].attempts.size(), 1u);
}

TEST_F(CliTest, TransportFailureExitCode) {
    io::write_file(tmp("script.json"), R"([{"raise":"transport"}])");
    auto args = generate_args(tmp("runs.jsonl"));
    args[10] = tmp("script.json");
    const auto r = cli(args);
    EXPECT_EQ(r.code, kExitTransport) << r.err;
    const auto recs = parse_run_records(io::read_file(tmp("runs.jsonl")));
    EXPECT_EQ(recs.size(), 3u);  // every target still gets a record
}

TEST_F(CliTest, HttpWithoutUrlIsConfigError) {
    unsetenv("T2S_BACKEND_URL");
    const auto r = cli({"generate", "--schemas", data("schemas"), "--targets", data("targets.jsonl"), "--backend",
                        "http", "--out", tmp("runs.jsonl")});
    EXPECT_EQ(r.code, kExitUsage);
    EXPECT_NE(r.err.find("T2S_BACKEND_URL"), std::string::npos) << r.err;
    EXPECT_FALSE(fs::exists(tmp("runs.jsonl")));
}

TEST_F(CliTest, EvaluateRejectsMismatchedIds) {
    ASSERT_EQ(cli(generate_args(tmp("runs.jsonl"))).code, 0);
    const auto r = cli({"evaluate", "--records", tmp("runs.jsonl"), "--golds", data("golds.jsonl"), "--fixtures",
                        testing::fixtures_dir().string()});
    EXPECT_EQ(r.code, kExitData);
    EXPECT_NE(r.err.find("id mismatch"), std::string::npos) << r.err;
}

TEST_F(CliTest, SelfCheckScoresEverything) {
    const auto r = cli({"evaluate", "--self-check", "--golds", data("golds.jsonl"), "--fixtures",
                        testing::fixtures_dir().string()});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out.rfind("EM 100.0% / TS 100.0%", 0), 0u) << r.out;
}

TEST_F(CliTest, PrepareSplitsAndCounts) {
    const auto r = cli({"prepare", "--input", data("spider/train_spider.json"), "--tables", data("spider/tables.json"),
                        "--out", tmp("train.jsonl"), "--heldout-out", tmp("held.jsonl"), "--split", "0.8", "--seed",
                        "7", "--schemas-out", tmp("schemas")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(fs::exists(tmp("schemas") + "/concert_singer.json"));
    std::size_t lines = 0;
    for (const auto& f : {tmp("train.jsonl"), tmp("held.jsonl")}) {
        std::istringstream in(io::read_file(f));
        std::string l;
        while (std::getline(in, l)) lines += !l.empty();
    }
    EXPECT_EQ(lines, 6u);  // seven records, one names a missing database
    EXPECT_NE(r.out.find("skipped"), std::string::npos);
    const auto strict = cli({"prepare", "--input", data("spider/train_spider.json"), "--tables",
                             data("spider/tables.json"), "--out", tmp("x.jsonl"), "--strict"});
    EXPECT_EQ(strict.code, kExitData);
}

TEST_F(CliTest, RenderPrintsPrompt) {
    const auto r = cli({"render", "--schemas", data("schemas"), "--corpus", data("corpus.jsonl"), "--db", "employees",
                        "--question", "List all employees earning more than 50k.", "--k", "2"});
    EXPECT_EQ(r.code, 0) << r.err;
    ASSERT_GE(r.out.size(), 5u);
    EXPECT_EQ(r.out.substr(r.out.size() - 5), "SQL:\n");  // the terminal gets a closing newline
}

TEST_F(CliTest, UsageErrors) {
    EXPECT_EQ(cli({}).code, kExitUsage);
    EXPECT_EQ(cli({"bogus"}).code, kExitUsage);
    EXPECT_EQ(cli({"cost", "--E", "x"}).code, kExitUsage);
    EXPECT_EQ(cli({"generate", "--schemas", data("schemas"), "--targets", data("targets.jsonl"), "--backend", "mock"}).code,
              kExitUsage);
    EXPECT_EQ(cli({"evaluate", "--records", "/nonexistent", "--golds", data("golds.jsonl"), "--fixtures", "x"}).code,
              kExitUsage);
    io::write_file(tmp("broken.jsonl"), "{not json\n");
    EXPECT_EQ(cli({"evaluate", "--records", tmp("broken.jsonl"), "--golds", data("golds.jsonl"), "--fixtures",
                   testing::fixtures_dir().string()})
                  .code,
              kExitData);
}

}  // namespace
}  // namespace t2s
