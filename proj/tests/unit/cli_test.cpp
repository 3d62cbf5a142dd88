#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <sys/wait.h>

#include "synthetic.hpp"

namespace {

namespace fs = std::filesystem;

struct RunResult {
    int code = -1;
    std::string output;
};

RunResult run(const std::string& args) {
    const std::string cmd = std::string(ECGEMD_CLI_PATH) + " " + args + " 2>&1";
    RunResult r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    std::array<char, 4096> buf{};
    while (std::fgets(buf.data(), buf.size(), pipe)) r.output += buf.data();
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

TEST(Cli, HelpListsSubcommandsAndExitCodes) {
    const auto r = run("--help");
    EXPECT_EQ(r.code, 0);
    for (const char* s : {"ingest", "denoise", "segment", "features", "train", "evaluate", "run-all", "compare",
                          "--config", "--seed", "--workers", "--out", "Exit codes"})
        EXPECT_NE(r.output.find(s), std::string::npos) << s;
}

TEST(Cli, UsageErrorsExitOne) {
    EXPECT_EQ(run("").code, 1);
    EXPECT_EQ(run("frobnicate").code, 1);
    EXPECT_EQ(run("--workers abc run-all").code, 1);
    EXPECT_EQ(run("--config /nonexistent/config.json ingest").code, 1);
}

TEST(Cli, DataErrorsExitTwo) {
    ecgemd::testing::TempDir dir;
    std::ofstream(dir.path() / "empty.txt") << "";
    std::ofstream(dir.path() / "m.csv") << "empty.txt,e,HPT\n";
    const auto r = run("--manifest " + (dir.path() / "m.csv").string() + " --out " + (dir.path() / "o").string() +
                       " ingest");
    EXPECT_EQ(r.code, 2) << r.output;
    EXPECT_NE(r.output.find("empty record"), std::string::npos) << r.output;
}

TEST(Cli, MissingUpstreamExitsOne) {
    ecgemd::testing::TempDir dir;
    const auto r = run("--out " + dir.path().string() + " evaluate");
    EXPECT_EQ(r.code, 1) << r.output;
    EXPECT_NE(r.output.find("features"), std::string::npos) << r.output;
}

TEST(Cli, RunAllThenCompare) {
    ecgemd::testing::TempDir dir;
    std::ofstream manifest(dir.path() / "m.csv");
    for (int i = 0; i < 6; ++i) {
        const bool hpt = i % 2 == 0;
        const auto name = "r" + std::to_string(i) + ".txt";
        std::ofstream rec(dir.path() / name);
        rec.precision(17);
        for (double v : ecgemd::testing::ecg_like(3000, 128, hpt ? 120 : 55, 0.02, i)) rec << v << '\n';
        manifest << name << ",r" << i << ',' << (hpt ? "HPT" : "Normal") << '\n';
    }
    manifest << "%trim_prefix_hpt=0\n";
    manifest.close();
    std::ofstream(dir.path() / "cfg.json")
        << R"({"manifest": "m.csv", "segment": {"segment_len": 1000}, "features": {"apen_max_samples": 150}, "eval": {"k_folds": 3}})";
    const auto cfg = (dir.path() / "cfg.json").string();
    const auto a = run("--config " + cfg + " --out " + (dir.path() / "a").string() + " run-all");
    ASSERT_EQ(a.code, 0) << a.output;
    EXPECT_NE(a.output.find("Acc"), std::string::npos) << a.output;
    const auto again = run("--config " + cfg + " --out " + (dir.path() / "a").string() + " run-all");
    EXPECT_NE(again.output.find("ingest: cached"), std::string::npos) << again.output;
    const auto b = run("--config " + cfg + " --seed 9 --out " + (dir.path() / "b").string() + " run-all");
    ASSERT_EQ(b.code, 0) << b.output;
    const auto c = run("--out " + (dir.path() / "cmp").string() + " compare " + (dir.path() / "a" / "report.json").string() +
                       " " + (dir.path() / "b" / "report.json").string());
    ASSERT_EQ(c.code, 0) << c.output;
    EXPECT_TRUE(fs::exists(dir.path() / "cmp" / "comparison.svg"));
    EXPECT_EQ(run("compare /nonexistent/a.json /nonexistent/b.json").code, 1);
    std::ofstream(dir.path() / "bad.json") << R"({"schema": "ecgemd-report v1"})";
    const auto bad = (dir.path() / "bad.json").string();
    EXPECT_EQ(run("--out " + (dir.path() / "x").string() + " compare " + bad + " " + bad).code, 2);
}

}  // namespace
