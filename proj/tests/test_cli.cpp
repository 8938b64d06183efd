#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <gtest/gtest.h>
#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run run(const std::string& args, const std::string& env = "")
{
    const fs::path dir = fs::path(TWOCENTERS_WORKDIR) / "test_cli";
    fs::create_directories(dir);
    const std::string cmd =
        "cd '" + dir.string() + "' && " + env + " '" + std::string(TWOCENTERS_CLI) + "' " + args + " 2>/dev/null";
    Run r;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return r;
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = std::fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

fs::path work(const std::string& name) { return fs::path(TWOCENTERS_WORKDIR) / "test_cli" / name; }

std::string slurp(const fs::path& p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST(Cli, ClassifyJson)
{
    const auto r = run("--json classify --z1 -1 --z2 0.5 --e 0.1 --k 0.5");
    ASSERT_EQ(r.code, 0);
    const auto j = json::parse(r.out);
    EXPECT_EQ(j["label"], "I_<^a");
    EXPECT_EQ(j["bounded"], true);
    EXPECT_EQ(j["x_intervals"].size(), 2u);
    EXPECT_EQ(j["x_intervals"][1][1], "inf");
    EXPECT_EQ(j["charge_case"], "OppositeSignPlusNegative");
}

TEST(Cli, ClassifyText)
{
    const auto r = run("classify --z1 1 --z2 1 --e 3 --k -4");
    ASSERT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("label: II_>"), std::string::npos);
    EXPECT_NE(r.out.find("k_minus: 0"), std::string::npos);
}

TEST(Cli, FlagsOverrideConfig)
{
    {
        std::ofstream cfg(work("cfg.json"));
        cfg << R"({"z1": 1, "z2": 1, "classify": {"e": 3, "k": -4}})";
    }
    const auto base = run("--json classify --config cfg.json");
    ASSERT_EQ(base.code, 0);
    EXPECT_EQ(json::parse(base.out)["label"], "II_>");
    const auto over = run("--json classify --config cfg.json --k -6");
    ASSERT_EQ(over.code, 0);
    EXPECT_EQ(json::parse(over.out)["label"], "I_>");
    EXPECT_EQ(json::parse(over.out)["K"], -6.0);
}

TEST(Cli, PresetByName)
{
    const auto r = run("--json classify --config bounded-orbit");
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(json::parse(r.out)["label"], "I_<^a");
}

TEST(Cli, DiagramWritesFullPrecisionCsvAndDeterministicSvg)
{
    const std::string args = "diagram --z1 -1 --z2 0.5 --e-min 0 --e-max 1 --k-min -2 --k-max 2 --nx 11 --ny 9 "
                             "--curve-samples 50 --grid-out g.csv --curves-out c.csv --svg-out ";
    ASSERT_EQ(run(args + "a.svg --threads 1").code, 0);
    ASSERT_EQ(run(args + "b.svg", "TWOCENTERS_THREADS=3").code, 0);
    EXPECT_EQ(slurp(work("a.svg")), slurp(work("b.svg")));
    const std::string grid = slurp(work("g.csv"));
    EXPECT_EQ(grid.rfind("E,K,label,pattern,bounded\n", 0), 0u);
    // 0.2 printed with 17 significant digits.
    EXPECT_NE(grid.find("0.20000000000000001"), std::string::npos);
    EXPECT_NE(slurp(work("c.csv")).find("Lp3,"), std::string::npos);
}

TEST(Cli, TrajectoryJsonAndFiles)
{
    const auto r = run("--json trajectory --z1 -1 --z2 0.5 --e 0.1 --k 0.5 --x0 1.2 --y0 -0.7 --s-max 50 "
                       "--out t.csv --events-out e.csv --hits-out h.csv");
    ASSERT_EQ(r.code, 0);
    const auto j = json::parse(r.out);
    EXPECT_EQ(j["termination"], "s_max");
    EXPECT_EQ(j["section"], "inter_focal_segment");
    EXPECT_GT(j["section_hits"].get<int>(), 0);
    EXPECT_LT(j["max_K_drift"].get<double>(), 1e-9);
    EXPECT_TRUE(fs::exists(work("t.csv")));
    EXPECT_EQ(slurp(work("h.csv")).rfind("s,q1,p1,p2\n", 0), 0u);
}

TEST(Cli, FailedRunLeavesNoPartialFiles)
{
    fs::remove(work("partial.csv"));
    const auto r = run("trajectory --z1 1 --z2 1 --q1 0.3 --q2 0.8 --p1 1 --p2 0 --s-max 1 "
                       "--out partial.csv --events-out no_such_dir/e.csv");
    EXPECT_EQ(r.code, 2);
    EXPECT_FALSE(fs::exists(work("partial.csv")));
}

TEST(Cli, ExitCodes)
{
    EXPECT_EQ(run("classify --z1 1 --z2 1 --e -1 --k 0").code, 2);
    EXPECT_EQ(run("classify --z1 1 --z2 1 --e 1").code, 2);
    EXPECT_EQ(run("trajectory --z1 1 --z2 1 --q1 2 --q2 0 --p1 0 --p2 0").code, 2);
    EXPECT_EQ(run("diagram --z1 1 --z2 1 --nx 1").code, 2);
    EXPECT_EQ(run("--bogus-flag").code, 2);
    EXPECT_EQ(run("trajectory --z1 1 --z2 1 --special nowhere --e 1").code, 2);
}
