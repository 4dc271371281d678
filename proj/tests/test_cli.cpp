#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include <bijac/cli.hpp>

using namespace bijac;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "bijac");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

Json report(std::vector<std::string> args) {
    args.push_back("--json");
    args.push_back("-");
    return Json::parse(run(std::move(args)).out);
}

const Json& check(const Json& rep, const std::string& name) {
    for (const auto& c : rep["checks"])
        if (c["name"] == name) return c;
    throw std::runtime_error("no check " + name);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST(Cli, VerifyAllPassesAtThreeThree) {
    auto r = run({"verify-all", "--d", "3", "--e", "3", "--seed", "42"});
    EXPECT_EQ(r.code, 0) << r.out << r.err;
    auto rep = report({"verify-all", "--d", "3", "--e", "3", "--seed", "42"});
    EXPECT_EQ(rep["verdict"], "pass");
    std::vector<std::string> names;
    for (const auto& c : rep["checks"]) names.push_back(c["name"]);
    EXPECT_EQ(names, (std::vector<std::string>{"smoothness", "euler", "sigma-oracle", "dimensions", "top-piece", "duality",
                                               "ramification", "mu-probes", "ivhs", "kernel-square", "bounds"}));
    for (const auto& c : rep["checks"]) {
        EXPECT_TRUE(c.contains("inputs"));
        EXPECT_TRUE(c.contains("outputs"));
        EXPECT_TRUE(c["inputs"].contains("field")) << c["name"];
    }
    EXPECT_EQ(check(rep, "ivhs")["outputs"]["max_rank"], 4);
    EXPECT_EQ(check(rep, "ramification")["outputs"]["length"], 12);
}

TEST(Cli, SingularCurveIsUndecidedAndGated) {
    auto r = run({"verify-all", "--d", "3", "--e", "3", "--curve", "x0^3*y0^3"});
    EXPECT_EQ(r.code, 3);
    auto rep = report({"verify-all", "--d", "3", "--e", "3", "--curve", "x0^3*y0^3"});
    ASSERT_EQ(rep["checks"].size(), 1u);
    EXPECT_EQ(rep["checks"][0]["verdict"], "undecided");
    EXPECT_EQ(rep["checks"][0]["outputs"]["skipped"].size(), 10u);
    EXPECT_EQ(run({"ivhs", "--d", "3", "--e", "3", "--curve", "x0^3*y0^3"}).code, 3);
}

TEST(Cli, InputErrorsExitTwo) {
    EXPECT_EQ(run({"ivhs", "--trials", "0"}).code, 2);
    EXPECT_EQ(run({"smooth", "--curve", "x0*y0 +"}).code, 2);
    EXPECT_EQ(run({"smooth", "--d", "1", "--e", "1", "--curve", "x0*y0 + x0^2"}).code, 2);
    EXPECT_EQ(run({"mu", "--d", "2", "--e", "4"}).code, 2);
    EXPECT_EQ(run({"bounds", "--d", "3", "--e", "2"}).code, 2);
    EXPECT_EQ(run({"smooth", "--field", "R"}).code, 2);
    EXPECT_EQ(run({"smooth", "--prime", "9"}).code, 2);
    EXPECT_EQ(run({"nonsense"}).code, 2);
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"smooth", "--d", "2", "--e", "2", "--curve", "7*x0^2*y0^2", "--prime", "7"}).code, 2);
}

TEST(Cli, DimsTable) {
    auto rep = report({"dims", "--d", "3", "--e", "3", "--a-min", "-1", "--a-max", "5", "--b-max", "5"});
    const auto& rows = check(rep, "dims")["outputs"]["rows"];
    auto row = [&](int a, int b) {
        for (const auto& r : rows)
            if (r["degree"] == Json::array({a, b})) return std::vector<int>{r["dim_S"], r["dim_J"], r["dim_R"]};
        return std::vector<int>{};
    };
    EXPECT_EQ(row(1, 1), (std::vector<int>{4, 0, 4}));
    EXPECT_EQ(row(5, 5), (std::vector<int>{36, 35, 1}));
    EXPECT_EQ(row(-1, 3), (std::vector<int>{0, 0, 0}));
    EXPECT_EQ(rep["config"]["rectangle"], Json::array({-1, 5, 0, 5}));

    auto sing = report({"dims", "--d", "3", "--e", "3", "--curve", "x0^3*y0^3"});
    EXPECT_NE(check(sing, "dims")["outputs"]["smoothness"], "certified-smooth");
    EXPECT_EQ(check(sing, "dims")["outputs"]["rows"].size(), 36u);
}

TEST(Cli, IvhsSubcommand) {
    auto rep = report({"ivhs", "--d", "2", "--e", "4"});
    EXPECT_EQ(rep["verdict"], "pass");
    EXPECT_EQ(check(rep, "ivhs")["outputs"]["result"], "SUCCESS");
    EXPECT_TRUE(check(rep, "ivhs")["outputs"]["squaring_route"]["injective"]);
}

TEST(Cli, MuProbesAtFourFour) {
    auto rep = report({"mu", "--d", "4", "--e", "4", "--mu-probes", "10"});
    const auto& probes = check(rep, "mu-probes")["outputs"]["probes"];
    ASSERT_EQ(probes.size(), 10u);
    for (const auto& p : probes) EXPECT_EQ(p["kernel_dim"], 0);
}

TEST(Cli, BoundsSubcommand) {
    auto rep = report({"bounds", "--d", "4", "--e", "5"});
    const auto& o = check(rep, "bounds")["outputs"];
    EXPECT_EQ(o["lower"], 11);
    EXPECT_EQ(o["upper"], 7);
    EXPECT_EQ(o["contradiction"], true);
}

TEST(Cli, CurveFromFileAndLiteralAgree) {
    const auto path = fs::temp_directory_path() / "bijac_curve_test.txt";
    const std::string poly = format(random_bipoly({2, 3}, 5, 20));
    std::ofstream(path) << poly << "\n";
    auto a = report({"top", "--d", "2", "--e", "3", "--curve", path.string()});
    auto b = report({"top", "--d", "2", "--e", "3", "--curve", poly});
    EXPECT_EQ(a["curve"], b["curve"]);
    EXPECT_EQ(a["checks"], b["checks"]);
    EXPECT_EQ(a["config"]["curve_source"], "file");
    EXPECT_EQ(b["config"]["curve_source"], "literal");
    fs::remove(path);
}

TEST(Cli, ReportsAreDeterministic) {
    std::vector<std::string> args{"verify-all", "--d", "3", "--e", "4", "--seed", "9", "--json", "-"};
    auto first = run(args).out;
    EXPECT_EQ(run(args).out, first);
    args.push_back("--threads");
    args.push_back("4");
    EXPECT_EQ(run(args).out, first);
}

TEST(Cli, SeedReproducesCurve) {
    auto rep = report({"smooth", "--d", "3", "--e", "3", "--curve-seed", "17", "--height", "50"});
    EXPECT_EQ(rep["curve"]["F"], format(random_bipoly({3, 3}, 17, 50)));
    EXPECT_EQ(rep["config"]["curve_seed"], 17);
}

TEST(Cli, HybridEscalatesDeficientChecks) {
    // this curve is smooth over Q but its reduction mod 3 is not
    auto p = report({"smooth", "--d", "3", "--e", "3", "--field", "p", "--prime", "3", "--curve-seed", "4"});
    auto h = report({"smooth", "--d", "3", "--e", "3", "--field", "hybrid", "--prime", "3", "--curve-seed", "4"});
    auto q = report({"smooth", "--d", "3", "--e", "3", "--field", "Q", "--curve-seed", "4"});
    EXPECT_EQ(p["verdict"], "undecided");
    EXPECT_EQ(h["checks"][0]["inputs"]["escalated_from"]["modulus"], 3);
    EXPECT_EQ(h["checks"][0]["inputs"]["field"]["kind"], "rational");
    EXPECT_EQ(h["verdict"], "pass");
    EXPECT_EQ(q["verdict"], "pass");
}

TEST(Cli, HybridMovesWholeRunToRationalsAfterBadReduction) {
    auto r = run({"verify-all", "--d", "3", "--e", "3", "--field", "hybrid", "--prime", "3", "--curve-seed", "4",
                  "--json", "-"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto rep = Json::parse(r.out);
    ASSERT_EQ(rep["checks"].size(), 11u);
    for (const auto& c : rep["checks"]) {
        EXPECT_EQ(c["inputs"]["field"]["kind"], "rational") << c["name"];
        EXPECT_EQ(c["verdict"], c["name"] == "kernel-square" ? "vacuous-pass" : "pass") << c["name"];
    }
    EXPECT_EQ(check(rep, "ivhs")["outputs"]["max_rank"], 4);
}

TEST(Cli, HybridHandlesCurveVanishingModP) {
    const std::vector<std::string> base{"smooth", "--d", "1", "--e", "1", "--curve", "3*x0*y0 + 6*x1*y1", "--prime", "3"};
    EXPECT_EQ(run(base).code, 2);
    auto args = base;
    args.insert(args.end(), {"--field", "hybrid"});
    auto h = report(args);
    EXPECT_EQ(h["verdict"], "pass");
    EXPECT_EQ(h["checks"][0]["inputs"]["escalated_from"]["modulus"], 3);
}

TEST(Cli, ConfigFileAndEnvironment) {
    const auto path = fs::temp_directory_path() / "bijac_config_test.ini";
    std::ofstream(path) << "d=2\ne=3\nseed=5\n";
    auto from_file = report({"smooth", "--config", path.string()});
    EXPECT_EQ(from_file["config"]["d"], 2);
    EXPECT_EQ(from_file["config"]["seed"], 5);
    auto flag_wins = report({"smooth", "--config", path.string(), "--d", "4"});
    EXPECT_EQ(flag_wins["config"]["d"], 4);
    setenv("BIJAC_E", "5", 1);
    EXPECT_EQ(report({"smooth"})["config"]["e"], 5);
    EXPECT_EQ(report({"smooth", "--config", path.string()})["config"]["e"], 3);
    unsetenv("BIJAC_E");
    fs::remove(path);
}

TEST(Cli, ExecutableMatchesGoldenReport) {
    const auto out = fs::temp_directory_path() / "bijac_golden_run.json";
    const std::string cmd = std::string(BIJAC_CLI_PATH) + " verify-all --d 3 --e 3 --seed 42 --json " + out.string() +
                            " > /dev/null";
    const int status = std::system(cmd.c_str());
    ASSERT_TRUE(WIFEXITED(status));
    EXPECT_EQ(WEXITSTATUS(status), 0);
    EXPECT_EQ(slurp(out), slurp(fs::path(BIJAC_GOLDEN_DIR) / "verify_all_3_3_seed42.json"));
    fs::remove(out);

    const std::string bad = std::string(BIJAC_CLI_PATH) + " ivhs --trials 0 2> /dev/null";
    const int bad_status = std::system(bad.c_str());
    ASSERT_TRUE(WIFEXITED(bad_status));
    EXPECT_EQ(WEXITSTATUS(bad_status), 2);
}
