#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <unistd.h>
#include <nlohmann/json.hpp>

#include "cli.hpp"

namespace fs = std::filesystem;
using hypflow::cli::run_cli;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(std::move(args), out, err);
    return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / ("hypflow_cli_" + std::string(info->name()) + "_" +
                                            std::to_string(::getpid()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string write(const std::string& name, const std::string& text) const {
        const fs::path p = dir_ / name;
        std::ofstream(p) << text;
        return p.string();
    }
    static std::string read(const fs::path& p) {
        std::ifstream in(p);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }
    static std::vector<std::string> lines(const std::string& text) {
        std::vector<std::string> out;
        std::istringstream in(text);
        for (std::string l; std::getline(in, l);) {
            out.push_back(l);
        }
        return out;
    }

    fs::path dir_;
};

const char* kMinimal = R"([scenario flat]
R = 2
initial = exact_hyperbolic
boundary = hyperbolic_continuation
horizon = 0.2
sample_every = 0.05
max_dr = 0.05
)";

const char* kBanded = R"([scenario bumpy]
R = 4
initial = banded_perturbation
b = 0.05
horizon = 0.01
sample_every = 0.005
seed = 3
max_dr = 0.05
)";

const char* kSweep = R"([scenario adv]
R = 3
boundary = adversarial_oscillation
amplitude = 0.5
period = 1
horizon = 1
sample_every = 0.05
stop_on_control_loss = true

[sweep]
R_list = 3, 4, 5, 6, 7
template = adv
)";

}  // namespace

TEST_F(CliTest, ConstantsPrintsLabeledLinesAndMachineBlock) {
    const Result r = cli({"constants", "--b", "0.5", "--eps", "0.05"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto ls = lines(r.out);
    EXPECT_EQ(ls.front(), "J = 26");
    EXPECT_NE(r.out.find("\nLambda = 28\n"), std::string::npos);
    EXPECT_NE(r.out.find("\nR_min = 870.52"), std::string::npos);
    const auto j = nlohmann::json::parse(ls.back());
    EXPECT_EQ(j["J"], 26.0);
    EXPECT_NEAR(j["c"].get<double>(), std::log(1.1) / 112, 1e-15);
    for (const char* k : {"j", "alpha_disc", "mu", "Lambda", "c", "R_min"}) {
        EXPECT_TRUE(j.contains(k)) << k;
    }
}

TEST_F(CliTest, ConstantsDomainErrorsNameTheFlag) {
    Result r = cli({"constants", "--b", "0.6", "--eps", "0.05"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("--b"), std::string::npos);
    r = cli({"constants", "--b", "0.5", "--eps", "0.05", "--delta", "0.05"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("--delta"), std::string::npos);
    r = cli({"constants", "--b", "0.5", "--eps", "-1"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("--eps"), std::string::npos);
    r = cli({"constants", "--b", "0.5", "--eps", "0.05", "--alpha-tol", "2"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("--alpha-tol"), std::string::npos);
    EXPECT_EQ(cli({"constants", "--eps", "0.05"}).code, 2);
    EXPECT_EQ(cli({"frobnicate"}).code, 2);
    EXPECT_EQ(cli({}).code, 2);
    EXPECT_EQ(cli({"--help"}).code, 0);
}

TEST_F(CliTest, RunWritesRecordAndManifest) {
    const std::string cfg = write("min.ini", kMinimal);
    const fs::path out = dir_ / "out";
    const Result r = cli({"run", "--config", cfg, "--out", out.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    ASSERT_TRUE(fs::exists(out / "flat.json"));
    const auto rec = nlohmann::json::parse(read(out / "flat.json"));
    EXPECT_EQ(rec["schema_version"], 1);
    EXPECT_EQ(rec["control_time"]["censored"], true);
    auto manifest = nlohmann::json::parse(read(out / "manifest.json"));
    ASSERT_EQ(manifest.size(), 1u);
    EXPECT_EQ(manifest[0]["schema_version"], 1);
    EXPECT_EQ(manifest[0]["records"], nlohmann::json::array({"flat.json"}));
    EXPECT_EQ(manifest[0]["config_digest"].get<std::string>().size(), 64u);
    for (const auto& p : manifest[0]["records"]) {
        EXPECT_TRUE(fs::exists(out / p.get<std::string>()));
    }
    ASSERT_EQ(cli({"run", "--config", cfg, "--out", out.string()}).code, 0);
    manifest = nlohmann::json::parse(read(out / "manifest.json"));
    EXPECT_EQ(manifest.size(), 2u);
    EXPECT_EQ(manifest[0]["config_digest"], manifest[1]["config_digest"]);
}

TEST_F(CliTest, RerunIsByteIdenticalExceptTimings) {
    const std::string cfg = write("b.ini", kBanded);
    auto payload = [&](const std::string& sub) {
        const fs::path out = dir_ / sub;
        EXPECT_EQ(cli({"run", "--config", cfg, "--out", out.string(), "--seed", "11"}).code, 0);
        auto j = nlohmann::json::parse(read(out / "bumpy.json"));
        j["solver_meta"].erase("wall_time_s");
        return j.dump();
    };
    const std::string a = payload("a");
    EXPECT_EQ(a, payload("b"));
    EXPECT_NE(a.find("\"seed\":11"), std::string::npos);
    const fs::path c = dir_ / "c";
    ASSERT_EQ(cli({"run", "--config", cfg, "--out", c.string()}).code, 0);
    EXPECT_NE(read(c / "bumpy.json").find("\"seed\": 3"), std::string::npos);
}

TEST_F(CliTest, OutDirectoryDefaultsToEnvironment) {
    const std::string cfg = write("min.ini", kMinimal);
    const fs::path env_out = dir_ / "from_env";
    ::setenv("HYPFLOW_OUT", env_out.c_str(), 1);
    const Result r = cli({"run", "--config", cfg});
    ::unsetenv("HYPFLOW_OUT");
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(fs::exists(env_out / "flat.json"));
}

TEST_F(CliTest, ConfigErrorsExitTwoNamingTheKey) {
    const std::string cfg = write("bad.ini", "[scenario a]\nhorizon = 1\n");
    const Result r = cli({"run", "--config", cfg, "--out", (dir_ / "o").string()});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("'R'"), std::string::npos);
    EXPECT_EQ(cli({"run", "--config", (dir_ / "missing.ini").string()}).code, 2);
    const std::string dom = write("dom.ini", "[scenario a]\nR = 2\ninitial = banded_perturbation\nb = 0.6\n");
    EXPECT_EQ(cli({"run", "--config", dom, "--out", (dir_ / "o").string()}).code, 2);
    EXPECT_EQ(cli({"run", "--config", cfg, "--jobs", "0"}).code, 2);
}

TEST_F(CliTest, WriteFailureExitsFour) {
    const std::string cfg = write("min.ini", kMinimal);
    const std::string blocker = write("file", "x");
    const Result r = cli({"run", "--config", cfg, "--out", blocker + "/sub"});
    EXPECT_EQ(r.code, 4) << r.err;
}

TEST_F(CliTest, BlowUpExitsThree) {
    const std::string cfg = write("wild.ini", R"([scenario wild]
R = 2
boundary = adversarial_oscillation
amplitude = 200
period = 0.01
horizon = 1
sample_every = 0.1
max_dr = 0.1
)");
    const Result r = cli({"run", "--config", cfg, "--out", (dir_ / "o").string()});
    EXPECT_EQ(r.code, 3) << r.err;
    EXPECT_TRUE(fs::exists(dir_ / "o" / "wild.json"));
}

TEST_F(CliTest, SyntheticSweepEchoesSlopeAndWritesCsv) {
    const std::string cfg = write("sweep.ini", kSweep);
    const fs::path out = dir_ / "s";
    const Result r =
        cli({"sweep", "--config", cfg, "--out", out.string(), "--synthetic-slope", "0.2"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("slope = 0.2\n"), std::string::npos);
    const auto ls = lines(read(out / "sweep_adv.csv"));
    ASSERT_EQ(ls.size(), 9u);
    EXPECT_EQ(ls[0], "R,control_time,censored,sandwich_violation,n_nodes,dr,wall_time_s");
    for (int i = 6; i < 9; ++i) {
        EXPECT_EQ(ls[i].rfind("#fit,", 0), 0u);
    }
    EXPECT_EQ(ls[6], "#fit,slope,0.2");
}

TEST_F(CliTest, AllCensoredSweepExitsFive) {
    const std::string cfg = write("calm.ini", R"([scenario calm]
R = 1
boundary = hyperbolic_continuation
horizon = 0.05
sample_every = 0.05

[sweep]
R_list = 1, 1.5, 2
template = calm
)");
    const fs::path out = dir_ / "calm";
    const Result r = cli({"sweep", "--config", cfg, "--out", out.string(), "--jobs", "2"});
    EXPECT_EQ(r.code, 5);
    EXPECT_NE(r.err.find("sweep inconclusive"), std::string::npos);
    EXPECT_EQ(lines(read(out / "sweep_calm.csv")).size(), 4u);
    EXPECT_TRUE(fs::exists(out / "sweep_calm_R1.5.json"));
}

TEST_F(CliTest, SweepWithoutSectionIsConfigError) {
    const std::string cfg = write("min.ini", kMinimal);
    EXPECT_EQ(cli({"sweep", "--config", cfg, "--out", (dir_ / "o").string()}).code, 2);
}

TEST_F(CliTest, ShippedDemoConfigsParse) {
    for (const char* name : {"quickstart.ini", "sweep.ini"}) {
        EXPECT_NO_THROW(hypflow::load_config(std::string(HYPFLOW_DEMOS_DIR) + "/" + name)) << name;
    }
}
