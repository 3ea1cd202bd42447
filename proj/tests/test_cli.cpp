#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::path(FBCSF_TEST_TMP) / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run(const std::string& args) {
    const std::string cmd = std::string(FBCSF_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

int run_in(const fs::path& dir, const std::string& sub, const std::string& config, const std::string& extra = "") {
    write(dir / "config.json", config);
    return run(sub + " --config " + (dir / "config.json").string() + " --out " + dir.string() + " " + extra);
}

}  // namespace

TEST(Cli, EllipseDiameters) {
    const auto dir = scratch("diam_ellipse");
    ASSERT_EQ(run_in(dir, "diameters", R"({"domain": {"kind": "ellipse", "a": 2, "b": 1}})"), 0);
    const json j = json::parse(slurp(dir / "diameters.json"));
    ASSERT_EQ(j["diameters"].size(), 2u);
    EXPECT_NEAR(j["diameters"][0]["length"].get<double>(), 4.0, 1e-9);
    EXPECT_NEAR(j["diameters"][1]["length"].get<double>(), 2.0, 1e-9);
    EXPECT_FALSE(j["degenerate"].get<bool>());
}

TEST(Cli, DiskDiametersAreDegenerate) {
    const auto dir = scratch("diam_disk");
    ASSERT_EQ(run_in(dir, "diameters", R"({"kind": "disk"})"), 0);
    const json j = json::parse(slurp(dir / "diameters.json"));
    EXPECT_TRUE(j["degenerate"].get<bool>());
    EXPECT_EQ(j["diameters"].size(), 1u);
}

TEST(Cli, ConfigErrorsExitWithTwo) {
    const auto dir = scratch("bad");
    EXPECT_EQ(run_in(dir, "diameters", "{ not json"), 2);
    EXPECT_EQ(run_in(dir, "diameters", R"({"kind": "triangle"})"), 2);
    EXPECT_EQ(run("diameters --config " + (dir / "config.json").string() + " --out " + (dir / "missing").string()), 2);
    EXPECT_EQ(run("diameters"), 2);
    EXPECT_EQ(run_in(dir, "sweep", R"({"kind": "disk", "rhos": [0.2, 0.1]})"), 2);
}

TEST(Cli, GeometryErrorsExitWithThree) {
    const auto dir = scratch("geom");
    EXPECT_EQ(run_in(dir, "flow", R"({"kind": "disk", "rho": 0.9})"), 3);
    EXPECT_EQ(run_in(dir, "diameters", R"({"kind": "fourier", "cos_coeffs": [1, 0.3]})"), 3);
}

TEST(Cli, Lambda0AndEigen) {
    const auto dir = scratch("lambda0");
    ASSERT_EQ(run_in(dir, "lambda0", R"({"kappa1": 1, "kappa2": 1})"), 0);
    const json l = json::parse(slurp(dir / "lambda0.json"));
    EXPECT_NEAR(l["lambda0"].get<double>(), 1.19967864025773, 1e-12);
    ASSERT_EQ(run_in(dir, "eigen", R"({"kappa1": 1, "kappa2": 0.5, "count": 3})"), 0);
    const json e = json::parse(slurp(dir / "eigen.json"));
    EXPECT_EQ(e["convex_negative_count"], 1);
    EXPECT_EQ(e["positive"].size(), 3u);
}

TEST(Cli, OvalReportsOrthogonalContacts) {
    const auto dir = scratch("oval");
    ASSERT_EQ(run_in(dir, "oval", R"({"kind": "disk", "rho": 0.1, "samples": 20})"), 0);
    const json j = json::parse(slurp(dir / "oval.json"));
    EXPECT_LT(j["residuals"][0].get<double>(), 1e-8);
    EXPECT_EQ(j["curve"].size(), 20u);
}

TEST(Cli, FlowWritesTrajectoryAndReport) {
    const auto dir = scratch("flow");
    ASSERT_EQ(run_in(dir, "flow", R"({"domain": {"kind": "disk"}, "rho": 0.2, "solver": {"n_nodes": 48}})"), 0);
    const json r = json::parse(slurp(dir / "report.json"));
    EXPECT_NEAR(r["lambda0"].get<double>(), 1.19968, 1e-5);
    EXPECT_LT(std::abs(r["profile"]["c"].get<double>()), 0.02);
    EXPECT_FALSE(r["estimates"].empty());
    std::ifstream csv(dir / "trajectory.csv");
    std::string header;
    std::getline(csv, header);
    EXPECT_EQ(header.rfind("t,theta_plus,theta_minus,kappa_min,kappa_max,area,dA_dt,y_at_x0", 0), 0u);
}

TEST(Cli, SweepIsByteIdenticalAcrossParallelism) {
    const std::string cfg = R"({"kind": "disk", "rhos": [0.2, 0.15, 0.1], "solver": {"n_nodes": 40}})";
    const auto a = scratch("sweep1"), b = scratch("sweep3");
    ASSERT_EQ(run_in(a, "sweep", cfg, "--parallel 1"), 0);
    ASSERT_EQ(run_in(b, "sweep", cfg, "--parallel 3"), 0);
    const std::string ja = slurp(a / "sweep.json");
    EXPECT_FALSE(ja.empty());
    EXPECT_EQ(ja, slurp(b / "sweep.json"));
}
