#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code = -1;
    std::string out;
};

Outcome run(const std::string& args) {
    const std::string cmd = std::string(WALKSPEC_CLI) + " " + args + " 2>/dev/null";
    Outcome r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    char buf[4096];
    while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) r.out.append(buf, n);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

double value_of(const std::string& text, const std::string& key) {
    const auto at = text.find(key + "=");
    if (at == std::string::npos) return -1.0;
    return std::stod(text.substr(at + key.size() + 1));
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("walkspec_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST(Cli, RhoAllMethodsAgree) {
    const Outcome r = run("rho --model tree:d=4 --lambda 1 --method all");
    ASSERT_EQ(r.code, 0);
    const double closed = value_of(r.out, "rho_closed");
    const double solver = value_of(r.out, "rho_solver");
    const double dp = value_of(r.out, "rho_dp");
    EXPECT_NEAR(closed, solver, 1e-3);
    EXPECT_NEAR(closed, dp, 1e-3);
    EXPECT_NEAR(solver, dp, 1e-3);
}

TEST(Cli, RhoNearCriticalBias) {
    const Outcome r = run("rho --model free:2,1 --lambda 1.4142135 --method closed");
    ASSERT_EQ(r.code, 0);
    EXPECT_NEAR(value_of(r.out, "rho_closed"), 1.0, 1e-6);
}

TEST(Cli, ErrorsExitNonzero) {
    EXPECT_EQ(run("rho --model free:2,1 --lambda 2").code, 2);
    EXPECT_EQ(run("speed --model tree:d=4 --lambda 1").code, 2);
    EXPECT_EQ(run("rho --model tree:d=1 --lambda 1").code, 2);
    EXPECT_NE(run("rho --no-such-flag").code, 0);
}

TEST(Cli, SpeedReport) {
    const Outcome r = run("speed --model free:2,1 --lambda 1 --steps 20000 --replicas 100");
    ASSERT_EQ(r.code, 0);
    EXPECT_NEAR(value_of(r.out, "speed_closed"), 2.0 / 15.0, 1e-15);
    EXPECT_LT(std::abs(value_of(r.out, "z_score")), 3.0);
}

TEST(Cli, SweepIsReproducible) {
    const fs::path csv = scratch("sweep.csv");
    const std::string cmd = "sweep --model free:2,1 --points 12 --mc --steps 2000 --replicas 20 --seed 9 --out " +
                            csv.string();
    ASSERT_EQ(run(cmd).code, 0);
    const std::string first = slurp(csv);
    ASSERT_EQ(run(cmd).code, 0);
    EXPECT_EQ(first, slurp(csv));

    EXPECT_EQ(first.rfind("schema=1\n", 0), 0u);
    for (const char* key : {"# version=", "# command=walkspec " , "# model=free:2,1", "# seed=9", "# rng_id=mt19937_64"}) {
        EXPECT_NE(first.find(key), std::string::npos) << key;
    }
    std::istringstream lines(first);
    std::string line;
    std::size_t rows = 0;
    while (std::getline(lines, line))
        if (line.rfind("free:2,1,", 0) == 0) ++rows;
    EXPECT_EQ(rows, 12u);
}

TEST(Cli, SweepWithSeedFromEnvironment) {
    const fs::path a = scratch("env_a.csv");
    const fs::path b = scratch("env_b.csv");
    ASSERT_EQ(run("sweep --model free:2,1 --points 3 --mc --steps 500 --replicas 4 --seed 21 --out " + a.string()).code, 0);
    ASSERT_EQ(::setenv("WALKSPEC_SEED", "21", 1), 0);
    ASSERT_EQ(run("sweep --model free:2,1 --points 3 --mc --steps 500 --replicas 4 --out " + b.string()).code, 0);
    ::unsetenv("WALKSPEC_SEED");
    EXPECT_NE(slurp(b).find("# seed=21"), std::string::npos);
}

TEST(Cli, SweepJson) {
    const fs::path csv = scratch("j.csv");
    const fs::path json = scratch("j.json");
    ASSERT_EQ(run("sweep --model tree:d=4 --lambda-lo 0.05 --lambda-hi 3 --points 60 --out " + csv.string() +
                  " --json " + json.string())
                  .code,
              0);
    std::ifstream in(json);
    const nlohmann::json doc = nlohmann::json::parse(in);
    ASSERT_EQ(doc["records"].size(), 60u);
    double prev = -1.0;
    for (const auto& rec : doc["records"]) {
        const double rho = rec["rho_closed"].get<double>();
        EXPECT_GT(rho, prev);
        prev = rho;
    }
    EXPECT_EQ(doc["seed"].get<std::uint64_t>(), 1u);
    EXPECT_EQ(doc["rng_id"], "mt19937_64");
}

TEST(Cli, DpCsv) {
    const Outcome r = run("dp --model free:2,1 --lambda 1 --nmax 4");
    ASSERT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("n,p_n,f_n,log_p_n,log_f_n\n"), std::string::npos);
    EXPECT_NE(r.out.find("\n2,0.3333333333333333,0.3333333333333333,"), std::string::npos);
}

TEST(Cli, ConfigFile) {
    const fs::path cfg = scratch("walkspec.ini");
    {
        std::ofstream out(cfg);
        out << "[rho]\nmodel=free:2,1\nlambda=0.5\nmethod=closed\n";
    }
    const Outcome from_file = run("--config " + cfg.string() + " rho");
    ASSERT_EQ(from_file.code, 0);
    EXPECT_NE(from_file.out.find("model=free:2,1"), std::string::npos);
    EXPECT_NE(from_file.out.find("lambda=0.5"), std::string::npos);
    const Outcome overridden = run("--config " + cfg.string() + " rho --lambda 1");
    EXPECT_NE(overridden.out.find("lambda=1"), std::string::npos);
}

TEST(Cli, VerifyClosedForm) {
    const Outcome r = run("verify --suite closedform");
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("[PASS]"), std::string::npos);
    EXPECT_EQ(r.out.find("[FAIL]"), std::string::npos);
}
