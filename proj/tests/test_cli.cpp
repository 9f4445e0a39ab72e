// End-to-end checks of the command-line front end: JSON payloads, exit codes,
// CSV sweeps and byte-identical output.

#include <bosonic/io.hpp>

#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace bosonic;
namespace fs = std::filesystem;

namespace {

struct RunResult {
    int code = -1;
    std::string out;
};

RunResult run(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + (env.empty() ? "" : " ") + "'" + BOSONIC_CLI_PATH + "' " + args + " 2>/dev/null";
    RunResult r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    std::array<char, 4096> buf{};
    std::size_t got = 0;
    while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

json run_json(const std::string& args, const std::string& env = "") {
    RunResult r = run(args, env);
    EXPECT_EQ(r.code, 0) << args;
    return json::parse(r.out);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
    std::vector<std::vector<std::string>> rows;
    std::ifstream in(p);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) fields.push_back(f);
        if (!line.empty() && line.back() == ',') fields.emplace_back();
        rows.push_back(fields);
    }
    return rows;
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("bosonic_cli_" + std::to_string(::getpid()) + "_" +
                ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    std::string write_state(const std::string& name, const GaussianState& s) const {
        write_text_file(path(name), to_json(s).dump() + "\n");
        return path(name);
    }

    fs::path dir_;
};

}  // namespace

TEST_F(Cli, ThermalStateJson) {
    json j = run_json("state thermal --n 1");
    EXPECT_EQ(j["modes"], 1);
    GaussianState s = state_from_json(j);
    EXPECT_EQ(s.cov(), 3.0 * Matrix::Identity(2, 2));
    EXPECT_EQ(s.mean(), Vector::Zero(2));
}

TEST_F(Cli, TmsvPhotonNumberAndRoundTrip) {
    ASSERT_EQ(run("state tmsv --n 1 -o " + path("tmsv.json")).code, 0);
    GaussianState s = read_state_file(path("tmsv.json"));
    EXPECT_TRUE(s.cov().isApprox(tmsv_state(1.0).cov(), 0.0));
    json j = run_json("state photon " + path("tmsv.json"));
    EXPECT_DOUBLE_EQ(j["mean_photon_number"].get<double>(), 2.0);
    // the payload re-serializes to the same bytes
    EXPECT_EQ(to_json(s).dump(2) + "\n", run("state tmsv --n 1").out);
}

TEST_F(Cli, ReduceAndEvolve) {
    const std::string f = write_state("tmsv.json", tmsv_state(1.0));
    GaussianState a = state_from_json(run_json("state reduce " + f + " --keep 0"));
    EXPECT_TRUE(a.cov().isApprox(3.0 * Matrix::Identity(2, 2), 1e-15));
    GaussianState out = state_from_json(run_json("state evolve " + f + " --channel loss --lambda 0.5"));
    EXPECT_NEAR(mean_photon_number(reduce(out, {1})), 0.5, 1e-12);
    EXPECT_EQ(run("state reduce " + f + " --keep 0,7").code, 2);
}

TEST_F(Cli, ValidateExitCodes) {
    EXPECT_EQ(run("state validate " + write_state("ok.json", thermal_state(0.5))).code, 0);
    const std::string bad = write_state("bad.json", GaussianState(Vector::Zero(2), 0.5 * Matrix::Identity(2, 2)));
    RunResult r = run("state validate " + bad);
    EXPECT_EQ(r.code, 2);
    json j = json::parse(r.out);
    EXPECT_FALSE(j["valid"].get<bool>());
    EXPECT_NEAR(j["min_symplectic_eigenvalue"].get<double>(), 0.5, 1e-12);
    EXPECT_LT(j["min_uncertainty_eigenvalue"].get<double>(), 0.0);

    write_text_file(path("garbage.json"), "{ not json");
    EXPECT_EQ(run("state validate " + path("garbage.json")).code, 1);
    EXPECT_EQ(run("state validate " + path("missing.json")).code, 1);
    write_text_file(path("short.json"), R"({"modes": 1, "mean": [0], "cov": [[1, 0], [0, 1]]})");
    EXPECT_EQ(run("state photon " + path("short.json")).code, 1);
    EXPECT_EQ(run("state thermal --n").code, 1);
}

TEST_F(Cli, TailBounds) {
    const std::string f = write_state("t1.json", thermal_state(1.0));
    json j = run_json("tail " + f + " --M 10");
    const double closed = j["closed"]["bound"].get<double>(), optimized = j["optimized"]["bound"].get<double>();
    EXPECT_NEAR(closed, 11.0 / 9.0 * std::exp(-10.0 / 6.0), 1e-14);
    EXPECT_LE(optimized, closed);
    EXPECT_GE(optimized, std::pow(0.5, 11));

    json v = run_json("tail " + write_state("vac.json", vacuum_state(1)) + " --M 1");
    EXPECT_LE(v["optimized"]["bound"].get<double>(), 1e-12);

    json c = run_json("tail " + f + " --target-eps 0.01");
    EXPECT_LE(c["cutoff"].get<int>(), 56);
    EXPECT_EQ(c["cutoff"].get<int>(), 18);
    EXPECT_LE(c["trace_distance_bound"].get<double>(), 0.01);

    EXPECT_EQ(run("tail " + f).code, 2);
    EXPECT_EQ(run("tail " + f + " --M 10 --target-eps 0.1").code, 1);
}

TEST_F(Cli, TraceDistance) {
    const std::string vac = write_state("vac.json", vacuum_state(1));
    const std::string t1 = write_state("t1.json", thermal_state(1.0));
    json j = run_json("tracedist " + vac + " " + t1 + " --eps 1e-3");
    EXPECT_NEAR(j["estimate"].get<double>(), 0.5, 1e-3);
    EXPECT_LE(j["certified_error"].get<double>(), 1e-3);
    EXPECT_TRUE(j.contains("seconds"));

    json same = run_json("tracedist " + t1 + " " + t1 + " --eps 1e-3");
    EXPECT_LE(same["estimate"].get<double>(), 1e-3);

    ASSERT_EQ(run("tracedist " + vac + " " + t1 + " --eps 0.01 --dump-fock " + path("fock.json")).code, 0);
    json fock = read_json_file(path("fock.json"));
    ASSERT_EQ(fock.size(), 2u);
    EXPECT_EQ(fock[0]["modes"], 1);

    const std::string hot = write_state("hot.json", thermal_state(5.0));
    EXPECT_EQ(run("tracedist " + hot + " " + hot + " --eps 1e-3", "BOSONIC_FOCK_CAP=10").code, 3);
    EXPECT_EQ(run("tracedist " + vac + " " + t1 + " --eps 1e-3", "BOSONIC_FOCK_CAP=abc").code, 1);
    EXPECT_EQ(run("tracedist " + vac + " " + t1 + " --eps 0").code, 2);
}

TEST_F(Cli, CapacityBounds) {
    json imp = run_json("capacity --channel loss --lambda 0.5 --task Q2 --method improved_variance --n 100 --eps 0.1");
    EXPECT_NEAR(imp["value"].get<double>(), 79.44, 0.01);
    EXPECT_EQ(imp["direction"], "lower");
    EXPECT_EQ(imp["n"], 100);

    json up = run_json("capacity --channel loss --lambda 0.5 --task Q2 --method upper --n 100 --eps 0.1");
    EXPECT_NEAR(up["value"].get<double>(), 103.16, 0.01);
    EXPECT_EQ(up["direction"], "upper");

    json q = run_json("capacity --channel loss --lambda 0.4 --task Q --method asymptotic");
    EXPECT_EQ(q["value"].get<double>(), 0.0);

    json best = run_json("capacity --channel loss --lambda 0.5 --task Q2 --method best --n 100 --eps 0.1");
    EXPECT_GE(best["value"].get<double>(), imp["value"].get<double>());
    EXPECT_LE(best["value"].get<double>(), up["value"].get<double>());

    json amp = run_json("capacity --channel amp --g 2 --task Q2 --method aep --n 1000 --eps 0.1");
    EXPECT_LE(amp["value"].get<double>(), 1000.0);

    EXPECT_EQ(run("capacity --channel loss --lambda 1.5 --method aep").code, 2);
    EXPECT_EQ(run("capacity --channel fiber --lambda 0.5").code, 2);
    EXPECT_EQ(run("capacity --channel loss --lambda 0.5 --task Q3").code, 2);
}

TEST_F(Cli, Complexity) {
    json j = run_json("complexity --channel loss --lambda 0.5 --task Q2 --k 100 --eps 0.1");
    EXPECT_EQ(j["sufficient_n"], 121);
    EXPECT_EQ(j["necessary_n"], 97);
    json one = run_json("complexity --channel loss --lambda 0.5 --task Q2 --k 1 --eps 0.1");
    EXPECT_GE(one["sufficient_n"].get<int>(), 1);
    EXPECT_LE(one["necessary_n"].get<int>(), one["sufficient_n"].get<int>());
    EXPECT_EQ(run("complexity --channel loss --lambda 0.4 --task Q --k 10 --eps 0.1").code, 2);
}

TEST_F(Cli, SweepCsvRowsAndSandwich) {
    ASSERT_EQ(run("sweep --channel loss --lambda 0.1:0.9:9 --n 100 --eps 0.1 -o " + path("s.csv")).code, 0);
    auto rows = read_csv(path("s.csv"));
    ASSERT_EQ(rows.size(), 1u + 9u * 3u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"method", "task", "direction", "lambda", "g", "Ns", "n", "eps", "value",
                                                 "vacuous", "preconditions_met"}));
    for (std::size_t i = 1; i < rows.size(); i += 3) {
        ASSERT_EQ(rows[i].size(), 11u);
        EXPECT_EQ(rows[i][3], rows[i + 2][3]);
        EXPECT_EQ(rows[i + 2][2], "upper");
        const double upper = std::stod(rows[i + 2][8]);
        for (std::size_t k = i; k < i + 2; ++k) {
            const double lower = std::stod(rows[k][8]);
            if (!std::isnan(lower)) {
                EXPECT_LE(lower, upper) << "row " << k;
            }
        }
    }
}

TEST_F(Cli, SweepEnergyConvergence) {
    ASSERT_EQ(run("sweep --channel loss --lambda 0.5 --Ns 1,100,1e4,1e6 --methods ec_variance,improved_variance -o " +
                  path("ns.csv"))
                  .code,
              0);
    auto rows = read_csv(path("ns.csv"));
    ASSERT_EQ(rows.size(), 1u + 4u * 2u);
    json imp = run_json("capacity --channel loss --lambda 0.5 --task Q2 --method improved_variance --n 100 --eps 0.1");
    const double target = imp["value"].get<double>();
    std::vector<double> gaps;
    for (std::size_t i = 1; i < rows.size(); i += 2) {
        EXPECT_EQ(rows[i][0], "ec_variance");
        EXPECT_EQ(rows[i][10], "true");
        gaps.push_back(target - std::stod(rows[i][8]));
        // an unconstrained family evaluated at finite Ns is reported as nan
        EXPECT_EQ(rows[i + 1][8], "nan");
        EXPECT_EQ(rows[i + 1][10], "false");
    }
    for (std::size_t i = 1; i < gaps.size(); ++i) EXPECT_LT(gaps[i], gaps[i - 1]);
    EXPECT_GT(gaps.back(), 0.0);
    EXPECT_LT(gaps.back(), 0.1);
}

TEST_F(Cli, OutputIsByteIdentical) {
    const std::string args = "sweep --channel loss --lambda 0.2:0.8:4 --tasks Q,Q2,K --n 16,1000 --eps 0.01,0.1";
    ASSERT_EQ(run(args + " -o " + path("a.csv")).code, 0);
    ASSERT_EQ(run(args + " --jobs 4 -o " + path("b.csv")).code, 0);
    EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
    const std::string cap = "capacity --channel amp --g 1.7 --task K --method best --n 500 --eps 0.05 --Ns 3";
    EXPECT_EQ(run(cap).out, run(cap).out);
}

TEST_F(Cli, SweepErrors) {
    EXPECT_EQ(run("sweep --channel loss --lambda 0.5 -o " + path("no/such/dir/x.csv")).code, 1);
    EXPECT_EQ(run("sweep --channel loss --lambda 0.5:0.9:0 -o " + path("x.csv")).code, 1);
    EXPECT_EQ(run("sweep --channel loss -o " + path("x.csv")).code, 2);
}
