// Copyright 2026 The bosonverify Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "bosonverify/cli.hpp"

namespace bv = bosonverify;
namespace fs = std::filesystem;
using bv::json;

namespace {

class TempDir {
public:
    TempDir() {
        path_ = fs::temp_directory_path() / ("bv_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                             "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    std::string write(const std::string& name, const std::string& text) const {
        const auto p = path_ / name;
        std::ofstream(p) << text;
        return p.string();
    }
    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "bosonverify");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = bv::cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

json honest_scenario() {
    return json::parse(R"({
      "name": "honest",
      "config": {"lambda": 1.0, "target": {"type": "unitary", "spec": {"m": 1}},
                 "F_t": 0.9, "delta": 0.25, "epsilon": 0.04, "shot_cap": 2000},
      "prover": {"kind": "ExactUnitary", "spec": {"m": 1}},
      "repetitions": 3, "seed": 5, "output": {"mc_samples": 2000, "fock_cutoff": 14}
    })");
}

TEST(Serialization, SpecRoundTrip) {
    bv::SymplecticSpec s = bv::compose(bv::phase_rotation(0.2), bv::single_mode_squeezer(0.3));
    s.d << 0.1, -0.2;
    const auto back = json(s).get<bv::SymplecticSpec>();
    EXPECT_LT(bv::max_abs(back.S - s.S), 1e-15);
    EXPECT_LT(bv::max_abs(back.d - s.d), 1e-15);
}

TEST(Serialization, ProverAndTargetRoundTrip) {
    for (const bv::ProverChannel& p : std::vector<bv::ProverChannel>{
             bv::AdditiveNoise{0.1}, bv::Attenuator{0.7, 0.01}, bv::NoisyAmplifier{1.5, 0.2},
             bv::QuantumLimitedAmplifier{2.0}, bv::NoisyUnitary{bv::SymplecticSpec::identity(1), 0.3}}) {
        EXPECT_EQ(json(json(p).get<bv::ProverChannel>()), json(p));
    }
    const bv::Target t = bv::AmplificationTarget{2.5};
    EXPECT_EQ(json(json(t).get<bv::Target>()), json(t));
    EXPECT_THROW(json::parse(R"({"kind": "Teleporter"})").get<bv::ProverChannel>(), bv::InvariantError);
}

TEST(Serialization, NonSymplecticSpecRejected) {
    EXPECT_THROW(json::parse(R"({"m": 1, "S": [2, 0, 0, 2]})").get<bv::SymplecticSpec>(), bv::InvariantError);
    EXPECT_THROW(json::parse(R"({"m": 1, "S": [1, 0, 0]})").get<bv::SymplecticSpec>(), bv::DimensionError);
}

TEST(Scenario, RoundTripsThroughJson) {
    const auto s = bv::cli::scenario_from_json(honest_scenario());
    const auto again = bv::cli::scenario_from_json(json(s));
    EXPECT_EQ(json(s), json(again));
    EXPECT_EQ(s.repetitions, 3);
    EXPECT_EQ(s.cfg.shot_cap, 2000);
}

TEST(Cli, MalformedJsonExitsOne) {
    TempDir dir;
    const auto path = dir.write("bad.json", "{ \"name\": ");
    EXPECT_EQ(run({"verify", "--config", path}).code, 1);
    EXPECT_EQ(run({"verify", "--config", (dir.path() / "missing.json").string()}).code, 1);
}

TEST(Cli, EpsilonOutOfRangeExitsTwo) {
    TempDir dir;
    json j = honest_scenario();
    j["config"]["epsilon"] = 0.07;
    const auto r = run({"verify", "--config", dir.write("eps.json", j.dump())});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("epsilon"), std::string::npos);
}

TEST(Cli, FockGuardExitsTwo) {
    TempDir dir;
    json j = honest_scenario();
    j["output"]["fock_cutoff"] = 65;
    EXPECT_EQ(run({"oracle", "--config", dir.write("big.json", j.dump())}).code, 2);
}

TEST(Cli, VerifyReportIsDeterministicModuloTiming) {
    TempDir dir;
    const auto path = dir.write("s.json", honest_scenario().dump());
    auto strip = [](json j) {
        j.erase("timing");
        for (auto& v : j["verdicts"]) v.erase("timing");
        return j;
    };
    const auto a = run({"verify", "--config", path});
    const auto b = run({"verify", "--config", path});
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(strip(json::parse(a.out)), strip(json::parse(b.out)));
    const json rep = json::parse(a.out);
    EXPECT_EQ(rep["verdicts"].size(), 3u);
}

TEST(Cli, SeedFlagOverridesScenario) {
    TempDir dir;
    const auto path = dir.write("s.json", honest_scenario().dump());
    const json a = json::parse(run({"verify", "--config", path, "--seed", "99", "--reps", "1"}).out);
    EXPECT_EQ(a["seed"].get<std::uint64_t>(), 99u);
    EXPECT_EQ(a["verdicts"].size(), 1u);
}

TEST(Cli, OracleForHonestProver) {
    TempDir dir;
    const auto r = run({"oracle", "--config", dir.write("s.json", honest_scenario().dump())});
    ASSERT_EQ(r.code, 0) << r.err;
    const json rep = json::parse(r.out);
    EXPECT_NEAR(rep["true_fidelity"]["estimate"].get<double>(), 1.0, 1e-12);
    EXPECT_NEAR(rep["analytic_omega"].get<double>(), 1.0, 1e-12);
    EXPECT_NEAR(rep["fock_omega"].get<double>(), 1.0, 1e-2);
    EXPECT_TRUE(rep["witness_below_fidelity"].get<bool>());
}

TEST(Cli, OracleForOptimalAmplifier) {
    TempDir dir;
    json j = honest_scenario();
    j["config"]["target"] = {{"type", "amplification"}, {"gain", 2.0}};
    j["config"]["F_t"] = 0.3;
    j["config"]["epsilon"] = 0.05;
    j["prover"] = {{"kind", "QuantumLimitedAmplifier"}, {"gain", 1.0}};
    const auto r = run({"oracle", "--config", dir.write("amp.json", j.dump())});
    ASSERT_EQ(r.code, 0) << r.err;
    const json rep = json::parse(r.out);
    const double se = rep["true_fidelity"]["std_error"].get<double>();
    EXPECT_NEAR(rep["true_fidelity"]["estimate"].get<double>(), 0.5, 4.0 * se);
    EXPECT_NEAR(rep["analytic_omega"].get<double>(), 0.5, 1e-10);
    EXPECT_TRUE(rep["witness_below_fidelity"].get<bool>());
}

TEST(Cli, PlanForThreeModes) {
    const auto r = run({"plan", "--m", "3"});
    ASSERT_EQ(r.code, 0);
    const auto pos = r.out.find('{');
    ASSERT_NE(pos, std::string::npos);
    const json j = json::parse(r.out.substr(pos));
    EXPECT_EQ(j["size"].get<int>(), 8);
    EXPECT_EQ(j["missing"].get<int>(), 0);
}

TEST(Cli, BudgetTable) {
    TempDir dir;
    const auto path = dir.write("s.json", honest_scenario().dump());
    const auto r = run({"budget", "--config", path, "--format", "csv"});
    ASSERT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("c4"), std::string::npos);
    EXPECT_NE(r.out.find("channel uses"), std::string::npos);
}

TEST(Cli, OutDirWritesFile) {
    TempDir dir;
    const auto path = dir.write("s.json", honest_scenario().dump());
    const auto out = (dir.path() / "reports").string();
    ASSERT_EQ(run({"verify", "--config", path, "--out", out, "--format", "csv"}).code, 0);
    EXPECT_TRUE(fs::exists(fs::path(out) / "honest.verify.csv"));
}

TEST(Cli, UnknownSubcommandIsAParseError) { EXPECT_EQ(run({"frobnicate"}).code, 1); }

}  // namespace
