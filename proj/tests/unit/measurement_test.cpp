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


#include <algorithm>
#include <cmath>
#include <complex>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "bosonverify/measurement.hpp"

namespace bv = bosonverify;

namespace {

bv::HomodyneSetting setting(std::vector<std::optional<double>> angles) { return {std::move(angles), "t"}; }

TEST(Sampler, VacuumQuadratureMean) {
    const int shots = 100000;
    const bv::QuadratureSampler s(bv::vacuum(1), setting({0.0}));
    bv::CounterRng rng(42);
    double sum = 0.0;
    for (int i = 0; i < shots; ++i) sum += s.sample(rng)(0);
    EXPECT_NEAR(sum / shots, 0.0, 3.0 * std::sqrt(0.5 / shots));
}

TEST(Sampler, CoherentMean) {
    const int shots = 100000;
    const bv::QuadratureSampler s(bv::coherent(std::complex<double>(1.0, 0.0)), setting({0.0}));
    bv::CounterRng rng(43);
    double sum = 0.0;
    for (int i = 0; i < shots; ++i) sum += s.sample(rng)(0);
    EXPECT_NEAR(sum / shots, std::sqrt(2.0), 3.0 * std::sqrt(0.5 / shots));
}

TEST(Sampler, TmsvCrossCorrelation) {
    const int shots = 100000;
    const double r = 0.5;
    const bv::QuadratureSampler s(bv::tmsv(r), setting({0.0, 0.0}));
    bv::CounterRng rng(44);
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < shots; ++i) {
        const Eigen::VectorXd x = s.sample(rng);
        const double prod = x(0) * x(1);
        sum += prod;
        sum2 += prod * prod;
    }
    const double mean = sum / shots;
    const double se = std::sqrt((sum2 / shots - mean * mean) / shots);
    EXPECT_NEAR(mean, 0.5 * std::sinh(2 * r), 3.0 * se);
}

TEST(Sampler, RotatedMarginalVariance) {
    // x_φ on a q-squeezed vacuum has variance ½(e^{−2r}cos²φ + e^{2r}sin²φ)
    const double r = 0.4;
    const auto sq = bv::apply_unitary(bv::vacuum(1), bv::single_mode_squeezer(r));
    for (double phi : {0.0, 0.3, bv::kAngleDiag, bv::kAngleP}) {
        const bv::QuadratureSampler s(sq, setting({phi}));
        const double c = std::cos(phi), sn = std::sin(phi);
        EXPECT_NEAR(s.cov()(0, 0), 0.5 * (std::exp(-2 * r) * c * c + std::exp(2 * r) * sn * sn), 1e-14);
    }
}

TEST(Sampler, OnlyMeasuredModesAreReturned) {
    const bv::QuadratureSampler s(bv::vacuum(3), setting({std::nullopt, 0.0, std::nullopt}));
    EXPECT_EQ(s.sample(std::uint64_t{1}).size(), 1);
    EXPECT_EQ(s.modes(), std::vector<int>{1});
    EXPECT_THROW(bv::QuadratureSampler(bv::vacuum(2), setting({0.0})), bv::DimensionError);
}

TEST(Sampler, SameSeedSameShot) {
    const auto st = bv::tmsv(0.3);
    const auto a = bv::sample_quadratures(st, setting({0.0, bv::kAngleP}), 99);
    const auto b = bv::sample_quadratures(st, setting({0.0, bv::kAngleP}), 99);
    EXPECT_EQ(a, b);
}

TEST(Settings, CombineRejectsOverlap) {
    const auto a = setting({0.0, std::nullopt});
    const auto b = setting({std::nullopt, 1.0});
    const auto c = bv::HomodyneSetting::combine(a, b);
    EXPECT_EQ(c.measured_modes().size(), 2u);
    EXPECT_THROW(bv::HomodyneSetting::combine(a, a), bv::InvariantError);
}

TEST(Plan, SettingCountIsMPlusFive) {
    for (int m = 1; m <= 6; ++m) {
        const auto plan = bv::build_measurement_plan(m);
        EXPECT_EQ(plan.settings.size(), static_cast<std::size_t>(m + 5));
        EXPECT_TRUE(bv::verify_plan_coverage(plan).empty());
    }
    EXPECT_THROW(bv::build_measurement_plan(0), bv::InvariantError);
}

TEST(Plan, TwoModeCoverageCounts) {
    const auto plan = bv::build_measurement_plan(2);
    int g1 = 0, g2 = 0, g = 0;
    for (const auto& [key, entry] : plan.coverage) {
        if (key.kind == bv::MomentKind::Gamma1) ++g1;
        else if (key.kind == bv::MomentKind::Gamma2) ++g2;
        else ++g;
    }
    EXPECT_EQ(g1, 10);  // distinct entries of a symmetric 4×4 matrix
    EXPECT_EQ(g2, 16);
    EXPECT_EQ(g, 4);
}

TEST(Plan, RequirementListMatchesEstimatorTerms) {
    // γ (2m), upper triangle of Γ₁ (m(2m+1)), all of Γ₂ (4m²)
    for (int m = 1; m <= 4; ++m) {
        EXPECT_EQ(bv::required_unitary_moments(m).size(), static_cast<std::size_t>(2 * m + m * (2 * m + 1) + 4 * m * m));
        EXPECT_EQ(bv::required_unitary_moments(m, false).size(), static_cast<std::size_t>(m * (2 * m + 1) + 4 * m * m));
    }
}

TEST(Plan, CoverageCheckCatchesGapsAndWrongSettings) {
    auto plan = bv::build_measurement_plan(2);
    plan.coverage.erase({bv::MomentKind::Gamma2, 1, 2});
    auto bad = bv::verify_plan_coverage(plan);
    ASSERT_EQ(bad.size(), 1u);
    EXPECT_EQ(bad[0].kind, bv::MomentKind::Gamma2);

    auto plan2 = bv::build_measurement_plan(2);
    plan2.coverage[{bv::MomentKind::Gamma1, 0, 1}] = {{0}, bv::Estimator::Product};  // A:q cannot give ⟨q p⟩
    EXPECT_EQ(bv::verify_plan_coverage(plan2).size(), 1u);
}

TEST(Plan, EverySettingIsLocal) {
    for (int m = 1; m <= 4; ++m) {
        const auto plan = bv::build_measurement_plan(m);
        for (const auto& s : plan.settings) {
            const auto modes = s.measured_modes();
            const bool on_a = modes.front() < m;
            for (int j : modes) EXPECT_EQ(j < m, on_a);
        }
    }
}

TEST(Shots, CsvHasHeaderAndRows) {
    const std::vector<bv::ShotRecord> shots{{0, 0, 0, 0.0, 0.25}, {3, 1, 1, bv::kAngleP, -1.5}};
    std::ostringstream os;
    bv::write_shots_csv(os, shots);
    const std::string text = os.str();
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
}

}  // namespace
