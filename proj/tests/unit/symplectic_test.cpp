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


#include <cmath>

#include <gtest/gtest.h>

#include "bosonverify/symplectic.hpp"

namespace bv = bosonverify;

namespace {

TEST(Symplectic, IdentityIsSymplectic) {
    for (int m = 1; m <= 4; ++m) EXPECT_TRUE(bv::validate_symplectic(Eigen::MatrixXd::Identity(2 * m, 2 * m)));
}

TEST(Symplectic, TwoModeSqueezerIsSymplectic) {
    EXPECT_TRUE(bv::validate_symplectic(bv::two_mode_squeezer(0.5).S));
    // S Ω Sᵀ evaluated by hand for the off-diagonal block structure
    const Eigen::MatrixXd s = bv::two_mode_squeezer(0.5).S;
    const Eigen::MatrixXd om = bv::symplectic_form(2);
    EXPECT_LT((s * om * s.transpose() - om).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Symplectic, UniformScalingIsRejected) {
    Eigen::MatrixXd s = 2.0 * Eigen::MatrixXd::Identity(2, 2);
    EXPECT_FALSE(bv::validate_symplectic(s));
    // S Ω Sᵀ = 4 Ω
    EXPECT_NEAR((s * bv::symplectic_form(1) * s.transpose())(0, 1), 4.0, 1e-15);
}

TEST(Symplectic, ShapeErrors) {
    EXPECT_THROW(bv::validate_symplectic(Eigen::MatrixXd::Identity(3, 3)), bv::DimensionError);
    EXPECT_THROW(bv::validate_symplectic(Eigen::MatrixXd::Identity(2, 4)), bv::DimensionError);
    EXPECT_THROW(bv::SymplecticSpec::make(2.0 * Eigen::MatrixXd::Identity(2, 2), Eigen::VectorXd::Zero(2)),
                 bv::InvariantError);
    EXPECT_THROW(bv::SymplecticSpec::make(Eigen::MatrixXd::Identity(2, 2), Eigen::VectorXd::Zero(3)),
                 bv::DimensionError);
}

TEST(Symplectic, TwoModeSqueezerAtZeroIsIdentity) {
    EXPECT_LT((bv::two_mode_squeezer(0.0).S - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Symplectic, TwoModeSqueezerEntriesAtKappa) {
    // θ = artanh(1/√2): cosh θ = 1/√(1 − 1/2) = √2, sinh θ = 1
    const double th = std::atanh(1.0 / std::sqrt(2.0));
    const Eigen::MatrixXd s = bv::two_mode_squeezer(th).S;
    EXPECT_NEAR(s(0, 0), std::sqrt(2.0), 1e-14);
    EXPECT_NEAR(s(0, 2), 1.0, 1e-14);
    EXPECT_NEAR(s(1, 3), -1.0, 1e-14);
}

TEST(Symplectic, TwoModeSqueezerAlwaysValid) {
    for (double th : {-3.0, -0.7, 0.01, 1.3, 4.0}) EXPECT_TRUE(bv::validate_symplectic(bv::two_mode_squeezer(th).S, 1e-8));
}

TEST(Symplectic, SpectralNorms) {
    EXPECT_NEAR(bv::spectral_norm(Eigen::MatrixXd::Identity(4, 4)), 1.0, 1e-15);
    EXPECT_NEAR(bv::spectral_norm(bv::single_mode_squeezer(1.0)), std::exp(1.0), 1e-13);
    for (double th : {0.2, 0.9, 1.7}) {
        // singular values of [[c, s], [s, c]] blocks are c ± s
        EXPECT_NEAR(bv::spectral_norm(bv::two_mode_squeezer(th)), std::cosh(th) + std::sinh(th), 1e-12);
    }
}

TEST(Symplectic, ComposeWithInverseIsIdentity) {
    bv::CounterRng rng(7);
    for (int m = 1; m <= 3; ++m) {
        const auto a = bv::random_symplectic(m, 0.8, 1.5, rng);
        const auto id = bv::compose(a, bv::inverse(a));
        EXPECT_LT((id.S - Eigen::MatrixXd::Identity(2 * m, 2 * m)).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LT(id.d.cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(Symplectic, InverseOfTwoModeSqueezer) {
    const double th = 0.63;
    const Eigen::MatrixXd inv = bv::inverse(bv::two_mode_squeezer(th)).S;
    EXPECT_LT((inv - bv::two_mode_squeezer(-th).S).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LT((inv - bv::two_mode_squeezer(th).S.inverse()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Symplectic, ComposeAppliesRightFirst) {
    Eigen::VectorXd d(2);
    d << 1.0, -2.0;
    const auto sq = bv::single_mode_squeezer(0.4);
    const auto c = bv::compose(sq, bv::displacement(d));
    // x → Sq (x + d)
    EXPECT_LT((c.d - sq.S * d).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Symplectic, DirectSumOfIdentities) {
    const auto s = bv::direct_sum(bv::SymplecticSpec::identity(1), bv::SymplecticSpec::identity(1));
    EXPECT_EQ(s.modes(), 2);
    EXPECT_EQ((s.S - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Symplectic, EmbedPlacesBlockOnSubset) {
    const Eigen::MatrixXd r = bv::phase_rotation(0.3).S;
    const Eigen::MatrixXd e = bv::embed_phase_space(r, {2}, 3, true);
    EXPECT_TRUE(bv::validate_symplectic(e));
    EXPECT_LT((e.block(4, 4, 2, 2) - r).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_DOUBLE_EQ(e(0, 0), 1.0);
    EXPECT_DOUBLE_EQ(e(0, 4), 0.0);
}

TEST(Symplectic, RandomSymplecticRespectsBounds) {
    bv::CounterRng rng(2024);
    for (int trial = 0; trial < 40; ++trial) {
        const int m = 1 + trial % 3;
        const auto s = bv::random_symplectic(m, 1.0, 2.0, rng);
        EXPECT_TRUE(bv::validate_symplectic(s.S, 1e-9));
        EXPECT_LE(bv::spectral_norm(s), std::exp(1.0) * (1.0 + 1e-9));
    }
}

TEST(Symplectic, RandomPassiveIsOrthogonal) {
    bv::CounterRng rng(5);
    const Eigen::MatrixXd o = bv::random_passive(3, rng);
    EXPECT_LT((o * o.transpose() - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_TRUE(bv::validate_symplectic(o));
}

}  // namespace
