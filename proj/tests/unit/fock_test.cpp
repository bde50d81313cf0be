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
#include <complex>
#include <numbers>

#include <gtest/gtest.h>

#include "bosonverify/fock.hpp"
#include "bosonverify/gaussian.hpp"
#include "test_oracles.hpp"

namespace bv = bosonverify;
using Complex = std::complex<double>;

namespace {

double kappa1() { return std::atanh(1.0 / std::sqrt(2.0)); }

TEST(FockBasics, GThetaDiagonal) {
    for (double th : {0.0, 0.3, 2.0}) EXPECT_DOUBLE_EQ(bv::g_theta(th, 5).matrix(0, 0).real(), 1.0);
    EXPECT_NEAR(bv::g_theta(kappa1(), 5).matrix(1, 1).real(), 0.5, 1e-15);
    EXPECT_NEAR(bv::g_theta(kappa1(), 5).matrix(3, 3).real(), 0.125, 1e-15);
}

TEST(FockBasics, ThermalTraceLeakageIsGeometricTail) {
    const auto rho = bv::thermal_fock(1.0, 40);
    EXPECT_NEAR(rho.trace(), 1.0, 1e-6);
    EXPECT_NEAR(rho.leakage(), std::pow(0.5, 40), 1e-15);
}

TEST(FockBasics, GuardsRejectBadShapes) {
    EXPECT_THROW(bv::fock_dim(1, 1), bv::InvariantError);
    EXPECT_THROW(bv::fock_dim(4, 0), bv::InvariantError);
    EXPECT_THROW(bv::gaussian_to_fock(bv::vacuum(2), 70), bv::DimensionError);
}

TEST(TwoModeSqueezer, ZeroIsIdentity) {
    const auto s = bv::squeeze2_fock(0.0, 8);
    EXPECT_LT(bv::max_abs(s.matrix - Eigen::MatrixXcd::Identity(64, 64)), 1e-15);
}

TEST(TwoModeSqueezer, VacuumAmplitudeIsSech) {
    for (double th : {0.1, 0.5, 1.0, 2.0}) {
        const auto s = bv::squeeze2_fock(th, 10);
        EXPECT_NEAR(s.matrix(0, 0).real(), 1.0 / std::cosh(th), 1e-12);
    }
}

TEST(TwoModeSqueezer, MatchesDisentangledProduct) {
    const int c = 9;
    for (double th : {0.2, 0.88, 1.5}) {
        const auto s = bv::squeeze2_fock(th, c);
        double worst = 0.0;
        for (int n1 = 0; n1 < c; ++n1)
            for (int n2 = 0; n2 < c; ++n2)
                for (int m1 = 0; m1 < c; ++m1)
                    for (int m2 = 0; m2 < c; ++m2) {
                        const double ref = oracle::two_mode_squeezer_element(th, n1, n2, m1, m2);
                        worst = std::max(worst, std::abs(s.matrix(n1 * c + n2, m1 * c + m2) - ref));
                    }
        EXPECT_LT(worst, 1e-10) << "theta " << th;
    }
}

TEST(TwoModeSqueezer, UnitaryOnInteriorBlock) {
    // ⟨k|S spreads over the chain like C(j, k) tanh^j θ, so a long chain
    // is needed before the low rows are complete.
    const int c = 60;
    const auto s = bv::squeezer_sectors(0.5, c, c);
    double worst = 0.0;
    for (int sec = -4; sec <= 4; ++sec) {
        const Eigen::MatrixXd low = s.block(sec).topRows(5);
        const Eigen::MatrixXd gram = low * low.transpose();
        worst = std::max(worst, bv::max_abs(gram - Eigen::MatrixXd::Identity(5, 5)));
    }
    EXPECT_LT(worst, 1e-10);
}

TEST(TwoModeSqueezer, ProducesTmsvFromVacuum) {
    const int c = 20;
    const double r = 0.6;
    const auto s = bv::squeeze2_fock(r, c);
    const Eigen::VectorXcd out = s.matrix.col(0);
    EXPECT_LT(bv::max_abs(out - bv::tmsv_vector(r, c)), 1e-12);
}

TEST(TwoModeSqueezer, NumberConjugationClosedFormMatchesChain) {
    const double th = 0.88;
    for (int mode : {1, 2}) {
        const auto closed = bv::squeezer_conjugate_number(th, 12, 12, mode).dense();
        const auto chain = bv::squeezer_conjugate_diagonal(th, 12, 12, [mode](int a, int b) {
                               return static_cast<double>(mode == 1 ? a : b);
                           }).dense();
        // the padded chain is only trusted on the low corner of each sector
        for (int a = 0; a < 6; ++a)
            for (int b = 0; b < 6; ++b)
                for (int x = 0; x < 6; ++x)
                    for (int y = 0; y < 6; ++y)
                        EXPECT_NEAR(std::abs(closed(a * 12 + b, x * 12 + y) - chain(a * 12 + b, x * 12 + y)), 0.0, 1e-10);
    }
}

TEST(TwoModeSqueezer, NumberConjugationAgainstDisentangledProduct) {
    // Σ_j ⟨n|S|j⟩ j₁ ⟨j|S†|m⟩ with the oracle elements and a long intermediate range.
    const double th = 0.5;
    const auto x = bv::squeezer_conjugate_number(th, 30, 5, 1);
    for (int n1 = 0; n1 < 4; ++n1)
        for (int n2 = 0; n2 < 4; ++n2)
            for (int m1 = 0; m1 < 4; ++m1) {
                const int m2 = m1 - (n1 - n2);
                if (m2 < 0 || m2 >= 4) continue;
                double ref = 0.0;
                for (int k = 0; k < 80; ++k) {
                    const int j1 = n1 >= n2 ? k + (n1 - n2) : k;
                    const int j2 = j1 - (n1 - n2);
                    ref += oracle::two_mode_squeezer_element(th, n1, n2, j1, j2) * j1 *
                           oracle::two_mode_squeezer_element(th, m1, m2, j1, j2);
                }
                EXPECT_NEAR(x(n1, n2, m1, m2), ref, 1e-9);
            }
}

TEST(TwoModeSqueezer, RectangularSectorsAgreeWithSquare) {
    const double th = 0.7;
    auto f = [](int a, int) { return std::pow(0.3, a); };
    const auto rect = bv::squeezer_conjugate_diagonal(th, 14, 6, f);
    const auto sq = bv::squeezer_conjugate_diagonal(th, 14, 14, f);
    double worst = 0.0;
    for (int a = 0; a < 14; ++a)
        for (int r = 0; r < 6; ++r)
            for (int b = 0; b < 14; ++b)
                for (int r2 = 0; r2 < 6; ++r2) worst = std::max(worst, std::abs(rect(a, r, b, r2) - sq(a, r, b, r2)));
    EXPECT_LT(worst, 1e-12);
}

TEST(GaussianToFock, CoherentStateMatchesKet) {
    const Complex a(0.7, -0.4);
    const int c = 25;
    const auto rho = bv::gaussian_to_fock(bv::coherent(a), c);
    const Eigen::VectorXcd psi = oracle::coherent_ket(a, c);
    EXPECT_LT(bv::max_abs(rho.rho - psi * psi.adjoint()), 1e-12);
}

TEST(GaussianToFock, ThermalAndTmsv) {
    EXPECT_LT(bv::max_abs(bv::gaussian_to_fock(bv::thermal(0.8), 30).rho - bv::thermal_fock(0.8, 30).rho), 1e-12);
    const double r = 0.5;
    EXPECT_LT(bv::max_abs(bv::gaussian_to_fock(bv::tmsv(r), 18).rho - bv::tmsv_fock(r, 18).rho), 1e-12);
}

TEST(GaussianToFock, SqueezedVacuumEvenPhotonDistribution) {
    const double r = 0.5;
    const int c = 30;
    const auto rho = bv::gaussian_to_fock(bv::apply_unitary(bv::vacuum(1), bv::single_mode_squeezer(r)), c);
    const double t = std::tanh(r);
    for (int n = 0; 2 * n < c; ++n) {
        // p(2n) = (2n)! / (4ⁿ (n!)²) tanh^{2n} r / cosh r
        const double p = std::exp(std::lgamma(2 * n + 1.0) - 2.0 * std::lgamma(n + 1.0)) * std::pow(t * t / 4.0, n) /
                         std::cosh(r);
        EXPECT_NEAR(rho.rho(2 * n, 2 * n).real(), p, 1e-12);
        if (2 * n + 1 < c) {
            EXPECT_NEAR(rho.rho(2 * n + 1, 2 * n + 1).real(), 0.0, 1e-14);
        }
    }
}

TEST(GaussianToFock, MeanPhotonNumberMatchesCovariance) {
    bv::GaussianState s = bv::apply_unitary(bv::coherent(Complex(0.3, 0.2)), bv::single_mode_squeezer(0.3));
    s.cov += 0.1 * Eigen::MatrixXd::Identity(2, 2);
    const auto rho = bv::gaussian_to_fock(s, 40);
    // ⟨n⟩ = (tr V + |μ|²)/2 − 1/2
    const double expect = 0.5 * (s.cov.trace() + s.mean.squaredNorm()) - 0.5;
    EXPECT_NEAR(oracle::mean_photons(rho.rho), expect, 1e-9);
}

TEST(SingleModeUnitary, ActsOnCoherentStatesLikeThePhaseSpaceMap) {
    bv::SymplecticSpec spec = bv::compose(bv::phase_rotation(0.9), bv::single_mode_squeezer(0.25));
    spec.d << 0.3, -0.5;
    const int c = 20;
    const int inner = bv::unitary_inner_range(spec, c);
    const Eigen::MatrixXcd u = bv::single_mode_unitary_fock(spec, c, inner);
    const Complex a(0.4, 0.1);
    const Eigen::VectorXcd out = u * oracle::coherent_ket(a, inner);
    const auto rho = bv::gaussian_to_fock(bv::apply_unitary(bv::coherent(a), spec), c);
    EXPECT_LT(bv::max_abs(out * out.adjoint() - rho.rho), 1e-10);
}

TEST(SingleModeUnitary, RowsAreOrthonormal) {
    bv::SymplecticSpec spec = bv::single_mode_squeezer(0.4);
    const int c = 16;
    const Eigen::MatrixXcd u = bv::single_mode_unitary_fock(spec, c, bv::unitary_inner_range(spec, c));
    EXPECT_LT(bv::max_abs(u * u.adjoint() - Eigen::MatrixXcd::Identity(c, c)), 1e-12);
}

TEST(Witness, HonestUnitaryValueIsOne) {
    const int c = 20;
    const double lambda = 1.0;
    const auto w = bv::witness_fock_unitary(bv::SymplecticSpec::identity(1), lambda, c);
    const auto rho = bv::tmsv_fock(bv::kappa(lambda), c);
    EXPECT_NEAR(bv::expectation(w, rho), 1.0, 1e-3);
    EXPECT_TRUE(w.check_hermitian());
}

TEST(Witness, BelowCanonicalObservable) {
    const int c = 12;
    const auto w = bv::witness_fock_unitary(bv::SymplecticSpec::identity(1), 1.0, c);
    const auto o = bv::observable_fock_unitary(bv::SymplecticSpec::identity(1), 1.0, c);
    EXPECT_LE(bv::max_eigenvalue(w.matrix - o.matrix), 1e-6);
}

TEST(Witness, AmplificationOptimumAtGainTwo) {
    // For λ = 1, g = 2 the optimal channel has gain g/(λ+1) = 1, i.e. the identity.
    const int c = 24;
    const auto w = bv::witness_fock_amp(2.0, 1.0, c);
    const auto rho = bv::tmsv_fock(bv::kappa(1.0), c);
    EXPECT_NEAR(bv::expectation(w, rho), 0.5, 1e-3);
    EXPECT_THROW(bv::witness_fock_amp(1.2, 1.0, 8), bv::InvariantError);
}

TEST(PhotonNumberBound, OperatorIsPositiveAndVanishesOnLowSectors) {
    for (double th : {0.1, 0.5, 1.0, 2.0}) {
        for (int m : {1, 2}) {
            const int c = m == 1 ? 30 : 12;
            const auto op = bv::lemma2_operator(th, m, c);
            EXPECT_GE(op.matrix.real().diagonal().minCoeff(), -1e-10);
            EXPECT_NEAR(op.matrix(0, 0).real(), 0.0, 1e-14);
            EXPECT_NEAR(op.matrix(1, 1).real(), 0.0, 1e-14);
        }
    }
}

TEST(PerformanceOperator, TraceIsOneUpToLeakage) {
    // the truncated trace approaches 1 from below as the cutoff grows
    double prev = 0.0;
    for (int c : {12, 16, 20}) {
        const double tr = bv::performance_operator_avg_fidelity(1.0, 1.0, c, c + 2).matrix.trace().real();
        EXPECT_GT(tr, prev);
        EXPECT_LT(tr, 1.0 + 1e-12);
        prev = tr;
    }
    EXPECT_NEAR(prev, 1.0, 1e-5);
}

TEST(PerformanceOperator, VacuumEntryAgainstRadialIntegral) {
    const double g = 1.5;
    const double lambda = 2.0;
    // ⟨00|Ω|00⟩ = ∫₀^∞ λ e^{−λu} e^{−g²u} e^{−u} du by composite Simpson on [0, 40]
    const int n = 20000;
    const double h = 40.0 / n;
    double sum = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double u = i * h;
        const double f = lambda * std::exp(-(lambda + g * g + 1.0) * u);
        sum += f * (i == 0 || i == n ? 1.0 : (i % 2 ? 4.0 : 2.0));
    }
    const double ref = sum * h / 3.0;
    const auto om = bv::performance_operator_avg_fidelity(g, lambda, 8, 10);
    EXPECT_NEAR(om.matrix(0, 0).real(), ref, 1e-9);
}

TEST(PerformanceOperator, CommutesWithPhotonDifference) {
    const int c = 12;
    const auto om = bv::performance_operator_avg_fidelity(1.0, 1.0, c, 14);
    Eigen::MatrixXcd diff = Eigen::MatrixXcd::Zero(c * c, c * c);
    for (int a = 0; a < c; ++a)
        for (int b = 0; b < c; ++b) diff(a * c + b, a * c + b) = a - b;
    EXPECT_LT(bv::max_abs(om.matrix * diff - diff * om.matrix), 1e-10);
}

TEST(CanonicalObservable, AttenuatingBranchMatchesClosedForm) {
    const auto o = bv::canonical_observable(1.0, 1.0, 14, 14);
    const auto closed = bv::lemma1_closed_form(1.0, 1.0, 14);
    EXPECT_LE(bv::max_abs(o.matrix - closed.matrix), 1e-4);
}

TEST(CanonicalObservable, LargeLambdaApproachesVacuumProjector) {
    // θ = artanh(1/√(λ+1)) → 0, so S_θ(G_θ⊗𝟙)S_θ† → |0⟩⟨0| ⊗ 𝟙.
    // corrections are first order in θ ≈ λ^{-1/2}
    const auto closed = bv::lemma1_closed_form(1.0, 1e10, 6);
    Eigen::MatrixXcd ref = Eigen::MatrixXcd::Zero(36, 36);
    for (int r = 0; r < 6; ++r) ref(r, r) = 1.0;
    EXPECT_LT(bv::max_abs(closed.matrix - ref), 1e-4);
}

TEST(FockUtilities, PartialTraceOfTmsvIsThermal) {
    const double r = 0.5;
    const auto rho = bv::tmsv_fock(r, 30);
    const Eigen::MatrixXcd red = bv::partial_trace_two_mode(rho.rho, 30, 0);
    const double nbar = std::sinh(r) * std::sinh(r);
    EXPECT_LT(bv::max_abs(red - bv::thermal_fock(nbar, 30).rho), 1e-14);
}

TEST(FockUtilities, ExpectationIsTraceOfProduct) {
    const auto rho = bv::thermal_fock(0.5, 20);
    EXPECT_NEAR(bv::expectation(bv::number_op(20), rho), 0.5, 1e-8);
    EXPECT_THROW(bv::expectation(bv::number_op(10), rho), bv::DimensionError);
}

}  // namespace
