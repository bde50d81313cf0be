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

#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "bosonverify/common.hpp"
#include "bosonverify/gaussian.hpp"
#include "bosonverify/random.hpp"
#include "bosonverify/symplectic.hpp"

namespace bosonverify {

// Prover channel models. Phase-insensitive kinds act identically on each
// mode when realized on an m-mode register.

struct ExactUnitary {
    SymplecticSpec spec;
};
struct NoisyUnitary {
    SymplecticSpec spec;
    double excess = 0.0;
};
struct QuantumLimitedAmplifier {
    double gain = 1.0;
};
struct NoisyAmplifier {
    double gain = 1.0;
    double excess = 0.0;
};
struct Attenuator {
    double eta = 1.0;
    double excess = 0.0;
};
struct AdditiveNoise {
    double variance = 0.0;
};

using ProverChannel =
    std::variant<ExactUnitary, NoisyUnitary, QuantumLimitedAmplifier, NoisyAmplifier, Attenuator, AdditiveNoise>;

inline std::string kind_name(const ProverChannel& p) {
    static const char* names[] = {"ExactUnitary", "NoisyUnitary", "QuantumLimitedAmplifier",
                                  "NoisyAmplifier", "Attenuator", "AdditiveNoise"};
    return names[p.index()];
}

/// Targets of the three protocols.
struct UnitaryTarget {
    SymplecticSpec spec;
};
struct AmplificationTarget {
    double gain = 2.0;
};
/// The pure state U_{S,d}|0⟩.
struct PureStateTarget {
    SymplecticSpec spec;
};
using Target = std::variant<UnitaryTarget, AmplificationTarget, PureStateTarget>;

inline int target_modes(const Target& t) {
    return std::visit(
        [](const auto& x) -> int {
            if constexpr (std::is_same_v<std::decay_t<decltype(x)>, AmplificationTarget>) return 1;
            else return x.spec.modes();
        },
        t);
}

namespace detail {
inline GaussianChannel phase_insensitive(int modes, double x, double y) {
    const auto n = 2 * modes;
    return GaussianChannel::make(x * Matrix::Identity(n, n), y * Matrix::Identity(n, n), Vector::Zero(n));
}
}  // namespace detail

/// Gaussian channel on `modes` modes realizing the prover. Throws
/// InvariantError for parameters outside their domains or maps that are not CP.
inline GaussianChannel realize(const ProverChannel& p, int modes) {
    require(modes >= 1, "realize: mode count must be positive");
    return std::visit(
        [modes](const auto& c) -> GaussianChannel {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, ExactUnitary>) {
                require_dims(c.spec.modes() == modes, "ExactUnitary: spec mode count differs from register");
                return GaussianChannel::from_unitary(c.spec);
            } else if constexpr (std::is_same_v<T, NoisyUnitary>) {
                require_dims(c.spec.modes() == modes, "NoisyUnitary: spec mode count differs from register");
                require(c.excess >= 0.0, "NoisyUnitary: excess noise must be non-negative");
                const auto n = c.spec.S.rows();
                return GaussianChannel::make(c.spec.S, c.excess * Matrix::Identity(n, n), c.spec.d);
            } else if constexpr (std::is_same_v<T, QuantumLimitedAmplifier>) {
                require(c.gain > 0.0, "amplifier gain must be positive");
                return detail::phase_insensitive(modes, c.gain, 0.5 * (c.gain * c.gain - 1.0));
            } else if constexpr (std::is_same_v<T, NoisyAmplifier>) {
                require(c.gain > 0.0, "amplifier gain must be positive");
                require(c.excess >= 0.0, "amplifier excess noise must be non-negative");
                return detail::phase_insensitive(modes, c.gain, 0.5 * (c.gain * c.gain - 1.0) + c.excess);
            } else if constexpr (std::is_same_v<T, Attenuator>) {
                require(c.eta > 0.0 && c.eta <= 1.0, "attenuator transmissivity must lie in (0, 1]");
                require(c.excess >= 0.0, "attenuator excess noise must be non-negative");
                return detail::phase_insensitive(modes, std::sqrt(c.eta), 0.5 * (1.0 - c.eta) + c.excess);
            } else {
                require(c.variance >= 0.0, "additive noise variance must be non-negative");
                return detail::phase_insensitive(modes, 1.0, c.variance);
            }
        },
        p);
}

/// Quantum-limited amplifier attaining (λ+1)/g² for a gain-g target under the
/// prior of inverse variance λ. Its gain is g/(λ+1), so it exists as a CP map
/// only for g ≥ λ+1.
inline QuantumLimitedAmplifier optimal_amplifier(double g, double lambda) {
    require(lambda > 0.0, "lambda must be positive");
    require(g >= lambda + 1.0, "optimal amplifier needs g >= lambda + 1");
    return {g / (lambda + 1.0)};
}

/// Closed form for a quantum-limited amplifier of gain g′ ≥ 1 against a gain-g target:
/// F̄ = λ / (λ g′² + (g − g′)²).
inline double amplifier_fidelity_closed_form(double g_target, double g_channel, double lambda) {
    const double diff = g_target - g_channel;
    return lambda / (lambda * g_channel * g_channel + diff * diff);
}

struct FidelityEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
};

/// Affine map x → A x + b acting on coherent-state means, with the fixed
/// output covariance of a pure target.
struct TargetMap {
    Matrix a;
    Vector b;
    Matrix cov;
};

inline TargetMap target_map(const Target& t) {
    return std::visit(
        [](const auto& x) -> TargetMap {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, AmplificationTarget>) {
                require(x.gain > 0.0, "target gain must be positive");
                return {x.gain * Matrix::Identity(2, 2), Vector::Zero(2), 0.5 * Matrix::Identity(2, 2)};
            } else if constexpr (std::is_same_v<T, UnitaryTarget>) {
                return {x.spec.S, x.spec.d, 0.5 * x.spec.S * x.spec.S.transpose()};
            } else {
                throw InvariantError("average fidelity is defined for channel targets only");
            }
        },
        t);
}

/// Monte-Carlo average fidelity ∫ p_λ(α) ⟨ψ_α|𝓔(|α⟩⟨α|)|ψ_α⟩ d²α with α_j
/// drawn independently, Re and Im each of variance 1/(2λ). Sample i uses the
/// seed derive_seed(seed, i), so any partition of the loop gives the same sum.
inline FidelityEstimate true_average_fidelity(const GaussianChannel& ch, const Target& target, double lambda,
                                              std::int64_t mc_samples, std::uint64_t seed) {
    require(lambda > 0.0, "lambda must be positive");
    require(mc_samples >= 2, "need at least two Monte-Carlo samples");
    const TargetMap tm = target_map(target);
    const int m = static_cast<int>(tm.a.rows() / 2);
    require_dims(ch.modes() == m, "channel and target mode counts differ");

    const Matrix out_cov = 0.5 * ch.X * ch.X.transpose() + ch.Y;
    const OverlapKernel kernel(tm.cov, out_cov);
    const Matrix dx = ch.X - tm.a;
    const Vector db = ch.d - tm.b;
    const double sd = std::sqrt(1.0 / (2.0 * lambda));

    double mean = 0.0;
    double m2 = 0.0;
    Vector mu(2 * m);
    for (std::int64_t i = 0; i < mc_samples; ++i) {
        CounterRng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
        for (int j = 0; j < m; ++j) {
            // mean of coherent(α) is √2 (Re α, Im α)
            mu(2 * j) = std::sqrt(2.0) * sd * rng.normal();
            mu(2 * j + 1) = std::sqrt(2.0) * sd * rng.normal();
        }
        const double f = kernel(dx * mu + db);
        const double delta = f - mean;
        mean += delta / static_cast<double>(i + 1);
        m2 += delta * (f - mean);
    }
    const double var = m2 / static_cast<double>(mc_samples - 1);
    return {mean, std::sqrt(var / static_cast<double>(mc_samples))};
}

inline FidelityEstimate true_average_fidelity(const ProverChannel& p, const Target& target, double lambda,
                                              std::int64_t mc_samples, std::uint64_t seed) {
    return true_average_fidelity(realize(p, target_modes(target)), target, lambda, mc_samples, seed);
}

/// Smallest additive-noise variance v with F̄(v) ≤ f_target, by bisection on
/// common random numbers (F̄ is then monotone in v for a fixed seed).
inline double calibrate_additive_noise(const Target& target, double lambda, double f_target, std::int64_t mc_samples,
                                       std::uint64_t seed, double tol = 1e-6) {
    require(f_target > 0.0 && f_target < 1.0, "calibration target must lie in (0, 1)");
    auto f_of = [&](double v) {
        const int m = target_modes(target);
        GaussianChannel ch = std::visit(
            [&](const auto& t) -> GaussianChannel {
                using T = std::decay_t<decltype(t)>;
                if constexpr (std::is_same_v<T, UnitaryTarget>) return realize(NoisyUnitary{t.spec, v}, m);
                else return realize(AdditiveNoise{v}, m);
            },
            target);
        return true_average_fidelity(ch, target, lambda, mc_samples, seed).estimate;
    };
    double lo = 0.0;
    double hi = 1.0;
    while (f_of(hi) > f_target) {
        hi *= 2.0;
        if (hi > 1e6) throw NumericError("calibrate_additive_noise: no noise level reaches the target fidelity");
    }
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (f_of(mid) > f_target ? lo : hi) = mid;
    }
    return hi;
}

}  // namespace bosonverify
