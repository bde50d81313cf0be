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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "bosonverify/channels.hpp"
#include "bosonverify/common.hpp"
#include "bosonverify/gaussian.hpp"
#include "bosonverify/measurement.hpp"
#include "bosonverify/random.hpp"
#include "bosonverify/symplectic.hpp"

namespace bosonverify {

enum class SigmaMode { Given, Auto };

struct VerificationConfig {
    double lambda = 1.0;
    Target target = UnitaryTarget{SymplecticSpec::identity(1)};
    double F_t = 0.9;
    double delta = 0.25;
    double epsilon = 0.04;
    double sigma1 = 1.0;
    double sigma2 = 1.0;
    SigmaMode sigma_mode = SigmaMode::Given;
    int k = 1;
    /// Per-observable cap on Lemma 3 counts; 0 means uncapped.
    std::int64_t shot_cap = 0;
};

inline double max_amplification_fidelity(double g, double lambda) { return (lambda + 1.0) / (g * g); }

/// Throws InvariantError on a violated requirement; returns non-fatal warnings.
inline std::vector<std::string> validate(const VerificationConfig& cfg) {
    std::vector<std::string> warnings;
    require(std::isfinite(cfg.lambda) && cfg.lambda > 0.0, "lambda must be positive");
    require(cfg.delta > 0.0 && cfg.delta <= 0.5, "delta must lie in (0, 1/2]");
    require(cfg.sigma1 > 0.0 && cfg.sigma2 > 0.0, "variance bounds sigma1, sigma2 must be positive");
    require(cfg.k >= 1, "coupling number k must be a positive integer");
    require(cfg.shot_cap >= 0, "shot_cap must be non-negative");
    std::visit(
        [&](const auto& t) {
            using T = std::decay_t<decltype(t)>;
            if constexpr (std::is_same_v<T, AmplificationTarget>) {
                const double g = t.gain;
                const double l = cfg.lambda;
                require(std::isfinite(g) && g > std::sqrt(l + 1.0), "amplification gain must satisfy g > sqrt(lambda + 1)");
                if (g <= l + 1.0)
                    warnings.push_back("gain g <= lambda + 1: the witness is defined but no quantum-limited amplifier "
                                       "attains (lambda + 1)/g^2 here");
                const double fmax = max_amplification_fidelity(g, l);
                require(cfg.F_t > 0.0 && cfg.F_t < fmax, "F_t must lie in (0, (lambda + 1)/g^2)");
                require(cfg.epsilon > 0.0 && cfg.epsilon < (l + 1.0 - g * g * cfg.F_t) / (2.0 * g * g),
                        "epsilon must lie in (0, (lambda + 1 - g^2 F_t)/(2 g^2))");
            } else {
                if (!validate_symplectic(t.spec.S)) throw InvariantError("target matrix is not symplectic");
                require_dims(t.spec.d.size() == t.spec.S.rows(), "target displacement length must equal 2m");
                require(cfg.F_t > 0.0 && cfg.F_t < 1.0, "F_t must lie in (0, 1)");
                require(cfg.epsilon > 0.0 && cfg.epsilon < (1.0 - cfg.F_t) / 2.0, "epsilon must lie in (0, (1 - F_t)/2)");
            }
        },
        cfg.target);
    return warnings;
}

// ---------------------------------------------------------------------------
// Sample budgets.
// ---------------------------------------------------------------------------

/// Real-valued Lemma 3 bound σ²(l+1)/(ε² ln(1/(1−δ))), σ being a variance bound.
inline double lemma3_bound(double sigma, int l, double epsilon, double delta) {
    require(sigma > 0.0 && l >= 1 && epsilon > 0.0 && delta > 0.0 && delta < 1.0, "lemma3: arguments out of range");
    return sigma * sigma * (l + 1.0) / (epsilon * epsilon * std::log(1.0 / (1.0 - delta)));
}

inline std::int64_t lemma3_sample_count(double sigma, int l, double epsilon, double delta) {
    const double b = lemma3_bound(sigma, l, epsilon, delta);
    if (!(b < 9.0e18)) throw NumericError("lemma3: sample count overflows");
    return static_cast<std::int64_t>(std::ceil(b));
}

struct BudgetGroup {
    std::string name;       ///< "c1" … "c7"
    double epsilon = 0.0;   ///< per-observable accuracy
    int observables = 0;    ///< l in Lemma 3
    double delta = 0.0;     ///< failure probability share
    double sigma = 0.0;
    double bound = 0.0;     ///< real-valued Lemma 3 bound
    std::int64_t count = 0; ///< shots per observable actually used (after cap)
    std::int64_t uncapped = 0;
};

struct SampleBudget {
    std::string protocol;
    std::vector<BudgetGroup> groups;
    std::int64_t channel_uses = 0;  ///< copies of the prover channel (or state)
    std::int64_t tmsv_copies = 0;   ///< unitary / amplification only
    bool capped = false;

    const BudgetGroup* find(const std::string& name) const {
        for (const auto& g : groups)
            if (g.name == name) return &g;
        return nullptr;
    }
    std::int64_t count(const std::string& name) const {
        const auto* g = find(name);
        return g ? g->count : 0;
    }
};

namespace detail {
inline BudgetGroup make_group(std::string name, double sigma, int l, double eps, double delta, std::int64_t cap) {
    BudgetGroup g{std::move(name), eps, l, delta, sigma, 0.0, 0, 0};
    if (eps == std::numeric_limits<double>::infinity()) return g;  // group not needed
    g.bound = lemma3_bound(sigma, l, eps, delta);
    g.uncapped = lemma3_sample_count(sigma, l, eps, delta);
    g.count = cap > 0 ? std::min(g.uncapped, cap) : g.uncapped;
    return g;
}
}  // namespace detail

/// c3 (γ), c4 (Γ₁), c5 (Γ₂). Each of the three error terms gets ε/3 and
/// failure probability 1 − (1−δ)^{1/3}. c3 is zero when d = 0.
inline SampleBudget sample_budget_unitary(const VerificationConfig& cfg, int m) {
    const auto* t = std::get_if<UnitaryTarget>(&cfg.target);
    require(t != nullptr, "sample_budget_unitary needs a unitary target");
    require_dims(t->spec.modes() == m, "sample_budget_unitary: mode count differs from target");
    const double sn = spectral_norm(t->spec);
    const double dn = t->spec.d.norm();
    const double ds = 1.0 - std::cbrt(1.0 - cfg.delta);
    const double inf = std::numeric_limits<double>::infinity();
    SampleBudget b{"unitary", {}, 0, 0, false};
    const double e3 = dn > 0.0 ? cfg.epsilon / (3.0 * std::pow(2.0 * m, 1.5) * sn * sn * dn) : inf;
    b.groups.push_back(detail::make_group("c3", cfg.sigma1, 2 * m, e3, ds, cfg.shot_cap));
    b.groups.push_back(detail::make_group("c4", cfg.sigma2, m * (2 * m + 1), cfg.epsilon / (3.0 * m * sn * sn), ds,
                                          cfg.shot_cap));
    b.groups.push_back(detail::make_group("c5", cfg.sigma2, 4 * m * m,
                                          cfg.epsilon * std::sqrt(cfg.lambda + 1.0) / (6.0 * m * sn), ds, cfg.shot_cap));
    b.channel_uses = 2 * m * b.count("c3") + m * (2 * m + 1) * b.count("c4") + 4 * m * m * b.count("c5");
    b.tmsv_copies = m * b.channel_uses;
    for (const auto& g : b.groups) b.capped = b.capped || g.count < g.uncapped;
    return b;
}

/// c6 (⟨q²⟩, ⟨p²⟩ on A′) and c7 (⟨q q_R⟩, ⟨p p_R⟩); each term gets ε/2 and 1 − √(1−δ).
inline SampleBudget sample_budget_amplification(const VerificationConfig& cfg) {
    const auto* t = std::get_if<AmplificationTarget>(&cfg.target);
    require(t != nullptr, "sample_budget_amplification needs an amplification target");
    const double g = t->gain;
    const double l1 = cfg.lambda + 1.0;
    const double ds = 1.0 - std::sqrt(1.0 - cfg.delta);
    SampleBudget b{"amplification", {}, 0, 0, false};
    b.groups.push_back(detail::make_group("c6", cfg.sigma2, 2, cfg.epsilon * l1 / (2.0 * g * g), ds, cfg.shot_cap));
    b.groups.push_back(
        detail::make_group("c7", cfg.sigma2, 2, cfg.epsilon * std::pow(l1, 1.5) / (4.0 * g * g * g), ds, cfg.shot_cap));
    b.channel_uses = 2 * b.count("c6") + 2 * b.count("c7");
    b.tmsv_copies = b.channel_uses;
    for (const auto& gr : b.groups) b.capped = b.capped || gr.count < gr.uncapped;
    return b;
}

/// c1 (means) and c2 (second moments) of the pure-state protocol, with unit
/// constants in front of the asymptotic forms.
inline SampleBudget sample_budget_state(const VerificationConfig& cfg, int m) {
    const auto* t = std::get_if<PureStateTarget>(&cfg.target);
    require(t != nullptr, "sample_budget_state needs a pure-state target");
    require_dims(t->spec.modes() == m, "sample_budget_state: mode count differs from target");
    const double sn = spectral_norm(t->spec);
    const double dn = t->spec.d.norm();
    const double ln = std::log(1.0 / (1.0 - cfg.delta));
    const double nu = 2.0 * std::min<double>(static_cast<double>(cfg.k) * cfg.k, m);
    auto group = [&](std::string name, double sigma, double bound) {
        BudgetGroup g{std::move(name), cfg.epsilon, 1, cfg.delta, sigma, bound, 0, 0};
        if (!(bound < 9.0e18)) throw NumericError("state budget overflows");
        g.uncapped = static_cast<std::int64_t>(std::ceil(bound));
        g.count = cfg.shot_cap > 0 ? std::min(g.uncapped, cfg.shot_cap) : g.uncapped;
        return g;
    };
    const double s4 = std::pow(sn, 4.0);
    const double e2 = cfg.epsilon * cfg.epsilon;
    SampleBudget b{"state", {}, 0, 0, false};
    b.groups.push_back(group("c1", cfg.sigma1, m * m * s4 * dn * dn * cfg.sigma1 * cfg.sigma1 / (e2 * ln)));
    b.groups.push_back(group("c2", cfg.sigma2, m * m * m * nu * nu * s4 * cfg.sigma2 * cfg.sigma2 / (e2 * ln)));
    b.channel_uses = 2 * m * b.count("c1") + static_cast<std::int64_t>(2 * nu * m) * b.count("c2");
    for (const auto& g : b.groups) b.capped = b.capped || g.count < g.uncapped;
    return b;
}

// ---------------------------------------------------------------------------
// Probe state and moments.
// ---------------------------------------------------------------------------

/// m copies of |κ⟩_TMSV, A′ halves on modes 0..m−1 and R halves on m..2m−1.
inline GaussianState tmsv_register(int m, double r) {
    GaussianState s = vacuum(2 * m);
    const double c = 0.5 * std::cosh(2.0 * r);
    const double sh = 0.5 * std::sinh(2.0 * r);
    for (int j = 0; j < m; ++j) {
        const int a = 2 * j;
        const int b = 2 * (m + j);
        s.cov(a, a) = s.cov(a + 1, a + 1) = s.cov(b, b) = s.cov(b + 1, b + 1) = c;
        s.cov(a, b) = s.cov(b, a) = sh;
        s.cov(a + 1, b + 1) = s.cov(b + 1, a + 1) = -sh;
    }
    return s;
}

inline double kappa_of(double lambda) { return std::atanh(1.0 / std::sqrt(lambda + 1.0)); }

/// (𝓔 ⊗ 𝓘)(|κ⟩⟨κ|^{⊗m}).
inline GaussianState probe_state(const GaussianChannel& ch, int m, double lambda) {
    std::vector<int> a_modes(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) a_modes[static_cast<std::size_t>(j)] = j;
    return apply_channel(tmsv_register(m, kappa_of(lambda)), ch, a_modes);
}

struct MomentStat {
    std::int64_t shots = 0;
    double variance = 0.0;  ///< empirical variance of the per-shot estimator values
};

/// γ = ⟨x_A′⟩, Γ₁ = ⟨x_A′ x_A′ᵀ⟩ (symmetrized), Γ₂ = ⟨x_A′ x_Rᵀ⟩.
struct MomentRecord {
    int m = 0;
    Vector gamma;
    Matrix Gamma1;
    Matrix Gamma2;
    bool has_gamma = true;
    std::map<MomentKey, MomentStat> stats;
};

inline MomentRecord exact_moments(const GaussianState& s, int m) {
    require_dims(s.modes() == 2 * m, "exact_moments: state must have 2m modes");
    const auto n = 2 * m;
    MomentRecord r;
    r.m = m;
    r.gamma = s.mean.head(n);
    const Vector gr = s.mean.tail(n);
    r.Gamma1 = s.cov.topLeftCorner(n, n) + r.gamma * r.gamma.transpose();
    r.Gamma2 = s.cov.topRightCorner(n, n) + r.gamma * gr.transpose();
    return r;
}

namespace detail {

inline Eigen::Index position_of(const std::vector<int>& modes, int mode) {
    const auto it = std::find(modes.begin(), modes.end(), mode);
    require_dims(it != modes.end(), "setting does not measure the requested mode");
    return it - modes.begin();
}

/// Runs `shots` joint shots for one coverage entry and returns (mean, variance)
/// of the per-shot estimator value. For RotatedPair the value is y².
inline std::pair<double, double> run_moment(const MeasurementPlan& plan, const MomentKey& key,
                                            const CoverageEntry& entry, const GaussianState& state, std::int64_t shots,
                                            std::uint64_t stream_seed, std::vector<ShotRecord>* sink, int key_id) {
    const HomodyneSetting setting = plan.joint_setting(entry);
    const QuadratureSampler sampler(state, setting);
    const int m = plan.m;
    Eigen::Index iu = 0;
    Eigen::Index iv = 0;
    switch (key.kind) {
        case MomentKind::Gamma: iu = iv = position_of(sampler.modes(), key.u / 2); break;
        case MomentKind::Gamma1:
            iu = position_of(sampler.modes(), key.u / 2);
            iv = position_of(sampler.modes(), key.v / 2);
            break;
        case MomentKind::Gamma2:
            iu = position_of(sampler.modes(), key.u / 2);
            iv = position_of(sampler.modes(), m + key.v / 2);
            break;
    }
    double mean = 0.0;
    double m2 = 0.0;
    for (std::int64_t i = 0; i < shots; ++i) {
        CounterRng rng(derive_seed(stream_seed, static_cast<std::uint64_t>(i)));
        const Vector x = sampler.sample(rng);
        double val = 0.0;
        switch (entry.estimator) {
            case Estimator::Mean: val = x(iu); break;
            case Estimator::Square:
            case Estimator::RotatedPair: val = x(iu) * x(iu); break;
            case Estimator::Product: val = x(iu) * x(iv); break;
        }
        const double d = val - mean;
        mean += d / static_cast<double>(i + 1);
        m2 += d * (val - mean);
        if (sink) {
            for (Eigen::Index j = 0; j < x.size(); ++j) {
                const int mode = sampler.modes()[static_cast<std::size_t>(j)];
                sink->push_back({key_id, i, mode, *setting.angles[static_cast<std::size_t>(mode)], x(j)});
            }
        }
    }
    return {mean, shots > 1 ? m2 / static_cast<double>(shots - 1) : 0.0};
}

}  // namespace detail

/// Sampled moments for the unitary protocol, following the loop structure of
/// the algorithm: c3 shots per γ entry, c4 per Γ₁ entry (same-mode pairs via
/// the 45° quadrature), c5 per Γ₂ entry from joint A′/R shots.
inline MomentRecord estimate_moments_state(const GaussianState& probe, int m, std::int64_t c3, std::int64_t c4,
                                           std::int64_t c5, bool need_gamma, std::uint64_t seed,
                                           std::vector<ShotRecord>* sink = nullptr) {
    require(c4 > 0 && c5 > 0 && (!need_gamma || c3 > 0), "estimate_moments: zero-shot budget");
    const MeasurementPlan plan = build_measurement_plan(m);
    const auto n = 2 * m;
    MomentRecord r;
    r.m = m;
    r.has_gamma = need_gamma;
    r.gamma = Vector::Zero(n);
    r.Gamma1 = Matrix::Zero(n, n);
    r.Gamma2 = Matrix::Zero(n, n);
    std::vector<std::pair<MomentKey, double>> rotated;
    int key_id = 0;
    for (const MomentKey& key : required_unitary_moments(m, need_gamma)) {
        const CoverageEntry& entry = plan.coverage.at(key);
        const std::int64_t shots = key.kind == MomentKind::Gamma ? c3 : key.kind == MomentKind::Gamma1 ? c4 : c5;
        const auto stream = derive_seed(seed, static_cast<std::uint64_t>(key.kind), static_cast<std::uint64_t>(key.u * n + key.v));
        const auto [mean, var] = detail::run_moment(plan, key, entry, probe, shots, stream, sink, key_id++);
        r.stats[key] = {shots, var};
        switch (key.kind) {
            case MomentKind::Gamma: r.gamma(key.u) = mean; break;
            case MomentKind::Gamma1:
                if (entry.estimator == Estimator::RotatedPair) rotated.emplace_back(key, mean);
                else r.Gamma1(key.u, key.v) = r.Gamma1(key.v, key.u) = mean;
                break;
            case MomentKind::Gamma2: r.Gamma2(key.u, key.v) = mean; break;
        }
    }
    // ⟨(q+p)²/2⟩ − ½⟨q²⟩ − ½⟨p²⟩ = ⟨(qp+pq)/2⟩
    for (const auto& [key, y2] : rotated)
        r.Gamma1(key.u, key.v) = r.Gamma1(key.v, key.u) = y2 - 0.5 * r.Gamma1(key.u, key.u) - 0.5 * r.Gamma1(key.v, key.v);
    return r;
}

inline MomentRecord estimate_moments(const ProverChannel& prover, const VerificationConfig& cfg,
                                     const SampleBudget& budget, std::uint64_t seed,
                                     std::vector<ShotRecord>* sink = nullptr) {
    const auto* t = std::get_if<UnitaryTarget>(&cfg.target);
    require(t != nullptr, "estimate_moments needs a unitary target");
    const int m = t->spec.modes();
    const GaussianState probe = probe_state(realize(prover, m), m, cfg.lambda);
    const bool need_gamma = t->spec.d.norm() > 0.0;
    return estimate_moments_state(probe, m, budget.count("c3"), budget.count("c4"), budget.count("c5"), need_gamma,
                                  seed, sink);
}

/// The four second moments of the amplification protocol, c6 and c7 shots.
inline MomentRecord estimate_amplification_moments(const GaussianState& probe, std::int64_t c6, std::int64_t c7,
                                                   std::uint64_t seed, std::vector<ShotRecord>* sink = nullptr) {
    require(c6 > 0 && c7 > 0, "estimate_amplification_moments: zero-shot budget");
    require_dims(probe.modes() == 2, "amplification probe must have two modes");
    const MeasurementPlan plan = build_measurement_plan(1);
    MomentRecord r;
    r.m = 1;
    r.has_gamma = false;
    r.gamma = Vector::Zero(2);
    r.Gamma1 = Matrix::Zero(2, 2);
    r.Gamma2 = Matrix::Zero(2, 2);
    const MomentKey keys[] = {{MomentKind::Gamma1, 0, 0}, {MomentKind::Gamma1, 1, 1},
                              {MomentKind::Gamma2, 0, 0}, {MomentKind::Gamma2, 1, 1}};
    int key_id = 0;
    for (const MomentKey& key : keys) {
        const std::int64_t shots = key.kind == MomentKind::Gamma1 ? c6 : c7;
        const auto stream = derive_seed(seed, static_cast<std::uint64_t>(key.kind), static_cast<std::uint64_t>(key.u));
        const auto [mean, var] = detail::run_moment(plan, key, plan.coverage.at(key), probe, shots, stream, sink, key_id++);
        r.stats[key] = {shots, var};
        (key.kind == MomentKind::Gamma1 ? r.Gamma1 : r.Gamma2)(key.u, key.v) = mean;
    }
    return r;
}

// ---------------------------------------------------------------------------
// Witness estimators. The constants are derived with vacuum variance 1/2;
// see docs/CONVENTIONS.md.
// ---------------------------------------------------------------------------

/// −½ tr[S⁻ᵀS⁻¹(Γ₁ − 2γdᵀ + ddᵀ)] + tr(Z S⁻¹ Γ₂)/√(λ+1) + 1 + m(λ−2)/(2λ).
inline double witness_estimate_unitary(const MomentRecord& mr, const SymplecticSpec& spec, double lambda) {
    const int m = spec.modes();
    require_dims(mr.m == m, "witness_estimate_unitary: moment record has the wrong mode count");
    const Matrix sinv = inverse(spec).S;
    const Matrix g = sinv.transpose() * sinv;
    const Vector gamma = mr.has_gamma ? mr.gamma : Vector::Zero(2 * m);
    const Matrix centred = mr.Gamma1 - gamma * spec.d.transpose() - spec.d * gamma.transpose() + spec.d * spec.d.transpose();
    const double t1 = (g * centred).trace();
    const double t2 = (z_matrix(m) * sinv * mr.Gamma2).trace();
    return -0.5 * t1 + t2 / std::sqrt(lambda + 1.0) + 1.0 + m * (lambda - 2.0) / (2.0 * lambda);
}

/// (λ+1)/g² [ (λ−1)/λ − (λ+1)/(2g²)(⟨q²⟩ + ⟨p²⟩ + 1) + √(λ+1)/g (⟨q q_R⟩ − ⟨p p_R⟩) ].
inline double witness_estimate_amplification(double q2, double p2, double qq_r, double pp_r, double g, double lambda) {
    const double l1 = lambda + 1.0;
    const double g2 = g * g;
    const double inner = (lambda - 1.0) / lambda - l1 / (2.0 * g2) * (q2 + p2 + 1.0) + std::sqrt(l1) / g * (qq_r - pp_r);
    return l1 / g2 * inner;
}

inline double witness_estimate_amplification(const MomentRecord& mr, double g, double lambda) {
    require_dims(mr.m == 1 && mr.Gamma1.rows() == 2 && mr.Gamma2.rows() == 2,
                 "amplification estimator needs single-mode moments");
    return witness_estimate_amplification(mr.Gamma1(0, 0), mr.Gamma1(1, 1), mr.Gamma2(0, 0), mr.Gamma2(1, 1), g, lambda);
}

/// ω = 1 − ⟨U n̂ U†⟩ with ⟨U n̂ U†⟩ = ½ tr[S⁻ᵀS⁻¹(Γ − 2x̄dᵀ + ddᵀ)] − N/2.
inline double witness_estimate_state(const Vector& mean, const Matrix& second, const SymplecticSpec& spec) {
    const int n = spec.modes();
    require_dims(mean.size() == 2 * n && second.rows() == 2 * n, "witness_estimate_state: dimension mismatch");
    const Matrix sinv = inverse(spec).S;
    const Matrix centred = second - mean * spec.d.transpose() - spec.d * mean.transpose() + spec.d * spec.d.transpose();
    return 1.0 - (0.5 * (sinv.transpose() * sinv * centred).trace() - 0.5 * n);
}

/// Exact ω(𝓔) from the Gaussian moments of the probe (no sampling).
inline double analytic_omega(const GaussianChannel& ch, const Target& target, double lambda) {
    return std::visit(
        [&](const auto& t) -> double {
            using T = std::decay_t<decltype(t)>;
            if constexpr (std::is_same_v<T, UnitaryTarget>) {
                const int m = t.spec.modes();
                return witness_estimate_unitary(exact_moments(probe_state(ch, m, lambda), m), t.spec, lambda);
            } else if constexpr (std::is_same_v<T, AmplificationTarget>) {
                return witness_estimate_amplification(exact_moments(probe_state(ch, 1, lambda), 1), t.gain, lambda);
            } else {
                throw InvariantError("analytic_omega: use analytic_omega_state for pure-state targets");
            }
        },
        target);
}

inline double analytic_omega(const ProverChannel& p, const Target& target, double lambda) {
    return analytic_omega(realize(p, target_modes(target)), target, lambda);
}

inline double analytic_omega_state(const GaussianState& rho, const SymplecticSpec& spec) {
    return witness_estimate_state(rho.mean, rho.cov + rho.mean * rho.mean.transpose(), spec);
}

// ---------------------------------------------------------------------------
// Drivers.
// ---------------------------------------------------------------------------

struct Verdict {
    bool accepted = false;
    double omega_star = 0.0;
    double threshold = 0.0;  ///< F_t + ε
    SampleBudget budget;
    MomentRecord moments;
    std::uint64_t seed = 0;
    double sigma1 = 0.0;  ///< variance bounds actually used
    double sigma2 = 0.0;
    std::vector<std::string> warnings;
    double seconds = 0.0;
};

inline constexpr std::int64_t kPilotShots = 1000;
inline constexpr double kPilotInflation = 2.0;

namespace detail {

/// σ₁: largest empirical variance of a single quadrature; σ₂: largest
/// empirical variance of a product estimator. Both inflated by 2.
inline std::pair<double, double> pilot_sigmas(const MomentRecord& pilot) {
    double s1 = 0.0;
    double s2 = 0.0;
    for (const auto& [key, st] : pilot.stats) {
        if (key.kind == MomentKind::Gamma) s1 = std::max(s1, st.variance);
        else s2 = std::max(s2, st.variance);
    }
    return {kPilotInflation * std::max(s1, 1e-12), kPilotInflation * std::max(s2, 1e-12)};
}

inline bool decide(double omega_star, const VerificationConfig& cfg) { return omega_star >= cfg.F_t + cfg.epsilon; }

}  // namespace detail

/// Unitary or amplification protocol against a prover channel.
inline Verdict run_verification(const ProverChannel& prover, VerificationConfig cfg, std::uint64_t seed,
                                std::vector<ShotRecord>* sink = nullptr) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    v.warnings = validate(cfg);
    v.seed = seed;
    v.threshold = cfg.F_t + cfg.epsilon;
    const int m = target_modes(cfg.target);
    require(!std::holds_alternative<PureStateTarget>(cfg.target), "run_verification: use run_state_verification for states");
    const GaussianState probe = probe_state(realize(prover, m), m, cfg.lambda);
    const bool amp = std::holds_alternative<AmplificationTarget>(cfg.target);

    if (cfg.sigma_mode == SigmaMode::Auto) {
        const auto pseed = derive_seed(seed, 0x9110751ULL);
        const MomentRecord pilot = amp ? estimate_amplification_moments(probe, kPilotShots, kPilotShots, pseed)
                                       : estimate_moments_state(probe, m, kPilotShots, kPilotShots, kPilotShots, true, pseed);
        const auto [s1, s2] = detail::pilot_sigmas(pilot);
        cfg.sigma1 = amp ? s2 : s1;
        cfg.sigma2 = s2;
    }
    v.sigma1 = cfg.sigma1;
    v.sigma2 = cfg.sigma2;

    const auto mseed = derive_seed(seed, 1);
    if (amp) {
        const double g = std::get<AmplificationTarget>(cfg.target).gain;
        v.budget = sample_budget_amplification(cfg);
        v.moments = estimate_amplification_moments(probe, v.budget.count("c6"), v.budget.count("c7"), mseed, sink);
        v.omega_star = witness_estimate_amplification(v.moments, g, cfg.lambda);
    } else {
        const auto& spec = std::get<UnitaryTarget>(cfg.target).spec;
        v.budget = sample_budget_unitary(cfg, m);
        v.moments = estimate_moments_state(probe, m, v.budget.count("c3"), v.budget.count("c4"), v.budget.count("c5"),
                                           spec.d.norm() > 0.0, mseed, sink);
        v.omega_star = witness_estimate_unitary(v.moments, spec, cfg.lambda);
    }
    v.accepted = detail::decide(v.omega_star, cfg);
    v.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return v;
}

/// Pure-state protocol: the prover hands over copies of `rho`.
inline Verdict run_state_verification(const GaussianState& rho, VerificationConfig cfg, std::uint64_t seed,
                                      std::vector<ShotRecord>* sink = nullptr) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    v.warnings = validate(cfg);
    v.seed = seed;
    v.threshold = cfg.F_t + cfg.epsilon;
    const auto* t = std::get_if<PureStateTarget>(&cfg.target);
    require(t != nullptr, "run_state_verification needs a pure-state target");
    const int n = t->spec.modes();
    require_dims(rho.modes() == n, "prover state has the wrong mode count");
    const Matrix sinv = inverse(t->spec).S;
    const Matrix g = sinv.transpose() * sinv;
    const int nq = 2 * n;

    // Shot loops over one register: γ_l, diagonal squares, then the off-diagonal
    // entries with nonzero weight (same-mode pairs through the 45° quadrature).
    auto run = [&](std::int64_t c1, std::int64_t c2, std::uint64_t s, std::vector<ShotRecord>* out) {
        require(c2 > 0, "run_state_verification: zero-shot budget");
        MomentRecord r;
        r.m = n;
        r.gamma = Vector::Zero(nq);
        r.Gamma1 = Matrix::Zero(nq, nq);
        r.Gamma2 = Matrix::Zero(0, 0);
        r.has_gamma = c1 > 0;
        auto single = [&](std::vector<std::optional<double>> angles, std::int64_t shots, std::uint64_t stream,
                          int key_id, auto value) {
            const HomodyneSetting setting{std::move(angles), ""};
            const QuadratureSampler sampler(rho, setting);
            double mean = 0.0;
            double m2 = 0.0;
            for (std::int64_t i = 0; i < shots; ++i) {
                CounterRng rng(derive_seed(stream, static_cast<std::uint64_t>(i)));
                const Vector x = sampler.sample(rng);
                const double val = value(x);
                const double d = val - mean;
                mean += d / static_cast<double>(i + 1);
                m2 += d * (val - mean);
                if (out)
                    for (Eigen::Index j = 0; j < x.size(); ++j) {
                        const int mode = sampler.modes()[static_cast<std::size_t>(j)];
                        out->push_back({key_id, i, mode, *setting.angles[static_cast<std::size_t>(mode)], x(j)});
                    }
            }
            return std::pair{mean, shots > 1 ? m2 / static_cast<double>(shots - 1) : 0.0};
        };
        auto angle = [](int u) { return u % 2 == 0 ? kAngleQ : kAngleP; };
        int key_id = 0;
        for (int l = 0; l < nq; ++l) {
            std::vector<std::optional<double>> a(static_cast<std::size_t>(n));
            a[static_cast<std::size_t>(l / 2)] = angle(l);
            if (c1 > 0) {
                const auto [mean, var] = single(a, c1, derive_seed(s, 0, static_cast<std::uint64_t>(l)), key_id++,
                                                [](const Vector& x) { return x(0); });
                r.gamma(l) = mean;
                r.stats[{MomentKind::Gamma, l, l}] = {c1, var};
            }
            const auto [sq, var] = single(a, c2, derive_seed(s, 1, static_cast<std::uint64_t>(l)), key_id++,
                                          [](const Vector& x) { return x(0) * x(0); });
            r.Gamma1(l, l) = sq;
            r.stats[{MomentKind::Gamma1, l, l}] = {c2, var};
        }
        for (int vv = 0; vv < nq; ++vv) {
            for (int u = 0; u < vv; ++u) {
                if (std::abs(g(u, vv)) <= 1e-14) continue;
                std::vector<std::optional<double>> a(static_cast<std::size_t>(n));
                const auto stream = derive_seed(s, 2, static_cast<std::uint64_t>(u * nq + vv));
                double est = 0.0;
                double var = 0.0;
                if (u / 2 == vv / 2) {
                    a[static_cast<std::size_t>(u / 2)] = kAngleDiag;
                    const auto res = single(a, c2, stream, key_id++, [](const Vector& x) { return x(0) * x(0); });
                    est = res.first - 0.5 * r.Gamma1(u, u) - 0.5 * r.Gamma1(vv, vv);
                    var = res.second;
                } else {
                    a[static_cast<std::size_t>(u / 2)] = angle(u);
                    a[static_cast<std::size_t>(vv / 2)] = angle(vv);
                    // outcomes come out in mode order and u/2 < v/2 here
                    const auto res = single(a, c2, stream, key_id++, [](const Vector& x) { return x(0) * x(1); });
                    est = res.first;
                    var = res.second;
                }
                r.Gamma1(u, vv) = r.Gamma1(vv, u) = est;
                r.stats[{MomentKind::Gamma1, u, vv}] = {c2, var};
            }
        }
        return r;
    };

    if (cfg.sigma_mode == SigmaMode::Auto) {
        const MomentRecord pilot = run(kPilotShots, kPilotShots, derive_seed(seed, 0x9110751ULL), nullptr);
        const auto [s1, s2] = detail::pilot_sigmas(pilot);
        cfg.sigma1 = s1;
        cfg.sigma2 = s2;
    }
    v.sigma1 = cfg.sigma1;
    v.sigma2 = cfg.sigma2;
    v.budget = sample_budget_state(cfg, n);
    const bool need_mean = t->spec.d.norm() > 0.0;
    v.moments = run(need_mean ? v.budget.count("c1") : 0, v.budget.count("c2"), derive_seed(seed, 1), sink);
    v.omega_star = witness_estimate_state(v.moments.gamma, v.moments.Gamma1, t->spec);
    v.accepted = detail::decide(v.omega_star, cfg);
    v.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return v;
}

}  // namespace bosonverify
