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
#include <compare>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Cholesky>

#include "bosonverify/common.hpp"
#include "bosonverify/gaussian.hpp"
#include "bosonverify/random.hpp"

namespace bosonverify {

/// One homodyne configuration: an angle per mode, or nothing if the mode is
/// not measured. Angle φ selects x_φ = cos φ q + sin φ p.
struct HomodyneSetting {
    std::vector<std::optional<double>> angles;
    std::string label;

    int modes() const { return static_cast<int>(angles.size()); }

    std::vector<int> measured_modes() const {
        std::vector<int> out;
        for (int j = 0; j < modes(); ++j)
            if (angles[j]) out.push_back(j);
        return out;
    }

    /// Merge two settings acting on disjoint modes.
    static HomodyneSetting combine(const HomodyneSetting& a, const HomodyneSetting& b) {
        require_dims(a.modes() == b.modes(), "combine: settings span different registers");
        HomodyneSetting out{a.angles, a.label + "+" + b.label};
        for (int j = 0; j < a.modes(); ++j) {
            if (b.angles[j]) {
                require(!a.angles[j], "combine: settings overlap on a mode");
                out.angles[j] = b.angles[j];
            }
        }
        return out;
    }
};

inline constexpr double kAngleQ = 0.0;
inline constexpr double kAngleP = std::numbers::pi / 2.0;
inline constexpr double kAngleDiag = std::numbers::pi / 4.0;

/// Precomputed joint marginal of one setting on one state. Outcomes come out
/// in increasing mode order.
class QuadratureSampler {
public:
    QuadratureSampler(const GaussianState& state, const HomodyneSetting& setting) : modes_(setting.measured_modes()) {
        require_dims(setting.modes() == state.modes(), "setting does not match the state's mode count");
        for (const auto& a : setting.angles)
            if (a) require(std::isfinite(*a), "homodyne angle must be finite");
        const auto k = static_cast<Eigen::Index>(modes_.size());
        Matrix l = Matrix::Zero(k, 2 * state.modes());
        for (Eigen::Index i = 0; i < k; ++i) {
            const int j = modes_[static_cast<std::size_t>(i)];
            const double phi = *setting.angles[j];
            l(i, 2 * j) = std::cos(phi);
            l(i, 2 * j + 1) = std::sin(phi);
        }
        mean_ = l * state.mean;
        cov_ = l * state.cov * l.transpose();
        Eigen::LLT<Matrix> llt(cov_);
        if (llt.info() != Eigen::Success) throw NumericError("homodyne marginal covariance is not positive definite");
        chol_ = llt.matrixL();
    }

    const std::vector<int>& modes() const { return modes_; }
    const Vector& mean() const { return mean_; }
    const Matrix& cov() const { return cov_; }

    Vector sample(CounterRng& rng) const {
        Vector z(mean_.size());
        for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
        return mean_ + chol_ * z;
    }

    Vector sample(std::uint64_t seed) const {
        CounterRng rng(seed);
        return sample(rng);
    }

private:
    std::vector<int> modes_;
    Vector mean_;
    Matrix cov_;
    Matrix chol_;
};

/// One joint sample of the quadratures selected by `setting`.
inline Vector sample_quadratures(const GaussianState& state, const HomodyneSetting& setting, std::uint64_t seed) {
    return QuadratureSampler(state, setting).sample(seed);
}

// ---------------------------------------------------------------------------
// Measurement plan for the unitary protocol on the 2m-mode register
// (A′ modes 0..m−1, R modes m..2m−1).
// ---------------------------------------------------------------------------

enum class MomentKind { Gamma, Gamma1, Gamma2 };

inline const char* moment_kind_name(MomentKind k) {
    switch (k) {
        case MomentKind::Gamma: return "gamma";
        case MomentKind::Gamma1: return "Gamma1";
        default: return "Gamma2";
    }
}

/// γ_u, (Γ₁)_uv with u ≤ v over A′ quadratures, or (Γ₂)_uv with u over A′ and
/// v over R quadratures (both 0-based within their block).
struct MomentKey {
    MomentKind kind;
    int u;
    int v;
    auto operator<=>(const MomentKey&) const = default;
};

enum class Estimator {
    Mean,         ///< average of x_u
    Square,       ///< average of x_u²
    Product,      ///< average of x_u x_v from a joint shot
    RotatedPair,  ///< ⟨x_{π/4}²⟩ − ½Γ₁_uu − ½Γ₁_vv on one mode
};

struct CoverageEntry {
    std::vector<int> settings;  ///< one local setting, or an (A′, R) pair
    Estimator estimator;
};

struct MeasurementPlan {
    int m = 0;
    std::vector<HomodyneSetting> settings;
    std::map<MomentKey, CoverageEntry> coverage;

    /// The joint setting a coverage entry is executed with.
    HomodyneSetting joint_setting(const CoverageEntry& e) const {
        HomodyneSetting s = settings[static_cast<std::size_t>(e.settings[0])];
        for (std::size_t i = 1; i < e.settings.size(); ++i)
            s = HomodyneSetting::combine(s, settings[static_cast<std::size_t>(e.settings[i])]);
        return s;
    }
};

/// Every moment the unitary witness estimator consumes for an m-mode target.
inline std::vector<MomentKey> required_unitary_moments(int m, bool need_gamma = true) {
    std::vector<MomentKey> out;
    if (need_gamma)
        for (int u = 0; u < 2 * m; ++u) out.push_back({MomentKind::Gamma, u, u});
    for (int u = 0; u < 2 * m; ++u)
        for (int v = u; v < 2 * m; ++v) out.push_back({MomentKind::Gamma1, u, v});
    for (int u = 0; u < 2 * m; ++u)
        for (int v = 0; v < 2 * m; ++v) out.push_back({MomentKind::Gamma2, u, v});
    return out;
}

/// The m+5 local settings: all-q on A′, all-p on A′, all-q on R, all-p on R,
/// 45° on all A′ modes, then for each A′ mode j "q on j, p on the other A′ modes".
inline MeasurementPlan build_measurement_plan(int m) {
    require(m >= 1, "measurement plan needs m >= 1");
    MeasurementPlan plan;
    plan.m = m;
    const int total = 2 * m;
    auto local = [&](bool on_a, double angle, const std::string& label) {
        HomodyneSetting s{std::vector<std::optional<double>>(total), label};
        for (int j = 0; j < m; ++j) s.angles[on_a ? j : m + j] = angle;
        return s;
    };
    plan.settings.push_back(local(true, kAngleQ, "A:q"));
    plan.settings.push_back(local(true, kAngleP, "A:p"));
    plan.settings.push_back(local(false, kAngleQ, "R:q"));
    plan.settings.push_back(local(false, kAngleP, "R:p"));
    plan.settings.push_back(local(true, kAngleDiag, "A:diag"));
    for (int j = 0; j < m; ++j) {
        HomodyneSetting s = local(true, kAngleP, "A:q" + std::to_string(j) + "/p");
        s.angles[j] = kAngleQ;
        plan.settings.push_back(s);
    }

    constexpr int kAq = 0, kAp = 1, kRq = 2, kRp = 3, kDiag = 4, kMixed = 5;
    auto a_setting = [](int u) { return u % 2 == 0 ? kAq : kAp; };
    for (int u = 0; u < total; ++u) plan.coverage[{MomentKind::Gamma, u, u}] = {{a_setting(u)}, Estimator::Mean};
    for (int u = 0; u < total; ++u) {
        for (int v = u; v < total; ++v) {
            CoverageEntry e;
            if (u == v) {
                e = {{a_setting(u)}, Estimator::Square};
            } else if (u / 2 == v / 2) {
                e = {{kDiag}, Estimator::RotatedPair};
            } else if (u % 2 == v % 2) {
                e = {{a_setting(u)}, Estimator::Product};
            } else {
                const int q_mode = (u % 2 == 0 ? u : v) / 2;
                e = {{kMixed + q_mode}, Estimator::Product};
            }
            plan.coverage[{MomentKind::Gamma1, u, v}] = e;
        }
    }
    for (int u = 0; u < total; ++u)
        for (int v = 0; v < total; ++v)
            plan.coverage[{MomentKind::Gamma2, u, v}] = {{a_setting(u), v % 2 == 0 ? kRq : kRp}, Estimator::Product};
    return plan;
}

/// Checks that each required moment is covered and that the covering setting
/// really measures the quadratures the estimator needs. Returns the missing
/// or inconsistent keys.
inline std::vector<MomentKey> verify_plan_coverage(const MeasurementPlan& plan) {
    std::vector<MomentKey> bad;
    const int m = plan.m;
    auto measures = [&](const HomodyneSetting& s, int mode, double angle) {
        return s.angles[static_cast<std::size_t>(mode)] && std::abs(*s.angles[static_cast<std::size_t>(mode)] - angle) < 1e-12;
    };
    auto quad_angle = [](int u) { return u % 2 == 0 ? kAngleQ : kAngleP; };
    for (const MomentKey& key : required_unitary_moments(m)) {
        const auto it = plan.coverage.find(key);
        if (it == plan.coverage.end()) {
            bad.push_back(key);
            continue;
        }
        const HomodyneSetting s = plan.joint_setting(it->second);
        bool ok = true;
        switch (key.kind) {
            case MomentKind::Gamma: ok = measures(s, key.u / 2, quad_angle(key.u)); break;
            case MomentKind::Gamma1:
                if (it->second.estimator == Estimator::RotatedPair)
                    ok = key.u / 2 == key.v / 2 && measures(s, key.u / 2, kAngleDiag);
                else
                    ok = measures(s, key.u / 2, quad_angle(key.u)) && measures(s, key.v / 2, quad_angle(key.v));
                break;
            case MomentKind::Gamma2:
                ok = measures(s, key.u / 2, quad_angle(key.u)) && measures(s, m + key.v / 2, quad_angle(key.v));
                break;
        }
        if (!ok) bad.push_back(key);
    }
    return bad;
}

/// One raw homodyne outcome.
struct ShotRecord {
    int setting_id;
    std::int64_t shot_index;
    int mode;
    double angle;
    double outcome;
};

inline void write_shots_csv(std::ostream& os, const std::vector<ShotRecord>& shots) {
    os << "setting_id,shot_index,mode,angle,outcome\n";
    os.precision(17);
    for (const auto& s : shots)
        os << s.setting_id << ',' << s.shot_index << ',' << s.mode << ',' << s.angle << ',' << s.outcome << '\n';
}

}  // namespace bosonverify
