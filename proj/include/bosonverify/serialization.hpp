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

// JSON records for the value types. Matrices are row-major flat arrays.

#include <string>
#include <variant>

#include <json.hpp>

#include "bosonverify/channels.hpp"
#include "bosonverify/gaussian.hpp"
#include "bosonverify/measurement.hpp"
#include "bosonverify/protocols.hpp"
#include "bosonverify/symplectic.hpp"

namespace bosonverify {

using json = nlohmann::json;

namespace io {

inline json vector_to_json(const Vector& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

inline json matrix_to_json(const Matrix& m) {
    json a = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) a.push_back(m(i, j));
    return a;
}

inline Vector vector_from_json(const json& j, Eigen::Index n, const char* what) {
    if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != n)
        throw DimensionError(std::string(what) + ": expected an array of " + std::to_string(n) + " numbers");
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = j.at(static_cast<std::size_t>(i)).get<double>();
    return v;
}

inline Matrix matrix_from_json(const json& j, Eigen::Index rows, Eigen::Index cols, const char* what) {
    if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows * cols)
        throw DimensionError(std::string(what) + ": expected a row-major array of " + std::to_string(rows * cols) +
                             " numbers");
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = j.at(static_cast<std::size_t>(i * cols + k)).get<double>();
    return m;
}

}  // namespace io

inline void to_json(json& j, const SymplecticSpec& s) {
    j = json{{"m", s.modes()}, {"S", io::matrix_to_json(s.S)}, {"d", io::vector_to_json(s.d)}};
}

inline void from_json(const json& j, SymplecticSpec& s) {
    const int m = j.at("m").get<int>();
    if (m < 1) throw DimensionError("spec: m must be positive");
    Vector d = j.contains("d") ? io::vector_from_json(j.at("d"), 2 * m, "spec.d") : Vector::Zero(2 * m);
    Matrix S = j.contains("S") ? io::matrix_from_json(j.at("S"), 2 * m, 2 * m, "spec.S") : Matrix::Identity(2 * m, 2 * m);
    s = SymplecticSpec::make(std::move(S), std::move(d));
}

inline void to_json(json& j, const GaussianState& s) {
    j = json{{"modes", s.modes()}, {"mean", io::vector_to_json(s.mean)}, {"cov", io::matrix_to_json(s.cov)}};
}

inline void from_json(const json& j, GaussianState& s) {
    const int n = j.at("modes").get<int>();
    if (n < 1) throw DimensionError("state: modes must be positive");
    s.mean = io::vector_from_json(j.at("mean"), 2 * n, "state.mean");
    s.cov = io::matrix_from_json(j.at("cov"), 2 * n, 2 * n, "state.cov");
    if (!satisfies_uncertainty(s)) throw InvariantError("state: covariance violates the uncertainty relation");
}

inline void to_json(json& j, const ProverChannel& p) {
    j = std::visit(
        [](const auto& c) -> json {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, ExactUnitary>) return {{"kind", "ExactUnitary"}, {"spec", c.spec}};
            else if constexpr (std::is_same_v<T, NoisyUnitary>)
                return {{"kind", "NoisyUnitary"}, {"spec", c.spec}, {"excess", c.excess}};
            else if constexpr (std::is_same_v<T, QuantumLimitedAmplifier>)
                return {{"kind", "QuantumLimitedAmplifier"}, {"gain", c.gain}};
            else if constexpr (std::is_same_v<T, NoisyAmplifier>)
                return {{"kind", "NoisyAmplifier"}, {"gain", c.gain}, {"excess", c.excess}};
            else if constexpr (std::is_same_v<T, Attenuator>)
                return {{"kind", "Attenuator"}, {"eta", c.eta}, {"excess", c.excess}};
            else return {{"kind", "AdditiveNoise"}, {"variance", c.variance}};
        },
        p);
}

inline void from_json(const json& j, ProverChannel& p) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "ExactUnitary") p = ExactUnitary{j.at("spec").get<SymplecticSpec>()};
    else if (kind == "NoisyUnitary") p = NoisyUnitary{j.at("spec").get<SymplecticSpec>(), j.at("excess").get<double>()};
    else if (kind == "QuantumLimitedAmplifier") p = QuantumLimitedAmplifier{j.at("gain").get<double>()};
    else if (kind == "NoisyAmplifier") p = NoisyAmplifier{j.at("gain").get<double>(), j.at("excess").get<double>()};
    else if (kind == "Attenuator") p = Attenuator{j.at("eta").get<double>(), j.value("excess", 0.0)};
    else if (kind == "AdditiveNoise") p = AdditiveNoise{j.at("variance").get<double>()};
    else throw InvariantError("unknown prover kind '" + kind + "'");
}

inline void to_json(json& j, const Target& t) {
    j = std::visit(
        [](const auto& x) -> json {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, UnitaryTarget>) return {{"type", "unitary"}, {"spec", x.spec}};
            else if constexpr (std::is_same_v<T, AmplificationTarget>) return {{"type", "amplification"}, {"gain", x.gain}};
            else return {{"type", "state"}, {"spec", x.spec}};
        },
        t);
}

inline void from_json(const json& j, Target& t) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "unitary") t = UnitaryTarget{j.at("spec").get<SymplecticSpec>()};
    else if (type == "amplification") t = AmplificationTarget{j.at("gain").get<double>()};
    else if (type == "state") t = PureStateTarget{j.at("spec").get<SymplecticSpec>()};
    else throw InvariantError("unknown target type '" + type + "'");
}

inline void to_json(json& j, const VerificationConfig& c) {
    j = json{{"lambda", c.lambda},
             {"target", c.target},
             {"F_t", c.F_t},
             {"delta", c.delta},
             {"epsilon", c.epsilon},
             {"sigma1", c.sigma1},
             {"sigma2", c.sigma2},
             {"sigma_mode", c.sigma_mode == SigmaMode::Auto ? "auto" : "given"},
             {"k", c.k},
             {"shot_cap", c.shot_cap}};
}

inline void from_json(const json& j, VerificationConfig& c) {
    c = VerificationConfig{};
    c.lambda = j.at("lambda").get<double>();
    c.target = j.at("target").get<Target>();
    c.F_t = j.at("F_t").get<double>();
    c.delta = j.at("delta").get<double>();
    c.epsilon = j.at("epsilon").get<double>();
    c.sigma1 = j.value("sigma1", 1.0);
    c.sigma2 = j.value("sigma2", 1.0);
    const std::string mode = j.value("sigma_mode", std::string("given"));
    if (mode != "given" && mode != "auto") throw InvariantError("sigma_mode must be 'given' or 'auto'");
    c.sigma_mode = mode == "auto" ? SigmaMode::Auto : SigmaMode::Given;
    c.k = j.value("k", 1);
    c.shot_cap = j.value("shot_cap", std::int64_t{0});
}

inline void to_json(json& j, const BudgetGroup& g) {
    j = json{{"name", g.name},   {"epsilon", g.epsilon}, {"observables", g.observables}, {"delta", g.delta},
             {"sigma", g.sigma}, {"bound", g.bound},     {"count", g.count},             {"uncapped", g.uncapped}};
}

inline void to_json(json& j, const SampleBudget& b) {
    j = json{{"protocol", b.protocol},
             {"groups", b.groups},
             {"channel_uses", b.channel_uses},
             {"tmsv_copies", b.tmsv_copies},
             {"capped", b.capped}};
}

inline json moment_key_json(const MomentKey& k) {
    return json{{"kind", moment_kind_name(k.kind)}, {"u", k.u}, {"v", k.v}};
}

inline void to_json(json& j, const MomentRecord& r) {
    json stats = json::array();
    for (const auto& [key, st] : r.stats) {
        json e = moment_key_json(key);
        e["shots"] = st.shots;
        e["variance"] = st.variance;
        stats.push_back(e);
    }
    j = json{{"m", r.m},
             {"has_gamma", r.has_gamma},
             {"gamma", io::vector_to_json(r.gamma)},
             {"Gamma1", io::matrix_to_json(r.Gamma1)},
             {"Gamma2", io::matrix_to_json(r.Gamma2)},
             {"stats", stats}};
}

/// Report record; `seconds` is the only timing field.
inline void to_json(json& j, const Verdict& v) {
    j = json{{"accepted", v.accepted},   {"omega_star", v.omega_star}, {"threshold", v.threshold},
             {"budget", v.budget},       {"moments", v.moments},       {"seed", v.seed},
             {"sigma1", v.sigma1},       {"sigma2", v.sigma2},         {"warnings", v.warnings},
             {"timing", {{"seconds", v.seconds}}}};
}

inline void to_json(json& j, const HomodyneSetting& s) {
    json angles = json::array();
    for (const auto& a : s.angles) angles.push_back(a ? json(*a) : json(nullptr));
    j = json{{"label", s.label}, {"angles", angles}};
}

inline void to_json(json& j, const MeasurementPlan& p) {
    json cov = json::array();
    static const char* est[] = {"mean", "square", "product", "rotated_pair"};
    for (const auto& [key, e] : p.coverage) {
        json item = moment_key_json(key);
        item["settings"] = e.settings;
        item["estimator"] = est[static_cast<int>(e.estimator)];
        cov.push_back(item);
    }
    j = json{{"m", p.m}, {"size", p.settings.size()}, {"settings", p.settings}, {"coverage", cov}};
}

}  // namespace bosonverify
