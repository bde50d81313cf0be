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
#include <numeric>
#include <vector>

#include <Eigen/Eigenvalues>

#include "bosonverify/common.hpp"
#include "bosonverify/symplectic.hpp"

namespace bosonverify {

/// N-mode Gaussian state: quadrature means and covariance, vacuum variance 1/2.
struct GaussianState {
    Vector mean;
    Matrix cov;

    int modes() const { return static_cast<int>(mean.size() / 2); }
};

/// Affine Gaussian CP map: mean → X mean + d, cov → X cov Xᵀ + Y.
struct GaussianChannel {
    Matrix X;
    Matrix Y;
    Vector d;

    int modes() const { return static_cast<int>(X.rows() / 2); }

    static GaussianChannel identity(int modes) {
        return {Matrix::Identity(2 * modes, 2 * modes), Matrix::Zero(2 * modes, 2 * modes), Vector::Zero(2 * modes)};
    }

    static GaussianChannel from_unitary(const SymplecticSpec& u) {
        return {u.S, Matrix::Zero(u.S.rows(), u.S.cols()), u.d};
    }

    /// Validating constructor: rejects maps violating complete positivity.
    static GaussianChannel make(Matrix x, Matrix y, Vector d, double tol = 1e-10);
};

/// Smallest eigenvalue of the Hermitian matrix A + (i/2) B, B antisymmetric.
inline double min_eig_hermitian(const Matrix& a, const Matrix& b) {
    const CMatrix h = a.cast<Complex>() + Complex(0.0, 0.5) * b.cast<Complex>();
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

/// cov + (i/2)Ω ≥ 0 (with tolerance), plus symmetry.
inline bool satisfies_uncertainty(const GaussianState& s, double tol = 1e-9) {
    if (max_abs(s.cov - s.cov.transpose()) > tol) return false;
    return min_eig_hermitian(s.cov, symplectic_form(s.modes())) >= -tol;
}

/// Y + (i/2)(Ω − X Ω Xᵀ) ≥ 0.
inline bool is_completely_positive(const GaussianChannel& ch, double tol = 1e-10) {
    if (ch.X.rows() != ch.X.cols() || ch.Y.rows() != ch.X.rows() || ch.d.size() != ch.X.rows()) return false;
    if (max_abs(ch.Y - ch.Y.transpose()) > tol) return false;
    const Matrix omega = symplectic_form(ch.modes());
    return min_eig_hermitian(ch.Y, omega - ch.X * omega * ch.X.transpose()) >= -tol;
}

inline GaussianChannel GaussianChannel::make(Matrix x, Matrix y, Vector d, double tol) {
    require_dims(x.rows() == x.cols() && x.rows() % 2 == 0, "channel X must be square with even dimension");
    require_dims(y.rows() == x.rows() && y.cols() == x.cols() && d.size() == x.rows(),
                 "channel Y/d dimensions must match X");
    GaussianChannel ch{std::move(x), std::move(y), std::move(d)};
    if (!is_completely_positive(ch, tol)) throw InvariantError("Gaussian channel violates complete positivity");
    return ch;
}

/// a ∘ b (apply b first).
inline GaussianChannel compose(const GaussianChannel& a, const GaussianChannel& b) {
    require_dims(a.X.cols() == b.X.rows(), "compose: channel dimensions differ");
    return {a.X * b.X, a.X * b.Y * a.X.transpose() + a.Y, a.X * b.d + a.d};
}

inline GaussianState vacuum(int modes) {
    require(modes > 0, "mode count must be positive");
    return {Vector::Zero(2 * modes), 0.5 * Matrix::Identity(2 * modes, 2 * modes)};
}

inline GaussianState coherent(const std::vector<Complex>& alpha) {
    require(!alpha.empty(), "coherent state needs at least one amplitude");
    GaussianState s = vacuum(static_cast<int>(alpha.size()));
    for (std::size_t j = 0; j < alpha.size(); ++j) {
        s.mean(2 * j) = std::sqrt(2.0) * alpha[j].real();
        s.mean(2 * j + 1) = std::sqrt(2.0) * alpha[j].imag();
    }
    return s;
}

inline GaussianState coherent(Complex alpha) { return coherent(std::vector<Complex>{alpha}); }

inline GaussianState thermal(double nbar) {
    require(nbar >= 0.0, "thermal mean photon number must be non-negative");
    return {Vector::Zero(2), (nbar + 0.5) * Matrix::Identity(2, 2)};
}

/// Two-mode squeezed vacuum with squeezing r; each half is thermal with n̄ = sinh²r.
inline GaussianState tmsv(double r) {
    require(r >= 0.0, "squeezing parameter must be non-negative");
    const double c = std::cosh(2.0 * r);
    const double s = std::sinh(2.0 * r);
    Matrix cov = Matrix::Zero(4, 4);
    cov.topLeftCorner(2, 2) = c * Matrix::Identity(2, 2);
    cov.bottomRightCorner(2, 2) = c * Matrix::Identity(2, 2);
    cov.topRightCorner(2, 2) = s * z_matrix(1);
    cov.bottomLeftCorner(2, 2) = s * z_matrix(1);
    return {Vector::Zero(4), 0.5 * cov};
}

inline GaussianState tensor_product(const GaussianState& a, const GaussianState& b) {
    const auto na = a.mean.size();
    const auto nb = b.mean.size();
    GaussianState out{Vector(na + nb), Matrix::Zero(na + nb, na + nb)};
    out.mean << a.mean, b.mean;
    out.cov.topLeftCorner(na, na) = a.cov;
    out.cov.bottomRightCorner(nb, nb) = b.cov;
    return out;
}

/// Reordered / reduced state on `keep` (register modes, in the given order).
inline GaussianState reduce(const GaussianState& s, const std::vector<int>& keep) {
    const auto k = static_cast<Eigen::Index>(keep.size());
    GaussianState out{Vector(2 * k), Matrix(2 * k, 2 * k)};
    for (Eigen::Index i = 0; i < k; ++i) {
        require_dims(keep[i] >= 0 && keep[i] < s.modes(), "reduce: mode index out of range");
        out.mean.segment<2>(2 * i) = s.mean.segment<2>(2 * keep[i]);
        for (Eigen::Index j = 0; j < k; ++j)
            out.cov.block<2, 2>(2 * i, 2 * j) = s.cov.block<2, 2>(2 * keep[i], 2 * keep[j]);
    }
    return out;
}

namespace detail {
inline std::vector<int> all_modes(int n) {
    std::vector<int> v(n);
    std::iota(v.begin(), v.end(), 0);
    return v;
}

inline void check_subset(const std::vector<int>& subset, int total) {
    std::vector<bool> seen(total, false);
    for (int m : subset) {
        require_dims(m >= 0 && m < total, "mode subset index out of range");
        require_dims(!seen[m], "mode subset contains duplicates");
        seen[m] = true;
    }
}

inline Vector embed_vector(const Vector& v, const std::vector<int>& subset, int total) {
    Vector out = Vector::Zero(2 * total);
    for (std::size_t i = 0; i < subset.size(); ++i) out.segment<2>(2 * subset[i]) = v.segment<2>(2 * i);
    return out;
}
}  // namespace detail

/// Gaussian unitary on a subset of modes: mean → S mean + d, cov → S cov Sᵀ.
inline GaussianState apply_unitary(const GaussianState& state, const SymplecticSpec& u, const std::vector<int>& subset) {
    require_dims(static_cast<int>(subset.size()) == u.modes(), "apply_unitary: subset size must equal the spec's mode count");
    detail::check_subset(subset, state.modes());
    const Matrix s = embed_phase_space(u.S, subset, state.modes(), true);
    return {s * state.mean + detail::embed_vector(u.d, subset, state.modes()), s * state.cov * s.transpose()};
}

inline GaussianState apply_unitary(const GaussianState& state, const SymplecticSpec& u) {
    return apply_unitary(state, u, detail::all_modes(state.modes()));
}

/// Gaussian channel on a subset; correlations with spectator modes go through X.
inline GaussianState apply_channel(const GaussianState& state, const GaussianChannel& ch, const std::vector<int>& subset) {
    require_dims(static_cast<int>(subset.size()) == ch.modes(), "apply_channel: subset size must equal the channel's mode count");
    require_dims(ch.X.rows() == ch.X.cols(), "apply_channel: only mode-preserving channels can act on a subset");
    detail::check_subset(subset, state.modes());
    const int n = state.modes();
    const Matrix x = embed_phase_space(ch.X, subset, n, true);
    const Matrix y = embed_phase_space(ch.Y, subset, n, false);
    GaussianState out{x * state.mean + detail::embed_vector(ch.d, subset, n), x * state.cov * x.transpose() + y};
    out.cov = 0.5 * (out.cov + out.cov.transpose());
    return out;
}

inline GaussianState apply_channel(const GaussianState& state, const GaussianChannel& ch) {
    return apply_channel(state, ch, detail::all_modes(state.modes()));
}

/// det(2·cov) = 1 within tol.
inline bool is_pure(const GaussianState& s, double tol = 1e-8) {
    return std::abs((2.0 * s.cov).determinant() - 1.0) <= tol;
}

/// Precomputed overlap kernel for a fixed pair of covariances. tr(ρ₁ρ₂) only
/// depends on the mean difference once V₁ + V₂ is fixed, which is what the
/// Monte-Carlo fidelity loop exploits.
class OverlapKernel {
public:
    OverlapKernel(const Matrix& cov1, const Matrix& cov2) {
        require_dims(cov1.rows() == cov2.rows() && cov1.cols() == cov2.cols(), "overlap: mode counts differ");
        const Matrix sum = cov1 + cov2;
        Eigen::LLT<Matrix> llt(sum);
        if (llt.info() != Eigen::Success) throw NumericError("overlap: V1 + V2 is not positive definite");
        llt_ = llt;
        const double det = sum.determinant();
        if (!(det > 0.0)) throw NumericError("overlap: singular V1 + V2");
        prefactor_ = 1.0 / std::sqrt(det);
    }

    double operator()(const Vector& delta) const {
        return prefactor_ * std::exp(-0.5 * delta.dot(llt_.solve(delta)));
    }

private:
    Eigen::LLT<Matrix> llt_;
    double prefactor_ = 1.0;
};

/// tr(ρ₁ρ₂) = exp(−½ δᵀ(V₁+V₂)⁻¹δ)/√det(V₁+V₂); the fidelity when one state is pure.
inline double overlap(const GaussianState& a, const GaussianState& b) {
    require_dims(a.mean.size() == b.mean.size(), "overlap: mode counts differ");
    return OverlapKernel(a.cov, b.cov)(a.mean - b.mean);
}

inline double overlap_pure(const GaussianState& target_pure, const GaussianState& rho) {
    require(is_pure(target_pure), "overlap_pure: first argument is not a pure Gaussian state");
    return overlap(target_pure, rho);
}

}  // namespace bosonverify
