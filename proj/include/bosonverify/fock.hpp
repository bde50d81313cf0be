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

// Truncated Fock-space oracle. Everything here is dense and brute force on
// purpose: it is the independent check for the phase-space formulas.
//
// Two-mode operators are indexed n1·c + n2 (mode 1 is the A′ / first mode).

#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

#include "bosonverify/common.hpp"
#include "bosonverify/gaussian.hpp"
#include "bosonverify/symplectic.hpp"

namespace bosonverify {

inline constexpr double kLeakageWarnThreshold = 1e-4;

struct FockOperator {
    int cutoff = 0;
    int modes = 0;
    CMatrix matrix;
    /// Weight lost to truncation by the construction (0 when exact).
    double leakage = 0.0;
    bool hermitian = false;

    Eigen::Index dim() const { return matrix.rows(); }
    bool leakage_warning() const { return leakage > kLeakageWarnThreshold; }

    bool check_hermitian(double tol = 1e-10) const { return max_abs(matrix - matrix.adjoint()) <= tol; }
};

struct FockState {
    int cutoff = 0;
    int modes = 0;
    CMatrix rho;

    double trace() const { return rho.trace().real(); }
    /// 1 − tr ρ. The state is never renormalized, so this is visible to callers.
    double leakage() const { return 1.0 - trace(); }
};

inline Eigen::Index fock_dim(int cutoff, int modes) {
    require(cutoff >= 2, "Fock cutoff must be at least 2");
    require(modes >= 1, "Fock mode count must be positive");
    Eigen::Index d = 1;
    for (int i = 0; i < modes; ++i) {
        if (d > std::numeric_limits<int>::max() / cutoff) throw DimensionError("Fock dimension overflow");
        d *= cutoff;
    }
    return d;
}

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline FockOperator identity_fock(int cutoff, int modes = 1) {
    const auto d = fock_dim(cutoff, modes);
    return {cutoff, modes, CMatrix::Identity(d, d), 0.0, true};
}

inline FockOperator number_op(int cutoff) {
    fock_dim(cutoff, 1);
    CMatrix m = CMatrix::Zero(cutoff, cutoff);
    for (int n = 0; n < cutoff; ++n) m(n, n) = n;
    return {cutoff, 1, m, 0.0, true};
}

/// G_θ = Σ tanh^{2n}θ |n⟩⟨n|.
inline FockOperator g_theta(double theta, int cutoff) {
    fock_dim(cutoff, 1);
    const double t2 = std::tanh(theta) * std::tanh(theta);
    CMatrix m = CMatrix::Zero(cutoff, cutoff);
    double v = 1.0;
    for (int n = 0; n < cutoff; ++n, v *= t2) m(n, n) = v;
    return {cutoff, 1, m, 0.0, true};
}

inline FockState thermal_fock(double nbar, int cutoff) {
    require(nbar >= 0.0, "thermal mean photon number must be non-negative");
    fock_dim(cutoff, 1);
    CMatrix rho = CMatrix::Zero(cutoff, cutoff);
    const double ratio = nbar / (nbar + 1.0);
    double p = 1.0 / (nbar + 1.0);
    for (int n = 0; n < cutoff; ++n, p *= ratio) rho(n, n) = p;
    return {cutoff, 1, rho};
}

/// Amplitudes of the TMSV: sech r · tanh^n r on |n n⟩.
inline CVector tmsv_vector(double r, int cutoff) {
    const int c = cutoff;
    CVector psi = CVector::Zero(static_cast<Eigen::Index>(fock_dim(c, 2)));
    const double t = std::tanh(r);
    double amp = 1.0 / std::cosh(r);
    for (int n = 0; n < c; ++n, amp *= t) psi(n * c + n) = amp;
    return psi;
}

inline FockState tmsv_fock(double r, int cutoff) {
    require(r >= 0.0, "squeezing parameter must be non-negative");
    const CVector psi = tmsv_vector(r, cutoff);
    return {cutoff, 2, psi * psi.adjoint()};
}

// ---------------------------------------------------------------------------
// Two-mode squeezer S_θ = exp(θ(a₁†a₂† − a₁a₂)), built sector by sector.
//
// S_θ conserves s = n₁ − n₂. Inside a sector the states form a chain indexed
// by k = min(n₁, n₂) and the generator is a real antisymmetric tridiagonal
// matrix. Each chain is padded well past the cutoff before exponentiating so
// that the retained matrix elements are those of the untruncated operator.
// ---------------------------------------------------------------------------

namespace detail {

inline int squeezer_pad(double theta) {
    const double t = std::abs(std::tanh(theta));
    if (t < 1e-300) return 30;
    const double per_step = -2.0 * std::log(t);
    if (!(per_step > 0.0)) return 1500;
    const double pad = 1.5 * 37.0 / per_step + 20.0;
    return static_cast<int>(std::clamp(pad, 30.0, 1500.0));
}

/// exp of θ(a₁†a₂† − a₁a₂) on the chain of sector |s|, length `len`.
inline Matrix sector_exponential(double theta, int abs_s, int len) {
    Matrix h = Matrix::Zero(len, len);
    for (int k = 0; k + 1 < len; ++k) {
        const double v = theta * std::sqrt(static_cast<double>(k + abs_s + 1) * (k + 1));
        h(k + 1, k) = v;
        h(k, k + 1) = -v;
    }
    return h.exp();
}

/// Fock numbers (n₁, n₂) of chain site k in sector s.
inline std::pair<int, int> chain_site(int s, int k) { return s >= 0 ? std::pair{k + s, k} : std::pair{k, k - s}; }

}  // namespace detail

/// A two-mode operator that conserves n₁ − n₂, stored as one real block per
/// sector. Mode 1 is kept up to c1 − 1 photons, mode 2 up to c2 − 1.
struct SectorOperator {
    int c1 = 0;
    int c2 = 0;
    std::vector<Matrix> blocks;  // index s + c2 − 1

    int sector_size(int s) const {
        return s >= 0 ? std::min(c1 - s, c2) : std::min(c1, c2 + s);
    }

    const Matrix& block(int s) const { return blocks[static_cast<std::size_t>(s + c2 - 1)]; }

    double operator()(int n1, int n2, int m1, int m2) const {
        const int s = n1 - n2;
        if (m1 - m2 != s) return 0.0;
        return block(s)(std::min(n1, n2), std::min(m1, m2));
    }

    CMatrix dense() const {
        const auto d = static_cast<Eigen::Index>(c1) * c2;
        CMatrix out = CMatrix::Zero(d, d);
        for (int s = -(c2 - 1); s <= c1 - 1; ++s) {
            const Matrix& b = block(s);
            for (int k = 0; k < b.rows(); ++k) {
                const auto [a1, a2] = detail::chain_site(s, k);
                for (int l = 0; l < b.cols(); ++l) {
                    const auto [b1, b2] = detail::chain_site(s, l);
                    out(a1 * c2 + a2, b1 * c2 + b2) = b(k, l);
                }
            }
        }
        return out;
    }
};

namespace detail {

/// Shared driver: fn(|s|, retained, E) fills the block of sector s.
template <typename Fill>
SectorOperator build_sectors(double theta, int c1, int c2, Fill fill) {
    require(std::isfinite(theta), "squeezing parameter must be finite");
    SectorOperator op{c1, c2, std::vector<Matrix>(static_cast<std::size_t>(c1 + c2 - 1))};
    const int pad = squeezer_pad(theta);
    std::vector<Matrix> cache(static_cast<std::size_t>(std::max(c1, c2)));
    for (int s = -(c2 - 1); s <= c1 - 1; ++s) {
        const int n = op.sector_size(s);
        const int abs_s = std::abs(s);
        Matrix& e = cache[static_cast<std::size_t>(abs_s)];
        if (e.size() == 0) {
            const int maxlen = std::max(std::min(c1 - abs_s, c2), std::min(c1, c2 - abs_s));
            e = sector_exponential(theta, abs_s, maxlen + pad);
        }
        op.blocks[static_cast<std::size_t>(s + c2 - 1)] = fill(s, n, e);
    }
    return op;
}

}  // namespace detail

/// S_θ restricted to n₁ < c1, n₂ < c2.
inline SectorOperator squeezer_sectors(double theta, int c1, int c2) {
    return detail::build_sectors(theta, c1, c2, [](int, int n, const Matrix& e) -> Matrix { return e.topLeftCorner(n, n); });
}

/// S_θ D S_θ† restricted to n₁ < c1, n₂ < c2, where D is diagonal with
/// entries f(n₁, n₂). The sum over intermediate states runs over the padded
/// chain, so the retained elements are those of the full operator.
inline SectorOperator squeezer_conjugate_diagonal(double theta, int c1, int c2,
                                                  const std::function<double(int, int)>& f) {
    return detail::build_sectors(theta, c1, c2, [&](int s, int n, const Matrix& e) -> Matrix {
        const auto len = e.cols();
        Vector diag(len);
        for (Eigen::Index k = 0; k < len; ++k) {
            const auto [n1, n2] = detail::chain_site(s, static_cast<int>(k));
            diag(k) = f(n1, n2);
        }
        const auto rows = e.topRows(n);
        return rows * diag.asDiagonal() * rows.transpose();
    });
}

/// S_θ n̂_mode S_θ† restricted to n₁ < c1, n₂ < c2, with mode 1 or 2.
/// Conjugation maps a → cosh θ a − sinh θ b†, so the result is the quadratic
/// cosh²θ n̂_mode + sinh²θ (n̂_other + 1) − cosh θ sinh θ (a†b† + ab), whose
/// matrix elements are exact at any cutoff. The padded chain is not used
/// here because highly excited rows spread further than any fixed pad.
inline SectorOperator squeezer_conjugate_number(double theta, int c1, int c2, int mode) {
    require(std::isfinite(theta), "squeezing parameter must be finite");
    require(mode == 1 || mode == 2, "mode must be 1 or 2");
    const double ch = std::cosh(theta);
    const double sh = std::sinh(theta);
    SectorOperator op{c1, c2, std::vector<Matrix>(static_cast<std::size_t>(c1 + c2 - 1))};
    for (int s = -(c2 - 1); s <= c1 - 1; ++s) {
        const int n = op.sector_size(s);
        const int abs_s = std::abs(s);
        Matrix b = Matrix::Zero(n, n);
        for (int k = 0; k < n; ++k) {
            const auto [n1, n2] = detail::chain_site(s, k);
            const double own = mode == 1 ? n1 : n2;
            const double other = mode == 1 ? n2 : n1;
            b(k, k) = ch * ch * own + sh * sh * (other + 1.0);
            if (k + 1 < n) {
                const double v = -ch * sh * std::sqrt(static_cast<double>(k + abs_s + 1) * (k + 1));
                b(k + 1, k) = v;
                b(k, k + 1) = v;
            }
        }
        op.blocks[static_cast<std::size_t>(s + c2 - 1)] = std::move(b);
    }
    return op;
}

/// Probability weight of S_θ|00⟩ outside the cutoff: tanh^{2c}θ.
inline double squeezer_leakage(double theta, int cutoff) {
    return std::pow(std::tanh(std::abs(theta)), 2.0 * cutoff);
}

inline FockOperator squeeze2_fock(double theta, int cutoff) {
    fock_dim(cutoff, 2);
    return {cutoff, 2, squeezer_sectors(theta, cutoff, cutoff).dense(), squeezer_leakage(theta, cutoff), false};
}

// ---------------------------------------------------------------------------
// Single-mode Gaussian unitaries.
// ---------------------------------------------------------------------------

/// Euler form of a 2×2 symplectic matrix: S = R(φ₂) · diag(e^{−r}, e^{r}) · R(φ₁),
/// with R(φ) = [[cos φ, sin φ], [−sin φ, cos φ]].
struct EulerAngles {
    double phi1 = 0.0;
    double r = 0.0;
    double phi2 = 0.0;
};

inline EulerAngles euler_decompose(const Matrix& s) {
    require_dims(s.rows() == 2 && s.cols() == 2, "euler_decompose expects a single-mode symplectic matrix");
    Eigen::JacobiSVD<Matrix> svd(s, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Matrix u = svd.matrixU();
    Matrix v = svd.matrixV();
    Vector sv = svd.singularValues();  // descending: e^{r}, e^{−r}
    if (u.determinant() < 0) {
        u.col(1) *= -1.0;
        v.col(1) *= -1.0;
    }
    // Put the contracted direction first to match diag(e^{−r}, e^{r}).
    const Matrix swap = (Matrix(2, 2) << 0, 1, -1, 0).finished();
    u = u * swap.transpose();
    v = v * swap.transpose();
    EulerAngles out;
    out.r = std::log(sv(0));
    out.phi2 = std::atan2(u(0, 1), u(0, 0));
    const Matrix r1 = v.transpose();
    out.phi1 = std::atan2(r1(0, 1), r1(0, 0));
    return out;
}

namespace detail {

inline CMatrix lowering(int n) {
    CMatrix a = CMatrix::Zero(n, n);
    for (int k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
    return a;
}

inline CMatrix rotation_fock(double phi, int n) {
    CMatrix m = CMatrix::Zero(n, n);
    for (int k = 0; k < n; ++k) m(k, k) = std::polar(1.0, -phi * k);
    return m;
}

/// exp(r/2 (a² − a†²)): q → e^{−r} q, p → e^{r} p.
inline CMatrix squeezer_fock(double r, int n) {
    const CMatrix a = lowering(n);
    const CMatrix a2 = a * a;
    const CMatrix gen = 0.5 * r * (a2 - a2.adjoint());
    return gen.exp();
}

/// D(β) = exp(β a† − β̄ a).
inline CMatrix displacement_fock(Complex beta, int n) {
    const CMatrix a = lowering(n);
    const CMatrix gen = beta * a.adjoint() - std::conj(beta) * a;
    return gen.exp();
}

}  // namespace detail

/// Inner Fock range needed so rows n < cutoff of U_{S,d} are resolved.
inline int unitary_inner_range(const SymplecticSpec& spec, int cutoff) {
    const double beta2 = 0.5 * spec.d.squaredNorm();
    const double growth = std::pow(spectral_norm(spec.S), 2.0);
    const double est = growth * (cutoff + 4.0 * beta2 + 8.0 * std::sqrt(beta2 * cutoff) + 30.0) + 40.0;
    return static_cast<int>(std::ceil(est));
}

/// Rows 0..rows−1 and columns 0..cols−1 of the single-mode Gaussian unitary
/// with x → S x + d (Heisenberg picture), U = D(β) R(φ₂) Sq(r) R(φ₁).
inline CMatrix single_mode_unitary_fock(const SymplecticSpec& spec, int rows, int cols) {
    require_dims(spec.modes() == 1, "single_mode_unitary_fock expects a one-mode target");
    const EulerAngles e = euler_decompose(spec.S);
    const Complex beta(spec.d(0) / std::sqrt(2.0), spec.d(1) / std::sqrt(2.0));
    const int big = std::max(rows, cols) + 80 + static_cast<int>(std::ceil(4.0 * std::norm(beta)));
    const CMatrix u = detail::displacement_fock(beta, big) * detail::rotation_fock(e.phi2, big) *
                      detail::squeezer_fock(e.r, big) * detail::rotation_fock(e.phi1, big);
    return u.topLeftCorner(rows, cols);
}

/// (U ⊗ 𝟙) X (U† ⊗ 𝟙) on cutoff c, where X is a sector operator whose first
/// mode is resolved up to `urows.cols()` photons and U acts on mode 1.
inline CMatrix conjugate_mode1(const CMatrix& urows, const SectorOperator& x) {
    const int c = x.c2;
    const auto inner = static_cast<int>(urows.cols());
    require_dims(x.c1 == inner, "conjugate_mode1: inner ranges differ");
    const auto rows = urows.rows();
    const auto d = rows * c;
    CMatrix out = CMatrix::Zero(d, d);
    for (int r = 0; r < c; ++r) {
        for (int rp = 0; rp < c; ++rp) {
            // Nonzero entries have a1 − r = b1 − rp, so b1 = a1 − r + rp.
            const int shift = rp - r;
            const int lo = std::max(0, -shift);
            const int hi = std::min(inner, inner - shift);
            if (hi <= lo) continue;
            Vector vals(hi - lo);
            for (int a1 = lo; a1 < hi; ++a1) vals(a1 - lo) = x(a1, r, a1 + shift, rp);
            const CMatrix blk = urows.middleCols(lo, hi - lo) * vals.asDiagonal() *
                                urows.middleCols(lo + shift, hi - lo).adjoint();
            for (Eigen::Index a = 0; a < rows; ++a)
                for (Eigen::Index b = 0; b < rows; ++b) out(a * c + r, b * c + rp) = blk(a, b);
        }
    }
    return out;
}

/// (U ⊗ 𝟙) X (U† ⊗ 𝟙) for a single-mode target on mode 1, where
/// build(inner, cutoff) returns the sector operator X.
template <typename Build>
CMatrix unitary_conjugate(const SymplecticSpec& spec, int cutoff, Build build) {
    const int inner = unitary_inner_range(spec, cutoff);
    const CMatrix urows = single_mode_unitary_fock(spec, cutoff, inner);
    return conjugate_mode1(urows, build(inner, cutoff));
}

// ---------------------------------------------------------------------------
// Witnesses, canonical observables and the performance operator.
// ---------------------------------------------------------------------------

inline double kappa(double lambda) {
    require(lambda > 0.0, "lambda must be positive");
    return std::atanh(1.0 / std::sqrt(lambda + 1.0));
}

/// 𝟙 − λ/(λ+1) (U⊗𝟙) S_κ (n̂⊗𝟙) S_κ† (U†⊗𝟙) on two modes.
inline FockOperator witness_fock_unitary(const SymplecticSpec& spec, double lambda, int cutoff) {
    require_dims(spec.modes() == 1, "Fock witnesses are built for single-mode targets");
    fock_dim(cutoff, 2);
    const double k = kappa(lambda);
    const CMatrix x = unitary_conjugate(spec, cutoff, [k](int c1, int c2) { return squeezer_conjugate_number(k, c1, c2, 1); });
    CMatrix w = CMatrix::Identity(x.rows(), x.cols()) - (lambda / (lambda + 1.0)) * x;
    return {cutoff, 2, 0.5 * (w + w.adjoint()), squeezer_leakage(k, cutoff), true};
}

/// Canonical form of the unitary observable: (U⊗𝟙) S_κ (G_κ⊗𝟙) S_κ† (U†⊗𝟙).
inline FockOperator observable_fock_unitary(const SymplecticSpec& spec, double lambda, int cutoff) {
    require_dims(spec.modes() == 1, "Fock observables are built for single-mode targets");
    fock_dim(cutoff, 2);
    const double k = kappa(lambda);
    const double t2 = std::tanh(k) * std::tanh(k);
    const CMatrix o = unitary_conjugate(spec, cutoff, [k, t2](int c1, int c2) {
        return squeezer_conjugate_diagonal(k, c1, c2, [t2](int n1, int) { return std::pow(t2, n1); });
    });
    return {cutoff, 2, 0.5 * (o + o.adjoint()), squeezer_leakage(k, cutoff), true};
}

inline double theta_prime(double g, double lambda) {
    require(lambda > 0.0, "lambda must be positive");
    require(g > std::sqrt(lambda + 1.0), "amplification witness needs g > sqrt(lambda + 1)");
    return std::atanh(std::sqrt(lambda + 1.0) / g);
}

/// (λ+1)/g² (𝟙 − (g²−λ−1)/g² S_θ′ (𝟙⊗n̂) S_θ′†).
inline FockOperator witness_fock_amp(double g, double lambda, int cutoff) {
    fock_dim(cutoff, 2);
    const double tp = theta_prime(g, lambda);
    const double g2 = g * g;
    const CMatrix x = squeezer_conjugate_number(tp, cutoff, cutoff, 2).dense();
    const CMatrix w = ((lambda + 1.0) / g2) * (CMatrix::Identity(x.rows(), x.cols()) - ((g2 - lambda - 1.0) / g2) * x);
    return {cutoff, 2, w, squeezer_leakage(tp, cutoff), true};
}

/// Closed forms of the canonical observable: S_θ(G_θ⊗𝟙)S_θ† with θ = artanh(g/√(λ+1))
/// when g < √(λ+1), and tanh²θ′ S_θ′(𝟙⊗G_θ′)S_θ′† with θ′ = artanh(√(λ+1)/g) when g > √(λ+1).
inline FockOperator lemma1_closed_form(double g, double lambda, int cutoff) {
    require(g > 0.0 && lambda > 0.0, "lemma1_closed_form needs g > 0 and lambda > 0");
    fock_dim(cutoff, 2);
    const double edge = std::sqrt(lambda + 1.0);
    if (g == edge) throw NumericError("closed form is singular at g = sqrt(lambda + 1)");
    if (g < edge) {
        const double th = std::atanh(g / edge);
        const double t2 = std::tanh(th) * std::tanh(th);
        const CMatrix o =
            squeezer_conjugate_diagonal(th, cutoff, cutoff, [t2](int n1, int) { return std::pow(t2, n1); }).dense();
        return {cutoff, 2, o, squeezer_leakage(th, cutoff), true};
    }
    const double tp = std::atanh(edge / g);
    const double t2 = std::tanh(tp) * std::tanh(tp);
    const CMatrix o =
        t2 * squeezer_conjugate_diagonal(tp, cutoff, cutoff, [t2](int, int n2) { return std::pow(t2, n2); }).dense();
    return {cutoff, 2, o, squeezer_leakage(tp, cutoff), true};
}

/// Gauss–Laguerre nodes and weights (weight e^{−u} on [0, ∞)). Nodes come
/// from the Golub–Welsch eigenproblem and are polished by Newton steps on the
/// three-term recurrence; weights use x / ((n+1)² L_{n+1}(x)²), which keeps
/// full relative accuracy for the tiny weights at large nodes.
inline std::pair<Vector, Vector> gauss_laguerre(int n) {
    require(n >= 1, "quadrature order must be positive");
    Matrix j = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        j(i, i) = 2.0 * i + 1.0;
        if (i + 1 < n) j(i, i + 1) = j(i + 1, i) = i + 1.0;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(j, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericError("Gauss-Laguerre eigensolve failed");
    Vector x = es.eigenvalues();
    Vector w(n);
    // L_n(x) and L_{n−1}(x) by the recurrence (k+1) L_{k+1} = (2k+1−x) L_k − k L_{k−1}.
    auto laguerre = [n](double t) {
        double p0 = 1.0;
        double p1 = 1.0 - t;
        for (int k = 1; k < n; ++k) {
            const double p2 = ((2.0 * k + 1.0 - t) * p1 - k * p0) / (k + 1.0);
            p0 = p1;
            p1 = p2;
        }
        return std::pair{p1, p0};
    };
    for (int i = 0; i < n; ++i) {
        double t = x(i);
        for (int it = 0; it < 8; ++it) {
            const auto [ln, lm] = laguerre(t);
            const double deriv = n * (ln - lm) / t;  // x L_n′ = n (L_n − L_{n−1})
            const double step = ln / deriv;
            t -= step;
            if (std::abs(step) <= 1e-15 * std::abs(t)) break;
        }
        x(i) = t;
        const auto [ln, lm] = laguerre(t);
        const double lnext = ((2.0 * n + 1.0 - t) * ln - n * lm) / (n + 1.0);
        w(i) = t / ((n + 1.0) * (n + 1.0) * lnext * lnext);
    }
    return {x, w};
}

namespace detail {

/// ∫ (λ/π) e^{−λ|α|²} |gα⟩⟨gα| ⊗ |ᾱ⟩⟨ᾱ| d²α with `radial` Laguerre nodes.
/// In u = |α|² the integrand is e^{−(λ+g²+1)u} times a polynomial of degree
/// ≤ 2(c−1), so the rule is exact once radial ≥ c and the angle count exceeds
/// the largest harmonic 2(c−1).
inline CMatrix performance_operator_raw(double g, double lambda, int c, int radial) {
    const double beta = lambda + g * g + 1.0;
    const auto [nodes, weights] = gauss_laguerre(radial);
    const int angles = 4 * c;
    const auto dim = static_cast<Eigen::Index>(c) * c;
    const Eigen::Index npts = static_cast<Eigen::Index>(radial) * angles;
    CMatrix v(dim, npts);
    Vector wts(npts);
    Vector inv_sqrt_fact(c);
    inv_sqrt_fact(0) = 1.0;
    for (int n = 1; n < c; ++n) inv_sqrt_fact(n) = inv_sqrt_fact(n - 1) / std::sqrt(static_cast<double>(n));
    CVector ca(c), cb(c);
    Eigen::Index col = 0;
    for (int i = 0; i < radial; ++i) {
        const double rad = std::sqrt(nodes(i) / beta);
        for (int k = 0; k < angles; ++k, ++col) {
            const Complex alpha = std::polar(rad, 2.0 * std::numbers::pi * k / angles);
            Complex pa(1.0, 0.0), pb(1.0, 0.0);
            for (int n = 0; n < c; ++n) {
                ca(n) = pa * inv_sqrt_fact(n);
                cb(n) = pb * inv_sqrt_fact(n);
                pa *= g * alpha;
                pb *= std::conj(alpha);
            }
            for (int n1 = 0; n1 < c; ++n1) v.col(col).segment(n1 * c, c) = ca(n1) * cb;
            wts(col) = lambda * weights(i) / (beta * angles);
        }
    }
    CMatrix out = v * wts.asDiagonal() * v.adjoint();
    return 0.5 * (out + out.adjoint());
}

}  // namespace detail

/// Performance operator Ω_{A′A} for the average fidelity of gain-g targets.
/// Throws NumericError if doubling the radial order moves any entry by > 1e−6.
inline FockOperator performance_operator_avg_fidelity(double g, double lambda, int cutoff, int quad_points) {
    require(g > 0.0 && lambda > 0.0, "performance operator needs g > 0 and lambda > 0");
    require(quad_points >= 1, "quad_points must be positive");
    fock_dim(cutoff, 2);
    const CMatrix coarse = detail::performance_operator_raw(g, lambda, cutoff, quad_points);
    const CMatrix fine = detail::performance_operator_raw(g, lambda, cutoff, 2 * quad_points);
    const double shift = max_abs(fine - coarse);
    if (shift > 1e-6)
        throw NumericError("performance operator quadrature not converged (shift " + std::to_string(shift) + ")");
    const double leak = 1.0 - fine.trace().real();
    return {cutoff, 2, fine, std::max(0.0, leak), true};
}

/// O = (𝟙⊗ρ_R^{−1/2}) Ω (𝟙⊗ρ_R^{−1/2}) with ρ_R the thermal state of mean 1/λ.
inline FockOperator canonical_observable(double g, double lambda, int cutoff, int quad_points) {
    const FockOperator omega = performance_operator_avg_fidelity(g, lambda, cutoff, quad_points);
    const FockState rho_r = thermal_fock(1.0 / lambda, cutoff);
    const double smallest = rho_r.rho(cutoff - 1, cutoff - 1).real();
    if (smallest < 1e-12) throw NumericError("reference state too ill-conditioned for this cutoff");
    Vector scale(static_cast<Eigen::Index>(cutoff) * cutoff);
    for (int a = 0; a < cutoff; ++a)
        for (int r = 0; r < cutoff; ++r) scale(a * cutoff + r) = 1.0 / std::sqrt(rho_r.rho(r, r).real());
    const CMatrix o = scale.asDiagonal() * omega.matrix * scale.asDiagonal();
    return {cutoff, 2, o, omega.leakage, true};
}

/// Lemma 2 operator G_θ^{⊗m} − (𝟙 − Σᵢ n̂ᵢ sech²θ). It is diagonal in the Fock basis.
inline FockOperator lemma2_operator(double theta, int modes, int cutoff) {
    const auto d = fock_dim(cutoff, modes);
    const double t2 = std::tanh(theta) * std::tanh(theta);
    const double sech2 = 1.0 / (std::cosh(theta) * std::cosh(theta));
    CMatrix m = CMatrix::Zero(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        Eigen::Index rest = i;
        int total = 0;
        for (int j = 0; j < modes; ++j) {
            total += static_cast<int>(rest % cutoff);
            rest /= cutoff;
        }
        m(i, i) = std::pow(t2, total) - (1.0 - total * sech2);
    }
    return {cutoff, modes, m, 0.0, true};
}

/// Unnormalized Choi operator of the identity map, Σᵢⱼ |ii⟩⟨jj|.
inline FockOperator choi_identity(int cutoff) {
    const int c = cutoff;
    CVector phi = CVector::Zero(static_cast<Eigen::Index>(fock_dim(c, 2)));
    for (int n = 0; n < c; ++n) phi(n * c + n) = 1.0;
    return {c, 2, phi * phi.adjoint(), 0.0, true};
}

// ---------------------------------------------------------------------------
// Gaussian → Fock conversion.
//
// e^{|α|²}⟨α|ρ|α⟩ = Σ ρ_{mn} ᾱ^m α^n / √(m! n!) is the exponential of a
// quadratic form in ζ = (α₁, ᾱ₁, α₂, ᾱ₂, ...). Its Taylor coefficients obey
// a Hermite-type recursion which is run in the √k!-normalized form.
// ---------------------------------------------------------------------------

inline FockState gaussian_to_fock(const GaussianState& state, int cutoff) {
    const int n = state.modes();
    const int c = cutoff;
    const auto dim = fock_dim(c, n);
    const int nz = 2 * n;
    if (dim > 4096) throw DimensionError("gaussian_to_fock: Fock dimension above 4096");

    const Matrix vq = state.cov + 0.5 * Matrix::Identity(nz, nz);
    Eigen::LDLT<Matrix> ldlt(vq);
    if (ldlt.info() != Eigen::Success) throw NumericError("gaussian_to_fock: singular Q-function covariance");
    const Matrix m = ldlt.solve(Matrix::Identity(nz, nz));
    const double det = vq.determinant();

    CMatrix w = CMatrix::Zero(nz, nz);
    Matrix p = Matrix::Zero(nz, nz);
    const double s = 1.0 / std::sqrt(2.0);
    for (int j = 0; j < n; ++j) {
        w(2 * j, 2 * j) = s;
        w(2 * j, 2 * j + 1) = s;
        w(2 * j + 1, 2 * j) = Complex(0.0, -s);
        w(2 * j + 1, 2 * j + 1) = Complex(0.0, s);
        p(2 * j, 2 * j + 1) = p(2 * j + 1, 2 * j) = 1.0;
    }
    const CMatrix a = -w.transpose() * m.cast<Complex>() * w + p.cast<Complex>();
    const CVector b = w.transpose() * (m * state.mean).cast<Complex>();
    const double t = std::exp(-0.5 * state.mean.dot(m * state.mean)) / std::sqrt(det);

    // Multi-index over ζ: position 2j is the α_j order (bra index of mode j),
    // position 2j+1 the ᾱ_j order (ket index).
    std::vector<Eigen::Index> stride(nz);
    Eigen::Index total = 1;
    for (int i = nz - 1; i >= 0; --i) {
        stride[i] = total;
        total *= c;
    }
    std::vector<Complex> r(static_cast<std::size_t>(total));
    r[0] = t;
    std::vector<int> k(nz, 0);
    for (Eigen::Index idx = 1; idx < total; ++idx) {
        Eigen::Index rest = idx;
        for (int i = 0; i < nz; ++i) {
            k[i] = static_cast<int>(rest / stride[i]);
            rest %= stride[i];
        }
        int i = 0;
        while (k[i] == 0) ++i;
        // R_{k'+e_i} = (b_i R_{k'} + Σ_j A_ij √k'_j R_{k'−e_j}) / √(k'_i+1) with k' = k − e_i.
        const Eigen::Index prev = idx - stride[i];
        k[i] -= 1;
        Complex acc = b(i) * r[static_cast<std::size_t>(prev)];
        for (int j = 0; j < nz; ++j) {
            if (k[j] == 0 || a(i, j) == Complex(0.0, 0.0)) continue;
            acc += a(i, j) * std::sqrt(static_cast<double>(k[j])) * r[static_cast<std::size_t>(prev - stride[j])];
        }
        r[static_cast<std::size_t>(idx)] = acc / std::sqrt(static_cast<double>(k[i] + 1));
    }

    CMatrix rho(dim, dim);
    std::vector<int> ket(n), bra(n);
    for (Eigen::Index row = 0; row < dim; ++row) {
        Eigen::Index rr = row;
        for (int j = n - 1; j >= 0; --j) {
            ket[j] = static_cast<int>(rr % c);
            rr /= c;
        }
        for (Eigen::Index col = 0; col < dim; ++col) {
            Eigen::Index cc = col;
            for (int j = n - 1; j >= 0; --j) {
                bra[j] = static_cast<int>(cc % c);
                cc /= c;
            }
            Eigen::Index pos = 0;
            for (int j = 0; j < n; ++j) pos += bra[j] * stride[2 * j] + ket[j] * stride[2 * j + 1];
            rho(row, col) = r[static_cast<std::size_t>(pos)];
        }
    }
    return {c, n, 0.5 * (rho + rho.adjoint())};
}

// ---------------------------------------------------------------------------
// Small utilities.
// ---------------------------------------------------------------------------

inline double expectation(const FockOperator& op, const FockState& state) {
    require_dims(op.dim() == state.rho.rows(), "expectation: dimension mismatch");
    return (op.matrix.cwiseProduct(state.rho.transpose())).sum().real();
}

/// Trace out every mode except `keep` from a two-mode operator.
inline CMatrix partial_trace_two_mode(const CMatrix& m, int cutoff, int keep) {
    const int c = cutoff;
    require_dims(m.rows() == static_cast<Eigen::Index>(c) * c, "partial trace: not a two-mode operator");
    require_dims(keep == 0 || keep == 1, "partial trace: keep must be 0 or 1");
    CMatrix out = CMatrix::Zero(c, c);
    for (int i = 0; i < c; ++i)
        for (int j = 0; j < c; ++j)
            for (int t = 0; t < c; ++t)
                out(i, j) += keep == 0 ? m(i * c + t, j * c + t) : m(t * c + i, t * c + j);
    return out;
}

inline double min_eigenvalue(const CMatrix& h) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (h + h.adjoint()), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericError("eigensolve failed");
    return es.eigenvalues().minCoeff();
}

inline double max_eigenvalue(const CMatrix& h) { return -min_eigenvalue(-h); }

/// Row-major dump, one matrix row per line as re,im pairs.
inline void write_csv(const FockOperator& op, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path);
    os.precision(17);
    for (Eigen::Index i = 0; i < op.dim(); ++i) {
        for (Eigen::Index j = 0; j < op.dim(); ++j) {
            if (j) os << ',';
            os << op.matrix(i, j).real() << ',' << op.matrix(i, j).imag();
        }
        os << '\n';
    }
}

/// Binary dump: int32 cutoff, int32 modes, int64 dim, then dim² (re, im) doubles row-major.
inline void write_binary(const FockOperator& op, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path);
    const std::int32_t cutoff = op.cutoff;
    const std::int32_t modes = op.modes;
    const std::int64_t dim = op.dim();
    os.write(reinterpret_cast<const char*>(&cutoff), sizeof cutoff);
    os.write(reinterpret_cast<const char*>(&modes), sizeof modes);
    os.write(reinterpret_cast<const char*>(&dim), sizeof dim);
    for (Eigen::Index i = 0; i < op.dim(); ++i)
        for (Eigen::Index j = 0; j < op.dim(); ++j) {
            const double re = op.matrix(i, j).real();
            const double im = op.matrix(i, j).imag();
            os.write(reinterpret_cast<const char*>(&re), sizeof re);
            os.write(reinterpret_cast<const char*>(&im), sizeof im);
        }
}

}  // namespace bosonverify
