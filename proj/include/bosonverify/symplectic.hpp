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
#include <vector>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "bosonverify/common.hpp"
#include "bosonverify/random.hpp"

namespace bosonverify {

/// Quadratures are interleaved everywhere: (q1, p1, q2, p2, ...).
inline Matrix symplectic_form(int modes) {
    Matrix omega = Matrix::Zero(2 * modes, 2 * modes);
    for (int j = 0; j < modes; ++j) {
        omega(2 * j, 2 * j + 1) = 1.0;
        omega(2 * j + 1, 2 * j) = -1.0;
    }
    return omega;
}

/// diag(1, -1, 1, -1, ...), the Z^{⊕m} of the phase-conjugate correlations.
inline Matrix z_matrix(int modes) {
    Matrix z = Matrix::Zero(2 * modes, 2 * modes);
    for (int j = 0; j < modes; ++j) {
        z(2 * j, 2 * j) = 1.0;
        z(2 * j + 1, 2 * j + 1) = -1.0;
    }
    return z;
}

/// true iff max|S Ω Sᵀ − Ω| ≤ tol. Throws DimensionError for non-square or odd input.
inline bool validate_symplectic(const Matrix& s, double tol = 1e-9) {
    require_dims(s.rows() == s.cols(), "symplectic matrix must be square");
    require_dims(s.rows() > 0 && s.rows() % 2 == 0, "symplectic matrix must have even dimension");
    require(tol > 0.0, "tolerance must be positive");
    const Matrix omega = symplectic_form(static_cast<int>(s.rows() / 2));
    return max_abs(s * omega * s.transpose() - omega) <= tol;
}

/// Gaussian unitary target U_{S,d}: x → S x + d.
struct SymplecticSpec {
    Matrix S;
    Vector d;

    int modes() const { return static_cast<int>(S.rows() / 2); }

    /// Validating constructor.
    static SymplecticSpec make(Matrix s, Vector d, double tol = 1e-9) {
        require_dims(s.rows() == s.cols() && s.rows() % 2 == 0 && s.rows() > 0,
                     "symplectic matrix must be square with even dimension");
        require_dims(d.size() == s.rows(), "displacement length must equal 2m");
        if (!validate_symplectic(s, tol)) throw InvariantError("matrix is not symplectic within tolerance");
        return SymplecticSpec{std::move(s), std::move(d)};
    }

    static SymplecticSpec identity(int modes) {
        return SymplecticSpec{Matrix::Identity(2 * modes, 2 * modes), Vector::Zero(2 * modes)};
    }
};

inline SymplecticSpec displacement(const Vector& d) {
    return SymplecticSpec{Matrix::Identity(d.size(), d.size()), d};
}

/// [[coshθ 𝟙, sinhθ Z], [sinhθ Z, coshθ 𝟙]] on modes (1, 2).
inline SymplecticSpec two_mode_squeezer(double theta) {
    const double c = std::cosh(theta);
    const double s = std::sinh(theta);
    Matrix m = Matrix::Zero(4, 4);
    m.topLeftCorner(2, 2) = c * Matrix::Identity(2, 2);
    m.bottomRightCorner(2, 2) = c * Matrix::Identity(2, 2);
    m.topRightCorner(2, 2) = s * z_matrix(1);
    m.bottomLeftCorner(2, 2) = s * z_matrix(1);
    return SymplecticSpec{m, Vector::Zero(4)};
}

/// diag(e^{-r}, e^{r}): squeezes q for r > 0.
inline SymplecticSpec single_mode_squeezer(double r) {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = std::exp(-r);
    m(1, 1) = std::exp(r);
    return SymplecticSpec{m, Vector::Zero(2)};
}

/// Phase rotation by phi: the Schrödinger action of e^{-iφn̂}, α → α e^{-iφ}.
inline SymplecticSpec phase_rotation(double phi) {
    Matrix m(2, 2);
    m << std::cos(phi), std::sin(phi), -std::sin(phi), std::cos(phi);
    return SymplecticSpec{m, Vector::Zero(2)};
}

/// Largest singular value; equals e^{r_max} for symplectic S.
inline double spectral_norm(const Matrix& s) {
    Eigen::JacobiSVD<Matrix> svd(s);
    return svd.singularValues()(0);
}

inline double spectral_norm(const SymplecticSpec& spec) { return spectral_norm(spec.S); }

/// Apply b, then a.
inline SymplecticSpec compose(const SymplecticSpec& a, const SymplecticSpec& b) {
    require_dims(a.S.rows() == b.S.rows(), "compose: mode counts differ");
    return SymplecticSpec{a.S * b.S, a.S * b.d + a.d};
}

/// Symplectic inverse S⁻¹ = -Ω Sᵀ Ω, exact up to rounding for valid input.
inline SymplecticSpec inverse(const SymplecticSpec& a) {
    const Matrix omega = symplectic_form(a.modes());
    const Matrix sinv = -omega * a.S.transpose() * omega;
    return SymplecticSpec{sinv, -sinv * a.d};
}

inline SymplecticSpec direct_sum(const SymplecticSpec& a, const SymplecticSpec& b) {
    const auto na = a.S.rows();
    const auto nb = b.S.rows();
    Matrix s = Matrix::Zero(na + nb, na + nb);
    s.topLeftCorner(na, na) = a.S;
    s.bottomRightCorner(nb, nb) = b.S;
    Vector d(na + nb);
    d << a.d, b.d;
    return SymplecticSpec{s, d};
}

/// Embed a k-mode spec into an N-mode register acting on `subset` (spec mode i → register mode subset[i]).
inline Matrix embed_phase_space(const Matrix& block, const std::vector<int>& subset, int total_modes,
                                bool identity_elsewhere) {
    require_dims(block.rows() == 2 * static_cast<Eigen::Index>(subset.size()) && block.cols() == block.rows(),
                 "embed: block size does not match subset");
    Matrix out = Matrix::Zero(2 * total_modes, 2 * total_modes);
    if (identity_elsewhere) out.setIdentity();
    for (std::size_t i = 0; i < subset.size(); ++i) {
        for (std::size_t j = 0; j < subset.size(); ++j) {
            out.block<2, 2>(2 * subset[i], 2 * subset[j]) = block.block<2, 2>(2 * i, 2 * j);
        }
    }
    return out;
}

/// Haar-random passive (orthogonal-symplectic) transformation on m modes.
inline Matrix random_passive(int modes, CounterRng& rng) {
    CMatrix z(modes, modes);
    for (int i = 0; i < modes; ++i)
        for (int j = 0; j < modes; ++j) {
            const double re = rng.normal();
            z(i, j) = Complex(re, rng.normal()) / std::sqrt(2.0);
        }
    Eigen::HouseholderQR<CMatrix> qr(z);
    CMatrix q = qr.householderQ();
    const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < modes; ++j) {
        const Complex rjj = r(j, j);
        if (std::abs(rjj) > 0) q.col(j) *= rjj / std::abs(rjj);
    }
    // xxpp block form [[X, -Y], [Y, X]] re-indexed to interleaved order.
    Matrix o = Matrix::Zero(2 * modes, 2 * modes);
    for (int i = 0; i < modes; ++i) {
        for (int j = 0; j < modes; ++j) {
            const double x = q(i, j).real();
            const double y = q(i, j).imag();
            o(2 * i, 2 * j) = x;
            o(2 * i, 2 * j + 1) = -y;
            o(2 * i + 1, 2 * j) = y;
            o(2 * i + 1, 2 * j + 1) = x;
        }
    }
    return o;
}

/// Random symplectic via the Euler (Bloch-Messiah) form O₁ · diag(e^{∓r}) · O₂,
/// with every single-mode squeezing r_j ∈ [0, max_squeezing]. Hence ‖S‖∞ ≤ e^{max_squeezing}.
inline SymplecticSpec random_symplectic(int modes, double max_squeezing, double max_displacement, CounterRng& rng) {
    auto ur = [&] { return max_squeezing * rng.uniform(); };
    auto ud = [&] { return max_displacement * (2.0 * rng.uniform() - 1.0); };
    Matrix sq = Matrix::Zero(2 * modes, 2 * modes);
    for (int j = 0; j < modes; ++j) {
        const double r = ur();
        sq(2 * j, 2 * j) = std::exp(-r);
        sq(2 * j + 1, 2 * j + 1) = std::exp(r);
    }
    const Matrix s = random_passive(modes, rng) * sq * random_passive(modes, rng);
    Vector d(2 * modes);
    for (int i = 0; i < 2 * modes; ++i) d(i) = ud();
    return SymplecticSpec{s, d};
}

}  // namespace bosonverify
