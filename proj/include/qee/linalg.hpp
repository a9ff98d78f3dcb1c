// Copyright 2026 The qee Authors
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

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>

#include "qee/rng.hpp"
#include "qee/types.hpp"

// Small fixed-size complex linear algebra for one- and two-qubit operators.
//
// Multi-qubit matrices and vectors use textbook ordering: the first qubit is
// the most significant bit of the basis index, so |q1 q2> = |10> is index 2.

namespace qee {

using cplx = std::complex<double>;

template <std::size_t N>
using SquareMatrix = std::array<cplx, N * N>;

template <std::size_t N>
using Vector = std::array<cplx, N>;

using Mat2 = SquareMatrix<2>;
using Mat4 = SquareMatrix<4>;
using Vec2 = Vector<2>;
using Vec4 = Vector<4>;

inline constexpr double kInvSqrt2 = 0.70710678118654752440;

template <std::size_t N>
SquareMatrix<N> identity_matrix() {
    SquareMatrix<N> m{};
    for (std::size_t i = 0; i < N; ++i) {
        m[i * N + i] = 1.0;
    }
    return m;
}

template <std::size_t N>
SquareMatrix<N> multiply(const SquareMatrix<N>& a, const SquareMatrix<N>& b) {
    SquareMatrix<N> r{};
    for (std::size_t i = 0; i < N; ++i) {
        for (std::size_t k = 0; k < N; ++k) {
            const cplx aik = a[i * N + k];
            if (aik == cplx{}) {
                continue;
            }
            for (std::size_t j = 0; j < N; ++j) {
                r[i * N + j] += aik * b[k * N + j];
            }
        }
    }
    return r;
}

template <std::size_t N>
Vector<N> apply(const SquareMatrix<N>& m, const Vector<N>& v) {
    Vector<N> r{};
    for (std::size_t i = 0; i < N; ++i) {
        for (std::size_t j = 0; j < N; ++j) {
            r[i] += m[i * N + j] * v[j];
        }
    }
    return r;
}

template <std::size_t N>
SquareMatrix<N> adjoint(const SquareMatrix<N>& m) {
    SquareMatrix<N> r{};
    for (std::size_t i = 0; i < N; ++i) {
        for (std::size_t j = 0; j < N; ++j) {
            r[j * N + i] = std::conj(m[i * N + j]);
        }
    }
    return r;
}

/// Largest entry-wise deviation of U^dagger U from the identity.
template <std::size_t N>
double unitarity_error(const SquareMatrix<N>& m) {
    const auto p = multiply<N>(adjoint<N>(m), m);
    double err = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        for (std::size_t j = 0; j < N; ++j) {
            const cplx expected = (i == j) ? cplx{1.0} : cplx{};
            err = std::max(err, std::abs(p[i * N + j] - expected));
        }
    }
    return err;
}

template <std::size_t N>
bool is_unitary(const SquareMatrix<N>& m, double tol = 1e-10) {
    return unitarity_error<N>(m) <= tol;
}

template <std::size_t N>
cplx inner(const Vector<N>& a, const Vector<N>& b) {
    cplx s{};
    for (std::size_t i = 0; i < N; ++i) {
        s += std::conj(a[i]) * b[i];
    }
    return s;
}

inline Mat4 kron(const Mat2& a, const Mat2& b) {
    Mat4 r{};
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 2; ++j) {
            for (std::size_t k = 0; k < 2; ++k) {
                for (std::size_t l = 0; l < 2; ++l) {
                    r[(2 * i + k) * 4 + (2 * j + l)] = a[i * 2 + j] * b[k * 2 + l];
                }
            }
        }
    }
    return r;
}

inline Vec4 kron(const Vec2& a, const Vec2& b) {
    return {a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]};
}

namespace gates {

inline Mat2 identity() { return identity_matrix<2>(); }
inline Mat2 pauli_x() { return {0.0, 1.0, 1.0, 0.0}; }
inline Mat2 pauli_y() { return {0.0, cplx{0.0, -1.0}, cplx{0.0, 1.0}, 0.0}; }
inline Mat2 pauli_z() { return {1.0, 0.0, 0.0, -1.0}; }
/// i * sigma_y = |0><1| - |1><0|.
inline Mat2 i_pauli_y() { return {0.0, 1.0, -1.0, 0.0}; }
inline Mat2 hadamard() { return {kInvSqrt2, kInvSqrt2, kInvSqrt2, -kInvSqrt2}; }

inline Mat2 pauli(PauliCode p) {
    switch (p) {
        case PauliCode::I: return identity();
        case PauliCode::Z: return pauli_z();
        case PauliCode::X: return pauli_x();
        case PauliCode::iY: return i_pauli_y();
    }
    return identity();
}

/// Control is the first qubit, target the second.
inline Mat4 cnot() {
    Mat4 m{};
    m[0 * 4 + 0] = 1.0;
    m[1 * 4 + 1] = 1.0;
    m[2 * 4 + 3] = 1.0;
    m[3 * 4 + 2] = 1.0;
    return m;
}

}  // namespace gates

inline Vec2 state_vector(StateLabel s) {
    switch (s) {
        case StateLabel::Zero: return {1.0, 0.0};
        case StateLabel::One: return {0.0, 1.0};
        case StateLabel::Plus: return {kInvSqrt2, kInvSqrt2};
        case StateLabel::Minus: return {kInvSqrt2, -kInvSqrt2};
    }
    return {1.0, 0.0};
}

inline constexpr std::array<StateLabel, 4> kDecoyStates = {StateLabel::Zero, StateLabel::One,
                                                           StateLabel::Plus, StateLabel::Minus};

/// Two-qubit Bell state in textbook ordering.
inline Vec4 bell_vector(BellOutcome b) {
    switch (b) {
        case BellOutcome::PhiPlus: return {kInvSqrt2, 0.0, 0.0, kInvSqrt2};
        case BellOutcome::PhiMinus: return {kInvSqrt2, 0.0, 0.0, -kInvSqrt2};
        case BellOutcome::PsiPlus: return {0.0, kInvSqrt2, kInvSqrt2, 0.0};
        case BellOutcome::PsiMinus: return {0.0, kInvSqrt2, -kInvSqrt2, 0.0};
    }
    return {};
}

/// The 15 non-identity two-qubit Pauli products, in the fixed order used by
/// `pauli_rotation_product`: index 4*a + b - 1 for single-qubit Paulis
/// a, b in {I, X, Y, Z} (a acts on the first qubit).
inline Mat4 two_qubit_pauli(std::size_t index) {
    const std::array<Mat2, 4> single = {gates::identity(), gates::pauli_x(), gates::pauli_y(),
                                        gates::pauli_z()};
    const std::size_t k = index + 1;
    return kron(single[k / 4], single[k % 4]);
}

/// U = prod_k exp(-i theta_k P_k) over the 15 non-identity Pauli products.
/// Each factor is exact: exp(-i theta P) = cos(theta) I - i sin(theta) P.
inline Mat4 pauli_rotation_product(std::span<const double, 15> angles) {
    Mat4 u = identity_matrix<4>();
    for (std::size_t k = 0; k < 15; ++k) {
        if (angles[k] == 0.0) {
            continue;
        }
        const Mat4 p = two_qubit_pauli(k);
        const double c = std::cos(angles[k]);
        const cplx s{0.0, -std::sin(angles[k])};
        Mat4 factor{};
        for (std::size_t i = 0; i < 16; ++i) {
            factor[i] = s * p[i];
        }
        for (std::size_t i = 0; i < 4; ++i) {
            factor[i * 4 + i] += c;
        }
        u = multiply<4>(factor, u);
    }
    return u;
}

/// Haar-random 4x4 unitary. Gram-Schmidt on complex Gaussian columns is QR
/// with a positive real R diagonal, which makes Q exactly Haar distributed.
inline Mat4 haar_unitary4(Rng& rng) {
    std::array<Vec4, 4> cols{};
    for (auto& c : cols) {
        for (auto& x : c) {
            x = cplx{rng.normal(), rng.normal()};
        }
    }
    for (std::size_t j = 0; j < 4; ++j) {
        for (std::size_t i = 0; i < j; ++i) {
            const cplx proj = inner<4>(cols[i], cols[j]);
            for (std::size_t r = 0; r < 4; ++r) {
                cols[j][r] -= proj * cols[i][r];
            }
        }
        double norm = 0.0;
        for (const auto& x : cols[j]) {
            norm += std::norm(x);
        }
        norm = std::sqrt(norm);
        for (auto& x : cols[j]) {
            x /= norm;
        }
    }
    Mat4 u{};
    for (std::size_t r = 0; r < 4; ++r) {
        for (std::size_t c = 0; c < 4; ++c) {
            u[r * 4 + c] = cols[c][r];
        }
    }
    return u;
}

}  // namespace qee
