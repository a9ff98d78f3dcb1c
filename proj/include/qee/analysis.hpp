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

#include "qee/linalg.hpp"
#include "qee/state_vector.hpp"
#include "qee/types.hpp"

// Closed-form state analysis on two-qubit (target (x) probe) systems. These
// work on explicit vectors and never touch a QuantumSystem, so they serve as
// the analytic side against which protocol simulations are checked.

namespace qee {

/// Applies `u` to s (x) |blank> for each decoy state s in {|0>,|1>,|+>,|->}
/// and returns |<s s| u |s blank>|^2, the fidelity of the output with a
/// perfect clone.
inline std::array<double, 4> clone_fidelities(const Mat4& u, const Vec2& blank) {
    if (!is_unitary<4>(u, 1e-10)) {
        throw InvalidInput("clone attempt matrix is not unitary");
    }
    if (std::abs(std::norm(blank[0]) + std::norm(blank[1]) - 1.0) > 1e-10) {
        throw InvalidInput("blank state is not normalized");
    }
    std::array<double, 4> out{};
    for (std::size_t i = 0; i < 4; ++i) {
        const Vec2 s = state_vector(kDecoyStates[i]);
        const Vec4 result = apply<4>(u, kron(s, blank));
        out[i] = std::norm(inner<4>(kron(s, s), result));
    }
    return out;
}

/// Single-qubit reduced state of the second qubit of a two-qubit vector.
inline DensityMatrix second_qubit_state(const Vec4& psi) {
    DensityMatrix rho(1);
    for (std::size_t r = 0; r < 2; ++r) {
        for (std::size_t c = 0; c < 2; ++c) {
            rho.at(r, c) = psi[r] * std::conj(psi[c]) + psi[2 + r] * std::conj(psi[2 + c]);
        }
    }
    return rho;
}

/// What an entangle-and-measure probe does to the decoy alphabet.
struct ProbeProfile {
    /// Probability that measuring the target in its own basis after the probe
    /// gives the wrong value, indexed like kDecoyStates.
    std::array<double, 4> disturbance{};
    /// Detection probability for one decoy drawn uniformly from the alphabet.
    double detection_per_decoy = 0.0;
    /// Largest trace distance between the probe's conditional states for the
    /// two states of one basis (Z pair or X pair).
    double distinguishability = 0.0;
    /// Largest single-state disturbance.
    double max_disturbance = 0.0;
};

/// Profiles a probe unitary acting on target (x) probe, with the probe
/// initialised to `probe_init`.
inline ProbeProfile profile_probe(const Mat4& u, const Vec2& probe_init) {
    if (!is_unitary<4>(u, 1e-10)) {
        throw InvalidInput("probe unitary is not unitary");
    }
    ProbeProfile p;
    std::array<DensityMatrix, 4> probe_states = {DensityMatrix(1), DensityMatrix(1), DensityMatrix(1),
                                                 DensityMatrix(1)};
    for (std::size_t i = 0; i < 4; ++i) {
        const StateLabel s = kDecoyStates[i];
        const Vec4 out = apply<4>(u, kron(state_vector(s), probe_init));
        // Wrong-outcome probability: weight on the orthogonal state of the basis.
        const Vec2 wrong = state_vector(label_for(basis_of(s), static_cast<std::uint8_t>(1 - bit_of(s))));
        double err = 0.0;
        for (std::size_t e = 0; e < 2; ++e) {
            const cplx amp = std::conj(wrong[0]) * out[0 * 2 + e] + std::conj(wrong[1]) * out[1 * 2 + e];
            err += std::norm(amp);
        }
        p.disturbance[i] = err;
        p.max_disturbance = std::max(p.max_disturbance, err);
        p.detection_per_decoy += 0.25 * err;
        probe_states[i] = second_qubit_state(out);
    }
    p.distinguishability = std::max(trace_distance(probe_states[0], probe_states[1]),
                                     trace_distance(probe_states[2], probe_states[3]));
    return p;
}

}  // namespace qee
